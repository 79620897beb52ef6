/* Copyright 2026 The adgraph Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Straight-line expression language.
//
//   program   = { sep } [ item { sep { sep } item } ] { sep } ;
//   item      = statement | expr ;          (* bare expr: last item only *)
//   statement = ident ":=" expr ;
//   expr      = term { ("+" | "-") term } ;
//   term      = unary { ("*" | "/") unary } ;
//   unary     = "-" unary | power ;
//   power     = atom [ "^" unary ] ;         (* right associative *)
//   atom      = number | ident | func "(" expr ")" | "(" expr ")" ;
//   func      = "ln" | "sin" | "cos" | "exp" ;
//   ident     = letter { letter | digit | "_" } ;
//   sep       = newline | ";" ;
//
// Newlines inside parentheses are ignored; '#' starts a comment. A program
// made of statements outputs every target in order. A final bare
// expression instead becomes the single output, named "y".

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"

namespace adgraph {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;

  friend constexpr bool operator==(SourcePos, SourcePos) = default;
};

class SourceError : public Error {
 public:
  enum class Kind { kLex, kSyntax, kScope };

  SourceError(Kind kind, SourcePos pos, std::string message)
      : Error(format(kind, pos, message)),
        kind_(kind),
        pos_(pos),
        message_(std::move(message)) {}

  Kind kind() const { return kind_; }
  SourcePos position() const { return pos_; }
  const std::string& message() const { return message_; }

 private:
  static std::string format(Kind kind, SourcePos pos, const std::string& msg) {
    const char* k = kind == Kind::kLex      ? "lexical"
                    : kind == Kind::kSyntax ? "syntax"
                                            : "scope";
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
           k + " error: " + msg;
  }

  Kind kind_;
  SourcePos pos_;
  std::string message_;
};

// Expression tree. `op` reuses the graph op tags: Const carries `literal`,
// Var carries `name` (a free variable or an earlier target), the rest carry
// their operands in `args`.
struct Expr {
  OpKind op = OpKind::constant(0.0);
  std::vector<Expr> args;
  SourcePos pos;

  // Structural equality; source positions are ignored.
  friend bool operator==(const Expr& a, const Expr& b) {
    return a.op == b.op && a.args == b.args;
  }
};

struct Statement {
  std::string target;
  Expr value;
  SourcePos pos;

  friend bool operator==(const Statement& a, const Statement& b) {
    return a.target == b.target && a.value == b.value;
  }
};

struct Program {
  std::vector<Statement> statements;
  std::vector<std::string> free_variables;  // first-use order
  std::vector<std::string> outputs;

  bool implicit_output() const {
    return statements.size() != outputs.size();
  }

  friend bool operator==(const Program&, const Program&) = default;
};

inline constexpr std::string_view kImplicitOutput = "y";

namespace detail {

enum class Tok {
  kNumber,
  kIdent,
  kPlus,
  kMinus,
  kStar,
  kSlash,
  kCaret,
  kLParen,
  kRParen,
  kAssign,
  kSep,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

inline std::optional<OpTag> function_tag(std::string_view name) {
  if (name == "ln") return OpTag::kLn;
  if (name == "sin") return OpTag::kSin;
  if (name == "cos") return OpTag::kCos;
  if (name == "exp") return OpTag::kExp;
  return std::nullopt;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    int depth = 0;
    while (i_ < src_.size()) {
      char c = src_[i_];
      SourcePos pos{line_, col_};
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
        continue;
      }
      if (c == '\n') {
        if (depth == 0) out.push_back({Tok::kSep, "newline", 0.0, pos});
        advance();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        out.push_back(number(pos));
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t start = i_;
        while (i_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                src_[i_] == '_')) {
          advance();
        }
        out.push_back({Tok::kIdent, std::string(src_.substr(start, i_ - start)),
                       0.0, pos});
        continue;
      }
      Tok kind;
      switch (c) {
        case '+': kind = Tok::kPlus; break;
        case '-': kind = Tok::kMinus; break;
        case '*': kind = Tok::kStar; break;
        case '/': kind = Tok::kSlash; break;
        case '^': kind = Tok::kCaret; break;
        case '(': kind = Tok::kLParen; ++depth; break;
        case ')': kind = Tok::kRParen; depth = depth > 0 ? depth - 1 : 0; break;
        case ';': kind = Tok::kSep; break;
        case ':':
          if (i_ + 1 < src_.size() && src_[i_ + 1] == '=') {
            advance();
            advance();
            out.push_back({Tok::kAssign, ":=", 0.0, pos});
            continue;
          }
          throw SourceError(SourceError::Kind::kLex, pos, "expected ':='");
        case '_':
          throw SourceError(SourceError::Kind::kLex, pos,
                            "identifiers must start with a letter; names "
                            "beginning with '_' are reserved");
        default:
          throw SourceError(SourceError::Kind::kLex, pos,
                            std::string("unexpected character '") + c + "'");
      }
      out.push_back({kind, std::string(1, c), 0.0, pos});
      advance();
    }
    out.push_back({Tok::kEnd, "end of input", 0.0, end_pos()});
    return out;
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  bool digit_at(std::size_t k) const {
    return k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]));
  }

  // Position of the last character, so errors at end of input still point
  // inside the text.
  SourcePos end_pos() const {
    SourcePos p{1, 1};
    SourcePos last{1, 1};
    for (std::size_t k = 0; k < src_.size(); ++k) {
      last = p;
      if (src_[k] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return last;
  }

  Token number(SourcePos pos) {
    std::size_t start = i_;
    bool digits = false;
    while (digit_at(i_)) {
      advance();
      digits = true;
    }
    if (i_ < src_.size() && src_[i_] == '.') {
      advance();
      while (digit_at(i_)) {
        advance();
        digits = true;
      }
    }
    if (!digits) {
      throw SourceError(SourceError::Kind::kLex, pos, "malformed number");
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t k = i_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (digit_at(k)) {
        while (i_ < k) advance();
        while (digit_at(i_)) advance();
      }
    }
    std::string_view text = src_.substr(start, i_ - start);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
        !std::isfinite(v)) {
      throw SourceError(SourceError::Kind::kLex, pos,
                        "number '" + std::string(text) + "' is out of range");
    }
    return {Tok::kNumber, std::string(text), v, pos};
  }

  std::string_view src_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program run() {
    Program prog;
    skip_seps();
    bool bare_seen = false;
    while (peek().kind != Tok::kEnd) {
      if (bare_seen) {
        throw syntax(peek(), "only the last line may be a bare expression");
      }
      if (peek().kind == Tok::kIdent && peek(1).kind == Tok::kAssign) {
        const Token& target = take();
        if (function_tag(target.text)) {
          throw syntax(target, "'" + target.text +
                                   "' is a function name and cannot be assigned");
        }
        take();  // :=
        Expr value = expression();
        prog.statements.push_back({target.text, std::move(value), target.pos});
        prog.outputs.push_back(target.text);
      } else {
        SourcePos pos = peek().pos;
        Expr value = expression();
        prog.statements.push_back(
            {std::string(kImplicitOutput), std::move(value), pos});
        bare_seen = true;
      }
      end_of_item();
    }
    if (prog.statements.empty()) {
      throw syntax(peek(), "empty program");
    }
    if (bare_seen) prog.outputs = {std::string(kImplicitOutput)};
    resolve_scopes(prog, bare_seen);
    return prog;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(k_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = toks_[k_];
    if (k_ + 1 < toks_.size()) ++k_;
    return t;
  }
  void skip_seps() {
    while (peek().kind == Tok::kSep) take();
  }

  static SourceError syntax(const Token& at, const std::string& msg) {
    return SourceError(SourceError::Kind::kSyntax, at.pos, msg);
  }

  static bool starts_atom(Tok k) {
    return k == Tok::kNumber || k == Tok::kIdent || k == Tok::kLParen;
  }

  void end_of_item() {
    const Token& t = peek();
    if (t.kind == Tok::kEnd) return;
    if (t.kind == Tok::kSep) {
      skip_seps();
      return;
    }
    if (starts_atom(t.kind)) implicit_multiplication(t);
    if (t.kind == Tok::kAssign) {
      throw syntax(t, "':=' must follow a plain name at the start of a statement");
    }
    throw syntax(t, "unexpected '" + t.text + "' after expression");
  }

  [[noreturn]] void implicit_multiplication(const Token& t) {
    const Token& prev = toks_[k_ > 0 ? k_ - 1 : 0];
    throw syntax(t, "implicit multiplication is not supported; write '" +
                        prev.text + "*" + t.text + "'");
  }

  Expr expression() {
    Expr lhs = term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const Token& op = take();
      Expr rhs = term();
      lhs = binary(op.kind == Tok::kPlus ? OpTag::kAdd : OpTag::kSub,
                   std::move(lhs), std::move(rhs), op.pos);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = unary();
    while (true) {
      Tok k = peek().kind;
      if (k == Tok::kStar || k == Tok::kSlash) {
        const Token& op = take();
        Expr rhs = unary();
        lhs = binary(k == Tok::kStar ? OpTag::kMul : OpTag::kDiv,
                     std::move(lhs), std::move(rhs), op.pos);
      } else if (starts_atom(k)) {
        implicit_multiplication(peek());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (peek().kind == Tok::kMinus) {
      const Token& op = take();
      Expr operand = unary();
      Expr e{OpTag::kNeg, {}, op.pos};
      e.args.push_back(std::move(operand));
      return e;
    }
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (peek().kind == Tok::kCaret) {
      const Token& op = take();
      Expr exponent = unary();
      return binary(OpTag::kPow, std::move(base), std::move(exponent), op.pos);
    }
    return base;
  }

  Expr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber: {
        take();
        return Expr{OpKind::constant(t.number), {}, t.pos};
      }
      case Tok::kIdent: {
        take();
        if (auto fn = function_tag(t.text)) {
          if (peek().kind != Tok::kLParen) {
            throw syntax(peek(), "expected '(' after function '" + t.text + "'");
          }
          take();
          Expr arg = expression();
          expect_rparen();
          Expr e{*fn, {}, t.pos};
          e.args.push_back(std::move(arg));
          return e;
        }
        if (peek().kind == Tok::kLParen) {
          throw syntax(t, "unknown function '" + t.text + "'");
        }
        return Expr{OpKind::var(t.text), {}, t.pos};
      }
      case Tok::kLParen: {
        take();
        Expr inner = expression();
        expect_rparen();
        return inner;
      }
      case Tok::kEnd:
        throw syntax(t, "expected an expression before end of input");
      case Tok::kSep:
        throw syntax(t, "expected an expression before end of line");
      default:
        throw syntax(t, "expected an expression, found '" + t.text + "'");
    }
  }

  void expect_rparen() {
    if (peek().kind != Tok::kRParen) {
      throw syntax(peek(), "expected ')', found '" + peek().text + "'");
    }
    take();
  }

  static Expr binary(OpTag tag, Expr lhs, Expr rhs, SourcePos pos) {
    Expr e{tag, {}, pos};
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
  }

  static void resolve_scopes(Program& prog, bool implicit) {
    std::map<std::string, std::size_t, std::less<>> assigned_at;
    for (std::size_t s = 0; s < prog.statements.size(); ++s) {
      const Statement& st = prog.statements[s];
      auto [it, fresh] = assigned_at.emplace(st.target, s);
      if (!fresh) {
        bool synthetic = implicit && s + 1 == prog.statements.size();
        throw SourceError(
            SourceError::Kind::kScope, st.pos,
            synthetic ? "the implicit output 'y' is already assigned"
                      : "'" + st.target + "' is assigned more than once");
      }
    }
    std::set<std::string, std::less<>> seen_free;
    for (std::size_t s = 0; s < prog.statements.size(); ++s) {
      visit_names(prog.statements[s].value, [&](const Expr& ref) {
        const std::string& name = ref.op.name();
        auto it = assigned_at.find(name);
        if (it != assigned_at.end()) {
          if (it->second >= s) {
            throw SourceError(SourceError::Kind::kScope, ref.pos,
                              "'" + name + "' is used before it is assigned");
          }
          return;
        }
        if (seen_free.insert(name).second) prog.free_variables.push_back(name);
      });
    }
  }

  template <class F>
  static void visit_names(const Expr& e, F&& f) {
    if (e.op.is_var()) f(e);
    for (const Expr& a : e.args) visit_names(a, f);
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

inline int precedence(const Expr& e) {
  switch (e.op.tag()) {
    case OpTag::kAdd:
    case OpTag::kSub:
      return 1;
    case OpTag::kMul:
    case OpTag::kDiv:
      return 2;
    case OpTag::kNeg:
      return 3;
    case OpTag::kPow:
      return 4;
    default:
      return 5;
  }
}

inline void render_expr(const Expr& e, int min_prec, std::string& out) {
  const int p = precedence(e);
  const bool wrap = p < min_prec;
  if (wrap) out += '(';
  switch (e.op.tag()) {
    case OpTag::kConst:
      out += shortest(e.op.literal());
      break;
    case OpTag::kVar:
      out += e.op.name();
      break;
    case OpTag::kNeg:
      out += '-';
      render_expr(e.args[0], 3, out);
      break;
    case OpTag::kLn:
    case OpTag::kSin:
    case OpTag::kCos:
    case OpTag::kExp:
      out += tag_symbol(e.op.tag());
      out += '(';
      render_expr(e.args[0], 0, out);
      out += ')';
      break;
    case OpTag::kPow:
      render_expr(e.args[0], 5, out);
      out += '^';
      render_expr(e.args[1], 3, out);
      break;
    case OpTag::kAdd:
    case OpTag::kSub:
      render_expr(e.args[0], p, out);
      out += e.op.tag() == OpTag::kAdd ? " + " : " - ";
      render_expr(e.args[1], p + 1, out);
      break;
    case OpTag::kMul:
    case OpTag::kDiv:
      render_expr(e.args[0], p, out);
      out += e.op.tag() == OpTag::kMul ? '*' : '/';
      render_expr(e.args[1], p + 1, out);
      break;
  }
  if (wrap) out += ')';
}

}  // namespace detail

inline Program parse(std::string_view source) {
  return detail::Parser(detail::Lexer(source).run()).run();
}

inline std::string render(const Expr& e) {
  std::string out;
  detail::render_expr(e, 0, out);
  return out;
}

// Canonical source text; parse(render(p)) == p.
inline std::string render(const Program& prog) {
  std::string out;
  for (std::size_t s = 0; s < prog.statements.size(); ++s) {
    const Statement& st = prog.statements[s];
    bool bare = prog.implicit_output() && s + 1 == prog.statements.size();
    if (!bare) out += st.target + " := ";
    out += render(st.value);
    out += '\n';
  }
  return out;
}

// Identifier <-> node mapping produced by lowering. A node may carry
// several names (`z := x` aliases x); `label` keeps the first.
struct NameMap {
  std::map<std::string, NodeId, std::less<>> ids;
  std::map<NodeId, std::string> labels;

  std::optional<NodeId> id(std::string_view name) const {
    auto it = ids.find(name);
    if (it == ids.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::string> label(NodeId id) const {
    auto it = labels.find(id);
    if (it == labels.end()) return std::nullopt;
    return it->second;
  }
};

struct LoweredProgram {
  Graph graph;
  NameMap names;
  std::vector<std::string> output_names;
};

namespace detail {

// New position of every node when nodes are ordered by dataflow wave: a
// node's wave is one past the latest wave among its inputs, and ties keep
// their original order. The result is still topological.
inline std::vector<NodeId> wave_order(const std::vector<Node>& nodes) {
  std::vector<std::size_t> wave(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId in : nodes[i].inputs) wave[i] = std::max(wave[i], wave[in.index] + 1);
  }
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return wave[a] < wave[b]; });
  std::vector<NodeId> remap(nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) remap[order[k]] = NodeId{k};
  return remap;
}

}  // namespace detail

// One graph node per source operation, no sharing of equal subexpressions.
// Free variables become the first nodes, in first-use order; the rest are
// numbered wave by wave, so ids follow the order a synchronous dataflow
// machine would fire them.
inline LoweredProgram lower(const Program& prog) {
  GraphBuilder b;
  NameMap names;
  auto name_node = [&](const std::string& name, NodeId id) {
    names.ids.emplace(name, id);
    names.labels.emplace(id, name);
  };
  for (const std::string& v : prog.free_variables) name_node(v, b.variable(v));

  auto emit = [&](auto& self, const Expr& e) -> NodeId {
    switch (e.op.tag()) {
      case OpTag::kConst:
        return b.constant(e.op.literal());
      case OpTag::kVar: {
        auto id = names.id(e.op.name());
        if (!id) throw ContractError("unresolved name '" + e.op.name() + "'");
        return *id;
      }
      default: {
        std::vector<NodeId> inputs;
        for (const Expr& a : e.args) inputs.push_back(self(self, a));
        return b.add(e.op, std::move(inputs));
      }
    }
  };
  for (const Statement& st : prog.statements) {
    name_node(st.target, emit(emit, st.value));
  }

  std::vector<Node> built;
  for (std::size_t i = 0; i < b.size(); ++i) built.push_back(b.node(NodeId{i}));
  const std::vector<NodeId> remap = detail::wave_order(built);
  std::vector<std::size_t> original(built.size());
  for (std::size_t i = 0; i < built.size(); ++i) original[remap[i].index] = i;
  std::vector<Node> nodes;
  nodes.reserve(built.size());
  for (std::size_t k : original) {
    Node node = std::move(built[k]);
    for (NodeId& in : node.inputs) in = remap[in.index];
    nodes.push_back(std::move(node));
  }

  LoweredProgram out;
  for (const auto& [name, id] : names.ids) out.names.ids.emplace(name, remap[id.index]);
  for (const auto& [id, name] : names.labels) out.names.labels.emplace(remap[id.index], name);
  std::vector<NodeId> outputs;
  for (const std::string& o : prog.outputs) outputs.push_back(*out.names.id(o));
  out.output_names = prog.outputs;
  out.graph = Graph::from_parts(std::move(nodes), std::move(outputs),
                                prog.implicit_output() ? Liveness::kAllowDead
                                                       : Liveness::kRequireReachable);
  require_valid(out.graph);
  return out;
}

inline LoweredProgram compile_source(std::string_view source) {
  return lower(parse(source));
}

}  // namespace adgraph

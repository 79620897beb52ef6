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

// `adgraph v1` text format. ASCII, one record per line, '\n' terminated:
//
//   adgraph v1
//   <id> <TAG> [<literal> | <name>] [<input id> ...]
//   ...
//   outputs <id> ...
//   grad <name> <id>            (adjoint programs only, one per variable)
//
// Ids are decimal and must run 0, 1, 2, ... in file order. CONST carries a
// literal in shortest round-trip decimal form, VAR carries a name. Fields
// are separated by one space. Readers also accept blank lines, runs of
// whitespace, and '#' comments; the writer never emits them.

#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adgraph/adjoint.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/parser.hpp"

namespace adgraph {

inline constexpr std::string_view kFormatHeader = "adgraph v1";

namespace detail {

inline void write_nodes(const Graph& graph, std::string& out) {
  out += kFormatHeader;
  out += '\n';
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Node& node = graph.nodes()[i];
    out += std::to_string(i);
    out += ' ';
    out += tag_name(node.op.tag());
    if (node.op.is_const()) {
      out += ' ';
      out += shortest(node.op.literal());
    } else if (node.op.is_var()) {
      out += ' ';
      out += node.op.name();
    }
    for (NodeId in : node.inputs) {
      out += ' ';
      out += std::to_string(in.index);
    }
    out += '\n';
  }
  out += "outputs";
  for (NodeId o : graph.outputs()) {
    out += ' ';
    out += std::to_string(o.index);
  }
  out += '\n';
}

// Whitespace-separated fields, with any '#' comment removed.
inline std::vector<std::string_view> fields(std::string_view line) {
  line = line.substr(0, line.find('#'));
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::size_t parse_id(std::string_view text, std::size_t line) {
  std::size_t v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw FormatError("malformed id '" + std::string(text) + "'", line);
  }
  return v;
}

inline bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

struct ParsedFile {
  Graph graph;
  std::vector<std::pair<std::string, NodeId>> gradients;
};

inline ParsedFile read(std::string_view text) {
  std::vector<Node> nodes;
  std::vector<NodeId> outputs;
  bool have_header = false;
  bool have_outputs = false;
  ParsedFile out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;

    std::vector<std::string_view> f = fields(line);
    if (f.empty()) continue;

    if (!have_header) {
      if (f.size() == 2 && f[0] == "adgraph") {
        if (f[1] != "v1") {
          throw FormatError("unsupported format version '" + std::string(f[1]) + "'",
                            line_no);
        }
        have_header = true;
        continue;
      }
      throw FormatError("expected header 'adgraph v1'", line_no);
    }

    if (f[0] == "outputs") {
      if (have_outputs) throw FormatError("duplicate outputs line", line_no);
      have_outputs = true;
      for (std::size_t k = 1; k < f.size(); ++k) {
        std::size_t id = parse_id(f[k], line_no);
        if (id >= nodes.size()) {
          throw FormatError("dangling output id " + std::to_string(id), line_no);
        }
        outputs.push_back(NodeId{id});
      }
      if (outputs.empty()) throw FormatError("no outputs", line_no);
      continue;
    }

    if (f[0] == "grad") {
      if (!have_outputs) throw FormatError("grad line before outputs", line_no);
      if (f.size() != 3 || !valid_name(f[1])) {
        throw FormatError("expected 'grad <name> <id>'", line_no);
      }
      std::size_t id = parse_id(f[2], line_no);
      bool is_output = false;
      for (NodeId o : outputs) is_output = is_output || o.index == id;
      if (!is_output) {
        throw FormatError("grad id " + std::to_string(id) + " is not an output",
                          line_no);
      }
      out.gradients.emplace_back(std::string(f[1]), NodeId{id});
      continue;
    }

    if (have_outputs) throw FormatError("node line after outputs", line_no);
    std::size_t id = parse_id(f[0], line_no);
    if (id != nodes.size()) {
      throw FormatError("expected node id " + std::to_string(nodes.size()) +
                            ", found " + std::to_string(id),
                        line_no);
    }
    if (f.size() < 2) throw FormatError("missing op tag", line_no);
    auto tag = tag_from_name(f[1]);
    if (!tag) throw FormatError("unknown op tag '" + std::string(f[1]) + "'", line_no);

    std::size_t next = 2;
    OpKind op = OpKind::constant(0.0);
    if (*tag == OpTag::kConst) {
      if (f.size() < 3) throw FormatError("CONST needs a literal", line_no);
      double v = 0.0;
      auto res = std::from_chars(f[2].data(), f[2].data() + f[2].size(), v);
      if (res.ec != std::errc{} || res.ptr != f[2].data() + f[2].size() ||
          !std::isfinite(v)) {
        throw FormatError("malformed literal '" + std::string(f[2]) + "'", line_no);
      }
      op = OpKind::constant(v);
      next = 3;
    } else if (*tag == OpTag::kVar) {
      if (f.size() < 3 || !valid_name(f[2])) {
        throw FormatError("VAR needs a name", line_no);
      }
      for (const Node& n : nodes) {
        if (n.op.is_var() && n.op.name() == f[2]) {
          throw FormatError("duplicate variable '" + std::string(f[2]) + "'", line_no);
        }
      }
      op = OpKind::var(std::string(f[2]));
      next = 3;
    } else {
      op = OpKind(*tag);
    }

    std::vector<NodeId> inputs;
    for (std::size_t k = next; k < f.size(); ++k) {
      std::size_t in = parse_id(f[k], line_no);
      if (in >= id) {
        throw FormatError("dangling input id " + std::to_string(in), line_no);
      }
      inputs.push_back(NodeId{in});
    }
    if (inputs.size() != op.arity()) {
      throw FormatError(std::string(tag_name(*tag)) + " expects " +
                            std::to_string(op.arity()) + " inputs, found " +
                            std::to_string(inputs.size()),
                        line_no);
    }
    nodes.push_back(Node{std::move(op), std::move(inputs)});
  }
  if (!have_header) throw FormatError("expected header 'adgraph v1'", line_no + 1);
  if (!have_outputs) throw FormatError("no outputs", line_no + 1);
  out.graph = Graph::from_parts(std::move(nodes), std::move(outputs));
  std::vector<Violation> v = validate(out.graph);
  if (!v.empty()) throw FormatError(describe(v), line_no);
  return out;
}

}  // namespace detail

inline std::string serialize(const Graph& graph) {
  require_valid(graph);
  std::string out;
  detail::write_nodes(graph, out);
  return out;
}

inline std::string serialize(const AdjointProgram& prog) {
  require_valid(prog.combined);
  std::string out;
  detail::write_nodes(prog.combined, out);
  for (const auto& [name, id] : prog.gradient_outputs) {
    out += "grad " + name + " " + std::to_string(id.index) + "\n";
  }
  return out;
}

inline Graph deserialize(std::string_view text) { return detail::read(text).graph; }

// True when the text carries gradient annotations.
inline bool is_adjoint_file(std::string_view text) {
  detail::ParsedFile file = detail::read(text);
  if (!file.gradients.empty()) return true;
  for (NodeId v : file.graph.variables()) {
    if (file.graph.node(v).op.name().starts_with(kSeedName)) return true;
  }
  return false;
}

// Rebuilds an AdjointProgram from a file written by serialize(AdjointProgram).
// Outputs are the primal outputs followed by one entry per `grad` line; seed
// variables are the VAR nodes whose names start with "__seed".
inline AdjointProgram deserialize_adjoint(std::string_view text) {
  detail::ParsedFile file = detail::read(text);
  AdjointProgram prog;
  const auto outputs = file.graph.outputs();
  if (file.gradients.size() >= outputs.size()) {
    throw FormatError("adjoint file has no primal output", 0);
  }
  const std::size_t n_primal = outputs.size() - file.gradients.size();
  prog.primal_outputs.assign(outputs.begin(), outputs.begin() + n_primal);
  for (NodeId v : file.graph.variables()) {
    if (file.graph.node(v).op.name().starts_with(kSeedName)) {
      prog.seed_nodes.push_back(v);
    }
  }
  if (prog.seed_nodes.size() != n_primal) {
    throw FormatError("expected " + std::to_string(n_primal) +
                          " seed variables, found " +
                          std::to_string(prog.seed_nodes.size()),
                      0);
  }
  prog.primal_size = prog.seed_nodes.front().index;
  prog.gradient_outputs = std::move(file.gradients);
  prog.combined = std::move(file.graph);
  return prog;
}

}  // namespace adgraph

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

// Command-line driver. Kept in a header so the tests can run it in-process
// against string streams.
//
// Exit codes: 0 success, 1 usage error, 2 parse error (DSL or graph file),
// 3 evaluation or domain error, 4 gradcheck failure. On any failure the
// message goes to the error stream and nothing is written to the output
// stream.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adgraph/adgraph.hpp"

namespace adgraph::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kEval = 3,
  kCheckFailed = 4,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

inline std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Bindings parse_bindings(const std::vector<std::string>& binds) {
  Bindings out;
  for (const std::string& b : binds) {
    const auto eq = b.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw UsageError("--bind expects name=value, got '" + b + "'");
    }
    const std::string name = b.substr(0, eq);
    const std::string text = b.substr(eq + 1);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw UsageError("--bind " + name + ": '" + text + "' is not a finite number");
    }
    out[name] = v;
  }
  return out;
}

inline bool looks_like_graph_file(const std::string& text) {
  std::istringstream in(text);
  std::string first;
  in >> first;
  return first == "adgraph";
}

// Narrows a lowered program to one output, by name if given.
inline std::size_t pick_output(const LoweredProgram& lp, const std::string& name,
                               const char* command) {
  if (!name.empty()) {
    for (std::size_t k = 0; k < lp.output_names.size(); ++k) {
      if (lp.output_names[k] == name) return k;
    }
    throw UsageError("no output named '" + name + "'");
  }
  if (lp.output_names.size() != 1) {
    std::string list;
    for (const std::string& n : lp.output_names) list += " " + n;
    throw UsageError(std::string(command) + " needs a single output; choose one with --output (outputs:" +
                     list + ")");
  }
  return 0;
}

inline Graph single_output_graph(const LoweredProgram& lp, std::size_t k) {
  return lp.graph.outputs().size() == 1 ? lp.graph : select_output(lp.graph, k);
}

inline void print_gradient(std::string& out, double value, const Gradient& g,
                           const Graph& graph, int decimals) {
  out += "value " + format_number(value, decimals) + "\n";
  for (NodeId v : graph.variables()) {
    const std::string& name = graph.node(v).op.name();
    if (name.starts_with(kSeedName)) continue;
    out += name + " " + format_number(g.at(name), decimals) + "\n";
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out_stream,
               std::ostream& err_stream) {
  CLI::App app{"Scalar automatic differentiation over dataflow graphs", "adgraph"};
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> binds;
  int decimals = -1;
  std::string output_name;

  auto add_common = [&](CLI::App* sub, bool with_binds) {
    sub->add_option("file", file, "Program source (.adg) or '-' for stdin")->required();
    if (with_binds) {
      sub->add_option("--bind", binds, "Variable binding name=value (repeatable)");
      sub->add_option("--decimals", decimals, "Fixed decimals instead of shortest round-trip");
    }
  };

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a program");
  add_common(eval_cmd, true);

  std::string mode = "tape";
  auto* grad_cmd = app.add_subcommand("grad", "Differentiate a program");
  add_common(grad_cmd, true);
  grad_cmd->add_option("--mode", mode, "tape | forward | adjoint")
      ->check(CLI::IsMember({"tape", "forward", "adjoint"}));
  grad_cmd->add_option("--output", output_name, "Output to differentiate");

  auto* trace_cmd = app.add_subcommand("trace", "Print the reverse-mode evaluation trace");
  add_common(trace_cmd, true);

  bool dot_adjoint = false;
  auto* dot_cmd = app.add_subcommand("dot", "Export the graph as Graphviz DOT");
  add_common(dot_cmd, false);
  dot_cmd->add_flag("--adjoint", dot_adjoint, "Export the combined primal+adjoint graph");
  dot_cmd->add_option("--output", output_name, "Output to differentiate (with --adjoint)");

  std::string out_path;
  bool fold = false;
  bool compile_adjoint = false;
  auto* compile_cmd = app.add_subcommand("compile", "Write an adgraph v1 graph file");
  add_common(compile_cmd, false);
  compile_cmd->add_option("-o", out_path, "Destination graph file")->required();
  compile_cmd->add_flag("--fold", fold, "Constant-fold and drop dead nodes");
  compile_cmd->add_flag("--adjoint", compile_adjoint, "Include the adjoint program");
  compile_cmd->add_option("--output", output_name, "Output to differentiate (with --adjoint)");

  double seed = 1.0;
  auto* run_cmd = app.add_subcommand("run", "Evaluate an adgraph v1 graph file");
  add_common(run_cmd, true);
  run_cmd->add_option("--seed", seed, "Seed for adjoint files");

  double step = 1e-6;
  double tol = 1e-5;
  auto* check_cmd = app.add_subcommand("gradcheck", "Compare the gradient with central differences");
  check_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  add_common(check_cmd, true);
  check_cmd->add_option("--h", step, "Finite-difference step");
  check_cmd->add_option("--tol", tol, "Relative error tolerance");
  check_cmd->add_option("--output", output_name, "Output to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out_stream << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err_stream << "adgraph: " << e.what() << "\n";
    return kUsage;
  }

  std::string out;
  try {
    const Bindings bindings = parse_bindings(binds);
    const std::string text = read_input(file);

    if (eval_cmd->parsed()) {
      LoweredProgram lp = compile_source(text);
      Valuation val = evaluate(lp.graph, bindings);
      for (std::size_t k = 0; k < val.outputs.size(); ++k) {
        out += lp.output_names[k] + " " + format_number(val.outputs[k], decimals) + "\n";
      }
    } else if (grad_cmd->parsed()) {
      LoweredProgram lp = compile_source(text);
      Graph g = single_output_graph(lp, pick_output(lp, output_name, "grad"));
      double value = 0.0;
      Gradient gradient;
      if (mode == "tape") {
        GradResult r = grad(g, bindings);
        value = r.value;
        gradient = std::move(r.gradient);
      } else if (mode == "forward") {
        ForwardGradient r = gradient_forward(g, bindings);
        value = r.value;
        gradient = std::move(r.gradient);
      } else {
        TwoPhaseResult r = two_phase_grad(build_adjoint(g), bindings);
        value = r.value;
        gradient = std::move(r.gradient);
      }
      print_gradient(out, value, gradient, g, decimals);
    } else if (trace_cmd->parsed()) {
      LoweredProgram lp = compile_source(text);
      pick_output(lp, "", "trace");
      out = format_trace(trace_table(lp, bindings), decimals < 0 ? 3 : decimals);
    } else if (dot_cmd->parsed()) {
      NameMap names;
      Graph g;
      if (looks_like_graph_file(text)) {
        g = deserialize(text);
      } else {
        LoweredProgram lp = compile_source(text);
        names = lp.names;
        g = dot_adjoint ? single_output_graph(lp, pick_output(lp, output_name, "dot --adjoint"))
                        : lp.graph;
      }
      out = to_dot(dot_adjoint ? build_adjoint(g).combined : g, names);
    } else if (compile_cmd->parsed()) {
      LoweredProgram lp = compile_source(text);
      std::string file_text;
      if (compile_adjoint) {
        Graph g = single_output_graph(lp, pick_output(lp, output_name, "compile --adjoint"));
        AdjointProgram prog = build_adjoint(g);
        file_text = serialize(fold ? constant_fold(prog) : prog);
      } else {
        file_text = serialize(fold ? constant_fold(lp.graph) : lp.graph);
      }
      std::ofstream dst(out_path, std::ios::binary);
      if (!(dst << file_text) || !dst.flush()) {
        throw UsageError("cannot write '" + out_path + "'");
      }
    } else if (run_cmd->parsed()) {
      if (is_adjoint_file(text)) {
        AdjointProgram prog = deserialize_adjoint(text);
        std::vector<double> seeds(prog.seed_nodes.size(), seed);
        TwoPhaseResult r = two_phase_grad(prog, bindings, seeds);
        print_gradient(out, r.value, r.gradient, prog.combined, decimals);
      } else {
        Graph g = deserialize(text);
        Valuation val = evaluate(g, bindings);
        for (std::size_t k = 0; k < val.outputs.size(); ++k) {
          out += "out" + std::to_string(k) + " " + format_number(val.outputs[k], decimals) + "\n";
        }
      }
    } else if (check_cmd->parsed()) {
      LoweredProgram lp = compile_source(text);
      Graph g = single_output_graph(lp, pick_output(lp, output_name, "gradcheck"));
      GradCheckReport report = gradcheck(g, bindings, {step, tol});
      for (const GradCheckEntry& e : report.entries) {
        out += e.variable + " analytic " + format_number(e.analytic, decimals) + " numeric " +
               format_number(e.numeric, decimals) + " rel_error " + shortest(e.relative_error);
        if (!e.conclusive) out += " inconclusive: " + e.note;
        out += "\n";
      }
      out += std::string(report.passed ? "PASS" : "FAIL") + " max_rel_error " +
             shortest(report.max_relative_error) + " tol " + shortest(report.tolerance) +
             " step " + shortest(report.step) + "\n";
      if (!report.passed) {
        err_stream << out;
        return kCheckFailed;
      }
    }
  } catch (const UsageError& e) {
    err_stream << "adgraph: " << e.what() << "\n";
    return kUsage;
  } catch (const ContractError& e) {
    err_stream << "adgraph: " << e.what() << "\n";
    return kUsage;
  } catch (const SourceError& e) {
    err_stream << file << ":" << e.what() << "\n";
    return kParse;
  } catch (const FormatError& e) {
    err_stream << file << ": " << e.what() << "\n";
    return kParse;
  } catch (const GraphError& e) {
    err_stream << file << ": " << e.what() << "\n";
    return kParse;
  } catch (const DomainError& e) {
    err_stream << "adgraph: " << e.what() << "\n";
    return kEval;
  } catch (const BindingError& e) {
    err_stream << "adgraph: " << e.what() << "\n";
    return kEval;
  }
  out_stream << out;
  return kOk;
}

}  // namespace adgraph::cli

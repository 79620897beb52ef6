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

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace adgraph {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed graph structure: arity mismatch, dangling or non-topological
// input, missing outputs.
class GraphError : public Error {
 public:
  using Error::Error;
};

// A primitive was applied outside its mathematical domain, or produced a
// non-finite result. Carries the offending node when raised from a graph.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what,
                       std::optional<std::size_t> node = std::nullopt)
      : Error(what), node_(node) {}

  std::optional<std::size_t> node() const { return node_; }

 private:
  std::optional<std::size_t> node_;
};

// A Var node has no entry in the bindings.
class BindingError : public Error {
 public:
  explicit BindingError(std::string variable)
      : Error("missing binding for variable '" + variable + "'"),
        variable_(std::move(variable)) {}

  const std::string& variable() const { return variable_; }

 private:
  std::string variable_;
};

// A caller violated an API precondition that is not a structural or
// numeric problem (e.g. asking for a gradient of a multi-output graph).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Error while reading an `adgraph v1` graph file. Line 0 means the file as
// a whole.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adgraph

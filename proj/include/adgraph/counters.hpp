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

#include <atomic>
#include <cstddef>

namespace adgraph {

// Process-wide build counters. They make the operator-overloading versus
// source-transformation cost difference observable: a tape is rebuilt on
// every recorded run, an adjoint program is built once.
struct BuildCounters {
  std::atomic<std::size_t> tapes_recorded{0};
  std::atomic<std::size_t> adjoints_built{0};

  void reset() {
    tapes_recorded = 0;
    adjoints_built = 0;
  }
};

inline BuildCounters& build_counters() {
  static BuildCounters counters;
  return counters;
}

}  // namespace adgraph

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

#include "adgraph/adjoint.hpp"
#include "adgraph/counters.hpp"
#include "adgraph/dataflow.hpp"
#include "adgraph/errors.hpp"
#include "adgraph/forward.hpp"
#include "adgraph/gradcheck.hpp"
#include "adgraph/graph.hpp"
#include "adgraph/graph_file.hpp"
#include "adgraph/parser.hpp"
#include "adgraph/primitives.hpp"
#include "adgraph/tape.hpp"
#include "adgraph/trace.hpp"

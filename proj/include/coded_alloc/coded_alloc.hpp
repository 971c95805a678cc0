// Copyright 2026 The coded-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "coded_alloc/allocation.hpp"
#include "coded_alloc/cluster.hpp"
#include "coded_alloc/config.hpp"
#include "coded_alloc/errors.hpp"
#include "coded_alloc/experiments.hpp"
#include "coded_alloc/latency_mc.hpp"
#include "coded_alloc/special_functions.hpp"
#include "coded_alloc/verification.hpp"

// Copyright 2026 The winpa-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "winpa/audit.hpp"
#include "winpa/channel.hpp"
#include "winpa/config.hpp"
#include "winpa/engine.hpp"
#include "winpa/errors.hpp"
#include "winpa/export.hpp"
#include "winpa/metrics.hpp"
#include "winpa/oracle.hpp"
#include "winpa/policies.hpp"
#include "winpa/policy.hpp"
#include "winpa/rng.hpp"
#include "winpa/schedule.hpp"
#include "winpa/topology.hpp"
#include "winpa/workload.hpp"

// Copyright 2026 The epirl Authors
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

#include "epirl/action.hpp"
#include "epirl/analysis.hpp"
#include "epirl/baselines.hpp"
#include "epirl/calibration.hpp"
#include "epirl/config.hpp"
#include "epirl/csv.hpp"
#include "epirl/dqn.hpp"
#include "epirl/environment.hpp"
#include "epirl/errors.hpp"
#include "epirl/interventions.hpp"
#include "epirl/logging.hpp"
#include "epirl/manifest.hpp"
#include "epirl/nn.hpp"
#include "epirl/policy_spec.hpp"
#include "epirl/population.hpp"
#include "epirl/ppo.hpp"
#include "epirl/random.hpp"
#include "epirl/replay.hpp"
#include "epirl/rewards.hpp"
#include "epirl/rl.hpp"
#include "epirl/simulation.hpp"
#include "epirl/training.hpp"
#include "epirl/types.hpp"

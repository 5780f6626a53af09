// Copyright 2026 The hqb Authors
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

#include "hqb/checksum.hpp"
#include "hqb/data/dataset.hpp"
#include "hqb/data/prepare.hpp"
#include "hqb/data/table.hpp"
#include "hqb/error.hpp"
#include "hqb/experiment/config.hpp"
#include "hqb/experiment/grid.hpp"
#include "hqb/experiment/manifest.hpp"
#include "hqb/experiment/report.hpp"
#include "hqb/experiment/train.hpp"
#include "hqb/experiment/workers.hpp"
#include "hqb/models/architecture.hpp"
#include "hqb/models/checkpoint.hpp"
#include "hqb/models/hybrid_model.hpp"
#include "hqb/neural/loss.hpp"
#include "hqb/neural/mlp.hpp"
#include "hqb/neural/optimizer.hpp"
#include "hqb/quantum/circuit.hpp"
#include "hqb/quantum/state_vector.hpp"
#include "hqb/rng.hpp"
#include "hqb/version.hpp"

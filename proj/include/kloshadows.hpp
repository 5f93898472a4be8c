// Copyright 2026 The kloshadows Authors
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

#include "kloshadows/algebra.hpp"
#include "kloshadows/correlations.hpp"
#include "kloshadows/duals.hpp"
#include "kloshadows/errors.hpp"
#include "kloshadows/estimation.hpp"
#include "kloshadows/io.hpp"
#include "kloshadows/klo.hpp"
#include "kloshadows/parallel.hpp"
#include "kloshadows/partition.hpp"
#include "kloshadows/pauli.hpp"
#include "kloshadows/povm.hpp"
#include "kloshadows/product_duals.hpp"
#include "kloshadows/rng.hpp"
#include "kloshadows/sampling.hpp"
#include "kloshadows/state_spec.hpp"
#include "kloshadows/states.hpp"
#include "kloshadows/tomography.hpp"
#include "kloshadows/toy.hpp"

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The nestnull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/**
 * @file nestnull.hpp
 * Everything at once.
 */
#pragma once

#include "nestnull/beamforming.hpp"
#include "nestnull/coarray.hpp"
#include "nestnull/harness.hpp"
#include "nestnull/hetnet.hpp"
#include "nestnull/integer_program.hpp"
#include "nestnull/io.hpp"
#include "nestnull/optimizer.hpp"
#include "nestnull/polynomial.hpp"
#include "nestnull/random.hpp"
#include "nestnull/simplex.hpp"

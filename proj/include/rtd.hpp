/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "rtd/algorithm.hpp"
#include "rtd/builders.hpp"
#include "rtd/config.hpp"
#include "rtd/conic.hpp"
#include "rtd/harness.hpp"
#include "rtd/metrics.hpp"
#include "rtd/network.hpp"
#include "rtd/rng.hpp"
#include "rtd/validation.hpp"
#include "rtd/worst_case.hpp"

/******************************************************************************
 * Copyright 2026 The mracsim Authors. All Rights Reserved.
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
 *****************************************************************************/

#pragma once

#include "mracsim/linalg.hpp"

// The four-state benchmark plant and reference model used across the test
// suites (same data as presets/paper_sec5.json).
namespace test_systems {

inline mracsim::Matrix plant_a() {
  return mracsim::Matrix::from_rows({{0.0, 1.0, 0.0, 0.0},
                                     {-1.4, 1.70, -0.60, -0.75},
                                     {0.0, 0.0, 0.0, 1.0},
                                     {-1.5, -1.50, -0.95, -1.5}});
}

inline mracsim::Matrix plant_b() {
  return mracsim::Matrix::from_rows(
      {{0.0, 0.0}, {4.0, 0.0}, {0.0, 0.0}, {0.0, 3.3}});
}

inline mracsim::Matrix reference_a() {
  return mracsim::Matrix::from_rows({{0.0, 1.0, 0.0, 0.0},
                                     {-5.0, -1.5, -1.2, -1.6},
                                     {0.0, 0.0, 0.0, 1.0},
                                     {-2.0, -3.0, -2.0, -3.0}});
}

inline mracsim::Matrix reference_b() {
  return mracsim::Matrix::from_rows(
      {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, {0.0, 2.0}});
}

}  // namespace test_systems

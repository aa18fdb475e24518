// Copyright 2026 the bprb Authors
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

#ifndef BPRB_SCORES_H_
#define BPRB_SCORES_H_

#include <span>
#include <vector>

namespace bprb {

// Prediction certainty z_i = max(p_i, 1 - p_i) and the variable order by
// descending z (ties broken by ascending index).
struct ScoreVector {
  std::vector<double> z;
  std::vector<int> order;
};

ScoreVector ComputeScores(std::span<const double> p);

// The predicted value of a variable: 1 iff p >= 0.5.
inline int PredictedValue(double p) { return p >= 0.5 ? 1 : 0; }

}  // namespace bprb

#endif  // BPRB_SCORES_H_

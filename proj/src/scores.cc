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

#include "bprb/scores.h"

#include <algorithm>
#include <numeric>

namespace bprb {

ScoreVector ComputeScores(std::span<const double> p) {
  ScoreVector s;
  s.z.resize(p.size());
  for (size_t i = 0; i < p.size(); ++i) s.z[i] = std::max(p[i], 1.0 - p[i]);
  s.order.resize(p.size());
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int a, int b) { return s.z[a] > s.z[b]; });
  return s;
}

}  // namespace bprb

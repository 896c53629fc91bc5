// Copyright 2026 The qtabgen Authors
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

#include "qtabgen/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace qtabgen::sampler {

inline constexpr std::int64_t kDefaultShots = 8192;

struct ShotCounts {
    std::vector<std::int64_t> counts;
    std::int64_t shots = 0;
};

/// Draws `shots` i.i.d. computational-basis outcomes from `p` by inverse-CDF
/// lookup, one uniform variate per shot. Warns when shots <= len(p).
ShotCounts sample_bitstrings(const Eigen::VectorXd &p, std::int64_t shots, Rng &rng);

/// counts / shots.
Eigen::VectorXd empirical_distribution(const ShotCounts &counts);

} // namespace qtabgen::sampler

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
#include "qtabgen/sampler.hpp"

#include "qtabgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qtabgen::sampler {

ShotCounts sample_bitstrings(const Eigen::VectorXd &p, std::int64_t shots, Rng &rng) {
    if (shots < 1) {
        throw ArgumentError("number of shots must be >= 1, got " + std::to_string(shots));
    }
    if (p.size() == 0 || (p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9) {
        throw ArgumentError("sampling requires a nonnegative probability vector summing to 1");
    }
    if (shots <= p.size()) {
        log::warn("shot count " + std::to_string(shots) + " does not exceed the " +
                  std::to_string(p.size()) + " possible outcomes");
    }

    std::vector<double> cdf(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        acc += p[k];
        cdf[static_cast<std::size_t>(k)] = acc;
    }
    // Rounding can leave the total slightly off 1; scale draws to it and never
    // land on a trailing zero-probability outcome.
    const double total = cdf.back();
    Eigen::Index last = p.size() - 1;
    while (last > 0 && p[last] == 0.0) {
        --last;
    }

    ShotCounts out;
    out.counts.assign(static_cast<std::size_t>(p.size()), 0);
    out.shots = shots;
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto k = static_cast<Eigen::Index>(it - cdf.begin());
        k = std::min(k, last);
        ++out.counts[static_cast<std::size_t>(k)];
    }
    return out;
}

Eigen::VectorXd empirical_distribution(const ShotCounts &counts) {
    if (counts.shots < 1) {
        throw ArgumentError("empirical distribution needs at least one shot");
    }
    Eigen::VectorXd p(static_cast<Eigen::Index>(counts.counts.size()));
    const auto n = static_cast<double>(counts.shots);
    for (std::size_t k = 0; k < counts.counts.size(); ++k) {
        p[static_cast<Eigen::Index>(k)] = static_cast<double>(counts.counts[k]) / n;
    }
    return p;
}

} // namespace qtabgen::sampler

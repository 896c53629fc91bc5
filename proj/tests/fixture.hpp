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
// Desk-scale end-to-end fixture: a two-class Gaussian mixture with two
// correlated numeric features and one class-dependent categorical feature.
#pragma once

#include "qtabgen/rng.hpp"
#include "qtabgen/table.hpp"

#include <cmath>
#include <vector>

namespace fixture {

inline qtabgen::Schema mixture_schema() {
    using qtabgen::ColumnKind;
    return {{{"income", ColumnKind::Numeric, {}},
             {"spend", ColumnKind::Numeric, {}},
             {"region", ColumnKind::Categorical, {"north", "south", "west"}},
             {"segment", ColumnKind::Categorical, {"basic", "premium"}}},
            "segment",
            qtabgen::Task::Classification};
}

/// P(premium) = 0.4. Within a class (income, spend) is bivariate normal with
/// unit-variance correlation 0.6 (in standardised units), means shifted by
/// (2.5, 2.0) for premium. Region probabilities flip between the classes.
inline qtabgen::Table mixture_table(std::size_t rows, std::uint64_t seed) {
    qtabgen::Rng rng(seed);
    qtabgen::Table t(mixture_schema());
    const double rho = 0.6;
    for (std::size_t r = 0; r < rows; ++r) {
        const int cls = rng.uniform() < 0.4 ? 1 : 0;
        const double z1 = rng.normal();
        const double z2 = rho * z1 + std::sqrt(1 - rho * rho) * rng.normal();
        const double income = 40.0 + 10.0 * (z1 + 2.5 * cls);
        const double spend = 5.0 + 2.0 * (z2 + 2.0 * cls);
        const double u = rng.uniform();
        const double p_north = cls ? 0.1 : 0.6;
        const int region = u < p_north ? 0 : (u < p_north + 0.3 ? 1 : 2);
        t.add_row(std::vector<double>{income, spend, static_cast<double>(region), static_cast<double>(cls)});
    }
    return t;
}

} // namespace fixture

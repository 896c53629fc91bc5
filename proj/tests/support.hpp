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

#include "qtabgen/errors.hpp"
#include "qtabgen/rng.hpp"
#include "qtabgen/table.hpp"

#include <string>
#include <vector>

namespace testing {

/// Collects library warnings for the lifetime of the object.
class WarningCapture {
public:
    WarningCapture()
        : previous_(qtabgen::log::set_warning_sink([this](const std::string &m) { messages.push_back(m); })) {}
    ~WarningCapture() { qtabgen::log::set_warning_sink(previous_); }
    WarningCapture(const WarningCapture &) = delete;
    WarningCapture &operator=(const WarningCapture &) = delete;

    std::vector<std::string> messages;

private:
    qtabgen::log::WarningSink previous_;
};

/// x1, x2 numeric; color in {a, b, c}; label in {no, yes} (target).
inline qtabgen::Schema mixed_schema() {
    using qtabgen::ColumnKind;
    return {{{"x1", ColumnKind::Numeric, {}},
             {"color", ColumnKind::Categorical, {"a", "b", "c"}},
             {"x2", ColumnKind::Numeric, {}},
             {"label", ColumnKind::Categorical, {"no", "yes"}}},
            "label",
            qtabgen::Task::Classification};
}

/// x1 numeric, color in {a, b}, y numeric regression target.
inline qtabgen::Schema regression_schema() {
    using qtabgen::ColumnKind;
    return {{{"x1", ColumnKind::Numeric, {}},
             {"color", ColumnKind::Categorical, {"a", "b"}},
             {"y", ColumnKind::Numeric, {}}},
            "y",
            qtabgen::Task::Regression};
}

/// Normal numeric cells and uniform categories.
inline qtabgen::Table random_table(const qtabgen::Schema &schema, std::size_t rows, std::uint64_t seed) {
    qtabgen::Rng rng(seed);
    qtabgen::Table t(schema);
    std::vector<double> cells(schema.columns.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const auto &col = schema.columns[c];
            cells[c] = col.kind == qtabgen::ColumnKind::Numeric
                           ? 10.0 * static_cast<double>(c + 1) + 3.0 * rng.normal()
                           : static_cast<double>(rng.below(col.categories.size()));
        }
        t.add_row(cells);
    }
    return t;
}

} // namespace testing

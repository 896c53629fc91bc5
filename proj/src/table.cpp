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
#include "qtabgen/table.hpp"

#include "qtabgen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qtabgen {

int Column::category_index(std::string_view value) const {
    const auto it = std::find(categories.begin(), categories.end(), value);
    return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
}

void Schema::validate() const {
    std::set<std::string> names;
    for (const auto &c : columns) {
        if (c.name.empty()) {
            throw DataError("schema column with empty name");
        }
        if (!names.insert(c.name).second) {
            throw DataError("duplicate column name '" + c.name + "'");
        }
        if (c.kind == ColumnKind::Categorical) {
            if (c.categories.size() < 2) {
                throw DataError("categorical column '" + c.name + "' needs at least 2 categories");
            }
            std::set<std::string> cats(c.categories.begin(), c.categories.end());
            if (cats.size() != c.categories.size()) {
                throw DataError("categorical column '" + c.name + "' lists a category twice");
            }
        } else if (!c.categories.empty()) {
            throw DataError("numeric column '" + c.name + "' must not list categories");
        }
    }
    const int t = column_index(target);
    if (t < 0) {
        throw DataError("target column '" + target + "' is not in the schema");
    }
    const auto kind = columns[static_cast<std::size_t>(t)].kind;
    if (task == Task::Classification && kind != ColumnKind::Categorical) {
        throw DataError("classification target '" + target + "' must be categorical");
    }
    if (task == Task::Regression && kind != ColumnKind::Numeric) {
        throw DataError("regression target '" + target + "' must be numeric");
    }
    if (columns.size() < 2) {
        throw DataError("schema needs at least one feature column besides the target");
    }
}

int Schema::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

int Schema::target_index() const { return column_index(target); }

std::vector<int> Schema::feature_indices() const {
    std::vector<int> out;
    const int t = target_index();
    for (int i = 0; i < static_cast<int>(columns.size()); ++i) {
        if (i != t) {
            out.push_back(i);
        }
    }
    return out;
}

int Schema::n_classes() const {
    if (task != Task::Classification) {
        return 0;
    }
    return static_cast<int>(columns[static_cast<std::size_t>(target_index())].categories.size());
}

nlohmann::json to_json(const Schema &schema) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto &c : schema.columns) {
        nlohmann::json j{{"name", c.name},
                         {"kind", c.kind == ColumnKind::Numeric ? "numeric" : "categorical"}};
        if (c.kind == ColumnKind::Categorical) {
            j["categories"] = c.categories;
        }
        cols.push_back(std::move(j));
    }
    return {{"columns", std::move(cols)},
            {"target", schema.target},
            {"task", schema.task == Task::Classification ? "classification" : "regression"}};
}

Schema schema_from_json(const nlohmann::json &doc) {
    try {
        Schema s;
        for (const auto &j : doc.at("columns")) {
            Column c;
            c.name = j.at("name").get<std::string>();
            const auto kind = j.at("kind").get<std::string>();
            if (kind == "numeric") {
                c.kind = ColumnKind::Numeric;
            } else if (kind == "categorical") {
                c.kind = ColumnKind::Categorical;
                if (j.contains("categories")) {
                    c.categories = j.at("categories").get<std::vector<std::string>>();
                }
            } else {
                throw DataError("column '" + c.name + "' has unknown kind '" + kind + "'");
            }
            s.columns.push_back(std::move(c));
        }
        s.target = doc.at("target").get<std::string>();
        const auto task = doc.at("task").get<std::string>();
        if (task == "classification") {
            s.task = Task::Classification;
        } else if (task == "regression") {
            s.task = Task::Regression;
        } else {
            throw DataError("unknown task '" + task + "'");
        }
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("malformed schema: ") + e.what());
    }
}

void Table::add_row(std::span<const double> cells) {
    if (cells.size() != cols()) {
        throw DataError("row has " + std::to_string(cells.size()) + " cells, schema has " +
                        std::to_string(cols()) + " columns");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto &col = schema_.columns[c];
        if (!std::isfinite(cells[c])) {
            throw DataError("non-finite value in column '" + col.name + "'");
        }
        if (col.kind == ColumnKind::Categorical) {
            const double idx = cells[c];
            if (idx < 0 || idx >= static_cast<double>(col.categories.size()) || idx != std::floor(idx)) {
                throw DataError("invalid category index in column '" + col.name + "'");
            }
        }
    }
    cells_.insert(cells_.end(), cells.begin(), cells.end());
    ++rows_;
}

std::vector<double> Table::column(std::size_t col) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        out[r] = at(r, col);
    }
    return out;
}

Table Table::select_rows(std::span<const std::size_t> indices) const {
    Table out(schema_);
    out.cells_.reserve(indices.size() * cols());
    for (const auto r : indices) {
        const auto src = row(r);
        out.cells_.insert(out.cells_.end(), src.begin(), src.end());
    }
    out.rows_ = indices.size();
    return out;
}

} // namespace qtabgen

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

#include <json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtabgen {

enum class ColumnKind { Numeric, Categorical };
enum class Task { Classification, Regression };

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    /// Ordered category labels; empty for numeric columns. An empty list on a
    /// categorical column asks the CSV loader to infer the categories.
    std::vector<std::string> categories;

    /// Index of `value` in `categories`, or -1.
    [[nodiscard]] int category_index(std::string_view value) const;

    bool operator==(const Column &) const = default;
};

struct Schema {
    std::vector<Column> columns;
    std::string target;
    Task task = Task::Classification;

    /// Throws DataError when names repeat, the target is missing or has the
    /// wrong kind for the task, or a categorical column has < 2 categories.
    void validate() const;

    /// -1 when absent.
    [[nodiscard]] int column_index(std::string_view name) const;
    [[nodiscard]] int target_index() const;
    /// Non-target columns in schema order.
    [[nodiscard]] std::vector<int> feature_indices() const;
    [[nodiscard]] int n_classes() const;

    bool operator==(const Schema &) const = default;
};

nlohmann::json to_json(const Schema &schema);
/// Throws DataError on malformed documents. Does not call validate(), since
/// categories may still need inference.
Schema schema_from_json(const nlohmann::json &doc);

/// Row-major table. Numeric cells hold their value; categorical cells hold
/// the index of the category in the schema's category list.
class Table {
  public:
    Table() = default;
    explicit Table(Schema schema) : schema_(std::move(schema)) {}

    [[nodiscard]] const Schema &schema() const { return schema_; }
    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return schema_.columns.size(); }
    [[nodiscard]] bool empty() const { return rows_ == 0; }

    [[nodiscard]] double at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
    [[nodiscard]] int category(std::size_t row, std::size_t col) const {
        return static_cast<int>(at(row, col));
    }
    [[nodiscard]] const std::string &category_name(std::size_t row, std::size_t col) const {
        return schema_.columns[col].categories[static_cast<std::size_t>(category(row, col))];
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {cells_.data() + r * cols(), cols()};
    }

    /// Appends a row; categorical entries are category indices.
    void add_row(std::span<const double> cells);

    [[nodiscard]] std::vector<double> column(std::size_t col) const;
    [[nodiscard]] Table select_rows(std::span<const std::size_t> indices) const;

    bool operator==(const Table &) const = default;

  private:
    Schema schema_;
    std::vector<double> cells_;
    std::size_t rows_ = 0;
};

} // namespace qtabgen

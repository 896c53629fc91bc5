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

#include "qtabgen/adversarial.hpp"
#include "qtabgen/table.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qtabgen::io {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char *kCheckpointFormat = "qtabgen-checkpoint";

/// Splits an RFC-4180 document into records. Quoted fields may contain
/// commas, doubled quotes and line breaks; CRLF and LF are both accepted.
std::vector<std::vector<std::string>> parse_csv(std::istream &in);

std::string format_csv_field(const std::string &field);

nlohmann::json read_json_file(const std::filesystem::path &path);
Schema load_schema(const std::filesystem::path &path);

struct LoadResult {
    Table table;
    /// Rows dropped because a cell was missing, unparseable or an unknown category.
    std::size_t dropped = 0;
};

/// Reads a CSV with a header row and matches columns by name. Extra CSV
/// columns are ignored. Categorical columns without listed categories get
/// them inferred from the data (sorted). The returned table's schema is
/// validated.
LoadResult read_csv(std::istream &in, const Schema &schema);
LoadResult load_csv(const std::filesystem::path &path, const Schema &schema);

void write_csv(std::ostream &out, const Table &table);
void save_csv(const std::filesystem::path &path, const Table &table);

struct SplitSpec {
    double ratio = 0.8;
    std::uint64_t seed = 0;
    /// Proportional per-class allocation; only applies to classification.
    bool stratify = true;
};

/// Deterministic disjoint, exhaustive train/test partition.
std::pair<Table, Table> split(const Table &table, const SplitSpec &spec);

/// Seeded uniform subsample without replacement, original row order kept.
/// Returns the table unchanged when max_rows == 0 or exceeds its size.
Table subsample(const Table &table, std::size_t max_rows, std::uint64_t seed);

nlohmann::json checkpoint_to_json(const gan::GanCheckpoint &ckpt);
gan::GanCheckpoint checkpoint_from_json(const nlohmann::json &doc);

/// Written to a temporary file and renamed into place.
void save_checkpoint(const gan::GanCheckpoint &ckpt, const std::filesystem::path &path);
/// Throws VersionError for another format version and IoError for anything
/// unreadable; nothing is returned on failure.
gan::GanCheckpoint load_checkpoint(const std::filesystem::path &path);

/// step,d_loss,g_loss
void save_loss_history(const std::vector<gan::LossRecord> &history, const std::filesystem::path &path);

} // namespace qtabgen::io

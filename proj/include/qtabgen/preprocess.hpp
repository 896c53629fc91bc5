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

/// @file preprocess.hpp
/// Tabular encoding for the generator. Numeric columns are clipped to their
/// 1st/99th percentiles, z-scored, min-max scaled to [0, pi] and optionally
/// jittered with N(0, 1e-5) noise; categorical columns are one-hot encoded.
///
/// Encoded matrices hold one sample per column (features x rows), matching
/// the batch layout of the neural module.
#pragma once

#include "qtabgen/rng.hpp"
#include "qtabgen/table.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qtabgen::preprocess {

inline constexpr double kEpsilon = 1e-8;
inline constexpr double kNoiseVariance = 1e-5;

struct NumericStats {
    double clip_lo = 0.0;
    double clip_hi = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
    double min_z = 0.0;
    double max_z = 0.0;
    double epsilon = kEpsilon;

    bool operator==(const NumericStats &) const = default;
};

/// Linear-interpolation percentile of sorted values, q in [0, 1].
double percentile_sorted(std::span<const double> sorted, double q);

NumericStats fit_numeric(std::span<const double> values);

/// clip -> z-score -> [0, pi]; adds N(0, 1e-5) noise when `noise` is non-null.
double transform_numeric(const NumericStats &stats, double x, Rng *noise = nullptr);

/// Clamps v to [0, pi] and undoes the min-max and z-score steps.
double inverse_numeric(const NumericStats &stats, double v);

Eigen::VectorXd encode_onehot(const std::vector<std::string> &categories, std::string_view value,
                              std::string_view column = {});

/// Argmax position; ties go to the lowest index.
Eigen::Index argmax_index(const Eigen::Ref<const Eigen::VectorXd> &block);

std::string decode_onehot(const std::vector<std::string> &categories,
                          const Eigen::Ref<const Eigen::VectorXd> &block);

struct ColumnModel {
    int column = -1;
    ColumnKind kind = ColumnKind::Numeric;
    NumericStats stats;
    /// First row of this column's block inside the encoded matrix and its width.
    Eigen::Index offset = 0;
    Eigen::Index width = 1;

    bool operator==(const ColumnModel &) const = default;
};

struct PreprocessModel {
    Schema schema;
    std::vector<ColumnModel> features;
    ColumnModel target;
    double noise_std = std::sqrt(kNoiseVariance);
    bool fitted = false;

    [[nodiscard]] Eigen::Index feature_dim() const;
    /// Classification: number of classes. Regression: 1 (the scaled target).
    [[nodiscard]] Eigen::Index label_dim() const;

    bool operator==(const PreprocessModel &) const = default;
};

struct Encoded {
    PreprocessModel model;
    Eigen::MatrixXd features; // feature_dim x rows
    Eigen::MatrixXd labels;   // label_dim x rows
};

/// Fits the column statistics on `table` and encodes it. `noise` enables the
/// training-time jitter on numeric values (features and regression target),
/// drawn once per cell.
Encoded fit_apply(const Table &table, Rng *noise = nullptr);

/// Encodes another table with an already fitted model.
Eigen::MatrixXd apply_features(const PreprocessModel &model, const Table &table, Rng *noise = nullptr);
Eigen::MatrixXd apply_labels(const PreprocessModel &model, const Table &table, Rng *noise = nullptr);

/// Maps encoded (or generated) columns back to a table in the original
/// units. Categorical blocks and classification labels are decoded by argmax.
Table invert(const PreprocessModel &model, const Eigen::MatrixXd &features, const Eigen::MatrixXd &labels);

nlohmann::json to_json(const PreprocessModel &model);
PreprocessModel model_from_json(const nlohmann::json &doc);

} // namespace qtabgen::preprocess

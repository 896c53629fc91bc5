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

/// @file metrics.hpp
/// Synthetic-data evaluation: downstream ML utility (train on real vs. train
/// on synthetic, score both on the same held-out test set), per-column
/// Jensen-Shannon divergence and correlation-matrix difference.
#pragma once

#include "qtabgen/errors.hpp"
#include "qtabgen/table.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qtabgen::metrics {

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Binary (n_classes == 2): 2TP / (2TP + FP + FN) with class 1 positive.
/// Multiclass: macro average of one-vs-rest F1 over all n_classes labels; a
/// class with no support and no predictions scores 0. n_classes <= 0 infers
/// the label set as 1 + the largest label seen.
double f1_score(std::span<const int> y_true, std::span<const int> y_pred, int n_classes = 0);

/// 1 - Var(y - y_hat) / Var(y), population variances. Throws MetricUndefined
/// when Var(y) == 0.
double evs(std::span<const double> y_true, std::span<const double> y_pred);

/// 1 - SS_res / SS_tot. Throws MetricUndefined when SS_tot == 0.
double r2(std::span<const double> y_true, std::span<const double> y_pred);

/// Base-2 Jensen-Shannon divergence of two distributions over the same
/// support, in [0, 1]. 0 * log 0 := 0.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar jsd(const Eigen::MatrixBase<DerivedP> &p, const Eigen::MatrixBase<DerivedQ> &q) {
    using S = typename DerivedP::Scalar;
    auto valid = [](const auto &v) {
        return v.size() > 0 && (v.array() >= S{0}).all() && std::abs(v.sum() - S{1}) <= S(1e-9);
    };
    if (p.size() != q.size() || !valid(p) || !valid(q)) {
        throw ArgumentError("jsd needs two probability vectors of equal length");
    }
    auto kl_to_mid = [&](const auto &a, const auto &b) {
        S acc{0};
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a[i] > S{0}) {
                const S m = (a[i] + b[i]) / S{2};
                acc += a[i] * std::log2(a[i] / m);
            }
        }
        return acc;
    };
    const S value = (kl_to_mid(p, q) + kl_to_mid(q, p)) / S{2};
    return std::clamp(value, S{0}, S{1});
}

/// Category frequencies of a categorical column.
Eigen::VectorXd category_distribution(const Table &table, std::size_t column);

/// Mean JSD over every categorical column (target included). nullopt when
/// the schema has no categorical column.
std::optional<double> avg_jsd(const Table &real, const Table &syn);

/// Mean |rho_real - rho_syn| over unordered pairs of numeric columns (target
/// included for regression). Zero-variance columns get rho := 0 with a
/// warning. nullopt when fewer than 2 numeric columns exist.
std::optional<double> corr_difference(const Table &real, const Table &syn);

/// Pearson correlation matrix of the numeric columns, in schema order.
Eigen::MatrixXd numeric_correlation(const Table &table);

struct UtilityConfig {
    std::vector<int> hidden{64, 32};
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

struct MetricValue {
    /// nullopt when undefined (e.g. a constant test target).
    std::optional<double> real;
    std::optional<double> synthetic;
    std::optional<double> difference;
};

struct MetricsReport {
    std::string dataset;
    std::uint64_t seed = 0;
    Task task = Task::Classification;
    std::map<std::string, MetricValue> utility;
    std::optional<double> avg_jsd;
    std::optional<double> corr_diff;
    nlohmann::json config;
};

/// Trains one downstream network on `real_train` and one on `syn` with the
/// same architecture, seed and schedule, scores both on `test` and reports
/// the metrics and their absolute differences. Classification reports
/// accuracy and f1, regression evs and r2. Statistical similarity compares
/// `syn` against `real_train`.
MetricsReport ml_utility(const Table &real_train, const Table &syn, const Table &test,
                         const UtilityConfig &config = {});

nlohmann::json to_json(const MetricsReport &report);

/// Writes <dir>/<column>.csv with sorted value / cumulative fraction pairs
/// for the real and synthetic samples of every numeric column.
void write_cdf_dumps(const Table &real, const Table &syn, const std::filesystem::path &dir);

} // namespace qtabgen::metrics

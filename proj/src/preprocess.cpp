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
#include "qtabgen/preprocess.hpp"

#include "qtabgen/errors.hpp"

#include <algorithm>
#include <numbers>

namespace qtabgen::preprocess {

namespace {

constexpr double kPi = std::numbers::pi;

void check_fitted(const PreprocessModel &model) {
    if (!model.fitted) {
        throw ArgumentError("preprocessing model is not fitted");
    }
}

ColumnModel fit_column(const Table &table, int col, Eigen::Index offset) {
    const auto &c = table.schema().columns[static_cast<std::size_t>(col)];
    ColumnModel m;
    m.column = col;
    m.kind = c.kind;
    m.offset = offset;
    if (c.kind == ColumnKind::Numeric) {
        const auto values = table.column(static_cast<std::size_t>(col));
        try {
            m.stats = fit_numeric(values);
        } catch (const DataError &e) {
            throw DataError("column '" + c.name + "': " + e.what());
        }
        m.width = 1;
    } else {
        m.width = static_cast<Eigen::Index>(c.categories.size());
    }
    return m;
}

void encode_cell(const ColumnModel &m, double cell, Eigen::MatrixXd &out, Eigen::Index row_col,
                 Rng *noise) {
    if (m.kind == ColumnKind::Numeric) {
        out(m.offset, row_col) = transform_numeric(m.stats, cell, noise);
    } else {
        out.block(m.offset, row_col, m.width, 1).setZero();
        out(m.offset + static_cast<Eigen::Index>(cell), row_col) = 1.0;
    }
}

} // namespace

double percentile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw DataError("percentile of an empty sample");
    }
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

NumericStats fit_numeric(std::span<const double> values) {
    if (values.size() < 2) {
        throw DataError("numeric statistics need at least 2 values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    for (const double v : sorted) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite value while fitting numeric statistics");
        }
    }
    std::sort(sorted.begin(), sorted.end());

    NumericStats s;
    s.clip_lo = percentile_sorted(sorted, 0.01);
    s.clip_hi = percentile_sorted(sorted, 0.99);

    const auto n = static_cast<double>(sorted.size());
    double sum = 0.0;
    for (const double v : sorted) {
        sum += std::clamp(v, s.clip_lo, s.clip_hi);
    }
    s.mu = sum / n;
    double ss = 0.0;
    for (const double v : sorted) {
        const double d = std::clamp(v, s.clip_lo, s.clip_hi) - s.mu;
        ss += d * d;
    }
    s.sigma = std::sqrt(ss / n);
    // z is monotone in x, so the extremes come from the clip bounds.
    s.min_z = (s.clip_lo - s.mu) / (s.sigma + s.epsilon);
    s.max_z = (s.clip_hi - s.mu) / (s.sigma + s.epsilon);
    return s;
}

double transform_numeric(const NumericStats &stats, double x, Rng *noise) {
    if (!std::isfinite(x)) {
        throw DataError("non-finite numeric value");
    }
    const double clipped = std::clamp(x, stats.clip_lo, stats.clip_hi);
    const double z = (clipped - stats.mu) / (stats.sigma + stats.epsilon);
    double scaled = (z - stats.min_z) / (stats.max_z - stats.min_z + stats.epsilon) * kPi;
    if (noise != nullptr) {
        scaled += std::sqrt(kNoiseVariance) * noise->normal();
    }
    return scaled;
}

double inverse_numeric(const NumericStats &stats, double v) {
    const double clamped = std::clamp(v, 0.0, kPi);
    const double z = (clamped / kPi) * (stats.max_z - stats.min_z + stats.epsilon) + stats.min_z;
    return z * (stats.sigma + stats.epsilon) + stats.mu;
}

Eigen::VectorXd encode_onehot(const std::vector<std::string> &categories, std::string_view value,
                              std::string_view column) {
    const auto it = std::find(categories.begin(), categories.end(), value);
    if (it == categories.end()) {
        throw DataError("unseen category '" + std::string(value) + "'" +
                        (column.empty() ? std::string() : " in column '" + std::string(column) + "'"));
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(categories.size()));
    v[it - categories.begin()] = 1.0;
    return v;
}

Eigen::Index argmax_index(const Eigen::Ref<const Eigen::VectorXd> &block) {
    if (block.size() == 0) {
        throw ArgumentError("argmax of an empty block");
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < block.size(); ++i) {
        if (block[i] > block[best]) {
            best = i;
        }
    }
    return best;
}

std::string decode_onehot(const std::vector<std::string> &categories,
                          const Eigen::Ref<const Eigen::VectorXd> &block) {
    if (block.size() != static_cast<Eigen::Index>(categories.size())) {
        throw ArgumentError("one-hot block width does not match the category count");
    }
    return categories[static_cast<std::size_t>(argmax_index(block))];
}

Eigen::Index PreprocessModel::feature_dim() const {
    Eigen::Index d = 0;
    for (const auto &f : features) {
        d += f.width;
    }
    return d;
}

Eigen::Index PreprocessModel::label_dim() const { return target.width; }

Encoded fit_apply(const Table &table, Rng *noise) {
    const auto &schema = table.schema();
    schema.validate();
    if (table.empty()) {
        throw DataError("cannot fit preprocessing on an empty table");
    }
    Encoded out;
    out.model.schema = schema;
    Eigen::Index offset = 0;
    for (const int col : schema.feature_indices()) {
        out.model.features.push_back(fit_column(table, col, offset));
        offset += out.model.features.back().width;
    }
    out.model.target = fit_column(table, schema.target_index(), 0);
    out.model.fitted = true;
    out.features = apply_features(out.model, table, noise);
    out.labels = apply_labels(out.model, table, noise);
    return out;
}

Eigen::MatrixXd apply_features(const PreprocessModel &model, const Table &table, Rng *noise) {
    check_fitted(model);
    if (table.schema() != model.schema) {
        throw DataError("table schema does not match the fitted preprocessing schema");
    }
    Eigen::MatrixXd out(model.feature_dim(), static_cast<Eigen::Index>(table.rows()));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (const auto &f : model.features) {
            encode_cell(f, table.at(r, static_cast<std::size_t>(f.column)), out,
                        static_cast<Eigen::Index>(r), noise);
        }
    }
    return out;
}

Eigen::MatrixXd apply_labels(const PreprocessModel &model, const Table &table, Rng *noise) {
    check_fitted(model);
    if (table.schema() != model.schema) {
        throw DataError("table schema does not match the fitted preprocessing schema");
    }
    Eigen::MatrixXd out(model.label_dim(), static_cast<Eigen::Index>(table.rows()));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        encode_cell(model.target, table.at(r, static_cast<std::size_t>(model.target.column)), out,
                    static_cast<Eigen::Index>(r), noise);
    }
    return out;
}

Table invert(const PreprocessModel &model, const Eigen::MatrixXd &features, const Eigen::MatrixXd &labels) {
    check_fitted(model);
    if (features.rows() != model.feature_dim() || labels.rows() != model.label_dim() ||
        features.cols() != labels.cols()) {
        throw ArgumentError("invert: encoded widths do not match the preprocessing model");
    }
    Table out(model.schema);
    std::vector<double> cells(model.schema.columns.size());
    auto decode = [&](const ColumnModel &m, const Eigen::MatrixXd &src, Eigen::Index r) {
        if (m.kind == ColumnKind::Numeric) {
            return inverse_numeric(m.stats, src(m.offset, r));
        }
        return static_cast<double>(argmax_index(src.block(m.offset, r, m.width, 1)));
    };
    for (Eigen::Index r = 0; r < features.cols(); ++r) {
        for (const auto &f : model.features) {
            cells[static_cast<std::size_t>(f.column)] = decode(f, features, r);
        }
        cells[static_cast<std::size_t>(model.target.column)] = decode(model.target, labels, r);
        out.add_row(cells);
    }
    return out;
}

namespace {

nlohmann::json column_json(const ColumnModel &m) {
    nlohmann::json j{{"column", m.column},
                     {"kind", m.kind == ColumnKind::Numeric ? "numeric" : "categorical"},
                     {"offset", m.offset},
                     {"width", m.width}};
    if (m.kind == ColumnKind::Numeric) {
        j["stats"] = {{"clip_lo", m.stats.clip_lo}, {"clip_hi", m.stats.clip_hi},
                      {"mu", m.stats.mu},           {"sigma", m.stats.sigma},
                      {"min_z", m.stats.min_z},     {"max_z", m.stats.max_z},
                      {"epsilon", m.stats.epsilon}};
    }
    return j;
}

ColumnModel column_from_json(const nlohmann::json &j) {
    ColumnModel m;
    m.column = j.at("column").get<int>();
    m.kind = j.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric : ColumnKind::Categorical;
    m.offset = j.at("offset").get<Eigen::Index>();
    m.width = j.at("width").get<Eigen::Index>();
    if (m.kind == ColumnKind::Numeric) {
        const auto &s = j.at("stats");
        m.stats = {s.at("clip_lo").get<double>(), s.at("clip_hi").get<double>(),
                   s.at("mu").get<double>(),      s.at("sigma").get<double>(),
                   s.at("min_z").get<double>(),   s.at("max_z").get<double>(),
                   s.at("epsilon").get<double>()};
    }
    return m;
}

} // namespace

nlohmann::json to_json(const PreprocessModel &model) {
    nlohmann::json features = nlohmann::json::array();
    for (const auto &f : model.features) {
        features.push_back(column_json(f));
    }
    return {{"features", std::move(features)},
            {"target", column_json(model.target)},
            {"noise_std", model.noise_std},
            {"fitted", model.fitted}};
}

PreprocessModel model_from_json(const nlohmann::json &doc) {
    PreprocessModel m;
    for (const auto &f : doc.at("features")) {
        m.features.push_back(column_from_json(f));
    }
    m.target = column_from_json(doc.at("target"));
    m.noise_std = doc.at("noise_std").get<double>();
    m.fitted = doc.at("fitted").get<bool>();
    return m;
}

} // namespace qtabgen::preprocess

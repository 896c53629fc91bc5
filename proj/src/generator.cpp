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
#include "qtabgen/generator.hpp"

#include "qtabgen/errors.hpp"
#include "qtabgen/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace qtabgen::gen {

void GeneratorParams::validate() const {
    vqc.validate();
    mapper.validate();
    if (mapper.input_size() != prob_dim() + n_classes) {
        throw ArgumentError("mapper input size " + std::to_string(mapper.input_size()) +
                            " != 2^n + c = " + std::to_string(prob_dim() + n_classes));
    }
    if (mapper.output_size() != feature_dim) {
        throw ArgumentError("mapper output size " + std::to_string(mapper.output_size()) +
                            " != feature dimension " + std::to_string(feature_dim));
    }
    Eigen::Index end = 0;
    for (const auto &b : softmax_blocks) {
        if (b.width < 2 || b.offset < end || b.offset + b.width > feature_dim) {
            throw ArgumentError("softmax blocks must be ordered, disjoint, at least 2 wide and inside the output");
        }
        end = b.offset + b.width;
    }
    if (!(gumbel_temperature >= 0.0) || !std::isfinite(gumbel_temperature)) {
        throw ArgumentError("Gumbel temperature must be finite and >= 0");
    }
}

std::vector<OutputBlock> categorical_blocks(const preprocess::PreprocessModel &model) {
    std::vector<OutputBlock> blocks;
    for (const auto &f : model.features) {
        if (f.kind == ColumnKind::Categorical) {
            blocks.push_back({f.offset, f.width});
        }
    }
    return blocks;
}

Eigen::MatrixXd shape_output(const GeneratorParams &gp, Eigen::MatrixXd raw, Rng &rng) {
    const double tau = gp.gumbel_temperature;
    for (Eigen::Index s = 0; s < raw.cols(); ++s) {
        for (const auto &b : gp.softmax_blocks) {
            auto col = raw.col(s).segment(b.offset, b.width);
            if (tau > 0.0) {
                for (auto &v : col) {
                    // uniform() lies in [0, 1); 0 would give an infinite draw
                    const double u = std::max(rng.uniform(), std::numeric_limits<double>::min());
                    v = (v - std::log(-std::log(u))) / tau;
                }
            }
            col = (col.array() - col.maxCoeff()).exp().matrix();
            col /= col.sum();
        }
    }
    return raw;
}

Eigen::MatrixXd shape_output_backward(const GeneratorParams &gp, const Eigen::MatrixXd &shaped,
                                      Eigen::MatrixXd grad) {
    const double inv_tau = gp.gumbel_temperature > 0.0 ? 1.0 / gp.gumbel_temperature : 1.0;
    for (const auto &b : gp.softmax_blocks) {
        const auto y = shaped.middleRows(b.offset, b.width);
        auto g = grad.middleRows(b.offset, b.width);
        for (Eigen::Index s = 0; s < g.cols(); ++s) {
            const double dot = y.col(s).dot(g.col(s));
            g.col(s) = inv_tau * (y.col(s).array() * (g.col(s).array() - dot)).matrix();
        }
    }
    return grad;
}

Eigen::Index output_dim(const preprocess::PreprocessModel &model) {
    return model.feature_dim() + (model.schema.task == Task::Regression ? 1 : 0);
}

Eigen::Index condition_dim(const preprocess::PreprocessModel &model) {
    return model.schema.task == Task::Regression ? 1 : model.label_dim();
}

GanData gan_space(const preprocess::PreprocessModel &model, const Eigen::MatrixXd &features,
                  const Eigen::MatrixXd &labels) {
    if (model.schema.task == Task::Classification) {
        return {features, labels};
    }
    GanData out;
    out.x.resize(features.rows() + 1, features.cols());
    out.x << features, labels;
    out.y = Eigen::MatrixXd::Ones(1, features.cols());
    return out;
}

Eigen::VectorXd condition_vector(const preprocess::PreprocessModel &model, int label) {
    if (model.schema.task == Task::Regression) {
        return Eigen::VectorXd::Ones(1);
    }
    if (label < 0 || label >= model.label_dim()) {
        throw ArgumentError("label " + std::to_string(label) + " outside the schema's " +
                            std::to_string(model.label_dim()) + " classes");
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(model.label_dim());
    y[label] = 1.0;
    return y;
}

GeneratorParams init_generator(int n_qubits, int n_layers, int n_classes, int feature_dim,
                               const std::vector<int> &hidden, Rng &vqc_rng, Rng &mapper_rng,
                               std::vector<OutputBlock> softmax_blocks) {
    if (n_classes < 1 || feature_dim < 1) {
        throw ConfigError("generator needs at least one condition input and one output");
    }
    GeneratorParams gp;
    gp.vqc = quantum::Vqc::random(n_qubits, n_layers, vqc_rng);
    std::vector<int> sizes{(1 << n_qubits) + n_classes};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(feature_dim);
    gp.mapper = nn::init_mlp(sizes, mapper_rng);
    gp.mapper.weights[0].leftCols(gp.prob_dim()) *= static_cast<double>(gp.prob_dim());
    gp.n_classes = n_classes;
    gp.feature_dim = feature_dim;
    gp.softmax_blocks = std::move(softmax_blocks);
    gp.validate();
    return gp;
}

Eigen::VectorXd assemble_input(const Eigen::VectorXd &p, const Eigen::VectorXd &label, bool require_onehot) {
    if (require_onehot) {
        const auto ones = (label.array() == 1.0).count();
        const auto zeros = (label.array() == 0.0).count();
        if (ones != 1 || ones + zeros != label.size()) {
            throw ArgumentError("conditioning label is not one-hot");
        }
    }
    Eigen::VectorXd h0(p.size() + label.size());
    h0 << p, label;
    return h0;
}

quantum::LatentAngles<double> draw_latent(int n_qubits, Rng &rng) {
    quantum::LatentAngles<double> z(n_qubits);
    for (int i = 0; i < n_qubits; ++i) {
        z[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    return z;
}

Eigen::VectorXd circuit_probabilities(const quantum::Vqc &vqc, const quantum::LatentAngles<double> &latent,
                                      SamplingMode mode, Rng &rng) {
    Eigen::VectorXd p = quantum::exact_probabilities(quantum::run_vqc(vqc, latent));
    if (mode.shots > 0) {
        return sampler::empirical_distribution(sampler::sample_bitstrings(p, mode.shots, rng));
    }
    return p;
}

Eigen::VectorXd generate_row(const GeneratorParams &gp, const Eigen::VectorXd &label, SamplingMode mode,
                             Rng &rng, bool require_onehot) {
    gp.validate();
    if (label.size() != gp.n_classes) {
        throw ArgumentError("label width " + std::to_string(label.size()) + " != " +
                            std::to_string(gp.n_classes));
    }
    const auto z = draw_latent(gp.vqc.n_qubits, rng);
    const auto p = circuit_probabilities(gp.vqc, z, mode, rng);
    const auto h0 = assemble_input(p, label, require_onehot);
    return shape_output(gp, nn::forward(gp.mapper, h0).first, rng);
}

Eigen::MatrixXd generate_batch(const GeneratorParams &gp, const Eigen::MatrixXd &conditions,
                               SamplingMode mode, Rng &rng) {
    gp.validate();
    if (conditions.rows() != gp.n_classes) {
        throw ArgumentError("condition width does not match the generator");
    }
    Eigen::MatrixXd h0(gp.prob_dim() + gp.n_classes, conditions.cols());
    for (Eigen::Index s = 0; s < conditions.cols(); ++s) {
        const auto z = draw_latent(gp.vqc.n_qubits, rng);
        h0.col(s) << circuit_probabilities(gp.vqc, z, mode, rng), conditions.col(s);
    }
    return shape_output(gp, nn::forward_batch(gp.mapper, h0).first, rng);
}

Table generate_table(const GeneratorParams &gp, std::span<const int> labels, SamplingMode mode, Rng &rng,
                     const preprocess::PreprocessModel &model) {
    if (!model.fitted) {
        throw ArgumentError("generate_table needs a fitted preprocessing model");
    }
    if (gp.feature_dim != output_dim(model) || gp.n_classes != condition_dim(model)) {
        throw ArgumentError("generator shape does not match the preprocessing model");
    }
    const auto rows = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd conditions(gp.n_classes, rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        conditions.col(r) = condition_vector(model, labels[static_cast<std::size_t>(r)]);
    }
    const Eigen::MatrixXd generated = generate_batch(gp, conditions, mode, rng);

    const Eigen::Index d = model.feature_dim();
    if (model.schema.task == Task::Classification) {
        return preprocess::invert(model, generated, conditions);
    }
    return preprocess::invert(model, generated.topRows(d), generated.bottomRows(1));
}

std::vector<std::int64_t> proportional_counts(std::span<const std::int64_t> counts, std::int64_t rows) {
    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (counts.empty() || total <= 0) {
        throw ArgumentError("proportional allocation needs positive class counts");
    }
    std::vector<std::int64_t> out(counts.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double exact = static_cast<double>(rows) * static_cast<double>(counts[k]) /
                             static_cast<double>(total);
        out[k] = static_cast<std::int64_t>(std::floor(exact));
        assigned += out[k];
        remainders.emplace_back(exact - static_cast<double>(out[k]), k);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < rows; ++i, ++assigned) {
        ++out[remainders[i % remainders.size()].second];
    }
    return out;
}

std::vector<int> proportional_labels(std::span<const std::int64_t> counts, std::int64_t rows, Rng &rng) {
    const auto per_class = proportional_counts(counts, rows);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(rows));
    for (std::size_t k = 0; k < per_class.size(); ++k) {
        labels.insert(labels.end(), static_cast<std::size_t>(per_class[k]), static_cast<int>(k));
    }
    rng.shuffle(std::span<int>(labels));
    return labels;
}

} // namespace qtabgen::gen

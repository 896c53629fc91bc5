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

/// @file generator.hpp
/// Hybrid generator: circuit probabilities, concatenated with the
/// conditioning label, mapped by a dense network to one synthetic row in
/// encoded space.
///
/// For classification the mapper output is the encoded feature vector and
/// the condition is the one-hot class. For regression the condition is the
/// constant pseudo-label [1] and the mapper emits the encoded features
/// followed by the scaled target.
///
/// Categorical blocks of the mapper output pass through a softmax, so the
/// discriminator sees a soft one-hot vector and decoding by argmax is
/// unchanged. With a Gumbel temperature tau > 0 the block becomes
/// softmax((logits + g) / tau) with standard Gumbel noise g, whose argmax is
/// a draw from softmax(logits).
#pragma once

#include "qtabgen/neural.hpp"
#include "qtabgen/preprocess.hpp"
#include "qtabgen/quantum.hpp"
#include "qtabgen/rng.hpp"
#include "qtabgen/table.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace qtabgen::gen {

/// Rows [offset, offset + width) of the generated vector.
struct OutputBlock {
    Eigen::Index offset = 0;
    Eigen::Index width = 0;

    bool operator==(const OutputBlock &) const = default;
};

struct GeneratorParams {
    quantum::Vqc vqc;
    nn::Net mapper;
    int n_classes = 0;   // width of the condition vector
    int feature_dim = 0; // width of the mapper output
    /// Output blocks normalized by a softmax; the rest stays linear.
    std::vector<OutputBlock> softmax_blocks;
    /// 0 keeps a plain softmax without noise.
    double gumbel_temperature = 0.0;

    [[nodiscard]] Eigen::Index prob_dim() const { return Eigen::Index{1} << vqc.n_qubits; }
    /// Throws ArgumentError unless mapper input == 2^n + c and output == d,
    /// and softmax blocks are disjoint, at least 2 wide and inside the output.
    void validate() const;

    bool operator==(const GeneratorParams &) const = default;
};

/// Width of the generated vector for a fitted preprocessing model.
Eigen::Index output_dim(const preprocess::PreprocessModel &model);
/// Width of the condition vector for a fitted preprocessing model.
Eigen::Index condition_dim(const preprocess::PreprocessModel &model);

/// Splits encoded real data into generator-space rows and condition vectors.
struct GanData {
    Eigen::MatrixXd x; // output_dim x rows
    Eigen::MatrixXd y; // condition_dim x rows
};
GanData gan_space(const preprocess::PreprocessModel &model, const Eigen::MatrixXd &features,
                  const Eigen::MatrixXd &labels);

/// Condition vector for a class index (classification) or the pseudo-label.
Eigen::VectorXd condition_vector(const preprocess::PreprocessModel &model, int label);

/// Categorical feature blocks of a fitted model, in generator space.
std::vector<OutputBlock> categorical_blocks(const preprocess::PreprocessModel &model);

/// He-uniform mapper except for the weights reading p: those are scaled by
/// 2^n, so inputs averaging 2^-n act like unit inputs at the first layer.
GeneratorParams init_generator(int n_qubits, int n_layers, int n_classes, int feature_dim,
                               const std::vector<int> &hidden, Rng &vqc_rng, Rng &mapper_rng,
                               std::vector<OutputBlock> softmax_blocks = {});

/// Applies the softmax blocks to raw mapper outputs (one column per sample).
/// Gumbel noise is drawn from `rng`, column by column, block by block.
Eigen::MatrixXd shape_output(const GeneratorParams &gp, Eigen::MatrixXd raw, Rng &rng);
/// dLoss/draw from dLoss/dshaped, given the shaped outputs. The noise only
/// shifts the logits, so it does not enter the derivative.
Eigen::MatrixXd shape_output_backward(const GeneratorParams &gp, const Eigen::MatrixXd &shaped,
                                      Eigen::MatrixXd grad);

/// h0 = [p; label]. With `require_onehot`, the label must contain exactly one 1
/// and zeros elsewhere.
Eigen::VectorXd assemble_input(const Eigen::VectorXd &p, const Eigen::VectorXd &label,
                               bool require_onehot = true);

/// Probability source for the mapper input: exact when shots == 0, otherwise
/// the empirical distribution of that many shots.
struct SamplingMode {
    std::int64_t shots = 0;
};

/// Uniform latent angles in [0, 2pi), one per qubit.
quantum::LatentAngles<double> draw_latent(int n_qubits, Rng &rng);

/// Circuit output probabilities for a latent draw under the sampling mode.
Eigen::VectorXd circuit_probabilities(const quantum::Vqc &vqc, const quantum::LatentAngles<double> &latent,
                                      SamplingMode mode, Rng &rng);

/// One synthetic row in encoded space (length feature_dim).
Eigen::VectorXd generate_row(const GeneratorParams &gp, const Eigen::VectorXd &label, SamplingMode mode,
                             Rng &rng, bool require_onehot = true);

/// Generated encoded rows for a batch of condition vectors (one per column).
Eigen::MatrixXd generate_batch(const GeneratorParams &gp, const Eigen::MatrixXd &conditions,
                               SamplingMode mode, Rng &rng);

/// One generated row per requested label, decoded to original units. The
/// target column is set to the conditioning label for classification.
/// Regression requests use label 0 for every row.
Table generate_table(const GeneratorParams &gp, std::span<const int> labels, SamplingMode mode, Rng &rng,
                     const preprocess::PreprocessModel &model);

/// Splits `rows` across classes in proportion to `counts` with
/// largest-remainder rounding (ties to the lower class index).
std::vector<std::int64_t> proportional_counts(std::span<const std::int64_t> counts, std::int64_t rows);

/// Label request list following the class frequencies in `counts`, shuffled.
std::vector<int> proportional_labels(std::span<const std::int64_t> counts, std::int64_t rows, Rng &rng);

} // namespace qtabgen::gen

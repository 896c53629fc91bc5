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

/// @file adversarial.hpp
/// Conditional discriminator, BCE losses and the alternating training loop.
///
/// The discriminator scores [x; y] in encoded space with a raw logit. It is
/// trained with real = 1 / generated = 0 targets, and the generator with the
/// non-saturating objective BCE(D(G(z, y), y), 1). Circuit gradients combine
/// the mapper's input gradient on the probability slice with the
/// parameter-shift Jacobian of each sample.
#pragma once

#include "qtabgen/generator.hpp"
#include "qtabgen/neural.hpp"
#include "qtabgen/preprocess.hpp"
#include "qtabgen/table.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace qtabgen::gan {

struct TrainConfig {
    /// One epoch is ceil(rows / batch_size) adversarial steps. A step is
    /// d_steps_per_g_step discriminator updates on fresh real minibatches
    /// followed by one generator update.
    int epochs = 300;
    int batch_size = 64;
    double lr_classical = 1e-3;
    double lr_quantum = 1e-2;
    /// First-moment decay of every Adam optimizer in the adversarial loop.
    double adam_beta1 = 0.9;
    int d_steps_per_g_step = 1;
    /// 0 trains on exact probabilities; > 0 estimates every probability
    /// vector (including parameter-shift evaluations) from that many shots.
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    int n_qubits = 8;
    int n_layers = 3;
    std::vector<int> mapper_hidden{256, 128};
    std::vector<int> disc_hidden{128, 64};
    /// Temperature of the Gumbel-softmax on categorical output blocks; 0 uses
    /// a plain softmax.
    double gumbel_temperature = 0.2;

    /// Throws ConfigError on non-positive sizes or rates.
    void validate() const;

    bool operator==(const TrainConfig &) const = default;
};

nlohmann::json to_json(const TrainConfig &config);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
TrainConfig config_from_json(const nlohmann::json &doc);

struct DiscriminatorParams {
    nn::Net mlp;

    bool operator==(const DiscriminatorParams &) const = default;
};

DiscriminatorParams init_discriminator(int feature_dim, int n_classes, const std::vector<int> &hidden,
                                       Rng &rng);

/// Raw score of [x; y]; higher means "more real".
double discriminator_logit(const DiscriminatorParams &dp, const Eigen::VectorXd &x, const Eigen::VectorXd &y);

struct BceResult {
    double loss;
    double dloss_dlogit;
};

/// softplus(logit) - target * logit and its derivative sigmoid(logit) - target.
BceResult bce_with_logits(double logit, int target);

/// Adam states for the generator's classical and quantum parameters.
struct GeneratorOptimizer {
    nn::AdamState<double> mapper;
    Eigen::MatrixXd m_y, v_y, m_z, v_z;
    long quantum_step = 0;
    nn::AdamConfig quantum;

    static GeneratorOptimizer for_params(const gen::GeneratorParams &gp, const TrainConfig &config);
};

nn::AdamState<double> discriminator_optimizer(const DiscriminatorParams &dp, const TrainConfig &config);

/// Real batch in generator space: rows (one per column) and conditions.
struct Batch {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
};

/// Mean BCE over the real batch (target 1) and as many generated rows with
/// the same conditions (target 0); one Adam step on the discriminator.
/// Returns the loss before the update.
double discriminator_step(DiscriminatorParams &dp, nn::AdamState<double> &opt, const gen::GeneratorParams &gp,
                          const Batch &real, const TrainConfig &config, Rng &rng);

struct GeneratorGradients {
    double loss = 0.0;
    nn::Net mapper;
    Eigen::MatrixXd theta_y;
    Eigen::MatrixXd theta_z;
};

/// Non-saturating generator loss and its gradients for the given conditions
/// (one per column). Latent angles and shot noise are drawn from `rng`.
GeneratorGradients generator_gradients(const gen::GeneratorParams &gp, const DiscriminatorParams &dp,
                                       const Eigen::MatrixXd &conditions, std::int64_t shots, Rng &rng);

/// generator_gradients followed by one Adam step on mapper and circuit.
/// Returns the loss before the update.
double generator_step(gen::GeneratorParams &gp, GeneratorOptimizer &opt, const DiscriminatorParams &dp,
                      const Eigen::MatrixXd &conditions, const TrainConfig &config, Rng &rng);

struct LossRecord {
    int step = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;

    bool operator==(const LossRecord &) const = default;
};

struct GanCheckpoint {
    Schema schema;
    preprocess::PreprocessModel preprocess;
    gen::GeneratorParams generator;
    DiscriminatorParams discriminator;
    TrainConfig config;
    int epoch = 0;
    std::vector<LossRecord> history;
    /// Training-set rows per class (one entry for regression); drives the
    /// default label policy at generation time.
    std::vector<std::int64_t> label_counts;

    bool operator==(const GanCheckpoint &) const = default;
};

/// Called after every epoch with the epoch number and its mean losses.
using EpochCallback = std::function<void(const LossRecord &)>;

/// Fits preprocessing (with training noise), initialises every network from
/// seeds derived from config.seed and runs config.epochs rounds.
GanCheckpoint train(const Table &data, const TrainConfig &config, const EpochCallback &on_epoch = {});

} // namespace qtabgen::gan

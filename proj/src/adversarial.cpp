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
#include "qtabgen/adversarial.hpp"

#include "qtabgen/errors.hpp"
#include "qtabgen/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace qtabgen::gan {

void TrainConfig::validate() const {
    auto require = [](bool ok, const std::string &what) {
        if (!ok) {
            throw ConfigError(what);
        }
    };
    require(epochs >= 0, "epochs must be >= 0");
    require(batch_size >= 1, "batch_size must be >= 1");
    require(lr_classical > 0 && std::isfinite(lr_classical), "lr_classical must be positive");
    require(lr_quantum > 0 && std::isfinite(lr_quantum), "lr_quantum must be positive");
    require(adam_beta1 >= 0 && adam_beta1 < 1, "adam_beta1 must be in [0, 1)");
    require(d_steps_per_g_step >= 1, "d_steps_per_g_step must be >= 1");
    require(shots >= 0, "shots must be >= 0 (0 = exact probabilities)");
    require(n_qubits >= 1 && n_qubits <= quantum::kMaxQubits, "n_qubits must be in [1, 16]");
    require(n_layers >= 1, "n_layers must be >= 1");
    for (const int h : mapper_hidden) {
        require(h >= 1, "mapper_hidden sizes must be >= 1");
    }
    for (const int h : disc_hidden) {
        require(h >= 1, "disc_hidden sizes must be >= 1");
    }
    require(gumbel_temperature >= 0 && std::isfinite(gumbel_temperature), "gumbel_temperature must be >= 0");
}

nlohmann::json to_json(const TrainConfig &c) {
    return {{"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"lr_classical", c.lr_classical},
            {"lr_quantum", c.lr_quantum},
            {"adam_beta1", c.adam_beta1},
            {"d_steps_per_g_step", c.d_steps_per_g_step},
            {"shots", c.shots},
            {"seed", c.seed},
            {"n_qubits", c.n_qubits},
            {"n_layers", c.n_layers},
            {"mapper_hidden", c.mapper_hidden},
            {"disc_hidden", c.disc_hidden},
            {"gumbel_temperature", c.gumbel_temperature}};
}

TrainConfig config_from_json(const nlohmann::json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("training configuration must be a JSON object");
    }
    static const std::set<std::string> known{"epochs",     "batch_size",         "lr_classical",
                                             "lr_quantum", "d_steps_per_g_step", "shots",
                                             "seed",       "n_qubits",           "n_layers",
                                             "mapper_hidden", "disc_hidden", "gumbel_temperature",
                                             "adam_beta1"};
    for (const auto &[key, value] : doc.items()) {
        if (!known.contains(key)) {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    TrainConfig c;
    try {
        auto read = [&](const char *key, auto &field) {
            if (doc.contains(key)) {
                doc.at(key).get_to(field);
            }
        };
        read("epochs", c.epochs);
        read("batch_size", c.batch_size);
        read("lr_classical", c.lr_classical);
        read("lr_quantum", c.lr_quantum);
        read("adam_beta1", c.adam_beta1);
        read("d_steps_per_g_step", c.d_steps_per_g_step);
        read("shots", c.shots);
        read("seed", c.seed);
        read("n_qubits", c.n_qubits);
        read("n_layers", c.n_layers);
        read("mapper_hidden", c.mapper_hidden);
        read("disc_hidden", c.disc_hidden);
        read("gumbel_temperature", c.gumbel_temperature);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("invalid configuration value: ") + e.what());
    }
    c.validate();
    return c;
}

DiscriminatorParams init_discriminator(int feature_dim, int n_classes, const std::vector<int> &hidden,
                                       Rng &rng) {
    std::vector<int> sizes{feature_dim + n_classes};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    return {nn::init_mlp(sizes, rng)};
}

double discriminator_logit(const DiscriminatorParams &dp, const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
    if (x.size() + y.size() != dp.mlp.input_size()) {
        throw ArgumentError("discriminator expects " + std::to_string(dp.mlp.input_size()) +
                            " inputs, got " + std::to_string(x.size() + y.size()));
    }
    Eigen::VectorXd in(x.size() + y.size());
    in << x, y;
    return nn::forward(dp.mlp, in).first[0];
}

BceResult bce_with_logits(double logit, int target) {
    if (target != 0 && target != 1) {
        throw ArgumentError("BCE target must be 0 or 1");
    }
    // softplus(x) = max(x, 0) + log1p(exp(-|x|)); softplus(l) - l == softplus(-l)
    const auto softplus = [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); };
    const double sigmoid = logit >= 0 ? 1.0 / (1.0 + std::exp(-logit))
                                      : std::exp(logit) / (1.0 + std::exp(logit));
    return {softplus(target == 1 ? -logit : logit), sigmoid - target};
}

GeneratorOptimizer GeneratorOptimizer::for_params(const gen::GeneratorParams &gp, const TrainConfig &config) {
    GeneratorOptimizer opt;
    opt.mapper = nn::AdamState<double>::for_params(
        gp.mapper, {.learning_rate = config.lr_classical, .beta1 = config.adam_beta1});
    const auto L = gp.vqc.n_layers;
    const auto n = gp.vqc.n_qubits;
    opt.m_y = opt.v_y = opt.m_z = opt.v_z = Eigen::MatrixXd::Zero(L, n);
    opt.quantum.learning_rate = config.lr_quantum;
    opt.quantum.beta1 = config.adam_beta1;
    return opt;
}

nn::AdamState<double> discriminator_optimizer(const DiscriminatorParams &dp, const TrainConfig &config) {
    return nn::AdamState<double>::for_params(dp.mlp,
                                             {.learning_rate = config.lr_classical, .beta1 = config.adam_beta1});
}

double discriminator_step(DiscriminatorParams &dp, nn::AdamState<double> &opt, const gen::GeneratorParams &gp,
                          const Batch &real, const TrainConfig &config, Rng &rng) {
    const Eigen::Index batch = real.x.cols();
    if (batch == 0 || real.y.cols() != batch) {
        throw ArgumentError("discriminator step needs a nonempty batch with one condition per row");
    }
    if (real.x.rows() != gp.feature_dim || real.y.rows() != gp.n_classes ||
        dp.mlp.input_size() != gp.feature_dim + gp.n_classes) {
        throw ArgumentError("real batch width " + std::to_string(real.x.rows()) + "+" +
                            std::to_string(real.y.rows()) + " does not match the discriminator input " +
                            std::to_string(dp.mlp.input_size()));
    }
    const Eigen::MatrixXd fake = gen::generate_batch(gp, real.y, {config.shots}, rng);

    Eigen::MatrixXd inputs(dp.mlp.input_size(), 2 * batch);
    inputs.topLeftCorner(gp.feature_dim, batch) = real.x;
    inputs.topRightCorner(gp.feature_dim, batch) = fake;
    inputs.bottomLeftCorner(gp.n_classes, batch) = real.y;
    inputs.bottomRightCorner(gp.n_classes, batch) = real.y;

    const auto [logits, cache] = nn::forward_batch(dp.mlp, inputs);
    const double scale = 1.0 / static_cast<double>(2 * batch);
    Eigen::MatrixXd grad(1, 2 * batch);
    double loss = 0.0;
    for (Eigen::Index s = 0; s < 2 * batch; ++s) {
        const auto r = bce_with_logits(logits(0, s), s < batch ? 1 : 0);
        loss += r.loss;
        grad(0, s) = r.dloss_dlogit * scale;
    }
    const auto g = nn::backward(dp.mlp, cache, grad);
    nn::adam_update(dp.mlp, g.params, opt);
    return loss * scale;
}

GeneratorGradients generator_gradients(const gen::GeneratorParams &gp, const DiscriminatorParams &dp,
                                       const Eigen::MatrixXd &conditions, std::int64_t shots, Rng &rng) {
    gp.validate();
    const Eigen::Index batch = conditions.cols();
    if (batch == 0 || conditions.rows() != gp.n_classes) {
        throw ArgumentError("generator step needs a nonempty batch of conditions of width c");
    }
    if (dp.mlp.input_size() != gp.feature_dim + gp.n_classes) {
        throw ArgumentError("discriminator input does not match generator output + condition");
    }
    const Eigen::Index pdim = gp.prob_dim();
    const int n = gp.vqc.n_qubits;

    std::vector<quantum::LatentAngles<double>> latents;
    latents.reserve(static_cast<std::size_t>(batch));
    Eigen::MatrixXd h0(pdim + gp.n_classes, batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
        latents.push_back(gen::draw_latent(n, rng));
        h0.col(s) << gen::circuit_probabilities(gp.vqc, latents.back(), {shots}, rng), conditions.col(s);
    }
    const auto [raw, mapper_cache] = nn::forward_batch(gp.mapper, h0);
    const Eigen::MatrixXd generated = gen::shape_output(gp, raw, rng);

    Eigen::MatrixXd d_in(generated.rows() + conditions.rows(), batch);
    d_in << generated, conditions;
    const auto [logits, disc_cache] = nn::forward_batch(dp.mlp, d_in);

    GeneratorGradients out;
    const double scale = 1.0 / static_cast<double>(batch);
    Eigen::MatrixXd grad_logits(1, batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
        const auto r = bce_with_logits(logits(0, s), 1);
        out.loss += r.loss * scale;
        grad_logits(0, s) = r.dloss_dlogit * scale;
    }
    const auto disc_grads = nn::backward(dp.mlp, disc_cache, grad_logits);
    const Eigen::MatrixXd grad_raw =
        gen::shape_output_backward(gp, generated, disc_grads.inputs.topRows(gp.feature_dim));
    auto mapper_grads = nn::backward(gp.mapper, mapper_cache, grad_raw);
    out.mapper = std::move(mapper_grads.params);

    // dLoss/dtheta = sum_s J_s^T dLoss/dp_s.
    Eigen::VectorXd flat = Eigen::VectorXd::Zero(gp.vqc.num_params());
    for (Eigen::Index s = 0; s < batch; ++s) {
        const auto grad_p = mapper_grads.inputs.col(s).head(pdim);
        if (shots > 0) {
            const auto jac = quantum::prob_jacobian(gp.vqc, latents[static_cast<std::size_t>(s)],
                                                    [&](const quantum::State &st) {
                                                        return sampler::empirical_distribution(
                                                            sampler::sample_bitstrings(
                                                                quantum::exact_probabilities(st), shots, rng));
                                                    });
            flat.noalias() += jac.transpose() * grad_p;
        } else {
            flat += quantum::prob_vjp(gp.vqc, latents[static_cast<std::size_t>(s)], Eigen::VectorXd(grad_p));
        }
    }
    out.theta_y.resize(gp.vqc.n_layers, n);
    out.theta_z.resize(gp.vqc.n_layers, n);
    for (int l = 0; l < gp.vqc.n_layers; ++l) {
        for (int i = 0; i < n; ++i) {
            out.theta_y(l, i) = flat[gp.vqc.index(l, quantum::Axis::Y, i)];
            out.theta_z(l, i) = flat[gp.vqc.index(l, quantum::Axis::Z, i)];
        }
    }
    return out;
}

double generator_step(gen::GeneratorParams &gp, GeneratorOptimizer &opt, const DiscriminatorParams &dp,
                      const Eigen::MatrixXd &conditions, const TrainConfig &config, Rng &rng) {
    auto grads = generator_gradients(gp, dp, conditions, config.shots, rng);
    nn::adam_update(gp.mapper, grads.mapper, opt.mapper);
    ++opt.quantum_step;
    nn::adam_block(gp.vqc.theta_y, grads.theta_y, opt.m_y, opt.v_y, opt.quantum_step, opt.quantum);
    nn::adam_block(gp.vqc.theta_z, grads.theta_z, opt.m_z, opt.v_z, opt.quantum_step, opt.quantum);
    return grads.loss;
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd &src, const std::vector<Eigen::Index> &idx) {
    Eigen::MatrixXd out(src.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = src.col(idx[k]);
    }
    return out;
}

/// Cycles through shuffled epochs-of-rows so consecutive minibatches sweep
/// the whole training set.
class BatchCursor {
  public:
    BatchCursor(Eigen::Index rows, Rng &rng) : rng_(rng), order_(static_cast<std::size_t>(rows)) {
        std::iota(order_.begin(), order_.end(), Eigen::Index{0});
        reshuffle();
    }

    std::vector<Eigen::Index> next(Eigen::Index size) {
        std::vector<Eigen::Index> idx;
        idx.reserve(static_cast<std::size_t>(size));
        while (static_cast<Eigen::Index>(idx.size()) < size) {
            if (pos_ == order_.size()) {
                reshuffle();
            }
            idx.push_back(order_[pos_++]);
        }
        return idx;
    }

  private:
    void reshuffle() {
        rng_.shuffle(std::span<Eigen::Index>(order_));
        pos_ = 0;
    }

    Rng &rng_;
    std::vector<Eigen::Index> order_;
    std::size_t pos_ = 0;
};

} // namespace

GanCheckpoint train(const Table &data, const TrainConfig &config, const EpochCallback &on_epoch) {
    config.validate();
    data.schema().validate();
    if (data.rows() < 2) {
        throw DataError("training needs at least 2 rows, got " + std::to_string(data.rows()));
    }

    GanCheckpoint ckpt;
    ckpt.schema = data.schema();
    ckpt.config = config;

    Rng noise_rng(derive_seed(config.seed, "preprocess.noise"));
    const auto encoded = preprocess::fit_apply(data, &noise_rng);
    ckpt.preprocess = encoded.model;
    const auto real = gen::gan_space(encoded.model, encoded.features, encoded.labels);

    if (data.schema().task == Task::Classification) {
        ckpt.label_counts.assign(static_cast<std::size_t>(data.schema().n_classes()), 0);
        const auto t = static_cast<std::size_t>(data.schema().target_index());
        for (std::size_t r = 0; r < data.rows(); ++r) {
            ++ckpt.label_counts[static_cast<std::size_t>(data.category(r, t))];
        }
    } else {
        ckpt.label_counts = {static_cast<std::int64_t>(data.rows())};
    }

    const auto out_dim = static_cast<int>(real.x.rows());
    const auto cond_dim = static_cast<int>(real.y.rows());
    Rng vqc_rng(derive_seed(config.seed, "init.vqc"));
    Rng mapper_rng(derive_seed(config.seed, "init.mapper"));
    Rng disc_rng(derive_seed(config.seed, "init.disc"));
    ckpt.generator = gen::init_generator(config.n_qubits, config.n_layers, cond_dim, out_dim,
                                         config.mapper_hidden, vqc_rng, mapper_rng,
                                         gen::categorical_blocks(ckpt.preprocess));
    ckpt.generator.gumbel_temperature = config.gumbel_temperature;
    ckpt.discriminator = init_discriminator(out_dim, cond_dim, config.disc_hidden, disc_rng);

    auto g_opt = GeneratorOptimizer::for_params(ckpt.generator, config);
    auto d_opt = discriminator_optimizer(ckpt.discriminator, config);
    Rng batch_rng(derive_seed(config.seed, "train.batches"));
    Rng gen_rng(derive_seed(config.seed, "train.generator"));
    BatchCursor cursor(real.x.cols(), batch_rng);
    const Eigen::Index batch = std::min<Eigen::Index>(config.batch_size, real.x.cols());

    const Eigen::Index rounds = (real.x.cols() + batch - 1) / batch;
    int step = 0;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        LossRecord epoch_mean{epoch, 0.0, 0.0};
        for (Eigen::Index round = 0; round < rounds; ++round) {
            double d_loss = 0.0;
            for (int k = 0; k < config.d_steps_per_g_step; ++k) {
                const auto idx = cursor.next(batch);
                const Batch real_batch{gather_columns(real.x, idx), gather_columns(real.y, idx)};
                d_loss +=
                    discriminator_step(ckpt.discriminator, d_opt, ckpt.generator, real_batch, config, gen_rng);
            }
            d_loss /= config.d_steps_per_g_step;

            // Generator conditions follow the empirical label distribution.
            std::vector<Eigen::Index> cond_idx(static_cast<std::size_t>(batch));
            for (auto &i : cond_idx) {
                i = static_cast<Eigen::Index>(batch_rng.below(static_cast<std::uint64_t>(real.y.cols())));
            }
            const double g_loss = generator_step(ckpt.generator, g_opt, ckpt.discriminator,
                                                 gather_columns(real.y, cond_idx), config, gen_rng);
            ckpt.history.push_back({++step, d_loss, g_loss});
            epoch_mean.d_loss += d_loss / static_cast<double>(rounds);
            epoch_mean.g_loss += g_loss / static_cast<double>(rounds);
        }
        ckpt.epoch = epoch;
        if (on_epoch) {
            on_epoch(epoch_mean);
        }
    }
    return ckpt;
}

} // namespace qtabgen::gan

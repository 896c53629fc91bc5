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

/// @file neural.hpp
/// Dense feedforward networks: ReLU hidden layers, linear output layer,
/// exact backpropagation and Adam. Batches are stored column-wise, one
/// sample per column.
#pragma once

#include "qtabgen/errors.hpp"
#include "qtabgen/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <string>
#include <utility>
#include <vector>

namespace qtabgen::nn {

template <std::floating_point Scalar> struct Mlp {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// weights[l] is d_{l+1} x d_l.
    std::vector<Matrix> weights;
    std::vector<Vector> biases;

    static Mlp zeros(const std::vector<int> &layer_sizes) {
        check_sizes(layer_sizes);
        Mlp m;
        for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
            m.weights.push_back(Matrix::Zero(layer_sizes[l + 1], layer_sizes[l]));
            m.biases.push_back(Vector::Zero(layer_sizes[l + 1]));
        }
        return m;
    }

    /// Same shapes as `other`, all zero.
    static Mlp zeros_like(const Mlp &other) { return zeros(other.layer_sizes()); }

    [[nodiscard]] std::vector<int> layer_sizes() const {
        std::vector<int> sizes;
        if (weights.empty()) {
            return sizes;
        }
        sizes.push_back(static_cast<int>(weights.front().cols()));
        for (const auto &w : weights) {
            sizes.push_back(static_cast<int>(w.rows()));
        }
        return sizes;
    }

    [[nodiscard]] std::size_t num_layers() const { return weights.size(); }
    [[nodiscard]] Eigen::Index input_size() const { return weights.front().cols(); }
    [[nodiscard]] Eigen::Index output_size() const { return weights.back().rows(); }

    void validate() const {
        if (weights.empty() || weights.size() != biases.size()) {
            throw ArgumentError("network needs matching, nonempty weight and bias lists");
        }
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (biases[l].size() != weights[l].rows() ||
                (l > 0 && weights[l].cols() != weights[l - 1].rows())) {
                throw ArgumentError("inconsistent shapes at layer " + std::to_string(l));
            }
        }
    }

    static void check_sizes(const std::vector<int> &layer_sizes) {
        if (layer_sizes.size() < 2) {
            throw ConfigError("a network needs at least input and output sizes");
        }
        for (const int s : layer_sizes) {
            if (s < 1) {
                throw ConfigError("layer sizes must be >= 1");
            }
        }
    }

    bool operator==(const Mlp &) const = default;
};

/// He-uniform weights in +-sqrt(6 / fan_in), zero biases.
template <std::floating_point Scalar = double>
[[nodiscard]] Mlp<Scalar> init_mlp(const std::vector<int> &layer_sizes, Rng &rng) {
    auto m = Mlp<Scalar>::zeros(layer_sizes);
    for (auto &w : m.weights) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w.cols()));
        // Column-major fill order is part of the reproducibility contract.
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                w(i, j) = static_cast<Scalar>(rng.uniform(-bound, bound));
            }
        }
    }
    return m;
}

template <std::floating_point Scalar> struct ForwardCache {
    /// activations[0] is the input batch; activations[l] = relu(pre[l-1]) for
    /// hidden layers and the linear output for the last layer.
    std::vector<typename Mlp<Scalar>::Matrix> pre_activations;
    std::vector<typename Mlp<Scalar>::Matrix> activations;
};

template <std::floating_point Scalar>
[[nodiscard]] std::pair<typename Mlp<Scalar>::Matrix, ForwardCache<Scalar>>
forward_batch(const Mlp<Scalar> &net, const typename Mlp<Scalar>::Matrix &inputs) {
    if (inputs.rows() != net.input_size()) {
        throw ArgumentError("network input has " + std::to_string(inputs.rows()) +
                            " rows, expected " + std::to_string(net.input_size()));
    }
    ForwardCache<Scalar> cache;
    cache.activations.push_back(inputs);
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        typename Mlp<Scalar>::Matrix z = net.weights[l] * cache.activations.back();
        z.colwise() += net.biases[l];
        cache.pre_activations.push_back(z);
        if (l + 1 < net.num_layers()) {
            cache.activations.push_back(z.cwiseMax(Scalar{0}));
        } else {
            cache.activations.push_back(std::move(z));
        }
    }
    return {cache.activations.back(), std::move(cache)};
}

template <std::floating_point Scalar>
[[nodiscard]] std::pair<typename Mlp<Scalar>::Vector, ForwardCache<Scalar>>
forward(const Mlp<Scalar> &net, const typename Mlp<Scalar>::Vector &x) {
    auto [y, cache] = forward_batch(net, typename Mlp<Scalar>::Matrix(x));
    return {typename Mlp<Scalar>::Vector(y.col(0)), std::move(cache)};
}

template <std::floating_point Scalar> struct Gradients {
    Mlp<Scalar> params;
    /// dLoss/dinput, one column per sample.
    typename Mlp<Scalar>::Matrix inputs;
};

/// Backpropagates dLoss/doutput (one column per sample) through the cached
/// forward pass. Parameter gradients are summed over the batch. ReLU'(0) = 0.
template <std::floating_point Scalar>
[[nodiscard]] Gradients<Scalar> backward(const Mlp<Scalar> &net, const ForwardCache<Scalar> &cache,
                                         const typename Mlp<Scalar>::Matrix &grad_outputs) {
    const std::size_t layers = net.num_layers();
    if (cache.pre_activations.size() != layers || cache.activations.size() != layers + 1 ||
        grad_outputs.rows() != net.output_size() ||
        grad_outputs.cols() != cache.activations.front().cols()) {
        throw ArgumentError("backward: gradient or cache shape does not match the network");
    }
    Gradients<Scalar> g{Mlp<Scalar>::zeros_like(net), {}};
    typename Mlp<Scalar>::Matrix delta = grad_outputs;
    for (std::size_t l = layers; l-- > 0;) {
        g.params.weights[l].noalias() = delta * cache.activations[l].transpose();
        g.params.biases[l] = delta.rowwise().sum();
        typename Mlp<Scalar>::Matrix upstream = net.weights[l].transpose() * delta;
        if (l > 0) {
            delta = upstream.cwiseProduct(
                (cache.pre_activations[l - 1].array() > Scalar{0}).template cast<Scalar>().matrix());
        } else {
            g.inputs = std::move(upstream);
        }
    }
    return g;
}

template <std::floating_point Scalar>
[[nodiscard]] Gradients<Scalar> backward(const Mlp<Scalar> &net, const ForwardCache<Scalar> &cache,
                                         const typename Mlp<Scalar>::Vector &grad_y) {
    return backward(net, cache, typename Mlp<Scalar>::Matrix(grad_y));
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// One bias-corrected Adam update of a single parameter block. `step` is the
/// 1-based step count after incrementing.
template <typename Param, typename Grad, typename Moment>
void adam_block(Eigen::MatrixBase<Param> &param, const Eigen::MatrixBase<Grad> &grad,
                Eigen::MatrixBase<Moment> &m, Eigen::MatrixBase<Moment> &v, long step,
                const AdamConfig &cfg) {
    using S = typename Param::Scalar;
    const auto b1 = static_cast<S>(cfg.beta1);
    const auto b2 = static_cast<S>(cfg.beta2);
    m = b1 * m + (S{1} - b1) * grad;
    v = b2 * v + (S{1} - b2) * grad.cwiseAbs2();
    const S c1 = S{1} - std::pow(b1, static_cast<S>(step));
    const S c2 = S{1} - std::pow(b2, static_cast<S>(step));
    const auto lr = static_cast<S>(cfg.learning_rate);
    const auto eps = static_cast<S>(cfg.epsilon);
    param -= (lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps)).matrix();
}

template <std::floating_point Scalar> struct AdamState {
    Mlp<Scalar> first_moment;
    Mlp<Scalar> second_moment;
    long step = 0;
    AdamConfig config;

    static AdamState for_params(const Mlp<Scalar> &params, AdamConfig cfg) {
        return {Mlp<Scalar>::zeros_like(params), Mlp<Scalar>::zeros_like(params), 0, cfg};
    }
};

template <std::floating_point Scalar>
void adam_update(Mlp<Scalar> &params, const Mlp<Scalar> &grads, AdamState<Scalar> &state) {
    if (params.layer_sizes() != grads.layer_sizes() ||
        params.layer_sizes() != state.first_moment.layer_sizes()) {
        throw ArgumentError("adam_update: parameter, gradient and state shapes differ");
    }
    ++state.step;
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
        adam_block(params.weights[l], grads.weights[l], state.first_moment.weights[l],
                   state.second_moment.weights[l], state.step, state.config);
        adam_block(params.biases[l], grads.biases[l], state.first_moment.biases[l],
                   state.second_moment.biases[l], state.step, state.config);
    }
}

using Net = Mlp<double>;
using Matrix = Net::Matrix;
using Vector = Net::Vector;

} // namespace qtabgen::nn

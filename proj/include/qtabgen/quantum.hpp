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

/// @file quantum.hpp
/// Exact statevector simulation of the generator's variational circuit.
///
/// Qubit 0 is the most significant bit of a basis-state index, so the basis
/// state |q0 q1 ... q(n-1)> lives at index sum_i q_i * 2^(n-1-i).
///
/// The circuit is a Hadamard layer on |0...0> followed by L layers of
///   RY(theta_y[l, i] + [l == 0] z_i) on every qubit,
///   RZ(theta_z[l, i]) on every qubit,
///   CNOT(i, (i+1) mod n) for i = 0..n-1.
/// The latent angles z only enter the first layer's RY rotations.
#pragma once

#include "qtabgen/errors.hpp"
#include "qtabgen/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <concepts>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qtabgen::quantum {

inline constexpr int kMaxQubits = 16;

enum class Axis { Y, Z };

template <std::floating_point Real> using ProbVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <std::floating_point Real> using LatentAngles = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
template <std::floating_point Real>
using AngleMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// 2^n complex amplitudes of an n-qubit register.
template <std::floating_point Real> class StateVector {
  public:
    using Complex = std::complex<Real>;
    using Amplitudes = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    /// |0...0> on n_qubits qubits.
    explicit StateVector(int n_qubits) : n_qubits_(checked_qubits(n_qubits)) {
        amplitudes_ = Amplitudes::Zero(Eigen::Index{1} << n_qubits_);
        amplitudes_[0] = Complex{1, 0};
    }

    StateVector(int n_qubits, Amplitudes amplitudes)
        : n_qubits_(checked_qubits(n_qubits)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != (Eigen::Index{1} << n_qubits_)) {
            throw ArgumentError("statevector length " + std::to_string(amplitudes_.size()) +
                                " does not match 2^" + std::to_string(n_qubits_));
        }
    }

    [[nodiscard]] int n_qubits() const { return n_qubits_; }
    [[nodiscard]] Eigen::Index dim() const { return amplitudes_.size(); }
    [[nodiscard]] const Amplitudes &amplitudes() const { return amplitudes_; }
    [[nodiscard]] Amplitudes &amplitudes() { return amplitudes_; }
    [[nodiscard]] Real norm_squared() const { return amplitudes_.squaredNorm(); }

    /// Bit position of a qubit inside a basis index.
    [[nodiscard]] Eigen::Index stride(int qubit) const {
        check_qubit(qubit);
        return Eigen::Index{1} << (n_qubits_ - 1 - qubit);
    }

    void check_qubit(int qubit) const {
        if (qubit < 0 || qubit >= n_qubits_) {
            throw ArgumentError("qubit index " + std::to_string(qubit) + " out of range for " +
                                std::to_string(n_qubits_) + " qubits");
        }
    }

  private:
    static int checked_qubits(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw ConfigError("number of qubits must be in [1, " + std::to_string(kMaxQubits) +
                              "], got " + std::to_string(n));
        }
        return n;
    }

    int n_qubits_;
    Amplitudes amplitudes_;
};

template <std::floating_point Real = double> StateVector<Real> zero_state(int n_qubits) {
    return StateVector<Real>(n_qubits);
}

// ---------------------------------------------------------------------------
// In-place gate kernels.

namespace detail {

/// Applies the 2x2 matrix [[m00, m01], [m10, m11]] to every amplitude pair
/// that differs only in the bit at `stride`.
template <typename Real, typename Coeff>
void apply_pairwise(StateVector<Real> &state, Eigen::Index stride, Coeff m00, Coeff m01, Coeff m10,
                    Coeff m11) {
    auto *data = state.amplitudes().data();
    const Eigen::Index dim = state.dim();
    for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
        for (Eigen::Index i = block; i < block + stride; ++i) {
            const auto a = data[i];
            const auto b = data[i + stride];
            data[i] = m00 * a + m01 * b;
            data[i + stride] = m10 * a + m11 * b;
        }
    }
}

} // namespace detail

template <std::floating_point Real> void hadamard_layer_inplace(StateVector<Real> &state) {
    const Real h = Real{1} / std::sqrt(Real{2});
    for (int q = 0; q < state.n_qubits(); ++q) {
        detail::apply_pairwise(state, state.stride(q), h, h, h, -h);
    }
}

template <std::floating_point Real>
void rotate_inplace(StateVector<Real> &state, int qubit, Axis axis, Real theta) {
    const Eigen::Index stride = state.stride(qubit);
    const Real c = std::cos(theta / 2);
    const Real s = std::sin(theta / 2);
    if (axis == Axis::Y) {
        detail::apply_pairwise(state, stride, c, -s, s, c);
        return;
    }
    // RZ is diagonal: e^{-i theta/2} on |0>, e^{+i theta/2} on |1>.
    const std::complex<Real> phase0{c, -s};
    const std::complex<Real> phase1{c, s};
    auto *data = state.amplitudes().data();
    for (Eigen::Index block = 0; block < state.dim(); block += 2 * stride) {
        for (Eigen::Index i = block; i < block + stride; ++i) {
            data[i] *= phase0;
            data[i + stride] *= phase1;
        }
    }
}

template <std::floating_point Real>
void cnot_inplace(StateVector<Real> &state, int control, int target) {
    if (control == target) {
        throw ArgumentError("CNOT control and target must differ (both " + std::to_string(control) +
                            ")");
    }
    const Eigen::Index cbit = state.stride(control);
    const Eigen::Index tbit = state.stride(target);
    auto *data = state.amplitudes().data();
    for (Eigen::Index i = 0; i < state.dim(); ++i) {
        if ((i & cbit) != 0 && (i & tbit) == 0) {
            std::swap(data[i], data[i | tbit]);
        }
    }
}

// Value-returning forms.

template <std::floating_point Real>
[[nodiscard]] StateVector<Real> apply_hadamard_layer(StateVector<Real> state) {
    hadamard_layer_inplace(state);
    return state;
}

template <std::floating_point Real>
[[nodiscard]] StateVector<Real> apply_rotation(StateVector<Real> state, int qubit, Axis axis,
                                               Real theta) {
    rotate_inplace(state, qubit, axis, theta);
    return state;
}

template <std::floating_point Real>
[[nodiscard]] StateVector<Real> apply_cnot(StateVector<Real> state, int control, int target) {
    cnot_inplace(state, control, target);
    return state;
}

// ---------------------------------------------------------------------------
// Variational circuit.

/// Trainable rotation angles, one row per layer and one column per qubit.
template <std::floating_point Real> struct VqcParams {
    int n_qubits = 0;
    int n_layers = 0;
    AngleMatrix<Real> theta_y;
    AngleMatrix<Real> theta_z;

    VqcParams() = default;
    VqcParams(int qubits, int layers)
        : n_qubits(qubits), n_layers(layers), theta_y(AngleMatrix<Real>::Zero(layers, qubits)),
          theta_z(AngleMatrix<Real>::Zero(layers, qubits)) {
        validate();
    }

    /// Angles drawn uniformly from [0, 2pi).
    static VqcParams random(int qubits, int layers, Rng &rng) {
        VqcParams p(qubits, layers);
        for (int l = 0; l < layers; ++l) {
            for (int i = 0; i < qubits; ++i) {
                p.theta_y(l, i) = static_cast<Real>(rng.uniform(0.0, 2.0 * std::numbers::pi));
            }
            for (int i = 0; i < qubits; ++i) {
                p.theta_z(l, i) = static_cast<Real>(rng.uniform(0.0, 2.0 * std::numbers::pi));
            }
        }
        return p;
    }

    [[nodiscard]] Eigen::Index num_params() const { return Eigen::Index{2} * n_layers * n_qubits; }

    /// Flat parameter index: per layer, the n RY angles then the n RZ angles.
    [[nodiscard]] Eigen::Index index(int layer, Axis axis, int qubit) const {
        return Eigen::Index{2} * layer * n_qubits + (axis == Axis::Z ? n_qubits : 0) + qubit;
    }

    [[nodiscard]] Real &at(Eigen::Index flat) {
        const auto layer = flat / (2 * n_qubits);
        const auto rem = flat % (2 * n_qubits);
        return rem < n_qubits ? theta_y(layer, rem) : theta_z(layer, rem - n_qubits);
    }
    [[nodiscard]] Real at(Eigen::Index flat) const { return const_cast<VqcParams &>(*this).at(flat); }

    void validate() const {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ConfigError("number of qubits must be in [1, " + std::to_string(kMaxQubits) + "]");
        }
        if (n_layers < 1) {
            throw ConfigError("circuit needs at least one layer");
        }
        if (theta_y.rows() != n_layers || theta_y.cols() != n_qubits || theta_z.rows() != n_layers ||
            theta_z.cols() != n_qubits) {
            throw ArgumentError("angle matrices must be n_layers x n_qubits");
        }
    }

    bool operator==(const VqcParams &) const = default;
};

namespace detail {

enum class GateKind { RotY, RotZ, Cnot };

template <typename Real> struct Gate {
    GateKind kind;
    int a;
    int b;
    Real angle;
    Eigen::Index param; // -1 for gates without a trainable angle
};

template <typename Real>
std::vector<Gate<Real>> vqc_gates(const VqcParams<Real> &params, const LatentAngles<Real> &latent) {
    params.validate();
    if (latent.size() != params.n_qubits) {
        throw ArgumentError("latent angle vector has length " + std::to_string(latent.size()) +
                            ", expected " + std::to_string(params.n_qubits));
    }
    const int n = params.n_qubits;
    std::vector<Gate<Real>> gates;
    gates.reserve(static_cast<std::size_t>(params.n_layers) * 3 * n);
    for (int l = 0; l < params.n_layers; ++l) {
        for (int i = 0; i < n; ++i) {
            const Real z = l == 0 ? latent[i] : Real{0};
            gates.push_back({GateKind::RotY, i, 0, params.theta_y(l, i) + z, params.index(l, Axis::Y, i)});
        }
        for (int i = 0; i < n; ++i) {
            gates.push_back({GateKind::RotZ, i, 0, params.theta_z(l, i), params.index(l, Axis::Z, i)});
        }
        if (n > 1) {
            for (int i = 0; i < n; ++i) {
                gates.push_back({GateKind::Cnot, i, (i + 1) % n, Real{0}, -1});
            }
        }
    }
    return gates;
}

template <typename Real>
void apply_gate(StateVector<Real> &state, const Gate<Real> &gate, Real shift = Real{0}) {
    switch (gate.kind) {
    case GateKind::RotY:
        rotate_inplace(state, gate.a, Axis::Y, gate.angle + shift);
        break;
    case GateKind::RotZ:
        rotate_inplace(state, gate.a, Axis::Z, gate.angle + shift);
        break;
    case GateKind::Cnot:
        cnot_inplace(state, gate.a, gate.b);
        break;
    }
}

} // namespace detail

// A single qubit has no ring partner, so the entangling block is empty for n = 1.
template <std::floating_point Real>
[[nodiscard]] StateVector<Real> run_vqc(const VqcParams<Real> &params,
                                        const LatentAngles<Real> &latent) {
    const auto gates = detail::vqc_gates(params, latent);
    StateVector<Real> state(params.n_qubits);
    hadamard_layer_inplace(state);
    for (const auto &g : gates) {
        detail::apply_gate(state, g);
    }
    return state;
}

template <std::floating_point Real>
[[nodiscard]] ProbVector<Real> exact_probabilities(const StateVector<Real> &state) {
    return state.amplitudes().cwiseAbs2();
}

/// Parameter-shift Jacobian of the outcome probabilities, 2^n x 2Ln. Column j
/// is (P(theta_j + pi/2) - P(theta_j - pi/2)) / 2, where P is produced by
/// `estimate` from the shifted final state. The state before each trainable
/// gate is cached so only the circuit suffix is replayed per shift.
template <std::floating_point Real, typename Estimator>
[[nodiscard]] Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>
prob_jacobian(const VqcParams<Real> &params, const LatentAngles<Real> &latent, Estimator &&estimate) {
    const auto gates = detail::vqc_gates(params, latent);
    const Eigen::Index dim = Eigen::Index{1} << params.n_qubits;
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> jac(dim, params.num_params());
    constexpr Real kShift = std::numbers::pi_v<Real> / 2;

    StateVector<Real> prefix(params.n_qubits);
    hadamard_layer_inplace(prefix);
    auto shifted_probs = [&](std::size_t k, Real shift) {
        StateVector<Real> s = prefix;
        detail::apply_gate(s, gates[k], shift);
        for (std::size_t m = k + 1; m < gates.size(); ++m) {
            detail::apply_gate(s, gates[m]);
        }
        return ProbVector<Real>(estimate(s));
    };
    for (std::size_t k = 0; k < gates.size(); ++k) {
        const auto &g = gates[k];
        if (g.param >= 0) {
            jac.col(g.param) = (shifted_probs(k, kShift) - shifted_probs(k, -kShift)) / Real{2};
        }
        detail::apply_gate(prefix, g);
    }
    return jac;
}

template <std::floating_point Real>
[[nodiscard]] Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>
prob_jacobian(const VqcParams<Real> &params, const LatentAngles<Real> &latent) {
    return prob_jacobian(params, latent,
                         [](const StateVector<Real> &s) { return exact_probabilities(s); });
}

/// weights^T J for the exact parameter-shift Jacobian J, without forming J.
/// One forward sweep, then a backward sweep that carries the adjoint state
/// S^dagger diag(weights) |psi_final> next to the uncomputed forward state;
/// each column entry is Im <adjoint| P |psi> for the gate's Pauli generator P,
/// which is what the +-pi/2 shift difference evaluates to.
template <std::floating_point Real>
[[nodiscard]] Eigen::Matrix<Real, Eigen::Dynamic, 1>
prob_vjp(const VqcParams<Real> &params, const LatentAngles<Real> &latent, const ProbVector<Real> &weights) {
    const auto gates = detail::vqc_gates(params, latent);
    const Eigen::Index dim = Eigen::Index{1} << params.n_qubits;
    if (weights.size() != dim) {
        throw ArgumentError("prob_vjp: weight vector has length " + std::to_string(weights.size()) +
                            ", expected " + std::to_string(dim));
    }
    StateVector<Real> psi(params.n_qubits);
    hadamard_layer_inplace(psi);
    for (const auto &g : gates) {
        detail::apply_gate(psi, g);
    }
    StateVector<Real> lambda(params.n_qubits,
                             typename StateVector<Real>::Amplitudes(psi.amplitudes().cwiseProduct(
                                 weights.template cast<std::complex<Real>>())));

    Eigen::Matrix<Real, Eigen::Dynamic, 1> out = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(params.num_params());
    for (std::size_t k = gates.size(); k-- > 0;) {
        const auto &g = gates[k];
        if (g.param >= 0) {
            const Eigen::Index stride = psi.stride(g.a);
            const auto *p = psi.amplitudes().data();
            const auto *l = lambda.amplitudes().data();
            Real acc{0};
            for (Eigen::Index block = 0; block < dim; block += 2 * stride) {
                for (Eigen::Index i = block; i < block + stride; ++i) {
                    const auto j = i + stride;
                    if (g.kind == detail::GateKind::RotY) {
                        // Y: (P psi)_i = -i psi_j, (P psi)_j = i psi_i
                        acc += std::imag(std::conj(l[i]) * std::complex<Real>(0, -1) * p[j] +
                                         std::conj(l[j]) * std::complex<Real>(0, 1) * p[i]);
                    } else {
                        acc += std::imag(std::conj(l[i]) * p[i] - std::conj(l[j]) * p[j]);
                    }
                }
            }
            out[g.param] = acc;
        }
        auto inverse = g;
        inverse.angle = -g.angle;
        detail::apply_gate(psi, inverse);
        detail::apply_gate(lambda, inverse);
    }
    return out;
}

using State = StateVector<double>;
using Vqc = VqcParams<double>;

} // namespace qtabgen::quantum

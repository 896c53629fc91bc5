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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dense_oracle.hpp"
#include "qtabgen/quantum.hpp"

#include <numbers>

using namespace qtabgen;
using namespace qtabgen::quantum;

namespace {

constexpr double kPi = std::numbers::pi;

State basis(int n, Eigen::Index index) {
    State::Amplitudes a = State::Amplitudes::Zero(Eigen::Index{1} << n);
    a[index] = 1.0;
    return State(n, a);
}

State random_state(int n, Rng &rng) {
    State::Amplitudes a(Eigen::Index{1} << n);
    for (auto &x : a) {
        x = {rng.normal(), rng.normal()};
    }
    a.normalize();
    return State(n, a);
}

Eigen::VectorXd random_latent(int n, Rng &rng) {
    Eigen::VectorXd z(n);
    for (auto &v : z) {
        v = rng.uniform(0.0, 2.0 * kPi);
    }
    return z;
}

/// Central finite differences of the exact probabilities.
Eigen::MatrixXd fd_jacobian(Vqc params, const Eigen::VectorXd &z, double h) {
    Eigen::MatrixXd jac(Eigen::Index{1} << params.n_qubits, params.num_params());
    for (Eigen::Index j = 0; j < params.num_params(); ++j) {
        const double orig = params.at(j);
        params.at(j) = orig + h;
        const Eigen::VectorXd up = exact_probabilities(run_vqc(params, z));
        params.at(j) = orig - h;
        const Eigen::VectorXd down = exact_probabilities(run_vqc(params, z));
        params.at(j) = orig;
        jac.col(j) = (up - down) / (2 * h);
    }
    return jac;
}

} // namespace

TEST_CASE("zero_state") {
    const auto s1 = zero_state(1);
    CHECK(s1.dim() == 2);
    CHECK(s1.amplitudes()[0] == std::complex<double>(1, 0));
    CHECK(s1.amplitudes()[1] == std::complex<double>(0, 0));

    const auto s3 = zero_state(3);
    CHECK(s3.dim() == 8);
    CHECK(s3.amplitudes()[0] == std::complex<double>(1, 0));
    CHECK(s3.amplitudes().tail(7).isZero());

    CHECK(zero_state(8).dim() == 256);

    CHECK_THROWS_AS(zero_state(0), ConfigError);
    CHECK_THROWS_AS(zero_state(17), ConfigError);
    CHECK_THROWS_AS(State(2, State::Amplitudes::Zero(3)), ArgumentError);
}

TEST_CASE("hadamard layer") {
    const auto one = apply_hadamard_layer(zero_state(1));
    CHECK(std::abs(one.amplitudes()[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(one.amplitudes()[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

    const auto two = apply_hadamard_layer(zero_state(2));
    for (const auto a : two.amplitudes()) {
        CHECK(std::abs(a - 0.5) < 1e-15);
    }

    const auto back = apply_hadamard_layer(apply_hadamard_layer(zero_state(3)));
    CHECK((back.amplitudes() - zero_state(3).amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotations") {
    const auto flipped = apply_rotation(zero_state(1), 0, Axis::Y, kPi);
    CHECK(std::abs(flipped.amplitudes()[0]) < 1e-15);
    CHECK(std::abs(flipped.amplitudes()[1] - 1.0) < 1e-15);

    for (const double theta : {0.3, 1.7, -2.2, 5.0}) {
        const auto p = exact_probabilities(apply_rotation(zero_state(1), 0, Axis::Z, theta));
        CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p[1] == doctest::Approx(0.0));
    }

    const auto half = exact_probabilities(apply_rotation(zero_state(1), 0, Axis::Y, kPi / 2));
    CHECK(half[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(half[1] == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS((void)apply_rotation(zero_state(2), 2, Axis::Y, 0.1), ArgumentError);
    CHECK_THROWS_AS((void)apply_rotation(zero_state(2), -1, Axis::Z, 0.1), ArgumentError);
}

TEST_CASE("rotation matrices agree with the dense definitions") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3;
        const auto s = random_state(n, rng);
        const int q = static_cast<int>(rng.below(n));
        const double theta = rng.uniform(-5.0, 5.0);
        const auto y = apply_rotation(s, q, Axis::Y, theta);
        const auto z = apply_rotation(s, q, Axis::Z, theta);
        CHECK((y.amplitudes() - oracle::embed(oracle::ry(theta), q, n) * s.amplitudes()).norm() < 1e-13);
        CHECK((z.amplitudes() - oracle::embed(oracle::rz(theta), q, n) * s.amplitudes()).norm() < 1e-13);
    }
}

TEST_CASE("cnot") {
    // |10>: qubit 0 is the most significant bit, so index 2.
    const auto out = apply_cnot(basis(2, 2), 0, 1);
    CHECK(std::abs(out.amplitudes()[3] - 1.0) < 1e-15);

    const auto same = apply_cnot(basis(2, 0), 0, 1);
    CHECK(std::abs(same.amplitudes()[0] - 1.0) < 1e-15);

    State::Amplitudes a = State::Amplitudes::Zero(4);
    a[0] = a[2] = 1.0 / std::sqrt(2.0);
    const auto bell = apply_cnot(State(2, a), 0, 1);
    CHECK(std::abs(bell.amplitudes()[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(bell.amplitudes()[3] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(bell.amplitudes()[1]) == 0.0);
    CHECK(std::abs(bell.amplitudes()[2]) == 0.0);

    CHECK_THROWS_AS((void)apply_cnot(zero_state(2), 1, 1), ArgumentError);
    CHECK_THROWS_AS((void)apply_cnot(zero_state(2), 0, 2), ArgumentError);
}

TEST_CASE("gate algebra on random states") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(5));
        const auto s = random_state(n, rng);
        const auto hh = apply_hadamard_layer(apply_hadamard_layer(s));
        CHECK((hh.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const double theta = rng.uniform(-7.0, 7.0);
        for (const auto axis : {Axis::Y, Axis::Z}) {
            const auto rr = apply_rotation(apply_rotation(s, q, axis, theta), q, axis, -theta);
            CHECK((rr.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
        }
        if (n > 1) {
            const int t = (q + 1) % n;
            const auto cc = apply_cnot(apply_cnot(s, q, t), q, t);
            CHECK((cc.amplitudes() - s.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("norm is preserved over long random gate sequences") {
    Rng rng(3);
    const int n = 6;
    State s = random_state(n, rng);
    double worst = 0.0;
    for (int g = 0; g < 1000; ++g) {
        switch (rng.below(4)) {
        case 0:
            hadamard_layer_inplace(s);
            break;
        case 1:
            rotate_inplace(s, static_cast<int>(rng.below(n)), Axis::Y, rng.uniform(-7.0, 7.0));
            break;
        case 2:
            rotate_inplace(s, static_cast<int>(rng.below(n)), Axis::Z, rng.uniform(-7.0, 7.0));
            break;
        default: {
            const int c = static_cast<int>(rng.below(n));
            cnot_inplace(s, c, (c + 1 + static_cast<int>(rng.below(n - 1))) % n);
        }
        }
        worst = std::max(worst, std::abs(s.norm_squared() - 1.0));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("run_vqc") {
    SUBCASE("identity rotations leave the uniform state") {
        Vqc params(2, 1);
        const auto p = exact_probabilities(run_vqc(params, Eigen::VectorXd(Eigen::VectorXd::Zero(2))));
        for (const double v : p) {
            CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
        }
    }
    SUBCASE("8 qubits, 3 layers normalised") {
        Rng rng(5);
        const auto params = Vqc::random(8, 3, rng);
        const auto p = exact_probabilities(run_vqc(params, random_latent(8, rng)));
        CHECK(p.size() == 256);
        CHECK(std::abs(p.sum() - 1.0) < 1e-9);
        CHECK((p.array() >= 0.0).all());
        CHECK((p.array() <= 1.0).all());
    }
    SUBCASE("seed 42, n=3, L=2 matches the dense-unitary product") {
        Rng rng(42);
        const auto params = Vqc::random(3, 2, rng);
        const auto z = random_latent(3, rng);
        const auto p = exact_probabilities(run_vqc(params, z));
        const auto expected = oracle::circuit_probabilities(params.theta_y, params.theta_z, z);
        CHECK((p - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("dimension mismatches") {
        Vqc params(3, 2);
        CHECK_THROWS_AS((void)run_vqc(params, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), ArgumentError);
        params.theta_z = Eigen::MatrixXd::Zero(1, 3);
        CHECK_THROWS_AS((void)run_vqc(params, Eigen::VectorXd(Eigen::VectorXd::Zero(3))), ArgumentError);
    }
}

TEST_CASE("run_vqc equals the dense oracle for n <= 4") {
    Rng rng(2024);
    for (int draw = 0; draw < 20; ++draw) {
        const int n = 1 + draw % 4;
        const int layers = 1 + draw % 3;
        const auto params = Vqc::random(n, layers, rng);
        const auto z = random_latent(n, rng);
        const auto p = exact_probabilities(run_vqc(params, z));
        const auto expected = oracle::circuit_probabilities(params.theta_y, params.theta_z, z);
        CHECK((p - expected).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("exact_probabilities") {
    State::Amplitudes a(2);
    a << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto p = exact_probabilities(State(1, a));
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));

    const auto z = exact_probabilities(zero_state(2));
    CHECK(z == Eigen::Vector4d(1, 0, 0, 0));
}

TEST_CASE("prob_jacobian") {
    SUBCASE("columns sum to zero") {
        Rng rng(9);
        for (int trial = 0; trial < 5; ++trial) {
            const int n = 1 + trial;
            const auto params = Vqc::random(n, 2, rng);
            const auto jac = prob_jacobian(params, random_latent(n, rng));
            CHECK(jac.rows() == (1 << n));
            CHECK(jac.cols() == 4 * n);
            CHECK(jac.colwise().sum().cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("seed 42 matches central finite differences") {
        Rng rng(42);
        const auto params = Vqc::random(3, 2, rng);
        const auto z = random_latent(3, rng);
        const auto jac = prob_jacobian(params, z);
        CHECK((jac - fd_jacobian(params, z, 1e-5)).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("twenty random draws match finite differences") {
        Rng rng(77);
        double worst = 0.0;
        for (int draw = 0; draw < 20; ++draw) {
            const auto params = Vqc::random(3, 2, rng);
            const auto z = random_latent(3, rng);
            worst = std::max(worst, (prob_jacobian(params, z) - fd_jacobian(params, z, 1e-5)).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-6);
    }
    SUBCASE("last-layer RZ angles never move the probabilities") {
        for (const int layers : {1, 2}) {
            Vqc params(2, layers);
            const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
            const auto jac = prob_jacobian(params, z);
            const auto fd = fd_jacobian(params, z, 1e-5);
            for (int q = 0; q < 2; ++q) {
                const auto col = params.index(layers - 1, Axis::Z, q);
                CHECK(jac.col(col).cwiseAbs().maxCoeff() < 1e-12);
                CHECK(fd.col(col).cwiseAbs().maxCoeff() < 1e-9);
            }
        }
    }
    SUBCASE("latent angles shift the RY parameters they share a gate with") {
        // d p / d theta_y(0, i) equals d p / d z_i: check against FD in z.
        Rng rng(13);
        const auto params = Vqc::random(3, 1, rng);
        Eigen::VectorXd z = random_latent(3, rng);
        const auto jac = prob_jacobian(params, z);
        for (int i = 0; i < 3; ++i) {
            Eigen::VectorXd up = z;
            Eigen::VectorXd down = z;
            up[i] += 1e-5;
            down[i] -= 1e-5;
            const Eigen::VectorXd fd =
                (exact_probabilities(run_vqc(params, up)) - exact_probabilities(run_vqc(params, down))) / 2e-5;
            CHECK((jac.col(params.index(0, Axis::Y, i)) - fd).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("prob_vjp equals the transposed Jacobian times the weights") {
    Rng rng(19);
    for (int draw = 0; draw < 20; ++draw) {
        const int n = 1 + draw % 6;
        const auto params = Vqc::random(n, 1 + draw % 3, rng);
        const auto z = random_latent(n, rng);
        Eigen::VectorXd w(Eigen::Index{1} << n);
        for (auto &v : w) {
            v = rng.normal();
        }
        const Eigen::VectorXd expected = prob_jacobian(params, z).transpose() * w;
        CHECK((prob_vjp(params, z, w) - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    Vqc params(2, 1);
    CHECK_THROWS_AS((void)prob_vjp(params, Eigen::VectorXd(Eigen::VectorXd::Zero(2)), Eigen::VectorXd(Eigen::VectorXd::Zero(3))),
                    ArgumentError);
}

TEST_CASE("VqcParams flat indexing") {
    Vqc params(3, 2);
    CHECK(params.num_params() == 12);
    CHECK(params.index(0, Axis::Y, 0) == 0);
    CHECK(params.index(0, Axis::Z, 2) == 5);
    CHECK(params.index(1, Axis::Y, 1) == 7);
    params.at(10) = 1.5;
    CHECK(params.theta_z(1, 1) == 1.5);

    Rng rng(1);
    const auto r = Vqc::random(4, 3, rng);
    CHECK((r.theta_y.array() >= 0.0).all());
    CHECK((r.theta_y.array() < 2 * kPi).all());
    CHECK((r.theta_z.array() < 2 * kPi).all());
    CHECK_THROWS_AS(Vqc(3, 0), ConfigError);
}

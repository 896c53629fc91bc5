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

#include "qtabgen/generator.hpp"
#include "qtabgen/metrics.hpp"
#include "support.hpp"

#include <numeric>

using namespace qtabgen;
using namespace qtabgen::gen;

namespace {

GeneratorParams make_generator(int n, int layers, int c, int d, std::uint64_t seed) {
    Rng a(seed);
    Rng b(seed + 1);
    return init_generator(n, layers, c, d, {16}, a, b);
}

} // namespace

TEST_CASE("assemble_input") {
    const Eigen::Vector4d p(0.1, 0.2, 0.3, 0.4);
    const auto h0 = assemble_input(p, Eigen::Vector2d(0, 1));
    CHECK(h0.size() == 6);
    CHECK(h0.head(4) == p);
    CHECK(h0.tail(2) == Eigen::Vector2d(0, 1));

    const Eigen::VectorXd p8 = Eigen::VectorXd::Constant(256, 1.0 / 256);
    CHECK(assemble_input(p8, Eigen::Vector2d(1, 0)).size() == 258);

    CHECK_THROWS_AS(assemble_input(p, Eigen::Vector2d(0.5, 0.5)), ArgumentError);
    CHECK_THROWS_AS(assemble_input(p, Eigen::Vector2d(1, 1)), ArgumentError);
    CHECK(assemble_input(p, Eigen::VectorXd::Ones(1), false).size() == 5);
}

TEST_CASE("init_generator shapes") {
    const auto gp = make_generator(3, 2, 2, 5, 1);
    CHECK(gp.mapper.layer_sizes() == std::vector<int>{8 + 2, 16, 5});
    CHECK(gp.vqc.theta_y.rows() == 2);
    CHECK(gp.prob_dim() == 8);
    CHECK_NOTHROW(gp.validate());
    auto broken = gp;
    broken.feature_dim = 4;
    CHECK_THROWS_AS(broken.validate(), ArgumentError);
}

TEST_CASE("init_generator weight scales") {
    Rng a(3);
    Rng b(4);
    Rng ref_rng(4);
    const auto gp = init_generator(3, 1, 2, 5, {16}, a, b);
    // same draws as a plain He-uniform net, with the p columns scaled by 2^n
    auto ref = nn::init_mlp({10, 16, 5}, ref_rng);
    ref.weights[0].leftCols(8) *= 8.0;
    CHECK(gp.mapper == ref);
}

TEST_CASE("softmax blocks") {
    Rng a(5);
    Rng b(6);
    const auto gp = init_generator(2, 1, 2, 6, {8}, a, b, {{1, 3}, {4, 2}});
    Eigen::MatrixXd raw(6, 2);
    // rows: linear, block {1, 3}, block {4, 2}; column 1 has huge logits
    raw << 0.5, -1.0, 2.0, 0.0, -1.0, 700.0, 0.3, 701.0, 4.0, 1.0, 4.0, 1.0;
    Rng unused(0);
    const auto y = shape_output(gp, raw, unused);
    SUBCASE("linear rows untouched, blocks normalized, argmax kept") {
        CHECK(y.row(0) == raw.row(0));
        for (Eigen::Index s = 0; s < 2; ++s) {
            CHECK(y.col(s).segment(1, 3).sum() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(y.col(s).segment(4, 2).sum() == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(preprocess::argmax_index(y.col(s).segment(1, 3)) ==
                  preprocess::argmax_index(raw.col(s).segment(1, 3)));
        }
        CHECK(y.allFinite());
        CHECK(y(4, 0) == doctest::Approx(0.5));
        // softmax of (2, -1, 0.3) in closed form
        const double denom = std::exp(2.0) + std::exp(-1.0) + std::exp(0.3);
        CHECK(y(1, 0) == doctest::Approx(std::exp(2.0) / denom).epsilon(1e-14));
    }
    SUBCASE("backward matches finite differences") {
        Eigen::MatrixXd small = raw;
        small(2, 1) = 0.7; // keep the block away from saturation
        small(3, 1) = -0.4;
        const Eigen::MatrixXd w = Eigen::MatrixXd::Random(6, 2);
        const auto shaped = shape_output(gp, small, unused);
        const auto g = shape_output_backward(gp, shaped, w);
        for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index s = 0; s < 2; ++s) {
                Eigen::MatrixXd up = small;
                Eigen::MatrixXd down = small;
                up(i, s) += 1e-6;
                down(i, s) -= 1e-6;
                const double fd =
                    (shape_output(gp, up, unused).cwiseProduct(w).sum() -
                     shape_output(gp, down, unused).cwiseProduct(w).sum()) /
                    2e-6;
                CHECK(g(i, s) == doctest::Approx(fd).epsilon(1e-7));
            }
        }
    }
    SUBCASE("generation applies the blocks") {
        Rng rng(7);
        const auto row = generate_row(gp, Eigen::Vector2d(1, 0), {}, rng);
        CHECK(row.segment(1, 3).sum() == doctest::Approx(1.0));
        CHECK((row.segment(1, 3).array() > 0).all());
    }
    SUBCASE("invalid layouts") {
        Rng c(1);
        Rng d(2);
        CHECK_THROWS_AS((void)init_generator(2, 1, 2, 6, {8}, c, d, {{4, 3}}), ArgumentError);
        CHECK_THROWS_AS((void)init_generator(2, 1, 2, 6, {8}, c, d, {{1, 1}}), ArgumentError);
        CHECK_THROWS_AS((void)init_generator(2, 1, 2, 6, {8}, c, d, {{1, 3}, {2, 2}}), ArgumentError);
    }
}

TEST_CASE("Gumbel-softmax blocks") {
    Rng a(5);
    Rng b(6);
    auto gp = init_generator(2, 1, 2, 4, {8}, a, b, {{1, 3}});
    gp.gumbel_temperature = 0.5;
    SUBCASE("argmax frequencies follow softmax(logits)") {
        // Gumbel-max: argmax(l + g) ~ Categorical(softmax(l))
        const Eigen::Vector3d logits(0.2, -1.0, 1.1);
        const Eigen::Vector3d expected = logits.array().exp() / logits.array().exp().sum();
        constexpr int draws = 200000;
        Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(4, draws);
        raw.middleRows(1, 3).colwise() = logits;
        Rng rng(11);
        const auto y = shape_output(gp, raw, rng);
        Eigen::Vector3d freq = Eigen::Vector3d::Zero();
        for (Eigen::Index s = 0; s < draws; ++s) {
            freq[preprocess::argmax_index(y.col(s).segment(1, 3))] += 1.0 / draws;
        }
        // 5 standard errors of a proportion near 0.5 at n = 2e5 is about 0.0056
        CHECK((freq - expected).cwiseAbs().maxCoeff() < 0.006);
        CHECK(y.row(0).isZero());
    }
    SUBCASE("backward with fixed noise matches finite differences") {
        Eigen::MatrixXd raw(4, 3);
        raw << 0.1, 0.2, 0.3, 0.5, -0.3, 0.2, -0.2, 0.4, 0.9, 0.3, 0.1, -0.6;
        const Eigen::MatrixXd w = Eigen::MatrixXd::Random(4, 3);
        Rng r0(3);
        const auto shaped = shape_output(gp, raw, r0);
        const auto g = shape_output_backward(gp, shaped, w);
        auto value = [&](const Eigen::MatrixXd &x) {
            Rng r(3);
            return shape_output(gp, x, r).cwiseProduct(w).sum();
        };
        for (Eigen::Index i = 0; i < raw.size(); ++i) {
            Eigen::MatrixXd up = raw;
            Eigen::MatrixXd down = raw;
            up.data()[i] += 1e-6;
            down.data()[i] -= 1e-6;
            CHECK(g.data()[i] == doctest::Approx((value(up) - value(down)) / 2e-6).epsilon(1e-6));
        }
    }
    SUBCASE("negative temperature is rejected") {
        gp.gumbel_temperature = -1.0;
        CHECK_THROWS_AS(gp.validate(), ArgumentError);
    }
}

TEST_CASE("categorical_blocks") {
    const auto enc = preprocess::fit_apply(testing::random_table(testing::mixed_schema(), 30, 1));
    CHECK(categorical_blocks(enc.model) == std::vector<OutputBlock>{{1, 3}});
}

TEST_CASE("generate_row") {
    SUBCASE("zero mapper gives the zero vector") {
        auto gp = make_generator(3, 1, 2, 4, 2);
        gp.mapper = nn::Net::zeros(gp.mapper.layer_sizes());
        Rng rng(0);
        CHECK(generate_row(gp, Eigen::Vector2d(1, 0), {}, rng).isZero());
        CHECK(generate_row(gp, Eigen::Vector2d(0, 1), {}, rng).isZero());
    }
    SUBCASE("fixed seed, exact mode: identical rows") {
        const auto gp = make_generator(3, 2, 2, 4, 3);
        Rng a(10);
        Rng b(10);
        CHECK(generate_row(gp, Eigen::Vector2d(0, 1), {}, a) == generate_row(gp, Eigen::Vector2d(0, 1), {}, b));
    }
    SUBCASE("identity mapper passes the circuit probabilities through") {
        auto gp = make_generator(3, 2, 2, 5, 4);
        gp.mapper = nn::Net::zeros({10, 5});
        gp.mapper.weights[0].leftCols(5).setIdentity();
        Rng rng(21);
        Rng shadow(21);
        const auto x = generate_row(gp, Eigen::Vector2d(1, 0), {}, rng);
        // replay the latent draw: one uniform angle per qubit
        Eigen::VectorXd z(3);
        for (auto &v : z) {
            v = shadow.uniform(0.0, 2.0 * std::numbers::pi);
        }
        const Eigen::VectorXd p = quantum::exact_probabilities(quantum::run_vqc(gp.vqc, z));
        CHECK((x - p.head(5)).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("latent draws make rows differ") {
        const auto gp = make_generator(3, 2, 2, 4, 5);
        Rng rng(1);
        CHECK(generate_row(gp, Eigen::Vector2d(1, 0), {}, rng) != generate_row(gp, Eigen::Vector2d(1, 0), {}, rng));
    }
    SUBCASE("shots mode") {
        auto gp = make_generator(2, 1, 2, 6, 6);
        gp.mapper = nn::Net::zeros({6, 6});
        gp.mapper.weights[0].setIdentity();
        Rng rng(2);
        const auto x = generate_row(gp, Eigen::Vector2d(0, 1), {100}, rng);
        // empirical probabilities are multiples of 1/100 and sum to 1
        for (Eigen::Index k = 0; k < 4; ++k) {
            CHECK(std::abs(x[k] * 100 - std::round(x[k] * 100)) < 1e-9);
        }
        CHECK(x.head(4).sum() == doctest::Approx(1.0));
    }
    SUBCASE("label width mismatch") {
        const auto gp = make_generator(2, 1, 2, 3, 7);
        Rng rng(0);
        CHECK_THROWS_AS(generate_row(gp, Eigen::Vector3d(1, 0, 0), {}, rng), ArgumentError);
    }
}

TEST_CASE("generate_batch matches per-row generation") {
    const auto gp = make_generator(3, 2, 2, 4, 8);
    Eigen::MatrixXd cond(2, 3);
    cond << 1, 0, 1, 0, 1, 0;
    Rng a(4);
    Rng b(4);
    const auto batch = generate_batch(gp, cond, {}, a);
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK((batch.col(j) - generate_row(gp, cond.col(j), {}, b)).norm() < 1e-12);
    }
}

TEST_CASE("generate_table") {
    const auto table = testing::random_table(testing::mixed_schema(), 100, 3);
    const auto enc = preprocess::fit_apply(table);
    const auto gp = make_generator(3, 1, 2, static_cast<int>(output_dim(enc.model)), 9);

    SUBCASE("conditioning labels are carried into the label column") {
        std::vector<int> labels(100);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = i < 50 ? 0 : 1;
        }
        Rng rng(1);
        const auto out = generate_table(gp, labels, {}, rng, enc.model);
        REQUIRE(out.rows() == 100);
        int yes = 0;
        for (std::size_t r = 0; r < out.rows(); ++r) {
            CHECK(out.category(r, 3) == labels[r]);
            yes += out.category(r, 3);
        }
        CHECK(yes == 50);
        CHECK(out.schema() == table.schema());
    }
    SUBCASE("zero rows") {
        Rng rng(1);
        const auto out = generate_table(gp, std::vector<int>{}, {}, rng, enc.model);
        CHECK(out.rows() == 0);
        CHECK(out.schema() == table.schema());
    }
    SUBCASE("label outside the schema") {
        Rng rng(1);
        CHECK_THROWS_AS(generate_table(gp, std::vector<int>{2}, {}, rng, enc.model), ArgumentError);
    }
    SUBCASE("proportional labels reproduce the real label marginal") {
        std::vector<std::int64_t> counts(2, 0);
        for (std::size_t r = 0; r < table.rows(); ++r) {
            ++counts[static_cast<std::size_t>(table.category(r, 3))];
        }
        Rng rng(2);
        const auto labels = proportional_labels(counts, 100, rng);
        const auto out = generate_table(gp, labels, {}, rng, enc.model);
        const auto real = metrics::category_distribution(table, 3);
        const auto syn = metrics::category_distribution(out, 3);
        CHECK(metrics::jsd(real, syn) < 1e-12);
    }
}

TEST_CASE("regression generation") {
    const auto table = testing::random_table(testing::regression_schema(), 80, 4);
    const auto enc = preprocess::fit_apply(table);
    CHECK(condition_dim(enc.model) == 1);
    CHECK(output_dim(enc.model) == enc.model.feature_dim() + 1);
    const auto gd = gan_space(enc.model, enc.features, enc.labels);
    CHECK(gd.x.rows() == 4);
    CHECK(gd.y.isOnes());
    CHECK(gd.x.bottomRows(1) == enc.labels);

    const auto gp = make_generator(2, 1, 1, 4, 3);
    Rng rng(0);
    const auto out = generate_table(gp, std::vector<int>(7, 0), {}, rng, enc.model);
    CHECK(out.rows() == 7);
}

TEST_CASE("proportional_counts") {
    CHECK(proportional_counts(std::vector<std::int64_t>{76, 24}, 100) == std::vector<std::int64_t>{76, 24});
    CHECK(proportional_counts(std::vector<std::int64_t>{76, 24}, 10) == std::vector<std::int64_t>{8, 2});
    CHECK(proportional_counts(std::vector<std::int64_t>{1, 1, 1}, 4) == std::vector<std::int64_t>{2, 1, 1});
    CHECK(proportional_counts(std::vector<std::int64_t>{3, 0}, 5) == std::vector<std::int64_t>{5, 0});
    CHECK(proportional_counts(std::vector<std::int64_t>{5, 5}, 0) == std::vector<std::int64_t>{0, 0});
    CHECK_THROWS_AS(proportional_counts(std::vector<std::int64_t>{0, 0}, 3), ArgumentError);

    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::int64_t> counts(1 + rng.below(5));
        for (auto &c : counts) {
            c = static_cast<std::int64_t>(1 + rng.below(100));
        }
        const auto rows = static_cast<std::int64_t>(rng.below(1000));
        const auto out = proportional_counts(counts, rows);
        CHECK(std::accumulate(out.begin(), out.end(), std::int64_t{0}) == rows);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        for (std::size_t k = 0; k < counts.size(); ++k) {
            CHECK(std::abs(static_cast<double>(out[k]) - rows * counts[k] / total) < 1.0);
        }
    }
}

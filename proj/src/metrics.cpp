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
#include "qtabgen/metrics.hpp"

#include "qtabgen/adversarial.hpp"
#include "qtabgen/neural.hpp"
#include "qtabgen/preprocess.hpp"
#include "qtabgen/rng.hpp"

#include <fstream>
#include <iomanip>
#include <numeric>

namespace qtabgen::metrics {

namespace {

void check_pair(std::size_t a, std::size_t b, std::size_t min_size = 1) {
    if (a != b) {
        throw ArgumentError("metric inputs have different lengths (" + std::to_string(a) + " vs " +
                            std::to_string(b) + ")");
    }
    if (a < min_size) {
        throw ArgumentError("metric needs at least " + std::to_string(min_size) + " samples, got " +
                            std::to_string(a));
    }
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double population_variance(std::span<const double> v) {
    const double m = mean(v);
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(v.size());
}

void check_same_schema(const Table &a, const Table &b) {
    if (a.schema() != b.schema()) {
        throw DataError("real and synthetic tables have different schemas");
    }
}

} // namespace

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
    check_pair(y_true.size(), y_pred.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        hits += y_true[i] == y_pred[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double f1_score(std::span<const int> y_true, std::span<const int> y_pred, int n_classes) {
    check_pair(y_true.size(), y_pred.size());
    if (n_classes <= 0) {
        n_classes = 1 + std::max(*std::max_element(y_true.begin(), y_true.end()),
                                 *std::max_element(y_pred.begin(), y_pred.end()));
        n_classes = std::max(n_classes, 2);
    }
    auto class_f1 = [&](int positive) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        std::size_t fn = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            const bool t = y_true[i] == positive;
            const bool p = y_pred[i] == positive;
            tp += (t && p) ? 1 : 0;
            fp += (!t && p) ? 1 : 0;
            fn += (t && !p) ? 1 : 0;
        }
        const auto denom = 2 * tp + fp + fn;
        return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    };
    if (n_classes == 2) {
        return class_f1(1);
    }
    double sum = 0.0;
    for (int k = 0; k < n_classes; ++k) {
        sum += class_f1(k);
    }
    return sum / n_classes;
}

double evs(std::span<const double> y_true, std::span<const double> y_pred) {
    check_pair(y_true.size(), y_pred.size(), 2);
    const double var_true = population_variance(y_true);
    if (var_true == 0.0) {
        throw MetricUndefined("explained variance is undefined for a constant target");
    }
    std::vector<double> residual(y_true.size());
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        residual[i] = y_true[i] - y_pred[i];
    }
    return 1.0 - population_variance(residual) / var_true;
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
    check_pair(y_true.size(), y_pred.size(), 2);
    const double m = mean(y_true);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
        ss_tot += (y_true[i] - m) * (y_true[i] - m);
    }
    if (ss_tot == 0.0) {
        throw MetricUndefined("R^2 is undefined for a constant target");
    }
    return 1.0 - ss_res / ss_tot;
}

Eigen::VectorXd category_distribution(const Table &table, std::size_t column) {
    const auto &col = table.schema().columns.at(column);
    if (col.kind != ColumnKind::Categorical) {
        throw ArgumentError("column '" + col.name + "' is not categorical");
    }
    if (table.empty()) {
        throw DataError("category distribution of an empty table");
    }
    Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(col.categories.size()));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        p[table.category(r, column)] += 1.0;
    }
    return p / static_cast<double>(table.rows());
}

std::optional<double> avg_jsd(const Table &real, const Table &syn) {
    check_same_schema(real, syn);
    double sum = 0.0;
    int count = 0;
    for (std::size_t c = 0; c < real.cols(); ++c) {
        if (real.schema().columns[c].kind == ColumnKind::Categorical) {
            sum += jsd(category_distribution(real, c), category_distribution(syn, c));
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return sum / count;
}

Eigen::MatrixXd numeric_correlation(const Table &table) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        if (table.schema().columns[c].kind == ColumnKind::Numeric) {
            cols.push_back(c);
        }
    }
    const auto k = static_cast<Eigen::Index>(cols.size());
    const auto n = static_cast<Eigen::Index>(table.rows());
    if (n == 0) {
        throw DataError("correlation of an empty table");
    }
    Eigen::MatrixXd x(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index r = 0; r < n; ++r) {
            x(r, j) = table.at(static_cast<std::size_t>(r), cols[static_cast<std::size_t>(j)]);
        }
    }
    x.rowwise() -= x.colwise().mean();
    const Eigen::VectorXd norms = x.colwise().norm();
    Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        if (norms[a] == 0.0) {
            log::warn("numeric column '" + table.schema().columns[cols[static_cast<std::size_t>(a)]].name +
                      "' has zero variance; its correlations are taken as 0");
        }
        for (Eigen::Index b = a + 1; b < k; ++b) {
            const double denom = norms[a] * norms[b];
            const double value = denom == 0.0 ? 0.0 : std::clamp(x.col(a).dot(x.col(b)) / denom, -1.0, 1.0);
            rho(a, b) = rho(b, a) = value;
        }
    }
    return rho;
}

std::optional<double> corr_difference(const Table &real, const Table &syn) {
    check_same_schema(real, syn);
    const Eigen::MatrixXd a = numeric_correlation(real);
    if (a.rows() < 2) {
        return std::nullopt;
    }
    const Eigen::MatrixXd b = numeric_correlation(syn);
    double sum = 0.0;
    Eigen::Index pairs = 0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
            sum += std::abs(a(i, j) - b(i, j));
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

namespace {

/// Downstream learner: dense net trained with Adam on minibatches. For
/// classification the targets are one-hot and the loss is per-class BCE;
/// for regression the target is the scaled value and the loss is squared
/// error.
nn::Net fit_downstream(const Eigen::MatrixXd &x, const Eigen::MatrixXd &targets, Task task,
                       const UtilityConfig &cfg) {
    std::vector<int> sizes{static_cast<int>(x.rows())};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(static_cast<int>(targets.rows()));
    Rng init_rng(derive_seed(cfg.seed, "utility.init"));
    Rng batch_rng(derive_seed(cfg.seed, "utility.batches"));
    auto net = nn::init_mlp(sizes, init_rng);
    auto opt = nn::AdamState<double>::for_params(net, {.learning_rate = cfg.learning_rate});

    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.cols()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        batch_rng.shuffle(std::span<Eigen::Index>(order));
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const auto b = static_cast<Eigen::Index>(end - start);
            Eigen::MatrixXd xb(x.rows(), b);
            Eigen::MatrixXd tb(targets.rows(), b);
            for (Eigen::Index k = 0; k < b; ++k) {
                xb.col(k) = x.col(order[start + static_cast<std::size_t>(k)]);
                tb.col(k) = targets.col(order[start + static_cast<std::size_t>(k)]);
            }
            const auto [out, cache] = nn::forward_batch(net, xb);
            Eigen::MatrixXd grad(out.rows(), b);
            if (task == Task::Classification) {
                for (Eigen::Index i = 0; i < out.size(); ++i) {
                    grad(i) = gan::bce_with_logits(out(i), tb(i) > 0.5 ? 1 : 0).dloss_dlogit;
                }
            } else {
                grad = 2.0 * (out - tb);
            }
            grad /= static_cast<double>(b);
            const auto g = nn::backward(net, cache, grad);
            nn::adam_update(net, g.params, opt);
        }
    }
    return net;
}

std::vector<int> class_labels(const Table &t) {
    const auto col = static_cast<std::size_t>(t.schema().target_index());
    std::vector<int> out(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        out[r] = t.category(r, col);
    }
    return out;
}

MetricValue compare(std::optional<double> real, std::optional<double> syn) {
    MetricValue v{real, syn, std::nullopt};
    if (real && syn) {
        v.difference = std::abs(*real - *syn);
    }
    return v;
}

template <typename F> std::optional<double> defined(F &&f) {
    try {
        return f();
    } catch (const MetricUndefined &e) {
        log::warn(e.what());
        return std::nullopt;
    }
}

} // namespace

MetricsReport ml_utility(const Table &real_train, const Table &syn, const Table &test, const UtilityConfig &config) {
    check_same_schema(real_train, syn);
    check_same_schema(real_train, test);
    if (real_train.empty() || syn.empty() || test.empty()) {
        throw DataError("ml utility needs nonempty real, synthetic and test tables");
    }
    const auto &schema = real_train.schema();
    const auto encoded = preprocess::fit_apply(real_train);
    const auto &model = encoded.model;
    const Eigen::MatrixXd x_syn = preprocess::apply_features(model, syn);
    const Eigen::MatrixXd x_test = preprocess::apply_features(model, test);

    MetricsReport report;
    report.seed = config.seed;
    report.task = schema.task;
    report.config = {{"hidden", config.hidden},
                     {"epochs", config.epochs},
                     {"batch_size", config.batch_size},
                     {"learning_rate", config.learning_rate}};

    const auto real_net = fit_downstream(encoded.features, encoded.labels, schema.task, config);
    const auto syn_net = fit_downstream(x_syn, preprocess::apply_labels(model, syn), schema.task, config);
    const Eigen::MatrixXd real_out = nn::forward_batch(real_net, x_test).first;
    const Eigen::MatrixXd syn_out = nn::forward_batch(syn_net, x_test).first;

    if (schema.task == Task::Classification) {
        const auto truth = class_labels(test);
        auto predict = [](const Eigen::MatrixXd &out) {
            std::vector<int> pred(static_cast<std::size_t>(out.cols()));
            for (Eigen::Index s = 0; s < out.cols(); ++s) {
                pred[static_cast<std::size_t>(s)] = static_cast<int>(preprocess::argmax_index(out.col(s)));
            }
            return pred;
        };
        const auto real_pred = predict(real_out);
        const auto syn_pred = predict(syn_out);
        const int c = schema.n_classes();
        report.utility["accuracy"] = compare(accuracy(truth, real_pred), accuracy(truth, syn_pred));
        report.utility["f1"] = compare(f1_score(truth, real_pred, c), f1_score(truth, syn_pred, c));
    } else {
        const auto truth = test.column(static_cast<std::size_t>(schema.target_index()));
        auto predict = [&](const Eigen::MatrixXd &out) {
            std::vector<double> pred(static_cast<std::size_t>(out.cols()));
            for (Eigen::Index s = 0; s < out.cols(); ++s) {
                pred[static_cast<std::size_t>(s)] = preprocess::inverse_numeric(model.target.stats, out(0, s));
            }
            return pred;
        };
        const auto real_pred = predict(real_out);
        const auto syn_pred = predict(syn_out);
        report.utility["evs"] = compare(defined([&] { return evs(truth, real_pred); }),
                                        defined([&] { return evs(truth, syn_pred); }));
        report.utility["r2"] = compare(defined([&] { return r2(truth, real_pred); }),
                                       defined([&] { return r2(truth, syn_pred); }));
    }
    report.avg_jsd = avg_jsd(real_train, syn);
    report.corr_diff = corr_difference(real_train, syn);
    return report;
}

nlohmann::json to_json(const MetricsReport &report) {
    auto opt = [](const std::optional<double> &v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json utility = nlohmann::json::object();
    for (const auto &[name, v] : report.utility) {
        utility[name] = {{"real", opt(v.real)}, {"synthetic", opt(v.synthetic)}, {"difference", opt(v.difference)}};
    }
    return {{"dataset", report.dataset},
            {"seed", report.seed},
            {"task", report.task == Task::Classification ? "classification" : "regression"},
            {"ml_utility", std::move(utility)},
            {"statistical_similarity", {{"avg_jsd", opt(report.avg_jsd)}, {"corr_diff", opt(report.corr_diff)}}},
            {"config", report.config}};
}

void write_cdf_dumps(const Table &real, const Table &syn, const std::filesystem::path &dir) {
    check_same_schema(real, syn);
    std::filesystem::create_directories(dir);
    for (std::size_t c = 0; c < real.cols(); ++c) {
        const auto &col = real.schema().columns[c];
        if (col.kind != ColumnKind::Numeric) {
            continue;
        }
        std::string file = col.name;
        for (char &ch : file) {
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') {
                ch = '_';
            }
        }
        std::ofstream out(dir / (file + ".csv"));
        if (!out) {
            throw IoError("cannot write CDF dump for column '" + col.name + "'");
        }
        out << "source,value,cdf\n" << std::setprecision(17);
        auto dump = [&](const char *source, const Table &t) {
            auto values = t.column(c);
            std::sort(values.begin(), values.end());
            for (std::size_t i = 0; i < values.size(); ++i) {
                out << source << ',' << values[i] << ','
                    << static_cast<double>(i + 1) / static_cast<double>(values.size()) << '\n';
            }
        };
        dump("real", real);
        dump("synthetic", syn);
    }
}

} // namespace qtabgen::metrics

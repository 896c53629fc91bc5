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
// Command-line front end: train, generate, evaluate, preprocess.
#include "qtabgen/adversarial.hpp"
#include "qtabgen/generator.hpp"
#include "qtabgen/io.hpp"
#include "qtabgen/metrics.hpp"
#include "qtabgen/preprocess.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <tuple>

namespace fs = std::filesystem;
using namespace qtabgen;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitData = 2;
constexpr int kExitConfig = 3;

/// Loads the CSV, applies --max-rows and returns the table in the schema
/// with inferred categories filled in.
Table load_table(const fs::path &csv, const Schema &schema, std::size_t max_rows, std::uint64_t seed) {
    auto loaded = io::load_csv(csv, schema);
    return io::subsample(loaded.table, max_rows, derive_seed(seed, "subsample"));
}

io::SplitSpec split_spec(double ratio, std::uint64_t seed) { return {ratio, derive_seed(seed, "split"), true}; }

struct TrainArgs {
    fs::path data, schema, config, out, loss;
    std::optional<double> split;
    std::size_t max_rows = 0;
    std::optional<int> epochs;
    std::optional<std::uint64_t> seed;
    int progress = 10;
};

int run_train(const TrainArgs &a) {
    auto config = a.config.empty() ? gan::TrainConfig{} : gan::config_from_json(io::read_json_file(a.config));
    if (a.epochs) {
        config.epochs = *a.epochs;
    }
    if (a.seed) {
        config.seed = *a.seed;
    }
    config.validate();
    const auto schema = io::load_schema(a.schema);
    Table table = load_table(a.data, schema, a.max_rows, config.seed);
    if (a.split) {
        table = io::split(table, split_spec(*a.split, config.seed)).first;
    }
    std::cerr << "training on " << table.rows() << " rows for " << config.epochs << " epochs\n";
    const auto ckpt = gan::train(table, config, [&](const gan::LossRecord &r) {
        if (a.progress > 0 && (r.step % a.progress == 0 || r.step == config.epochs)) {
            std::cerr << "epoch " << r.step << "  d_loss " << r.d_loss << "  g_loss " << r.g_loss << '\n';
        }
    });
    io::save_checkpoint(ckpt, a.out);
    io::save_loss_history(ckpt.history, a.loss.empty() ? fs::path(a.out.string() + ".loss.csv") : a.loss);
    return 0;
}

struct GenerateArgs {
    fs::path ckpt, out;
    std::int64_t rows = 0;
    std::int64_t shots = 0;
    std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs &a) {
    if (a.rows < 0) {
        throw ConfigError("--rows must be >= 0");
    }
    if (a.shots < 0) {
        throw ConfigError("--shots must be >= 0");
    }
    const auto ckpt = io::load_checkpoint(a.ckpt);
    const std::uint64_t seed = a.seed.value_or(ckpt.config.seed);
    Rng label_rng(derive_seed(seed, "generate.labels"));
    Rng rng(derive_seed(seed, "generate"));
    const auto labels = ckpt.schema.task == Task::Classification
                            ? gen::proportional_labels(ckpt.label_counts, a.rows, label_rng)
                            : std::vector<int>(static_cast<std::size_t>(a.rows), 0);
    const auto table = gen::generate_table(ckpt.generator, labels, {a.shots}, rng, ckpt.preprocess);
    io::save_csv(a.out, table);
    return 0;
}

struct EvaluateArgs {
    fs::path real, syn, schema, test, cdf_dir, out;
    double split = 0.8;
    std::uint64_t seed = 0;
    std::size_t max_rows = 0;
    std::string dataset;
    std::optional<int> utility_epochs;
};

int run_evaluate(const EvaluateArgs &a) {
    const auto schema = io::load_schema(a.schema);
    const Table real = load_table(a.real, schema, a.max_rows, a.seed);
    Table train;
    Table test;
    if (a.test.empty()) {
        std::tie(train, test) = io::split(real, split_spec(a.split, a.seed));
    } else {
        train = real;
        test = io::load_csv(a.test, real.schema()).table;
    }
    const Table syn = io::load_csv(a.syn, real.schema()).table;

    metrics::UtilityConfig ucfg;
    ucfg.seed = derive_seed(a.seed, "utility");
    if (a.utility_epochs) {
        ucfg.epochs = *a.utility_epochs;
    }
    auto report = metrics::ml_utility(train, syn, test, ucfg);
    report.dataset = a.dataset.empty() ? a.real.stem().string() : a.dataset;
    report.seed = a.seed;
    report.config["split"] = a.split;
    report.config["train_rows"] = train.rows();
    report.config["test_rows"] = test.rows();
    report.config["synthetic_rows"] = syn.rows();
    if (!a.cdf_dir.empty()) {
        metrics::write_cdf_dumps(train, syn, a.cdf_dir);
    }
    const std::string text = metrics::to_json(report).dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(a.out, std::ios::binary);
        if (!(out << text)) {
            throw IoError("cannot write '" + a.out.string() + "'");
        }
    }
    return 0;
}

struct PreprocessArgs {
    fs::path data, schema, out;
};

int run_preprocess(const PreprocessArgs &a) {
    const auto table = io::load_csv(a.data, io::load_schema(a.schema)).table;
    const auto enc = preprocess::fit_apply(table);
    const auto &cols = table.schema().columns;

    std::vector<std::string> header;
    auto add_names = [&](const preprocess::ColumnModel &cm) {
        const auto &col = cols[static_cast<std::size_t>(cm.column)];
        if (cm.kind == ColumnKind::Numeric) {
            header.push_back(col.name);
        } else {
            for (const auto &cat : col.categories) {
                header.push_back(col.name + "=" + cat);
            }
        }
    };
    for (const auto &cm : enc.model.features) {
        add_names(cm);
    }
    add_names(enc.model.target);

    std::ofstream out(a.out, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + a.out.string() + "'");
    }
    out << std::setprecision(17);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << io::format_csv_field(header[i]);
    }
    out << "\r\n";
    for (Eigen::Index r = 0; r < enc.features.cols(); ++r) {
        for (Eigen::Index i = 0; i < enc.features.rows(); ++i) {
            out << (i ? "," : "") << enc.features(i, r);
        }
        for (Eigen::Index i = 0; i < enc.labels.rows(); ++i) {
            out << ',' << enc.labels(i, r);
        }
        out << "\r\n";
    }
    if (!out) {
        throw IoError("failed while writing '" + a.out.string() + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical GAN for tabular data"};
    app.require_subcommand(1);

    TrainArgs ta;
    auto *train = app.add_subcommand("train", "Train a generator and write a checkpoint");
    train->add_option("--data", ta.data, "Training CSV")->required();
    train->add_option("--schema", ta.schema, "Schema JSON")->required();
    train->add_option("--config", ta.config, "Training configuration JSON");
    train->add_option("--out", ta.out, "Checkpoint path")->required();
    train->add_option("--loss", ta.loss, "Loss history CSV (default: <out>.loss.csv)");
    train->add_option("--split", ta.split, "Train only on this fraction (stratified, seeded by the config seed)");
    train->add_option("--max-rows", ta.max_rows, "Seeded uniform subsample before splitting (0 = all)");
    train->add_option("--epochs", ta.epochs, "Override the configured epoch count");
    train->add_option("--seed", ta.seed, "Override the configured master seed");
    train->add_option("--progress", ta.progress, "Report losses every N epochs (0 = silent)");

    GenerateArgs ga;
    auto *generate = app.add_subcommand("generate", "Sample a synthetic table from a checkpoint");
    generate->add_option("--ckpt", ga.ckpt, "Checkpoint path")->required();
    generate->add_option("--rows", ga.rows, "Number of rows")->required();
    generate->add_option("--shots", ga.shots, "Estimate circuit probabilities from N shots (0 = exact)");
    generate->add_option("--seed", ga.seed, "Master seed (default: the training seed)");
    generate->add_option("--out", ga.out, "Output CSV")->required();

    EvaluateArgs ea;
    auto *evaluate = app.add_subcommand("evaluate", "Compare a synthetic table with real data");
    evaluate->add_option("--real", ea.real, "Real CSV (split into train/test)")->required();
    evaluate->add_option("--syn", ea.syn, "Synthetic CSV")->required();
    evaluate->add_option("--schema", ea.schema, "Schema JSON")->required();
    evaluate->add_option("--test", ea.test, "Held-out CSV; disables splitting of --real");
    evaluate->add_option("--split", ea.split, "Train fraction of --real");
    evaluate->add_option("--seed", ea.seed, "Master seed for splitting and downstream models");
    evaluate->add_option("--max-rows", ea.max_rows, "Seeded uniform subsample of --real (0 = all)");
    evaluate->add_option("--cdf-dir", ea.cdf_dir, "Write per-column CDF dumps here");
    evaluate->add_option("--dataset", ea.dataset, "Dataset name in the report");
    evaluate->add_option("--utility-epochs", ea.utility_epochs, "Downstream model epochs");
    evaluate->add_option("--out", ea.out, "Write the report here instead of stdout");

    PreprocessArgs pa;
    auto *prep = app.add_subcommand("preprocess", "Write the encoded table (noise disabled)");
    prep->add_option("--data", pa.data, "Input CSV")->required();
    prep->add_option("--schema", pa.schema, "Schema JSON")->required();
    prep->add_option("--out", pa.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (train->parsed()) {
            return run_train(ta);
        }
        if (generate->parsed()) {
            return run_generate(ga);
        }
        if (evaluate->parsed()) {
            return run_evaluate(ea);
        }
        return run_preprocess(pa);
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitOther;
    }
}

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
#include "qtabgen/io.hpp"

#include "qtabgen/errors.hpp"
#include "qtabgen/generator.hpp"
#include "qtabgen/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace qtabgen::io {

using nlohmann::json;

std::vector<std::vector<std::string>> parse_csv(std::istream &in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool first = true;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // A blank line yields one empty field; skip it.
        if (!(record.size() == 1 && record[0].empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    char c = 0;
    while (in.get(c)) {
        if (first) {
            first = false;
            // UTF-8 byte order mark.
            if (static_cast<unsigned char>(c) == 0xEF && in.peek() == 0xBB) {
                in.get();
                if (in.peek() == 0xBF) {
                    in.get();
                    continue;
                }
            }
        }
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (in.peek() == '\n') {
                in.get();
            }
            end_record();
        } else if (c == '\n') {
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw DataError("CSV ends inside a quoted field");
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }
    return records;
}

std::string format_csv_field(const std::string &field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

Schema load_schema(const std::filesystem::path &path) { return schema_from_json(read_json_file(path)); }

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool is_missing(const std::string &s) { return s.empty() || s == "?"; }

bool parse_double(const std::string &s, double &out) {
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

LoadResult read_csv(std::istream &in, const Schema &schema_in) {
    const auto records = parse_csv(in);
    if (records.empty()) {
        throw DataError("CSV is empty (a header row is required)");
    }
    const auto &header = records.front();
    std::map<std::string, std::size_t> header_index;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!header_index.emplace(trim(header[i]), i).second) {
            throw DataError("CSV header repeats column '" + trim(header[i]) + "'");
        }
    }

    Schema schema = schema_in;
    std::vector<std::size_t> source(schema.columns.size());
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto it = header_index.find(schema.columns[c].name);
        if (it == header_index.end()) {
            throw DataError("CSV is missing column '" + schema.columns[c].name + "'");
        }
        source[c] = it->second;
    }

    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        auto &col = schema.columns[c];
        if (col.kind != ColumnKind::Categorical || !col.categories.empty()) {
            continue;
        }
        std::set<std::string> seen;
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (records[r].size() == header.size()) {
                const auto v = trim(records[r][source[c]]);
                if (!is_missing(v)) {
                    seen.insert(v);
                }
            }
        }
        col.categories.assign(seen.begin(), seen.end());
    }
    schema.validate();

    LoadResult result{Table(schema), 0};
    std::vector<double> cells(schema.columns.size());
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto &rec = records[r];
        bool ok = rec.size() == header.size();
        for (std::size_t c = 0; ok && c < schema.columns.size(); ++c) {
            const auto v = trim(rec[source[c]]);
            const auto &col = schema.columns[c];
            if (is_missing(v)) {
                ok = false;
            } else if (col.kind == ColumnKind::Numeric) {
                ok = parse_double(v, cells[c]);
            } else {
                const int idx = col.category_index(v);
                ok = idx >= 0;
                cells[c] = idx;
            }
        }
        if (ok) {
            result.table.add_row(cells);
        } else {
            ++result.dropped;
        }
    }
    if (result.dropped > 0) {
        log::warn("dropped " + std::to_string(result.dropped) +
                  " CSV row(s) with missing, unparseable or unknown values");
    }
    if (result.table.empty()) {
        throw DataError("CSV has no usable data rows");
    }
    return result;
}

LoadResult load_csv(const std::filesystem::path &path, const Schema &schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return read_csv(in, schema);
}

void write_csv(std::ostream &out, const Table &table) {
    const auto &cols = table.schema().columns;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << format_csv_field(cols[c].name);
    }
    out << "\r\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            out << (c ? "," : "");
            if (cols[c].kind == ColumnKind::Numeric) {
                out << format_double(table.at(r, c));
            } else {
                out << format_csv_field(table.category_name(r, c));
            }
        }
        out << "\r\n";
    }
}

void save_csv(const std::filesystem::path &path, const Table &table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    write_csv(out, table);
    if (!out) {
        throw IoError("failed while writing '" + path.string() + "'");
    }
}

std::pair<Table, Table> split(const Table &table, const SplitSpec &spec) {
    if (!(spec.ratio > 0.0 && spec.ratio < 1.0)) {
        throw ConfigError("split ratio must be in (0, 1)");
    }
    const std::size_t n = table.rows();
    if (n < 2) {
        throw DataError("splitting needs at least 2 rows");
    }
    const auto n_train = std::clamp<std::int64_t>(std::llround(spec.ratio * static_cast<double>(n)), 1,
                                                  static_cast<std::int64_t>(n) - 1);
    Rng rng(spec.seed);
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;

    const auto &schema = table.schema();
    if (spec.stratify && schema.task == Task::Classification) {
        const auto t = static_cast<std::size_t>(schema.target_index());
        std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(schema.n_classes()));
        for (std::size_t r = 0; r < n; ++r) {
            groups[static_cast<std::size_t>(table.category(r, t))].push_back(r);
        }
        std::vector<std::int64_t> sizes;
        for (const auto &g : groups) {
            sizes.push_back(static_cast<std::int64_t>(g.size()));
        }
        auto quotas = gen::proportional_counts(sizes, n_train);
        for (std::size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].size() == 1) {
                log::warn("class '" + schema.columns[t].categories[k] +
                          "' has a single row; it goes to the training split");
                quotas[k] = 1;
            }
            rng.shuffle(std::span<std::size_t>(groups[k]));
            const auto q = static_cast<std::size_t>(quotas[k]);
            train_idx.insert(train_idx.end(), groups[k].begin(), groups[k].begin() + static_cast<std::ptrdiff_t>(q));
            test_idx.insert(test_idx.end(), groups[k].begin() + static_cast<std::ptrdiff_t>(q), groups[k].end());
        }
    } else {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        train_idx.assign(order.begin(), order.begin() + n_train);
        test_idx.assign(order.begin() + n_train, order.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {table.select_rows(train_idx), table.select_rows(test_idx)};
}

Table subsample(const Table &table, std::size_t max_rows, std::uint64_t seed) {
    if (max_rows == 0 || max_rows >= table.rows()) {
        return table;
    }
    std::vector<std::size_t> order(table.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    order.resize(max_rows);
    std::sort(order.begin(), order.end());
    return table.select_rows(order);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

json matrix_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = m(i, j);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json &j, Eigen::Index rows, Eigen::Index cols) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        throw IoError("checkpoint matrix has the wrong number of rows");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto &row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw IoError("checkpoint matrix has the wrong number of columns");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    }
    return m;
}

json mlp_json(const nn::Net &net) {
    json weights = json::array();
    json biases = json::array();
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        weights.push_back(matrix_json(net.weights[l]));
        biases.push_back(std::vector<double>(net.biases[l].data(), net.biases[l].data() + net.biases[l].size()));
    }
    return {{"layer_sizes", net.layer_sizes()}, {"weights", std::move(weights)}, {"biases", std::move(biases)}};
}

nn::Net mlp_from_json(const json &j) {
    const auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    auto net = nn::Net::zeros(sizes);
    const auto &weights = j.at("weights");
    const auto &biases = j.at("biases");
    if (weights.size() != net.num_layers() || biases.size() != net.num_layers()) {
        throw IoError("checkpoint network has the wrong number of layers");
    }
    for (std::size_t l = 0; l < net.num_layers(); ++l) {
        net.weights[l] = matrix_from_json(weights[l], net.weights[l].rows(), net.weights[l].cols());
        const auto b = biases[l].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(b.size()) != net.biases[l].size()) {
            throw IoError("checkpoint bias vector has the wrong length");
        }
        net.biases[l] = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    }
    return net;
}

json blocks_json(const std::vector<gen::OutputBlock> &blocks) {
    json out = json::array();
    for (const auto &b : blocks) {
        out.push_back({b.offset, b.width});
    }
    return out;
}

std::vector<gen::OutputBlock> blocks_from_json(const json &j) {
    std::vector<gen::OutputBlock> blocks;
    for (const auto &b : j) {
        const auto pair = b.get<std::vector<Eigen::Index>>();
        if (pair.size() != 2) {
            throw IoError("checkpoint softmax block must be [offset, width]");
        }
        blocks.push_back({pair[0], pair[1]});
    }
    return blocks;
}

} // namespace

json checkpoint_to_json(const gan::GanCheckpoint &ckpt) {
    const auto &g = ckpt.generator;
    json history = json::array();
    for (const auto &h : ckpt.history) {
        history.push_back({h.step, h.d_loss, h.g_loss});
    }
    return {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"schema", to_json(ckpt.schema)},
            {"config", gan::to_json(ckpt.config)},
            {"preprocess", preprocess::to_json(ckpt.preprocess)},
            {"generator",
             {{"n_qubits", g.vqc.n_qubits},
              {"n_layers", g.vqc.n_layers},
              {"theta_y", matrix_json(g.vqc.theta_y)},
              {"theta_z", matrix_json(g.vqc.theta_z)},
              {"n_classes", g.n_classes},
              {"feature_dim", g.feature_dim},
              {"softmax_blocks", blocks_json(g.softmax_blocks)},
              {"gumbel_temperature", g.gumbel_temperature},
              {"mapper", mlp_json(g.mapper)}}},
            {"discriminator", {{"mlp", mlp_json(ckpt.discriminator.mlp)}}},
            {"epoch", ckpt.epoch},
            {"label_counts", ckpt.label_counts},
            {"history", std::move(history)}};
}

gan::GanCheckpoint checkpoint_from_json(const json &doc) {
    try {
        if (!doc.is_object() || doc.value("format", std::string()) != kCheckpointFormat) {
            throw IoError("not a qtabgen checkpoint");
        }
        const int version = doc.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw VersionError("checkpoint format version " + std::to_string(version) +
                               " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
        }
        gan::GanCheckpoint ckpt;
        ckpt.schema = schema_from_json(doc.at("schema"));
        ckpt.schema.validate();
        ckpt.config = gan::config_from_json(doc.at("config"));
        ckpt.preprocess = preprocess::model_from_json(doc.at("preprocess"));
        ckpt.preprocess.schema = ckpt.schema;

        const auto &g = doc.at("generator");
        const int n = g.at("n_qubits").get<int>();
        const int layers = g.at("n_layers").get<int>();
        ckpt.generator.vqc = quantum::Vqc(n, layers);
        ckpt.generator.vqc.theta_y = matrix_from_json(g.at("theta_y"), layers, n);
        ckpt.generator.vqc.theta_z = matrix_from_json(g.at("theta_z"), layers, n);
        ckpt.generator.n_classes = g.at("n_classes").get<int>();
        ckpt.generator.feature_dim = g.at("feature_dim").get<int>();
        ckpt.generator.softmax_blocks = blocks_from_json(g.at("softmax_blocks"));
        ckpt.generator.gumbel_temperature = g.at("gumbel_temperature").get<double>();
        ckpt.generator.mapper = mlp_from_json(g.at("mapper"));
        ckpt.generator.validate();

        ckpt.discriminator.mlp = mlp_from_json(doc.at("discriminator").at("mlp"));
        if (ckpt.discriminator.mlp.input_size() != ckpt.generator.feature_dim + ckpt.generator.n_classes ||
            ckpt.discriminator.mlp.output_size() != 1) {
            throw IoError("checkpoint discriminator shape does not match the generator");
        }
        ckpt.epoch = doc.at("epoch").get<int>();
        ckpt.label_counts = doc.at("label_counts").get<std::vector<std::int64_t>>();
        for (const auto &h : doc.at("history")) {
            ckpt.history.push_back({h.at(0).get<int>(), h.at(1).get<double>(), h.at(2).get<double>()});
        }
        return ckpt;
    } catch (const json::exception &e) {
        throw IoError(std::string("corrupt checkpoint: ") + e.what());
    } catch (const IoError &) {
        throw;
    } catch (const Error &e) {
        throw IoError(std::string("invalid checkpoint: ") + e.what());
    }
}

void save_checkpoint(const gan::GanCheckpoint &ckpt, const std::filesystem::path &path) {
    const std::string text = checkpoint_to_json(ckpt).dump();
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out << text << '\n';
        if (!out) {
            throw IoError("failed while writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move checkpoint into '" + path.string() + "': " + ec.message());
    }
}

gan::GanCheckpoint load_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception &e) {
        throw IoError("corrupt checkpoint '" + path.string() + "': " + e.what());
    }
    return checkpoint_from_json(doc);
}

void save_loss_history(const std::vector<gan::LossRecord> &history, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << "step,d_loss,g_loss\n" << std::setprecision(17);
    for (const auto &h : history) {
        out << h.step << ',' << h.d_loss << ',' << h.g_loss << '\n';
    }
}

} // namespace qtabgen::io

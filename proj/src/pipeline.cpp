// Copyright 2026 The qrc-forecast authors.
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

#include "qrc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qrc/columnar.hpp"
#include "qrc/hash.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qrc::pipeline {

namespace {

constexpr const char* kPreparedSubdir = "prepared";

double stage_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<ingest::WindowSample> windows_from_columnar(const ColumnarFile& f, int T) {
    const std::size_t n = f.rows();
    const auto nf = ingest::kNumFeatures;
    std::vector<ingest::WindowSample> windows(n);
    for (std::size_t i = 0; i < n; ++i) {
        ingest::WindowSample& w = windows[i];
        w.inputs = Matrix(static_cast<std::size_t>(T), nf);
        for (int tau = 0; tau < T; ++tau)
            for (std::size_t j = 0; j < nf; ++j)
                w.inputs(static_cast<std::size_t>(tau), j) =
                    f.columns[static_cast<std::size_t>(tau) * nf + j][i];
        const std::size_t base = static_cast<std::size_t>(T) * nf;
        w.target_scaled = f.columns[base][i];
        w.target_raw = f.columns[base + 1][i];
        w.target_timestamp = static_cast<Timestamp>(f.columns[base + 2][i]);
    }
    return windows;
}

ColumnarFile windows_to_columnar(const std::vector<ingest::WindowSample>& windows, int T) {
    const auto nf = ingest::kNumFeatures;
    ColumnarFile f;
    const std::size_t ncols = static_cast<std::size_t>(T) * nf + 3;
    f.column_names.reserve(ncols);
    for (int tau = 0; tau < T; ++tau)
        for (std::size_t j = 0; j < nf; ++j)
            f.column_names.push_back("x" + std::to_string(tau) + "_" +
                                     std::string(ingest::kFeatureNames[j]));
    f.column_names.push_back("target_scaled");
    f.column_names.push_back("target_raw");
    f.column_names.push_back("target_ts");
    f.columns.assign(ncols, std::vector<double>(windows.size()));
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        for (int tau = 0; tau < T; ++tau)
            for (std::size_t j = 0; j < nf; ++j)
                f.columns[static_cast<std::size_t>(tau) * nf + j][i] =
                    w.inputs(static_cast<std::size_t>(tau), j);
        const std::size_t base = static_cast<std::size_t>(T) * nf;
        f.columns[base][i] = w.target_scaled;
        f.columns[base + 1][i] = w.target_raw;
        f.columns[base + 2][i] = static_cast<double>(w.target_timestamp);
    }
    return f;
}

ColumnarFile frame_to_columnar(const ingest::ScaledFrame& frame) {
    ColumnarFile f;
    f.column_names.push_back("timestamp");
    for (const char* name : ingest::kFeatureNames) f.column_names.push_back(name);
    f.column_names.push_back("target_scaled");
    f.column_names.push_back("target_raw");
    const std::size_t n = frame.size();
    f.columns.assign(f.column_names.size(), std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        f.columns[0][i] = static_cast<double>(frame.timestamps[i]);
        for (std::size_t j = 0; j < ingest::kNumFeatures; ++j)
            f.columns[1 + j][i] = frame.features(i, j);
        f.columns[1 + ingest::kNumFeatures][i] = frame.target_scaled[i];
        f.columns[2 + ingest::kNumFeatures][i] = frame.target_raw[i];
    }
    f.meta["split"] = ingest::split_name(frame.split);
    return f;
}

ingest::ScaledFrame frame_from_columnar(const ColumnarFile& f, ingest::SplitTag tag) {
    ingest::ScaledFrame frame;
    frame.split = tag;
    const std::size_t n = f.rows();
    frame.timestamps.resize(n);
    frame.features = Matrix(n, ingest::kNumFeatures);
    frame.target_scaled.resize(n);
    frame.target_raw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        frame.timestamps[i] = static_cast<Timestamp>(f.columns[0][i]);
        for (std::size_t j = 0; j < ingest::kNumFeatures; ++j)
            frame.features(i, j) = f.columns[1 + j][i];
        frame.target_scaled[i] = f.columns[1 + ingest::kNumFeatures][i];
        frame.target_raw[i] = f.columns[2 + ingest::kNumFeatures][i];
    }
    return frame;
}

void save_scaler(const ingest::ScalerState& s, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write scaler file " + path);
    os << "qrc-scaler v1\n";
    const auto vec = [&os](const char* key, const std::vector<double>& v) {
        os << key << " =";
        char b[64];
        for (double x : v) {
            std::snprintf(b, sizeof b, " %.17g", x);
            os << b;
        }
        os << "\n";
    };
    vec("feature_min", s.feature_min);
    vec("feature_max", s.feature_max);
    char b[64];
    std::snprintf(b, sizeof b, "%.17g", s.target_min);
    os << "target_min = " << b << "\n";
    std::snprintf(b, sizeof b, "%.17g", s.target_max);
    os << "target_max = " << b << "\n";
}

ingest::ScalerState load_scaler(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scaler file " + path);
    std::string line;
    std::getline(is, line);
    if (line != "qrc-scaler v1") throw std::runtime_error("bad scaler file header in " + path);
    ingest::ScalerState s;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        std::istringstream vs(line.substr(eq + 1));
        if (key == "feature_min" || key == "feature_max") {
            std::vector<double> v;
            double x;
            while (vs >> x) v.push_back(x);
            (key == "feature_min" ? s.feature_min : s.feature_max) = v;
        } else if (key == "target_min") {
            vs >> s.target_min;
        } else if (key == "target_max") {
            vs >> s.target_max;
        }
    }
    return s;
}

/// Hash of everything prepare depends on, for the prepare-stage cache.
std::uint64_t prepare_key(const RunConfig& cfg, std::uint64_t data_hash) {
    Hasher h;
    h.update_u64(data_hash);
    h.update_u64(static_cast<std::uint64_t>(cfg.window_length));
    h.update_double(cfg.train_ratio);
    h.update_double(cfg.val_ratio);
    h.update_double(cfg.test_ratio);
    return h.digest();
}

json genome_to_json(const gasearch::Genome& g) {
    return json{{"n_qubits", g.n_qubits},
                {"n_layers", g.n_layers},
                {"encoding", encoding_name(g.encoding)},
                {"coupling_strength", g.coupling_strength},
                {"l1_ratio", g.l1_ratio}};
}

struct SeedShotOutcome {
    readout::Metrics fp32_test;
    std::vector<double> fp32_test_pred_scaled;
    std::map<int, readout::Metrics> by_k;
    std::map<int, quantize::RefineInfo> refine_by_k;
    double selected_alpha = 0;
    std::vector<std::string> errors_by_cell;  // "seed/shots/k: what"
};

}  // namespace

RunConfig RunConfig::from_kv(const KvConfig& kv) {
    kv.require_known_keys({
        "data", "out", "cache_dir", "seeds", "shots", "bits", "window", "split", "alpha_grid",
        "kernel_decays", "reservoir", "reservoir.n_qubits", "reservoir.n_layers",
        "reservoir.encoding", "reservoir.coupling", "reservoir.l1_ratio", "ga.population",
        "ga.generations", "ga.tournament", "ga.mutation_rate", "ga.sigma_frac", "ga.elitism",
        "ga.seed", "clip.p_min", "clip.p_max", "clip.count", "refine_rounds", "mode",
        "trace_rows",
    });

    RunConfig cfg;
    cfg.data_path = kv.get_string("data", cfg.data_path);
    cfg.output_dir = kv.get_string("out", cfg.output_dir);
    cfg.cache_dir = kv.get_string("cache_dir", cfg.cache_dir);

    if (kv.has("seeds")) {
        cfg.seeds.clear();
        for (const auto& tok : kv.get_string_list("seeds", {}))
            cfg.seeds.push_back(std::stoull(tok));
    }
    if (kv.has("shots")) {
        cfg.shot_settings.clear();
        for (const auto& tok : kv.get_string_list("shots", {})) {
            const auto s = shot_setting_from_label(tok);
            if (!s) throw std::invalid_argument("bad shots entry \"" + tok + "\"");
            cfg.shot_settings.push_back(*s);
        }
    }
    if (kv.has("bits")) {
        cfg.bit_widths.clear();
        for (const auto& tok : kv.get_string_list("bits", {}))
            cfg.bit_widths.push_back(std::stoi(tok));
    }
    cfg.window_length = kv.get_int("window", cfg.window_length);
    if (kv.has("split")) {
        const auto r = kv.get_double_list("split", {});
        if (r.size() != 3) throw std::invalid_argument("split needs 3 ratios");
        cfg.train_ratio = r[0];
        cfg.val_ratio = r[1];
        cfg.test_ratio = r[2];
    }
    cfg.alpha_grid = kv.get_double_list("alpha_grid", cfg.alpha_grid);
    cfg.kernel_decays = kv.get_double_list("kernel_decays", cfg.kernel_decays);

    const std::string res = kv.get_string("reservoir", "from-search");
    if (res == "from-search") {
        cfg.reservoir_from_search = true;
    } else if (res == "explicit") {
        cfg.reservoir_from_search = false;
    } else {
        throw std::invalid_argument("reservoir must be from-search or explicit, got \"" + res +
                                    "\"");
    }
    cfg.reservoir.n_qubits = kv.get_int("reservoir.n_qubits", cfg.reservoir.n_qubits);
    cfg.reservoir.n_layers = kv.get_int("reservoir.n_layers", cfg.reservoir.n_layers);
    if (kv.has("reservoir.encoding")) {
        const auto e = encoding_from_name(kv.get_string("reservoir.encoding", ""));
        if (!e) throw std::invalid_argument("bad reservoir.encoding");
        cfg.reservoir.encoding = *e;
    }
    cfg.reservoir.coupling_strength =
        kv.get_double("reservoir.coupling", cfg.reservoir.coupling_strength);
    cfg.reservoir.l1_ratio = kv.get_double("reservoir.l1_ratio", cfg.reservoir.l1_ratio);
    cfg.reservoir.kernel_decays = cfg.kernel_decays;

    cfg.ga.population = kv.get_int("ga.population", cfg.ga.population);
    cfg.ga.generations = kv.get_int("ga.generations", cfg.ga.generations);
    cfg.ga.tournament_size = kv.get_int("ga.tournament", cfg.ga.tournament_size);
    cfg.ga.mutation_rate = kv.get_double("ga.mutation_rate", cfg.ga.mutation_rate);
    cfg.ga.mutation_sigma_frac = kv.get_double("ga.sigma_frac", cfg.ga.mutation_sigma_frac);
    cfg.ga.elitism = kv.get_int("ga.elitism", cfg.ga.elitism);
    cfg.ga.seed = kv.get_u64("ga.seed", cfg.ga.seed);

    cfg.clip_grid.p_min = kv.get_double("clip.p_min", cfg.clip_grid.p_min);
    cfg.clip_grid.p_max = kv.get_double("clip.p_max", cfg.clip_grid.p_max);
    cfg.clip_grid.count = kv.get_int("clip.count", cfg.clip_grid.count);
    cfg.refine_rounds = kv.get_int("refine_rounds", cfg.refine_rounds);
    cfg.trace_rows = kv.get_int("trace_rows", cfg.trace_rows);

    const std::string mode = kv.get_string("mode", "parallel");
    if (mode == "serial") cfg.mode = reservoir::ExecutionMode::serial;
    else if (mode == "parallel") cfg.mode = reservoir::ExecutionMode::parallel;
    else throw std::invalid_argument("mode must be serial or parallel");
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_kv(KvConfig::from_file(path));
}

void RunConfig::finalize() {
    if (const char* env = std::getenv("QRC_CACHE_DIR"); env && *env) cache_dir = env;
    if (cache_dir.empty()) cache_dir = output_dir + "/cache";
}

std::uint64_t RunConfig::hash() const {
    Hasher h;
    h.update(data_path);
    for (auto s : seeds) h.update_u64(s);
    for (const auto& s : shot_settings) h.update(s.label());
    for (int k : bit_widths) h.update_u64(static_cast<std::uint64_t>(k));
    h.update_u64(static_cast<std::uint64_t>(window_length));
    h.update_double(train_ratio);
    h.update_double(val_ratio);
    h.update_double(test_ratio);
    h.update_doubles(alpha_grid);
    h.update_doubles(kernel_decays);
    h.update_u64(reservoir_from_search ? 1 : 0);
    h.update_u64(reservoir.hash());
    h.update_u64(static_cast<std::uint64_t>(ga.population));
    h.update_u64(static_cast<std::uint64_t>(ga.generations));
    h.update_u64(static_cast<std::uint64_t>(ga.tournament_size));
    h.update_double(ga.mutation_rate);
    h.update_double(ga.mutation_sigma_frac);
    h.update_u64(static_cast<std::uint64_t>(ga.elitism));
    h.update_u64(ga.seed);
    h.update_double(clip_grid.p_min);
    h.update_double(clip_grid.p_max);
    h.update_u64(static_cast<std::uint64_t>(clip_grid.count));
    h.update_u64(static_cast<std::uint64_t>(refine_rounds));
    h.update_u64(static_cast<std::uint64_t>(trace_rows));
    return h.digest();
}

PreparedData prepare_from_records(const std::vector<ingest::RawRecord>& records,
                                  const RunConfig& cfg) {
    PreparedData out;
    out.data_hash = ingest::hash_records(records);
    const auto hourly = ingest::resample_hourly(records);
    out.hourly_count = hourly.size();
    const auto frame = ingest::engineer_features(hourly);
    const auto splits =
        ingest::chronological_split(frame, cfg.train_ratio, cfg.val_ratio, cfg.test_ratio);
    out.scaler = ingest::fit_minmax(splits.train);
    out.train = ingest::apply_minmax(splits.train, out.scaler);
    out.val = ingest::apply_minmax(splits.val, out.scaler);
    out.test = ingest::apply_minmax(splits.test, out.scaler);
    out.train_windows = ingest::make_windows(out.train, cfg.window_length);
    out.val_windows = ingest::make_windows(out.val, cfg.window_length);
    out.test_windows = ingest::make_windows(out.test, cfg.window_length);
    return out;
}

PrepareSummary cmd_prepare(const RunConfig& cfg) {
    if (cfg.data_path.empty()) throw std::invalid_argument("no data path configured");
    const auto records = ingest::parse_raw_csv(cfg.data_path);
    const std::uint64_t data_hash = ingest::hash_records(records);

    const fs::path dir = fs::path(cfg.output_dir) / kPreparedSubdir;
    fs::create_directories(dir);
    const std::string key = std::to_string(prepare_key(cfg, data_hash));

    PrepareSummary summary;
    summary.prepared_dir = dir.string();

    const fs::path meta_path = dir / "prepare_meta.txt";
    if (fs::exists(meta_path)) {
        std::ifstream is(meta_path);
        std::string existing;
        std::getline(is, existing);
        if (existing == key) {
            // warm prepare cache; report sizes from the stored artifacts
            const PreparedData d = load_prepared(cfg.output_dir);
            summary.cache_hit = true;
            summary.hourly_count = d.hourly_count;
            summary.train_rows = d.train.size();
            summary.val_rows = d.val.size();
            summary.test_rows = d.test.size();
            summary.train_windows = d.train_windows.size();
            summary.val_windows = d.val_windows.size();
            summary.test_windows = d.test_windows.size();
            return summary;
        }
    }

    const PreparedData d = prepare_from_records(records, cfg);

    const auto save_frame = [&](const ingest::ScaledFrame& frame, const std::string& name) {
        ColumnarFile f = frame_to_columnar(frame);
        f.meta["data_hash"] = std::to_string(d.data_hash);
        f.save((dir / (name + "_frame.qrccol")).string());
    };
    const auto save_windows = [&](const std::vector<ingest::WindowSample>& ws,
                                  const std::string& name) {
        ColumnarFile f = windows_to_columnar(ws, cfg.window_length);
        f.meta["data_hash"] = std::to_string(d.data_hash);
        f.meta["T"] = std::to_string(cfg.window_length);
        f.save((dir / (name + "_windows.qrccol")).string());
    };
    save_frame(d.train, "train");
    save_frame(d.val, "val");
    save_frame(d.test, "test");
    save_windows(d.train_windows, "train");
    save_windows(d.val_windows, "val");
    save_windows(d.test_windows, "test");
    save_scaler(d.scaler, (dir / "scaler.txt").string());
    {
        std::ofstream os(meta_path, std::ios::trunc);
        os << key << "\n";
        os << "hourly_count = " << d.hourly_count << "\n";
        os << "data_hash = " << d.data_hash << "\n";
    }

    summary.hourly_count = d.hourly_count;
    summary.train_rows = d.train.size();
    summary.val_rows = d.val.size();
    summary.test_rows = d.test.size();
    summary.train_windows = d.train_windows.size();
    summary.val_windows = d.val_windows.size();
    summary.test_windows = d.test_windows.size();
    return summary;
}

PreparedData load_prepared(const std::string& output_dir) {
    const fs::path dir = fs::path(output_dir) / kPreparedSubdir;
    if (!fs::exists(dir / "prepare_meta.txt"))
        throw std::invalid_argument("no prepared data under " + dir.string() +
                                    " (run prepare first)");
    PreparedData d;
    d.scaler = load_scaler((dir / "scaler.txt").string());
    const auto load_frame = [&](const std::string& name, ingest::SplitTag tag) {
        return frame_from_columnar(ColumnarFile::load((dir / (name + "_frame.qrccol")).string()),
                                   tag);
    };
    d.train = load_frame("train", ingest::SplitTag::train);
    d.val = load_frame("val", ingest::SplitTag::val);
    d.test = load_frame("test", ingest::SplitTag::test);
    const auto load_windows = [&](const std::string& name) {
        const ColumnarFile f = ColumnarFile::load((dir / (name + "_windows.qrccol")).string());
        return windows_from_columnar(f, std::stoi(f.meta.at("T")));
    };
    d.train_windows = load_windows("train");
    d.val_windows = load_windows("val");
    d.test_windows = load_windows("test");
    std::ifstream is(dir / "prepare_meta.txt");
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("hourly_count = ", 0) == 0) d.hourly_count = std::stoull(line.substr(15));
        if (line.rfind("data_hash = ", 0) == 0) d.data_hash = std::stoull(line.substr(12));
    }
    return d;
}

void save_reservoir_config(const ReservoirConfig& config, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write reservoir config " + path);
    os << "qrc-reservoir-config v1\n";
    os << "n_qubits = " << config.n_qubits << "\n";
    os << "n_layers = " << config.n_layers << "\n";
    os << "encoding = " << encoding_name(config.encoding) << "\n";
    char b[64];
    std::snprintf(b, sizeof b, "%.17g", config.coupling_strength);
    os << "coupling = " << b << "\n";
    std::snprintf(b, sizeof b, "%.17g", config.l1_ratio);
    os << "l1_ratio = " << b << "\n";
    os << "kernel_decays =";
    for (double d : config.kernel_decays) {
        std::snprintf(b, sizeof b, " %.17g", d);
        os << b;
    }
    os << "\n";
    os << "seed = " << config.seed << "\n";
}

ReservoirConfig load_reservoir_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open reservoir config " + path);
    std::string line;
    std::getline(is, line);
    if (line != "qrc-reservoir-config v1")
        throw std::runtime_error("bad reservoir config header in " + path);
    ReservoirConfig c;
    c.kernel_decays.clear();
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        const std::string val = line.substr(eq + 1);
        if (key == "n_qubits") c.n_qubits = std::stoi(val);
        else if (key == "n_layers") c.n_layers = std::stoi(val);
        else if (key == "encoding") {
            std::string name = val;
            name.erase(0, name.find_first_not_of(' '));
            name.erase(name.find_last_not_of(" \r") + 1);
            const auto e = encoding_from_name(name);
            if (!e) throw std::runtime_error("bad encoding in " + path);
            c.encoding = *e;
        } else if (key == "coupling") c.coupling_strength = std::stod(val);
        else if (key == "l1_ratio") c.l1_ratio = std::stod(val);
        else if (key == "seed") c.seed = std::stoull(val);
        else if (key == "kernel_decays") {
            std::istringstream vs(val);
            double d;
            while (vs >> d) c.kernel_decays.push_back(d);
        }
    }
    c.validate();
    return c;
}

SearchSummary cmd_search(const RunConfig& cfg) {
    const PreparedData d = load_prepared(cfg.output_dir);
    const gasearch::SearchData data = gasearch::make_search_data(
        d.train_windows, d.val_windows, cfg.alpha_grid, cfg.kernel_decays, cfg.cache_dir,
        cfg.mode);
    const gasearch::SearchResult result = gasearch::run_search(data, cfg.ga);

    const fs::path report_path = fs::path(cfg.output_dir) / "search_report.jsonl";
    {
        std::ofstream os(report_path, std::ios::trunc);
        for (const auto& rec : result.records) {
            json j{{"generation", rec.generation},
                   {"genome", genome_to_json(rec.genome)},
                   {"wall_time", rec.wall_time_s},
                   {"memo_hit", rec.memo_hit}};
            if (rec.failed) j["fitness"] = nullptr;
            else j["fitness"] = rec.fitness;
            os << j.dump() << "\n";
        }
    }

    const ReservoirConfig winner =
        result.best.genome.to_config(cfg.kernel_decays, result.best.eval_seed);
    const fs::path winner_path = fs::path(cfg.output_dir) / "winner_config.txt";
    save_reservoir_config(winner, winner_path.string());

    SearchSummary s;
    s.best = result.best;
    s.evaluations = result.records.size();
    s.winner_path = winner_path.string();
    s.report_path = report_path.string();
    return s;
}

RunResult cmd_run(const RunConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const PreparedData d = load_prepared(cfg.output_dir);

    ReservoirConfig base_config;
    if (cfg.reservoir_from_search) {
        const fs::path winner = fs::path(cfg.output_dir) / "winner_config.txt";
        if (!fs::exists(winner))
            throw std::invalid_argument("reservoir = from-search but no winner config at " +
                                        winner.string() +
                                        " (run search, or use --skip-search)");
        base_config = load_reservoir_config(winner.string());
        base_config.kernel_decays = cfg.kernel_decays;
    } else {
        base_config = cfg.reservoir;
        base_config.kernel_decays = cfg.kernel_decays;
        base_config.validate();
    }

    std::vector<double> y_train(d.train_windows.size()), y_test_raw(d.test_windows.size()),
        y_val(d.val_windows.size());
    for (std::size_t i = 0; i < y_train.size(); ++i) y_train[i] = d.train_windows[i].target_scaled;
    for (std::size_t i = 0; i < y_val.size(); ++i) y_val[i] = d.val_windows[i].target_scaled;
    for (std::size_t i = 0; i < y_test_raw.size(); ++i) y_test_raw[i] = d.test_windows[i].target_raw;

    RunResult result;
    std::map<std::string, double> extract_seconds, fit_seconds, quant_seconds;
    // (shots label, seed) -> outcome
    std::map<std::pair<std::string, std::uint64_t>, SeedShotOutcome> outcomes;

    const fs::path out_dir(cfg.output_dir);
    const fs::path models_dir = out_dir / "models";
    fs::create_directories(models_dir);

    for (const ShotSetting& shots : cfg.shot_settings) {
        for (const std::uint64_t seed : cfg.seeds) {
            SeedShotOutcome outcome;
            ReservoirConfig config = base_config;
            config.seed = seed;  // each seed regenerates the reservoir and the shot streams
            const std::string tag =
                "seed" + std::to_string(seed) + "_shots" + shots.label();
            try {
                const auto params = reservoir::generate_params(config);
                const auto t0 = std::chrono::steady_clock::now();
                const auto extract = [&](const std::vector<ingest::WindowSample>& ws,
                                         const char* split) {
                    Hasher sh;
                    sh.update(split);
                    sh.update(shots.label());
                    return reservoir::extract_dataset(ws, params, config, shots,
                                                      derive_seed({seed, sh.digest()}),
                                                      cfg.cache_dir, nullptr, cfg.mode);
                };
                const Matrix R_train = extract(d.train_windows, "train");
                const Matrix R_val = extract(d.val_windows, "val");
                const Matrix R_test = extract(d.test_windows, "test");
                extract_seconds[tag] = stage_seconds(t0);

                // alpha from the validation split, l1_ratio from the genome
                const auto t1 = std::chrono::steady_clock::now();
                readout::ReadoutModel best_model;
                double best_val_rmse = 0;
                bool have_model = false;
                for (const double alpha : cfg.alpha_grid) {
                    readout::ReadoutModel m =
                        readout::fit_elastic_net(R_train, y_train, alpha, config.l1_ratio);
                    m.config_hash = config.hash();
                    const auto pred = readout::predict(m, R_val);
                    double sq = 0;
                    for (std::size_t i = 0; i < pred.size(); ++i) {
                        const double e = pred[i] - y_val[i];
                        sq += e * e;
                    }
                    const double rmse = std::sqrt(sq / static_cast<double>(pred.size()));
                    if (!have_model || rmse < best_val_rmse) {
                        best_model = std::move(m);
                        best_val_rmse = rmse;
                        outcome.selected_alpha = alpha;
                        have_model = true;
                    }
                }
                fit_seconds[tag] = stage_seconds(t1);

                outcome.fp32_test_pred_scaled = readout::predict(best_model, R_test);
                outcome.fp32_test = readout::metrics_from_predictions(
                    outcome.fp32_test_pred_scaled, y_test_raw, d.scaler);
                best_model.save((models_dir / ("fp32_" + tag + ".txt")).string());

                const auto t2 = std::chrono::steady_clock::now();
                for (const int k : cfg.bit_widths) {
                    quantize::RefineInfo info;
                    const quantize::QuantizedReadout q = quantize::iterative_refine(
                        best_model.weights, best_model.bias, k, R_train, y_train,
                        cfg.refine_rounds, cfg.clip_grid, &info);
                    const auto pred = quantize::predict_quantized(q, R_test);
                    outcome.by_k[k] =
                        readout::metrics_from_predictions(pred, y_test_raw, d.scaler);
                    outcome.refine_by_k[k] = info;
                    if (k != 32)
                        q.save((models_dir / ("quant_k" + std::to_string(k) + "_" + tag + ".txt"))
                                   .string(),
                               best_model);
                }
                quant_seconds[tag] = stage_seconds(t2);
            } catch (const std::exception& e) {
                outcome.errors_by_cell.push_back(tag + ": " + e.what());
                result.any_failed = true;
            }
            outcomes[{shots.label(), seed}] = std::move(outcome);
        }
    }

    // aggregate across seeds, per (bit width, shot setting)
    for (const ShotSetting& shots : cfg.shot_settings) {
        std::vector<double> fp32_rmse;
        for (const std::uint64_t seed : cfg.seeds) {
            const auto& o = outcomes[{shots.label(), seed}];
            if (o.errors_by_cell.empty()) fp32_rmse.push_back(o.fp32_test.rmse);
        }
        if (fp32_rmse.size() >= 2)
            result.fp32_rmse_by_shots[shots.label()] =
                readout::aggregate_over_seeds(fp32_rmse).mean;
        else if (fp32_rmse.size() == 1)
            result.fp32_rmse_by_shots[shots.label()] = fp32_rmse[0];
    }

    for (const int k : cfg.bit_widths) {
        for (const ShotSetting& shots : cfg.shot_settings) {
            std::vector<double> rmses, maes;
            for (const std::uint64_t seed : cfg.seeds) {
                const auto& o = outcomes[{shots.label(), seed}];
                CellDiagnostics cell;
                cell.seed = seed;
                cell.shots_label = shots.label();
                cell.bit_width = k;
                if (!o.errors_by_cell.empty()) {
                    cell.failed = true;
                    cell.error = o.errors_by_cell.front();
                } else {
                    cell.test_metrics = o.by_k.at(k);
                    cell.refine = o.refine_by_k.at(k);
                    cell.selected_alpha = o.selected_alpha;
                    rmses.push_back(cell.test_metrics.rmse);
                    maes.push_back(cell.test_metrics.mae);
                }
                result.cells.push_back(cell);
            }
            if (rmses.empty()) continue;
            quantize::QuantReportRow row;
            row.bit_width = k;
            row.shots_label = shots.label();
            if (rmses.size() >= 2) {
                const auto r = readout::aggregate_over_seeds(rmses);
                const auto m = readout::aggregate_over_seeds(maes);
                row.rmse_mean = r.mean;
                row.rmse_std = r.std;
                row.mae_mean = m.mean;
                row.mae_std = m.std;
            } else {
                row.rmse_mean = rmses[0];
                row.mae_mean = maes[0];
            }
            const auto fp32_it = result.fp32_rmse_by_shots.find(shots.label());
            row.degradation_pct = (fp32_it != result.fp32_rmse_by_shots.end())
                                      ? quantize::degradation(row.rmse_mean, fp32_it->second)
                                      : 0.0;
            row.memory_saved_pct = quantize::memory_saved(k);
            result.rows.push_back(row);
        }
    }

    // results.csv + results.json
    result.results_csv = (out_dir / "results.csv").string();
    {
        std::ofstream os(result.results_csv, std::ios::trunc);
        os << "bit_width,shots,rmse_mean,rmse_std,mae_mean,mae_std,degradation_pct,"
              "memory_saved_pct\n";
        for (const auto& row : result.rows)
            os << row.bit_width << ',' << row.shots_label << ',' << fmt(row.rmse_mean) << ','
               << fmt(row.rmse_std) << ',' << fmt(row.mae_mean) << ',' << fmt(row.mae_std) << ','
               << fmt(row.degradation_pct, "%.4f") << ',' << fmt(row.memory_saved_pct, "%.1f")
               << "\n";
    }
    {
        json rows = json::array();
        for (const auto& row : result.rows)
            rows.push_back(json{{"bit_width", row.bit_width},
                                {"shots", row.shots_label},
                                {"rmse_mean", row.rmse_mean},
                                {"rmse_std", row.rmse_std},
                                {"mae_mean", row.mae_mean},
                                {"mae_std", row.mae_std},
                                {"degradation_pct", row.degradation_pct},
                                {"memory_saved_pct", row.memory_saved_pct}});
        std::ofstream os(out_dir / "results.json", std::ios::trunc);
        os << rows.dump(2) << "\n";
    }

    // degradation.csv: report data with the 5% / 15% reference thresholds
    result.degradation_csv = (out_dir / "degradation.csv").string();
    {
        std::ofstream os(result.degradation_csv, std::ios::trunc);
        os << "bit_width,shots,degradation_pct,threshold_5_pct,threshold_15_pct\n";
        for (const auto& row : result.rows)
            os << row.bit_width << ',' << row.shots_label << ','
               << fmt(row.degradation_pct, "%.4f") << ",5.0,15.0\n";
    }

    // trace.csv: first trace_rows test steps, actual + FP32 prediction per
    // shot setting (first seed's model)
    result.trace_csv = (out_dir / "trace.csv").string();
    {
        const std::size_t n_trace =
            std::min<std::size_t>(static_cast<std::size_t>(cfg.trace_rows),
                                  d.test_windows.size());
        std::ofstream os(result.trace_csv, std::ios::trunc);
        os << "timestamp,actual";
        for (const auto& shots : cfg.shot_settings) os << ",pred_fp32_shots" << shots.label();
        os << "\n";
        for (std::size_t i = 0; i < n_trace; ++i) {
            os << timeutil::format_timestamp(d.test_windows[i].target_timestamp) << ','
               << fmt(d.test_windows[i].target_raw, "%.4f");
            for (const auto& shots : cfg.shot_settings) {
                const auto& o = outcomes[{shots.label(), cfg.seeds.front()}];
                if (o.fp32_test_pred_scaled.size() > i)
                    os << ',' << fmt(ingest::invert_target(o.fp32_test_pred_scaled[i], d.scaler),
                                     "%.4f");
                else
                    os << ",";
            }
            os << "\n";
        }
    }

    // manifest: every file under the output dir, content-hashed
    result.manifest_path = (out_dir / "run_manifest.json").string();
    {
        json manifest;
        manifest["tool_version"] = kToolVersion;
        manifest["config_hash"] = cfg.hash();
        manifest["data_hash"] = d.data_hash;
        json timings;
        double total_extract = 0, total_fit = 0, total_quant = 0;
        for (const auto& [tag, s] : extract_seconds) total_extract += s;
        for (const auto& [tag, s] : fit_seconds) total_fit += s;
        for (const auto& [tag, s] : quant_seconds) total_quant += s;
        timings["extract_s"] = total_extract;
        timings["fit_s"] = total_fit;
        timings["quantize_s"] = total_quant;
        timings["total_s"] = stage_seconds(t_start);
        manifest["timings"] = timings;
        json failures = json::array();
        for (const auto& cell : result.cells)
            if (cell.failed) failures.push_back(cell.error);
        manifest["failures"] = failures;
        json artifacts = json::array();
        for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().filename() == "run_manifest.json") continue;
            artifacts.push_back(json{{"path", fs::relative(entry.path(), out_dir).string()},
                                     {"hash", hash_file_hex(entry.path().string())}});
        }
        manifest["artifacts"] = artifacts;
        std::ofstream os(result.manifest_path, std::ios::trunc);
        os << manifest.dump(2) << "\n";
    }
    return result;
}

std::string cmd_report(const std::string& output_dir) {
    const fs::path results_path = fs::path(output_dir) / "results.csv";
    if (!fs::exists(results_path))
        throw std::invalid_argument("no results.csv under " + output_dir +
                                    " (run the grid first)");

    std::ifstream is(results_path);
    std::string line;
    std::getline(is, line);  // header
    struct Row {
        int k;
        std::string shots;
        double rmse_mean, rmse_std, mae_mean, mae_std, deg, mem;
    };
    std::vector<Row> rows;
    while (std::getline(is, line)) {
        const auto cells = split_list(line);
        if (cells.size() < 8) continue;
        rows.push_back(Row{std::stoi(cells[0]), cells[1], std::stod(cells[2]), std::stod(cells[3]),
                           std::stod(cells[4]), std::stod(cells[5]), std::stod(cells[6]),
                           std::stod(cells[7])});
    }
    if (rows.empty()) throw std::runtime_error("results.csv is empty in " + output_dir);

    std::ostringstream os;
    os << "bit width | shots | RMSE (mean +- std) | MAE (mean +- std) | degradation | memory "
          "saved\n";
    os << "----------+-------+--------------------+-------------------+-------------+-------------"
          "\n";
    for (const auto& r : rows) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "%9d | %5s | %9.1f +- %-6.1f | %8.1f +- %-6.1f | %+10.2f%% | %10.1f%%\n",
                      r.k, r.shots.c_str(), r.rmse_mean, r.rmse_std, r.mae_mean, r.mae_std, r.deg,
                      r.mem);
        os << buf;
    }

    os << "\nthreshold flags:\n";
    bool any_flag = false;
    for (const auto& r : rows) {
        if (r.k == 32) continue;
        if (r.deg > 15.0) {
            os << "  " << r.k << "-bit (shots=" << r.shots << "): degradation "
               << fmt(r.deg, "%.2f") << "% exceeds 15%\n";
            any_flag = true;
        } else if (r.deg > 5.0) {
            os << "  " << r.k << "-bit (shots=" << r.shots << "): degradation "
               << fmt(r.deg, "%.2f") << "% exceeds 5%\n";
            any_flag = true;
        }
    }
    if (!any_flag) os << "  none above the 5% threshold\n";

    const Row* best = nullptr;
    for (const auto& r : rows)
        if (r.shots != "none" && (best == nullptr || r.rmse_mean < best->rmse_mean)) best = &r;
    if (best != nullptr) {
        os << "\nbest finite-shot configuration: " << best->k << "-bit (shots=" << best->shots
           << "), RMSE " << fmt(best->rmse_mean, "%.1f") << ", memory saved "
           << fmt(best->mem, "%.1f") << "%\n";
    }
    return os.str();
}

}  // namespace qrc::pipeline

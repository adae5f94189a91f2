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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qrc/columnar.hpp"
#include "qrc/hash.hpp"
#include "qrc/pipeline.hpp"
#include "qrc/synthdata.hpp"

using namespace qrc;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Small but complete config: ~40 days of data, 5-qubit reservoir, reduced
/// grid. Keeps the full-pipeline tests at a few seconds.
pipeline::RunConfig small_config(const std::string& out_dir) {
    pipeline::RunConfig cfg;
    cfg.output_dir = out_dir;
    cfg.data_path = out_dir + "/synthetic.csv";
    cfg.seeds = {0, 1};
    cfg.shot_settings = {ShotSetting::exact(), ShotSetting::with_shots(64)};
    cfg.bit_widths = {32, 6, 3};
    cfg.reservoir_from_search = false;
    cfg.reservoir.n_qubits = 5;
    cfg.reservoir.n_layers = 3;
    cfg.alpha_grid = {1e-4, 1e-3};
    cfg.finalize();
    return cfg;
}

void write_small_dataset(const pipeline::RunConfig& cfg, int days = 40) {
    synthdata::SynthParams p;
    p.days = days;
    synthdata::write_csv(synthdata::generate_records(p), cfg.data_path);
}

}  // namespace

TEST_CASE("columnar files round-trip, atomic save") {
    ColumnarFile f;
    f.column_names = {"a", "b"};
    f.columns = {{1.0, 2.5, -3.0}, {0.0, 1e-300, 4.0}};
    f.meta["key"] = "value";
    const auto path = fresh_dir("qrc_colfile") + "/t.qrccol";
    f.save(path);
    CHECK_FALSE(fs::exists(path + ".tmp"));
    const auto g = ColumnarFile::load(path);
    CHECK(g.column_names == f.column_names);
    CHECK(g.columns == f.columns);
    CHECK(g.meta.at("key") == "value");
}

TEST_CASE("columnar loader rejects junk") {
    const auto path = fresh_dir("qrc_colbad") + "/bad.qrccol";
    std::ofstream(path) << "not a columnar file";
    CHECK_THROWS_AS(ColumnarFile::load(path), std::runtime_error);
    CHECK_THROWS_AS(ColumnarFile::load(path + ".missing"), std::runtime_error);
}

TEST_CASE("kv config parses values, lists, comments; rejects unknown keys") {
    const auto kv = KvConfig::from_string(
        "# comment\n"
        "seeds = 0, 1, 2\n"
        "window = 24\n"
        "alpha_grid = 1e-5,1e-4\n"
        "mode = serial\n");
    CHECK(kv.get_int("window", 0) == 24);
    CHECK(kv.get_double_list("alpha_grid", {}) == std::vector<double>{1e-5, 1e-4});
    CHECK(kv.get_string_list("seeds", {}).size() == 3);
    CHECK(kv.get_string("missing", "dflt") == "dflt");
    CHECK_THROWS_AS(kv.require_known_keys({"seeds", "window"}), std::invalid_argument);
    CHECK_NOTHROW(kv.require_known_keys({"seeds", "window", "alpha_grid", "mode"}));
    CHECK_THROWS_AS(KvConfig::from_string("no equals sign"), std::invalid_argument);
}

TEST_CASE("run config from kv honors overrides and defaults") {
    const auto cfg = pipeline::RunConfig::from_kv(KvConfig::from_string(
        "data = d.csv\n"
        "out = /tmp/qrc_out\n"
        "seeds = 3,4\n"
        "shots = none,128\n"
        "bits = 32,8\n"
        "reservoir = explicit\n"
        "reservoir.n_qubits = 5\n"
        "kernel_decays = 0.3,0.9\n"
        "mode = serial\n"));
    CHECK(cfg.data_path == "d.csv");
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4});
    CHECK(cfg.shot_settings.size() == 2);
    CHECK(cfg.shot_settings[1].shots == 128);
    CHECK(cfg.bit_widths == std::vector<int>{32, 8});
    CHECK_FALSE(cfg.reservoir_from_search);
    CHECK(cfg.reservoir.n_qubits == 5);
    CHECK(cfg.reservoir.kernel_decays == std::vector<double>{0.3, 0.9});

    CHECK_THROWS_AS(
        pipeline::RunConfig::from_kv(KvConfig::from_string("unknown_knob = 1\n")),
        std::invalid_argument);

    // defaults reproduce the reference grid
    const pipeline::RunConfig dflt;
    CHECK(dflt.seeds == std::vector<std::uint64_t>{0, 1});
    CHECK(dflt.shot_settings[0].is_exact());
    CHECK(dflt.shot_settings[1].shots == 512);
    CHECK(dflt.bit_widths == std::vector<int>{32, 8, 6, 4, 3, 2});
    CHECK(dflt.window_length == 24);
}

TEST_CASE("QRC_CACHE_DIR overrides the cache location") {
    pipeline::RunConfig cfg;
    cfg.output_dir = "/tmp/qrc_envtest";
    setenv("QRC_CACHE_DIR", "/tmp/qrc_env_cache", 1);
    cfg.finalize();
    unsetenv("QRC_CACHE_DIR");
    CHECK(cfg.cache_dir == "/tmp/qrc_env_cache");

    pipeline::RunConfig dflt;
    dflt.output_dir = "/tmp/qrc_envtest";
    dflt.finalize();
    CHECK(dflt.cache_dir == "/tmp/qrc_envtest/cache");
}

TEST_CASE("prepare: summary, persistence, cache hit") {
    const auto out = fresh_dir("qrc_prep");
    auto cfg = small_config(out);
    write_small_dataset(cfg);

    const auto s1 = pipeline::cmd_prepare(cfg);
    CHECK_FALSE(s1.cache_hit);
    CHECK(s1.hourly_count == 40 * 24);
    const std::size_t frame_rows = 40 * 24 - 24;
    CHECK(s1.train_rows + s1.val_rows + s1.test_rows == frame_rows);
    CHECK(s1.train_windows == s1.train_rows - 24);

    // reload equals recompute
    const auto d = pipeline::load_prepared(cfg.output_dir);
    CHECK(d.hourly_count == s1.hourly_count);
    CHECK(d.train_windows.size() == s1.train_windows);
    CHECK(d.scaler.feature_min.size() == ingest::kNumFeatures);
    CHECK(d.train.split == ingest::SplitTag::train);

    const auto s2 = pipeline::cmd_prepare(cfg);
    CHECK(s2.cache_hit);
    CHECK(s2.train_windows == s1.train_windows);

    // changing the data invalidates the prepare cache
    synthdata::SynthParams p;
    p.days = 40;
    p.seed = 777;
    synthdata::write_csv(synthdata::generate_records(p), cfg.data_path);
    const auto s3 = pipeline::cmd_prepare(cfg);
    CHECK_FALSE(s3.cache_hit);
}

TEST_CASE("prepare fails cleanly on a missing file") {
    auto cfg = small_config(fresh_dir("qrc_prep_missing"));
    cfg.data_path = "/nonexistent/nowhere.csv";
    CHECK_THROWS_WITH_AS(pipeline::cmd_prepare(cfg), doctest::Contains("nowhere.csv"),
                         std::invalid_argument);
}

TEST_CASE("prepared windows respect split hygiene") {
    const auto out = fresh_dir("qrc_prep_hyg");
    auto cfg = small_config(out);
    write_small_dataset(cfg);
    pipeline::cmd_prepare(cfg);
    const auto d = pipeline::load_prepared(cfg.output_dir);

    // every train window target precedes every val target, etc.
    CHECK(d.train_windows.back().target_timestamp < d.val_windows.front().target_timestamp);
    CHECK(d.val_windows.back().target_timestamp < d.test_windows.front().target_timestamp);
    // train scaled features lie in [0,1]
    for (std::size_t i = 0; i < d.train.size(); ++i)
        for (std::size_t j = 0; j < ingest::kNumFeatures; ++j) {
            CHECK(d.train.features(i, j) >= -1e-12);
            CHECK(d.train.features(i, j) <= 1.0 + 1e-12);
        }
}

TEST_CASE("reservoir config file round-trips") {
    ReservoirConfig c;
    c.n_qubits = 6;
    c.n_layers = 5;
    c.encoding = EncodingStrategy::cheb_stride3;
    c.coupling_strength = 1.25;
    c.l1_ratio = 0.125;
    c.kernel_decays = {0.2, 0.7};
    c.seed = 42;
    const auto path = fresh_dir("qrc_rescfg") + "/winner.txt";
    pipeline::save_reservoir_config(c, path);
    const auto g = pipeline::load_reservoir_config(path);
    CHECK(g.n_qubits == 6);
    CHECK(g.n_layers == 5);
    CHECK(g.encoding == EncodingStrategy::cheb_stride3);
    CHECK(g.coupling_strength == 1.25);
    CHECK(g.l1_ratio == 0.125);
    CHECK(g.kernel_decays == std::vector<double>{0.2, 0.7});
    CHECK(g.seed == 42);
}

TEST_CASE("search: report records, winner file, determinism") {
    const auto out = fresh_dir("qrc_search");
    auto cfg = small_config(out);
    cfg.ga.seed = 3;
    write_small_dataset(cfg, 30);
    pipeline::cmd_prepare(cfg);

    const auto s1 = pipeline::cmd_search(cfg);
    CHECK(s1.evaluations == 18);
    CHECK(fs::exists(s1.winner_path));
    CHECK(fs::exists(s1.report_path));

    // JSONL report has 18 well-formed records
    std::ifstream is(s1.report_path);
    std::string line;
    int count = 0;
    while (std::getline(is, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j.contains("generation"));
        CHECK(j.contains("genome"));
        CHECK(j.contains("fitness"));
        ++count;
    }
    CHECK(count == 18);

    const auto s2 = pipeline::cmd_search(cfg);
    CHECK(s2.best.genome == s1.best.genome);
    CHECK(s2.best.fitness == s1.best.fitness);
}

TEST_CASE("run: grid artifacts, reproducibility, manifest completeness") {
    const auto out = fresh_dir("qrc_run");
    auto cfg = small_config(out);
    write_small_dataset(cfg);
    pipeline::cmd_prepare(cfg);

    const auto r1 = pipeline::cmd_run(cfg);
    CHECK_FALSE(r1.any_failed);
    CHECK(r1.rows.size() == cfg.bit_widths.size() * cfg.shot_settings.size());

    // every row has sane metrics and the exact memory formula
    for (const auto& row : r1.rows) {
        CHECK(row.rmse_mean > 0);
        CHECK(row.rmse_mean >= row.mae_mean);
        CHECK(row.memory_saved_pct ==
              doctest::Approx((1.0 - row.bit_width / 32.0) * 100.0));
        if (row.bit_width == 32) CHECK(row.degradation_pct == 0.0);
    }

    // refinement never loses to naive quantization, on every grid cell
    for (const auto& cell : r1.cells) {
        REQUIRE_FALSE(cell.failed);
        if (cell.bit_width != 32) {
            REQUIRE_FALSE(cell.refine.round_mses.empty());
            CHECK(cell.refine.round_mses.back() <= cell.refine.naive_mse + 1e-15);
        }
    }

    CHECK(fs::exists(r1.results_csv));
    CHECK(fs::exists(r1.degradation_csv));
    CHECK(fs::exists(r1.trace_csv));
    const std::string csv1 = read_file(r1.results_csv);

    // trace has header + min(trace_rows, test windows) lines
    {
        std::ifstream ts(r1.trace_csv);
        std::string line;
        std::getline(ts, line);
        CHECK(line.rfind("timestamp,actual", 0) == 0);
        std::size_t rows = 0;
        while (std::getline(ts, line)) ++rows;
        const auto d = pipeline::load_prepared(cfg.output_dir);
        CHECK(rows == std::min<std::size_t>(500, d.test_windows.size()));
    }

    // manifest lists every artifact with a matching hash
    {
        const auto manifest = nlohmann::json::parse(read_file(r1.manifest_path));
        CHECK(manifest["failures"].empty());
        std::set<std::string> listed;
        for (const auto& a : manifest["artifacts"]) {
            const std::string rel = a["path"];
            const std::string path = out + "/" + rel;
            REQUIRE(fs::exists(path));
            CHECK(a["hash"] == qrc::hash_file_hex(path));
            listed.insert(rel);
        }
        for (const auto& entry : fs::recursive_directory_iterator(out)) {
            if (!entry.is_regular_file()) continue;
            if (entry.path().filename() == "run_manifest.json") continue;
            CHECK(listed.count(fs::relative(entry.path(), out).string()) == 1);
        }
    }

    // second run over the same config: byte-identical results.csv
    const auto r2 = pipeline::cmd_run(cfg);
    CHECK(read_file(r2.results_csv) == csv1);
}

TEST_CASE("run without prepared data or winner config fails as a user error") {
    const auto out = fresh_dir("qrc_run_noprep");
    auto cfg = small_config(out);
    CHECK_THROWS_AS(pipeline::cmd_run(cfg), std::invalid_argument);

    write_small_dataset(cfg);
    pipeline::cmd_prepare(cfg);
    cfg.reservoir_from_search = true;  // no winner_config.txt present
    CHECK_THROWS_WITH_AS(pipeline::cmd_run(cfg), doctest::Contains("skip-search"),
                         std::invalid_argument);
}

TEST_CASE("report summarizes results and flags thresholds") {
    const auto out = fresh_dir("qrc_report");
    // hand-written results.csv with known degradations
    fs::create_directories(out);
    std::ofstream(out + "/results.csv")
        << "bit_width,shots,rmse_mean,rmse_std,mae_mean,mae_std,degradation_pct,memory_saved_pct\n"
           "32,none,3300.0,10.0,2500.0,9.0,0.0,0.0\n"
           "8,none,3350.0,10.0,2550.0,9.0,1.51,75.0\n"
           "4,none,3531.0,10.0,2700.0,9.0,7.0,87.5\n"
           "2,none,4000.0,10.0,3000.0,9.0,21.2,93.8\n"
           "32,512,3310.0,10.0,2505.0,9.0,0.0,0.0\n"
           "6,512,3280.0,10.0,2480.0,9.0,-0.91,81.2\n";
    const auto text = pipeline::cmd_report(out);
    CHECK(text.find("4-bit (shots=none): degradation 7.00% exceeds 5%") != std::string::npos);
    CHECK(text.find("2-bit (shots=none): degradation 21.20% exceeds 15%") != std::string::npos);
    CHECK(text.find("best finite-shot configuration: 6-bit") != std::string::npos);

    CHECK_THROWS_AS(pipeline::cmd_report(fresh_dir("qrc_report_empty")), std::invalid_argument);
}

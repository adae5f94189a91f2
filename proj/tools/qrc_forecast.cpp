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

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qrc/pipeline.hpp"
#include "qrc/synthdata.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInternal = 2;

struct CommonOpts {
    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::string seed_list, shots_list, bits_list;
    bool skip_search = false;
};

qrc::pipeline::RunConfig build_config(const CommonOpts& opts) {
    qrc::pipeline::RunConfig cfg;
    if (!opts.config_path.empty())
        cfg = qrc::pipeline::RunConfig::from_file(opts.config_path);
    if (!opts.data_path.empty()) cfg.data_path = opts.data_path;
    if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
    if (!opts.seed_list.empty()) {
        cfg.seeds.clear();
        for (const auto& tok : qrc::split_list(opts.seed_list))
            cfg.seeds.push_back(std::stoull(tok));
    }
    if (!opts.shots_list.empty()) {
        cfg.shot_settings.clear();
        for (const auto& tok : qrc::split_list(opts.shots_list)) {
            const auto s = qrc::shot_setting_from_label(tok);
            if (!s) throw std::invalid_argument("bad --shots-list entry \"" + tok + "\"");
            cfg.shot_settings.push_back(*s);
        }
    }
    if (!opts.bits_list.empty()) {
        cfg.bit_widths.clear();
        for (const auto& tok : qrc::split_list(opts.bits_list))
            cfg.bit_widths.push_back(std::stoi(tok));
    }
    if (opts.skip_search) cfg.reservoir_from_search = false;
    cfg.finalize();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "key = value config file");
    cmd->add_option("--data", opts.data_path, "raw CSV path (overrides config)");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed-list", opts.seed_list, "comma-separated seeds");
    cmd->add_option("--shots-list", opts.shots_list, "comma-separated shot settings (none, 512)");
    cmd->add_option("--bits-list", opts.bits_list, "comma-separated bit widths");
    cmd->add_flag("--skip-search", opts.skip_search,
                  "use the explicit reservoir.* config instead of the search winner");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-reservoir load forecasting with quantized readout"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* prepare = app.add_subcommand("prepare", "parse, resample, split, scale, window");
    add_common(prepare, opts);

    auto* search = app.add_subcommand("search", "genetic architecture search");
    add_common(search, opts);

    auto* run = app.add_subcommand("run", "full experiment grid");
    add_common(run, opts);

    auto* report = app.add_subcommand("report", "summarize a finished run");
    add_common(report, opts);

    auto* synth = app.add_subcommand("synth", "generate the synthetic stand-in dataset");
    std::string synth_out = "data/synthetic.csv";
    std::uint64_t synth_seed = 20170101;
    int synth_days = 364;
    synth->add_option("--out-file", synth_out, "CSV path to write");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--days", synth_days, "number of days (144 records each)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            qrc::synthdata::SynthParams p;
            p.seed = synth_seed;
            p.days = synth_days;
            const auto records = qrc::synthdata::generate_records(p);
            qrc::synthdata::write_csv(records, synth_out);
            std::printf("wrote %zu records to %s\n", records.size(), synth_out.c_str());
            return kExitOk;
        }

        const qrc::pipeline::RunConfig cfg = build_config(opts);

        if (prepare->parsed()) {
            const auto s = qrc::pipeline::cmd_prepare(cfg);
            std::printf("%s\n", s.cache_hit ? "cache hit: prepared data is up to date"
                                            : "prepared data written");
            std::printf("hourly samples: %zu\n", s.hourly_count);
            std::printf("split rows:     train %zu / val %zu / test %zu\n", s.train_rows,
                        s.val_rows, s.test_rows);
            std::printf("windows:        train %zu / val %zu / test %zu\n", s.train_windows,
                        s.val_windows, s.test_windows);
            std::printf("features (%zu):", qrc::ingest::kNumFeatures);
            for (const char* f : qrc::ingest::kFeatureNames) std::printf(" %s", f);
            std::printf("\n");
            return kExitOk;
        }
        if (search->parsed()) {
            const auto s = qrc::pipeline::cmd_search(cfg);
            std::printf("search finished: %zu evaluations\n", s.evaluations);
            std::printf("best genome: N=%d L=%d %s g=%.4f l1=%.4f (val RMSE %.6f)\n",
                        s.best.genome.n_qubits, s.best.genome.n_layers,
                        qrc::encoding_name(s.best.genome.encoding).c_str(),
                        s.best.genome.coupling_strength, s.best.genome.l1_ratio, s.best.fitness);
            std::printf("winner config: %s\nreport: %s\n", s.winner_path.c_str(),
                        s.report_path.c_str());
            return kExitOk;
        }
        if (run->parsed()) {
            const auto r = qrc::pipeline::cmd_run(cfg);
            std::printf("grid finished: %zu rows -> %s\n", r.rows.size(), r.results_csv.c_str());
            if (r.any_failed) {
                std::fprintf(stderr, "some cells failed; see %s\n", r.manifest_path.c_str());
                return kExitInternal;
            }
            return kExitOk;
        }
        if (report->parsed()) {
            const std::string out = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;
            std::printf("%s", qrc::pipeline::cmd_report(out).c_str());
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUserError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUserError;
}

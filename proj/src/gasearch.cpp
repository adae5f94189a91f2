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

#include "qrc/gasearch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "qrc/hash.hpp"
#include "qrc/readout.hpp"

namespace qrc::gasearch {

namespace {

template <typename T, std::size_t N>
T pick_alternative(const std::array<T, N>& choices, T current, Rng& rng) {
    std::vector<T> alts;
    for (const T& c : choices)
        if (!(c == current)) alts.push_back(c);
    return alts[static_cast<std::size_t>(rng.below(alts.size()))];
}

double clamp_gene(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

}  // namespace

void Genome::validate() const {
    if (std::find(kQubitChoices.begin(), kQubitChoices.end(), n_qubits) == kQubitChoices.end())
        throw std::invalid_argument("genome: n_qubits outside {5,6,7}");
    if (std::find(kLayerChoices.begin(), kLayerChoices.end(), n_layers) == kLayerChoices.end())
        throw std::invalid_argument("genome: n_layers outside {3,4,5}");
    if (coupling_strength < kCouplingMin || coupling_strength > kCouplingMax)
        throw std::invalid_argument("genome: coupling strength outside [0.1, 1.5]");
    if (l1_ratio < 0.0 || l1_ratio > 1.0)
        throw std::invalid_argument("genome: l1_ratio outside [0, 1]");
}

std::uint64_t Genome::hash() const {
    Hasher h;
    h.update_u64(static_cast<std::uint64_t>(n_qubits));
    h.update_u64(static_cast<std::uint64_t>(n_layers));
    h.update_u64(static_cast<std::uint64_t>(encoding));
    h.update_double(coupling_strength);
    h.update_double(l1_ratio);
    return h.digest();
}

ReservoirConfig Genome::to_config(const std::vector<double>& kernel_decays,
                                  std::uint64_t seed) const {
    ReservoirConfig c;
    c.n_qubits = n_qubits;
    c.n_layers = n_layers;
    c.encoding = encoding;
    c.coupling_strength = coupling_strength;
    c.l1_ratio = l1_ratio;
    c.kernel_decays = kernel_decays;
    c.seed = seed;
    return c;
}

SearchData make_search_data(const std::vector<ingest::WindowSample>& train_windows,
                            const std::vector<ingest::WindowSample>& val_windows,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& kernel_decays,
                            const std::string& cache_dir, reservoir::ExecutionMode mode) {
    if (train_windows.empty() || val_windows.empty())
        throw std::invalid_argument("make_search_data: empty window set");
    SearchData d;
    const std::size_t sub = std::max<std::size_t>(1, train_windows.size() / 5);
    d.train_sub.assign(train_windows.end() - static_cast<std::ptrdiff_t>(sub),
                       train_windows.end());
    d.val_windows = val_windows;
    d.alpha_grid = alpha_grid;
    d.kernel_decays = kernel_decays;
    d.cache_dir = cache_dir;
    d.mode = mode;
    return d;
}

Genome sample_genome(Rng& rng) {
    Genome g;
    g.n_qubits = kQubitChoices[static_cast<std::size_t>(rng.below(kQubitChoices.size()))];
    g.n_layers = kLayerChoices[static_cast<std::size_t>(rng.below(kLayerChoices.size()))];
    g.encoding = kEncodingChoices[static_cast<std::size_t>(rng.below(kEncodingChoices.size()))];
    g.coupling_strength = rng.uniform(kCouplingMin, kCouplingMax);
    g.l1_ratio = rng.uniform();
    return g;
}

std::vector<Genome> init_population(int size, Rng& rng) {
    std::vector<Genome> pop;
    pop.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) pop.push_back(sample_genome(rng));
    return pop;
}

double evaluate_genome(const Genome& genome, const SearchData& data, std::uint64_t seed) {
    genome.validate();
    const ReservoirConfig config = genome.to_config(data.kernel_decays, seed);
    const qsim::ReservoirParams params = reservoir::generate_params(config);
    const ShotSetting exact = ShotSetting::exact();

    const Matrix R_sub =
        reservoir::extract_dataset(data.train_sub, params, config, exact,
                                   derive_seed({seed, 0x67612d74 /*"ga-t"*/}), data.cache_dir,
                                   nullptr, data.mode);
    const Matrix R_val =
        reservoir::extract_dataset(data.val_windows, params, config, exact,
                                   derive_seed({seed, 0x67612d76 /*"ga-v"*/}), data.cache_dir,
                                   nullptr, data.mode);

    std::vector<double> y_sub(data.train_sub.size()), y_val(data.val_windows.size());
    for (std::size_t i = 0; i < y_sub.size(); ++i) y_sub[i] = data.train_sub[i].target_scaled;
    for (std::size_t i = 0; i < y_val.size(); ++i) y_val[i] = data.val_windows[i].target_scaled;

    double best_rmse = std::numeric_limits<double>::infinity();
    for (double alpha : data.alpha_grid) {
        const readout::ReadoutModel model =
            readout::fit_elastic_net(R_sub, y_sub, alpha, genome.l1_ratio);
        const std::vector<double> pred = readout::predict(model, R_val);
        double sq = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const double e = pred[i] - y_val[i];
            sq += e * e;
        }
        best_rmse = std::min(best_rmse, std::sqrt(sq / static_cast<double>(pred.size())));
    }
    return best_rmse;
}

const EvaluatedGenome& tournament_select(const std::vector<EvaluatedGenome>& population,
                                         int tournament_size, Rng& rng) {
    if (population.empty()) throw std::invalid_argument("tournament_select: empty population");
    std::size_t best = static_cast<std::size_t>(rng.below(population.size()));
    for (int t = 1; t < tournament_size; ++t) {
        const std::size_t i = static_cast<std::size_t>(rng.below(population.size()));
        // strict <, so equal fitness keeps the earlier index
        const bool better = population[i].fitness < population[best].fitness ||
                            (population[i].fitness == population[best].fitness && i < best);
        if (better) best = i;
    }
    return population[best];
}

Genome crossover(const Genome& a, const Genome& b, Rng& rng) {
    Genome c;
    c.n_qubits = rng.uniform() < 0.5 ? a.n_qubits : b.n_qubits;
    c.n_layers = rng.uniform() < 0.5 ? a.n_layers : b.n_layers;
    c.encoding = rng.uniform() < 0.5 ? a.encoding : b.encoding;
    c.coupling_strength = rng.uniform() < 0.5 ? a.coupling_strength : b.coupling_strength;
    c.l1_ratio = rng.uniform() < 0.5 ? a.l1_ratio : b.l1_ratio;
    return c;
}

Genome mutate(const Genome& g, const GaParams& params, Rng& rng) {
    Genome m = g;
    if (rng.uniform() < params.mutation_rate) m.n_qubits = pick_alternative(kQubitChoices, m.n_qubits, rng);
    if (rng.uniform() < params.mutation_rate) m.n_layers = pick_alternative(kLayerChoices, m.n_layers, rng);
    if (rng.uniform() < params.mutation_rate) m.encoding = pick_alternative(kEncodingChoices, m.encoding, rng);
    if (rng.uniform() < params.mutation_rate) {
        const double sigma = params.mutation_sigma_frac * (kCouplingMax - kCouplingMin);
        m.coupling_strength =
            clamp_gene(m.coupling_strength + sigma * rng.gaussian(), kCouplingMin, kCouplingMax);
    }
    if (rng.uniform() < params.mutation_rate) {
        const double sigma = params.mutation_sigma_frac * 1.0;
        m.l1_ratio = clamp_gene(m.l1_ratio + sigma * rng.gaussian(), 0.0, 1.0);
    }
    return m;
}

SearchResult run_search(const SearchData& data, const GaParams& params) {
    if (params.population < 1 || params.generations < 1)
        throw std::invalid_argument("run_search: population and generations must be >= 1");

    Rng rng(derive_seed({params.seed, 0x6761 /*"ga"*/}));
    std::vector<Genome> genomes = init_population(params.population, rng);
    std::unordered_map<std::uint64_t, double> memo;

    SearchResult result;
    bool have_best = false;

    for (int gen = 0; gen < params.generations; ++gen) {
        std::vector<EvaluatedGenome> evaluated;
        evaluated.reserve(genomes.size());
        for (const Genome& genome : genomes) {
            const std::uint64_t h = genome.hash();
            SearchRecord rec;
            rec.generation = gen;
            rec.genome = genome;
            const auto t0 = std::chrono::steady_clock::now();
            double fitness;
            if (const auto it = memo.find(h); it != memo.end()) {
                fitness = it->second;
                rec.memo_hit = true;
            } else {
                try {
                    fitness = evaluate_genome(genome, data, params.seed);
                } catch (const std::exception&) {
                    fitness = std::numeric_limits<double>::infinity();
                    rec.failed = true;
                }
                memo.emplace(h, fitness);
            }
            rec.fitness = fitness;
            rec.wall_time_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            result.records.push_back(rec);
            evaluated.push_back(EvaluatedGenome{genome, fitness, params.seed});
            if (!have_best || fitness < result.best.fitness) {
                result.best = evaluated.back();
                have_best = true;
            }
        }

        if (gen + 1 == params.generations) break;

        std::vector<Genome> next;
        next.reserve(genomes.size());
        for (int e = 0; e < params.elitism && e < params.population; ++e)
            next.push_back(result.best.genome);
        while (next.size() < genomes.size()) {
            const Genome& p1 = tournament_select(evaluated, params.tournament_size, rng).genome;
            const Genome& p2 = tournament_select(evaluated, params.tournament_size, rng).genome;
            next.push_back(mutate(crossover(p1, p2, rng), params, rng));
        }
        genomes = std::move(next);
    }
    return result;
}

}  // namespace qrc::gasearch

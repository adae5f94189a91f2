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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qrc/ingest.hpp"
#include "qrc/reservoir.hpp"
#include "qrc/rng.hpp"

namespace qrc::gasearch {

inline constexpr std::array<int, 3> kQubitChoices = {5, 6, 7};
inline constexpr std::array<int, 3> kLayerChoices = {3, 4, 5};
inline constexpr std::array<EncodingStrategy, 2> kEncodingChoices = {
    EncodingStrategy::cheb_stride1, EncodingStrategy::cheb_stride3};
inline constexpr double kCouplingMin = 0.1;
inline constexpr double kCouplingMax = 1.5;

/// One candidate architecture. Continuous genes live in closed ranges,
/// discrete genes in the choice sets above.
struct Genome {
    int n_qubits = 7;
    int n_layers = 4;
    EncodingStrategy encoding = EncodingStrategy::cheb_stride1;
    double coupling_strength = 0.8;
    double l1_ratio = 0.5;

    void validate() const;
    std::uint64_t hash() const;
    bool operator==(const Genome&) const = default;

    ReservoirConfig to_config(const std::vector<double>& kernel_decays,
                              std::uint64_t seed) const;
};

struct EvaluatedGenome {
    Genome genome;
    double fitness = 0;  // validation RMSE, scaled units; +inf marks a failed candidate
    std::uint64_t eval_seed = 0;
};

struct GaParams {
    int population = 6;
    int generations = 3;
    int tournament_size = 2;
    double mutation_rate = 0.2;
    double mutation_sigma_frac = 0.1;  // Gaussian sigma as a fraction of the gene range
    int elitism = 1;
    std::uint64_t seed = 0;
};

/// Everything a fitness evaluation needs. train_sub holds the
/// chronologically last 20% of the training windows; fitness is the scaled
/// validation RMSE after fitting the readout (alpha chosen from the grid,
/// l1_ratio from the genome) on that subsample.
struct SearchData {
    std::vector<ingest::WindowSample> train_sub;
    std::vector<ingest::WindowSample> val_windows;
    std::vector<double> alpha_grid;
    std::vector<double> kernel_decays;
    std::string cache_dir;
    reservoir::ExecutionMode mode = reservoir::ExecutionMode::parallel;
};

SearchData make_search_data(const std::vector<ingest::WindowSample>& train_windows,
                            const std::vector<ingest::WindowSample>& val_windows,
                            const std::vector<double>& alpha_grid,
                            const std::vector<double>& kernel_decays,
                            const std::string& cache_dir,
                            reservoir::ExecutionMode mode = reservoir::ExecutionMode::parallel);

Genome sample_genome(Rng& rng);

std::vector<Genome> init_population(int size, Rng& rng);

/// Exact-mode extraction + elastic-net fit on the training subsample,
/// returning the scaled validation RMSE. Deterministic given (genome, seed,
/// data).
double evaluate_genome(const Genome& genome, const SearchData& data, std::uint64_t seed);

/// Draws tournament_size entries uniformly with replacement and returns the
/// lowest-RMSE genome; ties break toward the earlier population index.
const EvaluatedGenome& tournament_select(const std::vector<EvaluatedGenome>& population,
                                         int tournament_size, Rng& rng);

/// Uniform per-gene crossover: each gene comes from either parent with
/// probability 1/2.
Genome crossover(const Genome& a, const Genome& b, Rng& rng);

/// Each gene independently mutates with the configured rate: discrete genes
/// resample uniformly among the alternatives, continuous genes take a
/// Gaussian step (sigma = sigma_frac * range) and clamp to their domain.
Genome mutate(const Genome& g, const GaParams& params, Rng& rng);

struct SearchRecord {
    int generation = 0;
    Genome genome;
    double fitness = 0;
    double wall_time_s = 0;
    bool memo_hit = false;
    bool failed = false;
};

struct SearchResult {
    EvaluatedGenome best;
    std::vector<SearchRecord> records;  // one per fitness evaluation, in order
};

/// Full GA: generation 0 is sampled uniformly, later generations keep the
/// best-so-far genome unmodified (elitism) and fill the rest with
/// select -> crossover -> mutate offspring. Candidate failures score +inf and
/// the search continues. The whole trajectory is a pure function of
/// (params.seed, data).
SearchResult run_search(const SearchData& data, const GaParams& params);

}  // namespace qrc::gasearch

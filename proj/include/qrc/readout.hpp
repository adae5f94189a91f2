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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrc/common.hpp"
#include "qrc/ingest.hpp"

namespace qrc::readout {

/// Trained linear readout. Weights and bias act directly on raw reservoir
/// features (y_hat = w.r + b); the standardization used during fitting is
/// folded into them and kept only as fit metadata.
struct ReadoutModel {
    std::vector<float> weights;  // FP32, length = feature dim
    float bias = 0;
    double alpha = 0;
    double l1_ratio = 0;
    std::vector<double> feat_mean, feat_std;  // captured at fit time
    std::uint64_t config_hash = 0;

    void save(const std::string& path) const;
    static ReadoutModel load(const std::string& path);
};

/// Fit diagnostics, mostly for invariants: the per-sweep objective trace, the
/// worst KKT residual at convergence, and the double-precision weights in
/// standardized coordinates (for oracle comparisons).
struct FitInfo {
    int sweeps = 0;
    std::vector<double> objective_trace;
    double kkt_residual = 0;
    std::vector<double> weights_standardized;
    double intercept_centered = 0;
};

struct NonConvergenceError : std::runtime_error {
    NonConvergenceError(int sweeps_, std::vector<double> last_weights_)
        : std::runtime_error("elastic net did not converge within " + std::to_string(sweeps_) +
                             " sweeps"),
          sweeps(sweeps_),
          last_weights(std::move(last_weights_)) {}
    int sweeps;
    std::vector<double> last_weights;
};

/// Cyclic coordinate descent with soft-thresholding on internally
/// standardized columns, minimizing
///   (1/2n)|y - Rw - b|^2 + alpha*(l1_ratio*|w|_1 + (1-l1_ratio)/2*|w|^2).
/// Constant columns get weight 0. Converges when the largest per-sweep weight
/// change drops below 1e-7; more than 10^4 sweeps raises NonConvergenceError
/// carrying the last iterate. The objective is checked to be non-increasing
/// every sweep.
ReadoutModel fit_elastic_net(const Matrix& R, const std::vector<double>& y, double alpha,
                             double l1_ratio, FitInfo* info = nullptr);

/// Scaled-space predictions y_hat = Rw + b.
std::vector<double> predict(const ReadoutModel& model, const Matrix& R);

struct Metrics {
    double rmse = 0;
    double mae = 0;
    std::size_t n = 0;
};

/// Metrics in physical units: predictions are inverted through the target
/// scaler before comparison with the raw targets.
Metrics evaluate(const ReadoutModel& model, const Matrix& R, const std::vector<double>& y_raw,
                 const ingest::ScalerState& scaler);

Metrics metrics_from_predictions(const std::vector<double>& pred_scaled,
                                 const std::vector<double>& y_raw,
                                 const ingest::ScalerState& scaler);

struct MeanStd {
    double mean = 0;
    double std = 0;  // sample standard deviation (n-1)
};

/// Mean and sample standard deviation across per-seed metric values.
MeanStd aggregate_over_seeds(const std::vector<double>& values);

}  // namespace qrc::readout

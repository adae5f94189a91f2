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
#include <span>
#include <string>
#include <vector>

#include "qrc/common.hpp"
#include "qrc/readout.hpp"

namespace qrc::quantize {

/// Signed symmetric k-bit quantization of the readout weight vector:
/// integer codes, one per-tensor scale, full-precision bias. k = 32 is the
/// identity testing hook that keeps the FP32 weights untouched.
struct QuantizedReadout {
    int k = 8;
    std::vector<std::int32_t> codes;  // in [-(2^{k-1}-1), 2^{k-1}-1]
    double scale = 1;
    double clip = 1;
    float bias = 0;
    bool identity = false;            // k = 32 path
    std::vector<float> fp32_weights;  // populated only on the identity path

    /// codes * scale (or the untouched FP32 weights on the identity path).
    std::vector<double> dequantized_weights() const;

    /// Extends the readout model file format with codes, scale, clip and k.
    void save(const std::string& path, const readout::ReadoutModel& base) const;
    static QuantizedReadout load(const std::string& path);
};

struct CodesAndScale {
    std::vector<std::int32_t> codes;
    double scale;
};

/// Symmetric uniform quantizer: scale = clip / (2^{k-1} - 1), codes =
/// clamp(round(w/scale)) with round-half-away-from-zero.
CodesAndScale quantize_with_clip(std::span<const float> w, int k, double clip);

struct ClipGrid {
    double p_min = 0.20;
    double p_max = 1.00;
    int count = 81;

    double candidate(int i) const {
        return p_min + (p_max - p_min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

/// Clip threshold minimizing the weight-space quantization MSE over the
/// candidate grid {p * max|w|}; ties break toward the larger clip. An
/// all-zero w returns the documented sentinel clip of 1 (codes are all zero
/// regardless).
double optimal_clip_search(std::span<const float> w, int k, const ClipGrid& grid = {});

struct RefineInfo {
    double naive_mse = 0;              // clip = max|w|, original bias, no rescale
    std::vector<double> round_mses;    // incumbent train MSE recorded per round
    int rounds_run = 0;
    int rounds_accepted = 0;
};

/// Post-training refinement: per round, requantize the weights with an
/// optimal clip (in the frame of the accumulated scale correction), correct
/// the bias to mean(y - R w_k), then rescale by the closed-form scalar least
/// squares factor. A round is kept only if it lowers the train MSE, starting
/// from the naive quantization as incumbent, so the result never regresses
/// past either the naive baseline or round 1. Stops early once the
/// improvement drops below 1e-10.
QuantizedReadout iterative_refine(std::span<const float> w, float b, int k, const Matrix& R_train,
                                  const std::vector<double>& y_train, int rounds = 5,
                                  const ClipGrid& grid = {}, RefineInfo* info = nullptr);

std::vector<double> predict_quantized(const QuantizedReadout& q, const Matrix& R);

/// Weight-memory reduction (1 - k/32) * 100, in percent.
double memory_saved(int k);

/// Relative RMSE change vs the FP32 baseline, in percent (negative means the
/// quantized readout came out ahead).
double degradation(double rmse_k, double rmse_fp32);

/// One row of the compression-accuracy report.
struct QuantReportRow {
    int bit_width = 32;
    std::string shots_label;
    double rmse_mean = 0, rmse_std = 0;
    double mae_mean = 0, mae_std = 0;
    double degradation_pct = 0;
    double memory_saved_pct = 0;
};

}  // namespace qrc::quantize

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

#include "qrc/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qrc::quantize {

namespace {

std::int32_t max_code(int k) { return (std::int32_t{1} << (k - 1)) - 1; }

double max_abs(std::span<const float> w) {
    double m = 0;
    for (float x : w) m = std::max(m, std::abs(static_cast<double>(x)));
    return m;
}

double quant_mse(std::span<const float> w, const CodesAndScale& qs) {
    double mse = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double err =
            static_cast<double>(w[j]) - static_cast<double>(qs.codes[j]) * qs.scale;
        mse += err * err;
    }
    return mse;
}

double train_mse(const std::vector<double>& pred_int, double scale, double bias,
                 const std::vector<double>& y) {
    double mse = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double err = y[i] - (scale * pred_int[i] + bias);
        mse += err * err;
    }
    return mse / static_cast<double>(y.size());
}

}  // namespace

CodesAndScale quantize_with_clip(std::span<const float> w, int k, double clip) {
    if (k < 2 || k > 31) throw std::invalid_argument("quantize_with_clip: k out of range");
    if (!(clip > 0)) throw std::invalid_argument("quantize_with_clip: clip must be positive");
    const std::int32_t L = max_code(k);
    const double scale = clip / static_cast<double>(L);
    CodesAndScale out;
    out.scale = scale;
    out.codes.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double q = std::round(static_cast<double>(w[j]) / scale);
        out.codes[j] = static_cast<std::int32_t>(
            std::clamp(q, -static_cast<double>(L), static_cast<double>(L)));
    }
    return out;
}

double optimal_clip_search(std::span<const float> w, int k, const ClipGrid& grid) {
    if (grid.count < 1 || !(grid.p_min > 0) || grid.p_max < grid.p_min)
        throw std::invalid_argument("optimal_clip_search: bad candidate grid");
    const double wmax = max_abs(w);
    if (wmax == 0.0) return 1.0;  // degenerate: every code is zero anyway

    double best_clip = 0, best_mse = 0;
    bool first = true;
    for (int i = 0; i < grid.count; ++i) {
        const double clip = grid.candidate(i) * wmax;
        const double mse = quant_mse(w, quantize_with_clip(w, k, clip));
        // <= so an equal-MSE larger clip wins
        if (first || mse <= best_mse) {
            best_mse = mse;
            best_clip = clip;
            first = false;
        }
    }
    return best_clip;
}

std::vector<double> QuantizedReadout::dequantized_weights() const {
    if (identity) {
        std::vector<double> w(fp32_weights.size());
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(fp32_weights[j]);
        return w;
    }
    std::vector<double> w(codes.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = static_cast<double>(codes[j]) * scale;
    return w;
}

QuantizedReadout iterative_refine(std::span<const float> w, float b, int k, const Matrix& R_train,
                                  const std::vector<double>& y_train, int rounds,
                                  const ClipGrid& grid, RefineInfo* info) {
    if (R_train.rows != y_train.size() || R_train.cols != w.size())
        throw std::invalid_argument("iterative_refine: dimension mismatch");
    if (rounds < 1) throw std::invalid_argument("iterative_refine: rounds must be >= 1");
    const std::size_t n = R_train.rows;

    if (k == 32) {
        QuantizedReadout q;
        q.k = 32;
        q.identity = true;
        q.fp32_weights.assign(w.begin(), w.end());
        q.bias = b;
        q.scale = 1.0;
        q.clip = std::max(max_abs(w), 1e-30);
        if (info) {
            std::vector<double> pred(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0;
                for (std::size_t j = 0; j < w.size(); ++j)
                    acc += static_cast<double>(w[j]) * R_train(i, j);
                pred[i] = acc;
            }
            const double mse = train_mse(pred, 1.0, static_cast<double>(b), y_train);
            info->naive_mse = mse;
            info->round_mses = {mse};
            info->rounds_run = 1;
            info->rounds_accepted = 1;
        }
        return q;
    }

    const auto integer_predictions = [&](const std::vector<std::int32_t>& codes) {
        std::vector<double> pred(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0;
            const double* row = R_train.row(i);
            for (std::size_t j = 0; j < codes.size(); ++j)
                acc += static_cast<double>(codes[j]) * row[j];
            pred[i] = acc;
        }
        return pred;
    };

    // Naive baseline: full-range clip, original bias, no rescale. It seeds the
    // incumbent so refinement can only improve on it.
    const double wmax = max_abs(w);
    const double naive_clip = wmax > 0 ? wmax : 1.0;
    CodesAndScale naive = quantize_with_clip(w, k, naive_clip);
    std::vector<double> pred_int = integer_predictions(naive.codes);
    double inc_mse = train_mse(pred_int, naive.scale, static_cast<double>(b), y_train);

    QuantizedReadout q;
    q.k = k;
    q.codes = naive.codes;
    q.scale = naive.scale;
    q.clip = naive_clip;
    q.bias = b;
    double s_acc = 1.0;

    if (info) {
        info->naive_mse = inc_mse;
        info->round_mses.clear();
        info->rounds_run = 0;
        info->rounds_accepted = 0;
    }

    std::vector<float> target(w.size());
    for (int round = 1; round <= rounds; ++round) {
        // requantize in the frame of the accumulated scale correction
        for (std::size_t j = 0; j < w.size(); ++j)
            target[j] = static_cast<float>(static_cast<double>(w[j]) / s_acc);
        const double clip = optimal_clip_search(target, k, grid);
        const CodesAndScale cand = quantize_with_clip(target, k, clip);
        const std::vector<double> cand_pred = integer_predictions(cand.codes);

        const double eff_scale = cand.scale * s_acc;
        double mean_resid = 0;
        for (std::size_t i = 0; i < n; ++i) mean_resid += y_train[i] - eff_scale * cand_pred[i];
        const double bias_new = mean_resid / static_cast<double>(n);

        double num = 0, denom = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = eff_scale * cand_pred[i];
            num += p * (y_train[i] - bias_new);
            denom += p * p;
        }
        const double s_star = (denom > 0 && num > 0) ? num / denom : 1.0;
        const double final_scale = eff_scale * s_star;
        const double cand_mse = train_mse(cand_pred, final_scale, bias_new, y_train);

        if (info) ++info->rounds_run;
        if (cand_mse <= inc_mse) {
            const double improvement = inc_mse - cand_mse;
            q.codes = cand.codes;
            q.scale = final_scale;
            q.clip = clip * s_acc * s_star;  // keeps clip = scale * (2^{k-1}-1)
            q.bias = static_cast<float>(bias_new);
            s_acc *= s_star;
            inc_mse = cand_mse;
            if (info) {
                ++info->rounds_accepted;
                info->round_mses.push_back(inc_mse);
            }
            if (improvement < 1e-10) break;
        } else {
            if (info) info->round_mses.push_back(inc_mse);
            break;
        }
    }
    return q;
}

std::vector<double> predict_quantized(const QuantizedReadout& q, const Matrix& R) {
    const std::vector<double> w = q.dequantized_weights();
    if (R.cols != w.size())
        throw std::invalid_argument("predict_quantized: feature dimension mismatch");
    std::vector<double> out(R.rows);
    for (std::size_t i = 0; i < R.rows; ++i) {
        double acc = static_cast<double>(q.bias);
        const double* row = R.row(i);
        for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * row[j];
        out[i] = acc;
    }
    return out;
}

double memory_saved(int k) {
    if (k < 1 || k > 32) throw std::invalid_argument("memory_saved: k must be in [1, 32]");
    return (1.0 - static_cast<double>(k) / 32.0) * 100.0;
}

double degradation(double rmse_k, double rmse_fp32) {
    if (!(rmse_fp32 > 0)) throw std::invalid_argument("degradation: FP32 RMSE must be positive");
    return (rmse_k - rmse_fp32) / rmse_fp32 * 100.0;
}

void QuantizedReadout::save(const std::string& path, const readout::ReadoutModel& base) const {
    base.save(path);
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("cannot append quantized section to " + path);
    char buf[64];
    os << "quantized = v1\n";
    os << "k = " << k << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", scale);
    os << "scale = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", clip);
    os << "clip = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(bias));
    os << "bias_k = " << buf << "\n";
    os << "codes =";
    for (std::int32_t c : codes) os << ' ' << c;
    os << "\n";
}

QuantizedReadout QuantizedReadout::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open quantized model file: " + path);
    QuantizedReadout q;
    std::string line;
    bool saw_quant = false;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        const std::string val = line.substr(eq + 1);
        if (key == "quantized") saw_quant = true;
        else if (key == "k") q.k = std::stoi(val);
        else if (key == "scale") q.scale = std::stod(val);
        else if (key == "clip") q.clip = std::stod(val);
        else if (key == "bias_k") q.bias = static_cast<float>(std::stod(val));
        else if (key == "codes") {
            std::istringstream cs(val);
            std::int32_t c;
            while (cs >> c) q.codes.push_back(c);
        }
    }
    if (!saw_quant) throw std::runtime_error("no quantized section in " + path);
    return q;
}

}  // namespace qrc::quantize

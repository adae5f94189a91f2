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

#include "qrc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qrc::readout {

namespace {

constexpr double kTol = 1e-7;
constexpr int kMaxSweeps = 10000;

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::istringstream is(s);
    std::vector<double> out;
    double v;
    while (is >> v) out.push_back(v);
    return out;
}

}  // namespace

ReadoutModel fit_elastic_net(const Matrix& R, const std::vector<double>& y, double alpha,
                             double l1_ratio, FitInfo* info) {
    const std::size_t n = R.rows, p = R.cols;
    if (n != y.size()) throw std::invalid_argument("fit_elastic_net: row/target count mismatch");
    if (n < 2) throw std::invalid_argument("fit_elastic_net: need at least 2 samples");
    if (!(alpha >= 0) || !std::isfinite(alpha) || !(l1_ratio >= 0 && l1_ratio <= 1))
        throw std::invalid_argument("fit_elastic_net: bad hyperparameters");
    for (double v : R.data)
        if (!std::isfinite(v)) throw std::invalid_argument("fit_elastic_net: non-finite feature");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("fit_elastic_net: non-finite target");

    // Standardize columns (population std) and center the target. With
    // zero-mean columns the centered intercept is exactly mean(y).
    std::vector<double> mu(p), sd(p);
    std::vector<bool> active(p);
    Matrix Z(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += R(i, j);
        mu[j] = s / static_cast<double>(n);
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = R(i, j) - mu[j];
            v += d * d;
        }
        sd[j] = std::sqrt(v / static_cast<double>(n));
        active[j] = sd[j] > 1e-12;
        const double div = active[j] ? sd[j] : 1.0;
        for (std::size_t i = 0; i < n; ++i) Z(i, j) = (R(i, j) - mu[j]) / div;
    }
    double y_mean = 0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);

    const double a1 = alpha * l1_ratio;
    const double a2 = alpha * (1.0 - l1_ratio);

    std::vector<double> w(p, 0.0);
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - y_mean;

    const auto objective = [&]() {
        double sq = 0;
        for (double r : resid) sq += r * r;
        double l1 = 0, l2 = 0;
        for (double wj : w) {
            l1 += std::abs(wj);
            l2 += wj * wj;
        }
        return sq / (2.0 * static_cast<double>(n)) + a1 * l1 + 0.5 * a2 * l2;
    };

    // column variance in standardized coordinates; 1 up to roundoff, kept
    // explicit so the update stays exact
    std::vector<double> col_var(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        if (!active[j]) continue;
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) v += Z(i, j) * Z(i, j);
        col_var[j] = v / static_cast<double>(n);
    }

    if (info) {
        info->objective_trace.clear();
        info->objective_trace.push_back(objective());
    }
    double prev_obj = objective();

    int sweep = 0;
    bool converged = false;
    while (sweep < kMaxSweeps) {
        ++sweep;
        double max_delta = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (!active[j]) continue;
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += Z(i, j) * resid[i];
            const double rho = dot / static_cast<double>(n) + col_var[j] * w[j];
            const double w_new = soft_threshold(rho, a1) / (col_var[j] + a2);
            const double delta = w_new - w[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) resid[i] -= Z(i, j) * delta;
                w[j] = w_new;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        const double obj = objective();
        if (obj > prev_obj + 1e-12 * std::max(1.0, std::abs(prev_obj)))
            throw std::logic_error("elastic net objective increased within a sweep");
        prev_obj = obj;
        if (info) info->objective_trace.push_back(obj);
        if (max_delta < kTol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NonConvergenceError(sweep, w);

    ReadoutModel model;
    model.alpha = alpha;
    model.l1_ratio = l1_ratio;
    model.feat_mean = mu;
    model.feat_std = sd;
    model.weights.resize(p);
    double fold = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const double wr = active[j] ? w[j] / sd[j] : 0.0;
        model.weights[j] = static_cast<float>(wr);
        fold += wr * mu[j];
    }
    model.bias = static_cast<float>(y_mean - fold);

    if (info) {
        info->sweeps = sweep;
        info->weights_standardized = w;
        info->intercept_centered = y_mean;
        double worst = 0;
        for (std::size_t j = 0; j < p; ++j) {
            if (!active[j]) continue;
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += Z(i, j) * resid[i];
            const double grad = -dot / static_cast<double>(n) + a2 * w[j];
            const double res = (w[j] == 0.0) ? std::max(0.0, std::abs(grad) - a1)
                                             : std::abs(grad + a1 * (w[j] > 0 ? 1.0 : -1.0));
            worst = std::max(worst, res);
        }
        info->kkt_residual = worst;
    }
    return model;
}

std::vector<double> predict(const ReadoutModel& model, const Matrix& R) {
    if (R.cols != model.weights.size())
        throw std::invalid_argument("predict: feature dimension mismatch (" +
                                    std::to_string(R.cols) + " vs " +
                                    std::to_string(model.weights.size()) + ")");
    std::vector<double> out(R.rows);
    for (std::size_t i = 0; i < R.rows; ++i) {
        double acc = model.bias;
        const double* row = R.row(i);
        for (std::size_t j = 0; j < R.cols; ++j)
            acc += static_cast<double>(model.weights[j]) * row[j];
        out[i] = acc;
    }
    return out;
}

Metrics metrics_from_predictions(const std::vector<double>& pred_scaled,
                                 const std::vector<double>& y_raw,
                                 const ingest::ScalerState& scaler) {
    if (pred_scaled.size() != y_raw.size())
        throw std::invalid_argument("metrics: prediction/target count mismatch");
    if (pred_scaled.empty()) throw std::invalid_argument("metrics: no samples");
    double sq = 0, ab = 0;
    for (std::size_t i = 0; i < pred_scaled.size(); ++i) {
        const double err = ingest::invert_target(pred_scaled[i], scaler) - y_raw[i];
        sq += err * err;
        ab += std::abs(err);
    }
    const auto n = static_cast<double>(pred_scaled.size());
    return Metrics{std::sqrt(sq / n), ab / n, pred_scaled.size()};
}

Metrics evaluate(const ReadoutModel& model, const Matrix& R, const std::vector<double>& y_raw,
                 const ingest::ScalerState& scaler) {
    return metrics_from_predictions(predict(model, R), y_raw, scaler);
}

MeanStd aggregate_over_seeds(const std::vector<double>& values) {
    if (values.size() < 2)
        throw std::invalid_argument("aggregate_over_seeds: need at least 2 values");
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return MeanStd{mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

void ReadoutModel::save(const std::string& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open model file for writing: " + path);
    os << "qrc-readout-model v1\n";
    os << "n_features = " << weights.size() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", alpha);
    os << "alpha = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", l1_ratio);
    os << "l1_ratio = " << buf << "\n";
    os << "config_hash = " << config_hash << "\n";
    const auto write_vec = [&os](const char* key, const std::vector<double>& v) {
        os << key << " =";
        char b[64];
        for (double x : v) {
            std::snprintf(b, sizeof b, " %.17g", x);
            os << b;
        }
        os << "\n";
    };
    write_vec("feat_mean", feat_mean);
    write_vec("feat_std", feat_std);
    os << "weights =";
    for (float wj : weights) {
        std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(wj));
        os << buf;
    }
    os << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(bias));
    os << "bias = " << buf << "\n";
    if (!os) throw std::runtime_error("write failed for model file: " + path);
}

ReadoutModel ReadoutModel::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open model file: " + path);
    std::string line;
    std::getline(is, line);
    if (line != "qrc-readout-model v1")
        throw std::runtime_error("unrecognized model file header in " + path);
    ReadoutModel m;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        const std::string val = line.substr(eq + 1);
        if (key == "alpha") m.alpha = std::stod(val);
        else if (key == "l1_ratio") m.l1_ratio = std::stod(val);
        else if (key == "config_hash") m.config_hash = std::stoull(val);
        else if (key == "feat_mean") m.feat_mean = parse_double_list(val);
        else if (key == "feat_std") m.feat_std = parse_double_list(val);
        else if (key == "bias") m.bias = static_cast<float>(std::stod(val));
        else if (key == "weights") {
            for (double v : parse_double_list(val)) m.weights.push_back(static_cast<float>(v));
        }
    }
    return m;
}

}  // namespace qrc::readout

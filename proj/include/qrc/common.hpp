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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrc {

inline constexpr const char* kToolVersion = "0.1.0";

/// Dense row-major matrix of doubles. Deliberately minimal: the feature
/// matrices in this project are small enough that a full linear-algebra
/// dependency buys nothing.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    const double* row(std::size_t i) const { return data.data() + i * cols; }
    double* row(std::size_t i) { return data.data() + i * cols; }
};

/// Seconds since the Unix epoch, timezone-naive. Hourly data only needs
/// exact arithmetic, not zone handling.
using Timestamp = std::int64_t;

namespace timeutil {

constexpr std::int64_t kSecondsPerHour = 3600;

/// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct Civil {
    int year;
    unsigned month, day, hour, minute, second;
};

constexpr Civil civil_from_timestamp(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const std::int64_t z = days + 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Civil{static_cast<int>(y + (m <= 2)), m, d, static_cast<unsigned>(rem / 3600),
                 static_cast<unsigned>((rem % 3600) / 60), static_cast<unsigned>(rem % 60)};
}

constexpr Timestamp make_timestamp(int y, unsigned mo, unsigned d, unsigned h, unsigned mi,
                                   unsigned s = 0) {
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

inline unsigned hour_of_day(Timestamp t) { return civil_from_timestamp(t).hour; }

/// Day of week in [0,6], 0 = Monday (1970-01-01 was a Thursday).
inline unsigned day_of_week(Timestamp t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) --days;
    return static_cast<unsigned>(((days % 7) + 7 + 3) % 7);
}

std::string format_timestamp(Timestamp t);

/// Accepts "YYYY-MM-DD HH:MM[:SS]" and the dataset's "M/D/YYYY H:MM".
Timestamp parse_timestamp(const std::string& s);

}  // namespace timeutil
}  // namespace qrc

// Copyright 2026 The dissim-knn Authors
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
//
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dissim/errors.hpp"

namespace dissim {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * detail::beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(|T| ≥ |t|) for Student's t with `df` degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

struct PairedTestResult {
    double statistic = 0.0; ///< t; ±inf when the differences are constant and non-zero
    double p_value = 1.0;
    double mean_difference = 0.0;
    std::size_t n = 0;
    bool significant = false;
};

/// Two-sided paired t-test on aligned samples. All-zero differences give
/// p = 1; constant non-zero differences give p = 0.
inline PairedTestResult paired_t_test(std::span<const double> a, std::span<const double> b,
                                      double alpha = 0.05) {
    if (a.size() != b.size()) {
        throw ConfigError("paired test needs equally long samples");
    }
    const std::size_t n = a.size();
    if (n < 2) {
        throw InsufficientDataError("paired test needs at least 2 pairs, got " + std::to_string(n));
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean += a[i] - b[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        all_zero &= d == 0.0;
        ss += (d - mean) * (d - mean);
    }

    PairedTestResult r;
    r.n = n;
    r.mean_difference = mean;
    if (all_zero) {
        return r;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) {
        r.statistic = mean > 0 ? std::numeric_limits<double>::infinity()
                               : -std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
    } else {
        r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
        r.p_value = student_t_two_sided_p(r.statistic, static_cast<double>(n - 1));
    }
    r.significant = r.p_value < alpha;
    return r;
}

} // namespace dissim

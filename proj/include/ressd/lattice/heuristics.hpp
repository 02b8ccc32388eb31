#pragma once

// Gaussian heuristic and geometric series assumption, in log2 where values can
// leave the double range.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ressd/errors.hpp"

namespace ressd {

/// log2 Vol(B(n, R)); -inf for R = 0.
inline double log2_ball_volume(double n, double radius) {
    if (radius < 0) throw InvalidParameters("negative radius");
    if (radius == 0) return -std::numeric_limits<double>::infinity();
    const double ln = 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1) + n * std::log(radius);
    return ln / std::numbers::ln2;
}

/// log2 of the expected number of lattice points in B(n, R).
inline double gh_count_log2(double n, double radius, double log2_volume) {
    return log2_ball_volume(n, radius) - log2_volume;
}

inline double gh_count(double n, double radius, double volume) {
    if (!(volume > 0)) throw InvalidParameters("volume must be positive");
    if (radius == 0) return 0.0;
    return std::exp2(gh_count_log2(n, radius, std::log2(volume)));
}

/// Predicted lambda_1; `simplified` uses sqrt(n / 2 pi e) in place of the exact
/// ball-volume constant.
inline double gh_lambda1_log2vol(double n, double log2_volume, bool simplified = false) {
    const double scale = std::exp2(log2_volume / n);
    if (simplified) return std::sqrt(n / (2 * std::numbers::pi * std::numbers::e)) * scale;
    return std::exp2(-log2_ball_volume(n, 1.0) / n) * scale;
}

inline double gh_lambda1(double n, double volume, bool simplified = false) {
    if (!(volume > 0)) throw InvalidParameters("volume must be positive");
    return gh_lambda1_log2vol(n, std::log2(volume), simplified);
}

/// Root-Hermite-style ratio delta = (n / 2 pi e)^(-1/(2n-2)).
inline double gsa_delta(double n) {
    return std::pow(n / (2 * std::numbers::pi * std::numbers::e), -1.0 / (2 * n - 2));
}

/// log2 |b*_i| = (2i - n - 1) log2 delta + log2(vol)/n for i = 1..n.
inline std::vector<double> gsa_profile_log2(std::size_t n, double log2_volume) {
    if (n < 2) throw InvalidParameters("GSA profile needs n >= 2");
    const double ld = std::log2(gsa_delta(static_cast<double>(n)));
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i)
        out[i - 1] = (2.0 * static_cast<double>(i) - static_cast<double>(n) - 1) * ld +
                     log2_volume / static_cast<double>(n);
    return out;
}

inline std::vector<double> gsa_profile(std::size_t n, double volume) {
    auto lg = gsa_profile_log2(n, std::log2(volume));
    for (auto& x : lg) x = std::exp2(x);
    return lg;
}

}  // namespace ressd

#pragma once

// Independent brute-force oracles shared by unit and acceptance tests.

#include <gmpxx.h>

#include <cmath>
#include <vector>

#include "ressd/ffmat.hpp"
#include "ressd/lattice/basis.hpp"
#include "ressd/rng.hpp"

namespace oracle {

using ressd::IntVec;
using ressd::LatticeBasis;

/// Rigorous coefficient box for ||x·B - c|| <= R: |x_i - y_i| <= R·||col_i(B^{-1})||
/// where y = c·B^{-1}. Returns per-coordinate [lo, hi].
inline std::vector<std::pair<std::int64_t, std::int64_t>> coefficient_box(const LatticeBasis& b, double radius,
                                                                          const std::vector<double>& center) {
    const std::size_t n = b.dim();
    // B^{-1} columns via solving B^T X = e_i ... use rational inverse of B.
    std::vector<std::vector<mpq_class>> inv(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<mpq_class> e(n, 0);
        e[i] = 1;
        auto row = ressd::rational_coordinates(b, e);  // e_i = row·B, so row is row i of B^{-1}
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = row[j];
    }
    std::vector<std::pair<std::int64_t, std::int64_t>> box(n);
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0, y = 0;
        for (std::size_t i = 0; i < n; ++i) {
            col += inv[i][j].get_d() * inv[i][j].get_d();
            if (!center.empty()) y += center[i] * inv[i][j].get_d();
        }
        const double w = radius * std::sqrt(col) + 1e-9;
        box[j] = {static_cast<std::int64_t>(std::ceil(y - w)), static_cast<std::int64_t>(std::floor(y + w))};
    }
    return box;
}

inline double box_size(const std::vector<std::pair<std::int64_t, std::int64_t>>& box) {
    double s = 1;
    for (auto [lo, hi] : box) s *= static_cast<double>(hi - lo + 1);
    return s;
}

/// Every lattice vector v with ||v - c||^2 <= R^2 by scanning the box.
inline std::vector<IntVec> box_enumerate(const LatticeBasis& b, long double radius_sq,
                                         const std::vector<double>& center, bool exclude_zero) {
    const std::size_t n = b.dim();
    const auto box = coefficient_box(b, std::sqrt(static_cast<double>(radius_sq)), center);
    std::vector<IntVec> out;
    IntVec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = box[i].first;
    while (true) {
        IntVec v = b.combine(x);
        long double d = 0;
        bool zero = true;
        for (std::size_t i = 0; i < n; ++i) {
            const long double t = v[i] - (center.empty() ? 0.0L : static_cast<long double>(center[i]));
            d += t * t;
            zero = zero && v[i] == 0;
        }
        if (d <= radius_sq && !(exclude_zero && zero)) out.push_back(v);
        std::size_t t = 0;
        while (t < n && ++x[t] > box[t].second) {
            x[t] = box[t].first;
            ++t;
        }
        if (t == n) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline long double norm_sq_ld(const IntVec& v) {
    long double s = 0;
    for (auto t : v) s += static_cast<long double>(t) * t;
    return s;
}

/// Random code lattice L(C) for a random [n, k] code over F_p.
inline LatticeBasis random_code_lattice(std::size_t n, std::size_t k, std::uint32_t p, ressd::Rng& rng) {
    ressd::PrimeField f(p);
    ressd::FpMatrix g;
    do {
        g = ressd::FpMatrix(f, k, n);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j) g.at(i, j) = static_cast<ressd::fp_t>(rng.below(p));
    } while (ressd::rank(g) < k);
    return ressd::code_lattice_from_generator(g);
}

}  // namespace oracle

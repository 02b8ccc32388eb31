#pragma once

// Gram-Schmidt data. Exact mode keeps the integral quantities
//   d_0 = 1, d_{i+1} = prod_{l<=i} |b*_l|^2,  lambda_{ij} = d_{j+1} mu_{ij},
// which are integers for an integer basis. High-precision mode uses 256-bit
// mpf floats.

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <vector>

#include "ressd/lattice/basis.hpp"

namespace ressd {

enum class GsoMode { ExactRational, HighPrecision };

inline constexpr std::size_t kExactGsoMaxDim = 64;
inline constexpr mp_bitcnt_t kHighPrecisionBits = 256;

inline GsoMode default_gso_mode(std::size_t dim) {
    return dim <= kExactGsoMaxDim ? GsoMode::ExactRational : GsoMode::HighPrecision;
}

inline const char* to_string(GsoMode m) {
    return m == GsoMode::ExactRational ? "exact-rational" : "high-precision-256";
}

/// Integral Gram-Schmidt data of rows [0, size) of a basis.
struct IntegralGso {
    std::vector<mpz_class> d;                   ///< size n+1
    std::vector<std::vector<mpz_class>> lambda; ///< lower triangle

    explicit IntegralGso(std::size_t n = 0) : d(n + 1, 0), lambda(n, std::vector<mpz_class>(n, 0)) { d[0] = 1; }

    /// Fills row k (lambda_{k,j}, j<k, and d_{k+1}) from rows < k.
    void compute_row(const LatticeBasis& b, std::size_t k) {
        for (std::size_t j = 0; j <= k; ++j) {
            mpz_class u = dot(b[k], b[j]);
            for (std::size_t l = 0; l < j; ++l) {
                u = d[l + 1] * u - lambda[k][l] * lambda[j][l];
                mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d[l].get_mpz_t());
            }
            if (j < k)
                lambda[k][j] = u;
            else
                d[k + 1] = u;
        }
        if (d[k + 1] == 0) throw RankDeficient("basis vectors are linearly dependent");
    }

    static IntegralGso of(const LatticeBasis& b) {
        IntegralGso g(b.dim());
        for (std::size_t k = 0; k < b.dim(); ++k) g.compute_row(b, k);
        return g;
    }

    mpq_class bstar_sq(std::size_t i) const {
        mpq_class q(d[i + 1], d[i]);
        q.canonicalize();
        return q;
    }
    mpq_class mu(std::size_t i, std::size_t j) const {
        mpq_class q(lambda[i][j], d[j + 1]);
        q.canonicalize();
        return q;
    }
};

/// Floating view of the Gram-Schmidt profile used by enumeration.
struct GsoProfile {
    GsoMode mode = GsoMode::ExactRational;
    std::vector<double> bstar_sq;         ///< |b*_i|^2
    std::vector<std::vector<double>> mu;  ///< mu[i][j] for j < i, zero elsewhere
    std::vector<mpq_class> bstar_sq_exact;  ///< filled in exact mode only

    std::size_t dim() const noexcept { return bstar_sq.size(); }

    /// log2 of prod |b*_i| (the log-volume).
    double log2_volume() const {
        double s = 0;
        for (double x : bstar_sq) s += 0.5 * std::log2(x);
        return s;
    }
};

namespace detail {

inline GsoProfile profile_from_integral(const IntegralGso& g, std::size_t n) {
    GsoProfile p;
    p.mode = GsoMode::ExactRational;
    p.mu.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        p.bstar_sq_exact.push_back(g.bstar_sq(i));
        p.bstar_sq.push_back(p.bstar_sq_exact.back().get_d());
        for (std::size_t j = 0; j < i; ++j) p.mu[i][j] = g.mu(i, j).get_d();
    }
    return p;
}

inline GsoProfile profile_high_precision(const LatticeBasis& b) {
    const std::size_t n = b.dim();
    std::vector<std::vector<mpf_class>> mu(n, std::vector<mpf_class>(n, mpf_class(0, kHighPrecisionBits)));
    std::vector<mpf_class> bs(n, mpf_class(0, kHighPrecisionBits));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j <= k; ++j) {
            mpf_class u(0, kHighPrecisionBits);
            u = dot(b[k], b[j]);
            for (std::size_t l = 0; l < j; ++l) u -= mu[j][l] * mu[k][l] * bs[l];
            if (j < k)
                mu[k][j] = u / bs[j];
            else
                bs[k] = u;
        }
        if (bs[k] <= 0) throw RankDeficient("basis vectors are linearly dependent");
    }
    GsoProfile p;
    p.mode = GsoMode::HighPrecision;
    p.mu.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        p.bstar_sq.push_back(bs[i].get_d());
        for (std::size_t j = 0; j < i; ++j) p.mu[i][j] = mu[i][j].get_d();
    }
    return p;
}

}  // namespace detail

inline GsoProfile gram_schmidt(const LatticeBasis& b, GsoMode mode) {
    if (mode == GsoMode::ExactRational) return detail::profile_from_integral(IntegralGso::of(b), b.dim());
    return detail::profile_high_precision(b);
}

inline GsoProfile gram_schmidt(const LatticeBasis& b) { return gram_schmidt(b, default_gso_mode(b.dim())); }

}  // namespace ressd

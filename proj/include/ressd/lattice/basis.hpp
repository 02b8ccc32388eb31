#pragma once

// Integer lattice bases, exact determinants and membership, code lattices.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ressd/errors.hpp"
#include "ressd/ffmat.hpp"
#include "ressd/rng.hpp"

namespace ressd {

using IntVec = std::vector<std::int64_t>;

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw IntegerOverflow("64-bit product");
    return r;
}
inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw IntegerOverflow("64-bit sum");
    return r;
}
inline std::int64_t to_int64(const mpz_class& x) {
    if (!x.fits_slong_p()) throw IntegerOverflow("coefficient exceeds 64 bits");
    return x.get_si();
}

}  // namespace detail

/// Square integer matrix whose rows form a basis of a full-rank lattice.
class LatticeBasis {
public:
    LatticeBasis() = default;
    explicit LatticeBasis(std::vector<IntVec> rows) : rows_(std::move(rows)) {
        for (const auto& r : rows_)
            if (r.size() != rows_.size()) throw DimensionMismatch("lattice basis must be square");
    }

    std::size_t dim() const noexcept { return rows_.size(); }
    const IntVec& operator[](std::size_t i) const { return rows_[i]; }
    IntVec& row_mut(std::size_t i) { return rows_[i]; }
    const std::vector<IntVec>& rows() const noexcept { return rows_; }
    std::vector<IntVec>& rows_mut() noexcept { return rows_; }

    /// Integer combination sum_i x_i b_i.
    IntVec combine(const std::int64_t* x) const {
        IntVec v(dim(), 0);
        for (std::size_t i = 0; i < dim(); ++i) {
            if (!x[i]) continue;
            for (std::size_t j = 0; j < dim(); ++j)
                v[j] = detail::checked_add(v[j], detail::checked_mul(x[i], rows_[i][j]));
        }
        return v;
    }
    IntVec combine(const IntVec& x) const { return combine(x.data()); }

    friend bool operator==(const LatticeBasis&, const LatticeBasis&) = default;

private:
    std::vector<IntVec> rows_;
};

inline mpz_class dot(const IntVec& a, const IntVec& b) {
    mpz_class s = 0, t;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mpz_set_si(t.get_mpz_t(), a[i]);
        t *= b[i];
        s += t;
    }
    return s;
}

inline mpz_class norm_sq(const IntVec& a) { return dot(a, a); }

/// Determinant by fraction-free Bareiss elimination.
inline mpz_class determinant(const LatticeBasis& b) {
    const std::size_t n = b.dim();
    if (n == 0) return 1;
    std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = static_cast<long>(b[i][j]);
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0) ++r;
            if (r == n) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i][j] = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline mpz_class volume(const LatticeBasis& b) { return abs(determinant(b)); }

/// Coefficients x with x·B = v over the rationals (B must be nonsingular).
inline std::vector<mpq_class> rational_coordinates(const LatticeBasis& b, const std::vector<mpq_class>& v) {
    const std::size_t n = b.dim();
    if (v.size() != n) throw DimensionMismatch("vector length vs lattice dimension");
    // Solve B^T x^T = v^T.
    std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = static_cast<long>(b[j][i]);
        a[i][n] = v[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) throw Singular("lattice basis is singular");
        std::swap(a[c], a[piv]);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a[i][c] == 0) continue;
            const mpq_class fct = a[i][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[i][j] -= fct * a[c][j];
        }
    }
    std::vector<mpq_class> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n] / a[i][i];
    return x;
}

/// Integer coefficients of v in the basis, or nullopt if v is not a lattice vector.
inline std::optional<IntVec> lattice_coordinates(const LatticeBasis& b, const IntVec& v) {
    std::vector<mpq_class> q(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) q[i] = static_cast<long>(v[i]);
    auto x = rational_coordinates(b, q);
    IntVec out;
    for (auto& c : x) {
        c.canonicalize();
        if (c.get_den() != 1) return std::nullopt;
        out.push_back(detail::to_int64(c.get_num()));
    }
    return out;
}

inline bool in_lattice(const LatticeBasis& b, const IntVec& v) { return lattice_coordinates(b, v).has_value(); }

/// A^C = [[I_k, Z(R)], [0, p·I_{n-k}]] with columns mapped back through P^{-1}.
inline LatticeBasis code_lattice(const FpMatrix& g_sys, const Permutation& perm) {
    const std::size_t k = g_sys.rows(), n = g_sys.cols();
    if (perm.size() != n) throw DimensionMismatch("permutation size vs code length");
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (g_sys(i, j) != (i == j ? 1u : 0u)) throw NotSystematic("generator is not of the form (I_k | R)");
    const auto p = static_cast<std::int64_t>(g_sys.field().p());
    std::vector<IntVec> rows;
    for (std::size_t i = 0; i < n; ++i) {
        IntVec r(n, 0);
        if (i < k) {
            for (std::size_t j = 0; j < n; ++j) r[j] = g_sys(i, j);
        } else {
            r[i] = p;
        }
        rows.push_back(perm.unapply<std::int64_t>(r));
    }
    return LatticeBasis(std::move(rows));
}

/// L(C) = Z(C) + pZ^n for the code generated by the rows of G.
inline LatticeBasis code_lattice_from_generator(const FpMatrix& g) {
    if (g.rows() == 0) {
        std::vector<IntVec> rows(g.cols(), IntVec(g.cols(), 0));
        for (std::size_t i = 0; i < g.cols(); ++i) rows[i][i] = g.field().p();
        return LatticeBasis(std::move(rows));
    }
    auto sf = systematic_form(g);
    return code_lattice(sf.generator, sf.perm);
}

/// L(C) for C = {x : x·H^T = 0}.
inline LatticeBasis code_lattice_from_parity(const FpMatrix& h) { return code_lattice_from_generator(kernel_basis(h)); }

/// Random unimodular transform: unit lower-triangular with {-1,0,1} entries
/// (at most `fill` nonzeros below the diagonal per row) composed with a row
/// permutation.
inline LatticeBasis randomize_basis(const LatticeBasis& b, Rng& rng, std::size_t fill = 3) {
    const std::size_t n = b.dim();
    std::vector<IntVec> rows = b.rows();
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t t = 0; t < fill; ++t) {
            const auto j = rng.below(i);
            const std::int64_t c = rng.below(2) ? 1 : -1;
            for (std::size_t col = 0; col < n; ++col)
                rows[i][col] = detail::checked_add(rows[i][col], detail::checked_mul(c, rows[j][col]));
        }
    }
    rng.shuffle(rows.begin(), rows.end());
    return LatticeBasis(std::move(rows));
}

}  // namespace ressd

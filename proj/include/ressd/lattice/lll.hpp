#pragma once

// LLL reduction: exact integral variant (de Weger / Cohen style, all
// Gram-Schmidt quantities kept as integers) and a 256-bit floating variant for
// larger dimensions.

#include <gmpxx.h>

#include <cmath>
#include <optional>
#include <vector>

#include "ressd/lattice/basis.hpp"
#include "ressd/lattice/gso.hpp"

namespace ressd {

struct LllOptions {
    double epsilon = 0.01;  ///< Lovasz factor is 1 - epsilon
    bool track_transform = false;
    std::optional<GsoMode> mode;  ///< default: exact up to dim 64
};

struct LllResult {
    LatticeBasis basis;
    std::vector<IntVec> transform;  ///< U with U·B_in = B_out, when tracked
    GsoMode mode = GsoMode::ExactRational;
    std::size_t swaps = 0;
};

namespace detail {

inline void row_submul(IntVec& a, const IntVec& b, std::int64_t q) {
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = checked_add(a[j], checked_mul(-q, b[j]));
}

class IntegralLll {
public:
    IntegralLll(LatticeBasis& b, std::vector<IntVec>* u, double delta)
        : b_(b), u_(u), n_(b.dim()), g_(b.dim()) {
        // delta as the rational num/den
        den_ = 1000000;
        num_ = static_cast<long>(std::llround(delta * 1e6));
    }

    std::size_t run() {
        if (n_ == 0) return 0;
        std::size_t k = 1, kmax = 0;
        g_.compute_row(b_, 0);
        std::size_t swaps = 0;
        mpz_class lhs, rhs;
        while (k < n_) {
            if (k > kmax) {
                kmax = k;
                g_.compute_row(b_, k);
            }
            reduce(k, k - 1);
            // swap iff d_{k+1} d_{k-1} + lambda^2 < delta d_k^2
            lhs = g_.d[k + 1] * g_.d[k - 1] + g_.lambda[k][k - 1] * g_.lambda[k][k - 1];
            lhs *= den_;
            rhs = g_.d[k] * g_.d[k];
            rhs *= num_;
            if (lhs < rhs) {
                swap(k, kmax);
                ++swaps;
                if (k > 1) --k;
            } else {
                for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
                ++k;
            }
        }
        return swaps;
    }

private:
    void reduce(std::size_t k, std::size_t l) {
        auto& lam = g_.lambda[k][l];
        const auto& dl = g_.d[l + 1];
        mpz_class twice = 2 * abs(lam);
        if (twice <= dl) return;
        // q = round(lam / dl)
        mpz_class q = 2 * lam + dl;
        mpz_class den = 2 * dl;
        mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), den.get_mpz_t());
        const std::int64_t qi = to_int64(q);
        row_submul(b_.row_mut(k), b_[l], qi);
        if (u_) row_submul((*u_)[k], (*u_)[l], qi);
        lam -= q * dl;
        for (std::size_t i = 0; i < l; ++i) g_.lambda[k][i] -= q * g_.lambda[l][i];
    }

    void swap(std::size_t k, std::size_t kmax) {
        std::swap(b_.row_mut(k), b_.row_mut(k - 1));
        if (u_) std::swap((*u_)[k], (*u_)[k - 1]);
        for (std::size_t j = 0; j + 1 < k; ++j) std::swap(g_.lambda[k][j], g_.lambda[k - 1][j]);
        const mpz_class lam = g_.lambda[k][k - 1];
        mpz_class bnew = g_.d[k - 1] * g_.d[k + 1] + lam * lam;
        mpz_divexact(bnew.get_mpz_t(), bnew.get_mpz_t(), g_.d[k].get_mpz_t());
        mpz_class t;
        for (std::size_t i = k + 1; i <= kmax; ++i) {
            t = g_.lambda[i][k];
            g_.lambda[i][k] = g_.d[k + 1] * g_.lambda[i][k - 1] - lam * t;
            mpz_divexact(g_.lambda[i][k].get_mpz_t(), g_.lambda[i][k].get_mpz_t(), g_.d[k].get_mpz_t());
            g_.lambda[i][k - 1] = bnew * t + lam * g_.lambda[i][k];
            mpz_divexact(g_.lambda[i][k - 1].get_mpz_t(), g_.lambda[i][k - 1].get_mpz_t(),
                         g_.d[k + 1].get_mpz_t());
        }
        g_.d[k] = bnew;
    }

    LatticeBasis& b_;
    std::vector<IntVec>* u_;
    std::size_t n_;
    IntegralGso g_;
    long num_ = 0, den_ = 1;
};

class FloatLll {
public:
    FloatLll(LatticeBasis& b, std::vector<IntVec>* u, double delta)
        : b_(b), u_(u), n_(b.dim()), delta_(delta, kHighPrecisionBits),
          mu_(n_, std::vector<mpf_class>(n_, mpf_class(0, kHighPrecisionBits))),
          bs_(n_, mpf_class(0, kHighPrecisionBits)) {}

    std::size_t run() {
        if (n_ == 0) return 0;
        std::size_t k = 1, kmax = 0, swaps = 0;
        compute_row(0);
        while (k < n_) {
            if (k > kmax) {
                kmax = k;
                compute_row(k);
            }
            reduce(k, k - 1);
            mpf_class rhs(0, kHighPrecisionBits);
            rhs = (delta_ - mu_[k][k - 1] * mu_[k][k - 1]) * bs_[k - 1];
            if (bs_[k] < rhs) {
                swap(k, kmax);
                ++swaps;
                if (k > 1) --k;
            } else {
                for (std::size_t l = k - 1; l-- > 0;) reduce(k, l);
                ++k;
            }
        }
        return swaps;
    }

private:
    void compute_row(std::size_t k) {
        for (std::size_t j = 0; j <= k; ++j) {
            mpf_class u(0, kHighPrecisionBits);
            u = dot(b_[k], b_[j]);
            for (std::size_t l = 0; l < j; ++l) u -= mu_[j][l] * mu_[k][l] * bs_[l];
            if (j < k)
                mu_[k][j] = u / bs_[j];
            else
                bs_[k] = u;
        }
        if (bs_[k] <= 0) throw RankDeficient("basis vectors are linearly dependent");
    }

    void reduce(std::size_t k, std::size_t l) {
        if (abs(mu_[k][l]) <= 0.5) return;
        mpf_class qf(0, kHighPrecisionBits);
        qf = floor(mu_[k][l] + 0.5);
        mpz_class q(qf);
        const std::int64_t qi = to_int64(q);
        row_submul(b_.row_mut(k), b_[l], qi);
        if (u_) row_submul((*u_)[k], (*u_)[l], qi);
        mu_[k][l] -= qf;
        for (std::size_t i = 0; i < l; ++i) mu_[k][i] -= qf * mu_[l][i];
    }

    void swap(std::size_t k, std::size_t kmax) {
        std::swap(b_.row_mut(k), b_.row_mut(k - 1));
        if (u_) std::swap((*u_)[k], (*u_)[k - 1]);
        for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu_[k][j], mu_[k - 1][j]);
        mpf_class m(mu_[k][k - 1], kHighPrecisionBits);
        mpf_class bb(0, kHighPrecisionBits);
        bb = bs_[k] + m * m * bs_[k - 1];
        mu_[k][k - 1] = m * bs_[k - 1] / bb;
        bs_[k] = bs_[k - 1] * bs_[k] / bb;
        bs_[k - 1] = bb;
        mpf_class t(0, kHighPrecisionBits);
        for (std::size_t i = k + 1; i <= kmax; ++i) {
            t = mu_[i][k];
            mu_[i][k] = mu_[i][k - 1] - m * t;
            mu_[i][k - 1] = t + mu_[k][k - 1] * mu_[i][k];
        }
    }

    LatticeBasis& b_;
    std::vector<IntVec>* u_;
    std::size_t n_;
    mpf_class delta_;
    std::vector<std::vector<mpf_class>> mu_;
    std::vector<mpf_class> bs_;
};

}  // namespace detail

inline LllResult lll(const LatticeBasis& in, const LllOptions& opt = {}) {
    if (!(opt.epsilon > 0 && opt.epsilon < 1)) throw InvalidParameters("LLL epsilon must lie in (0, 1)");
    LllResult res{in, {}, opt.mode.value_or(default_gso_mode(in.dim())), 0};
    std::vector<IntVec>* u = nullptr;
    if (opt.track_transform) {
        res.transform.assign(in.dim(), IntVec(in.dim(), 0));
        for (std::size_t i = 0; i < in.dim(); ++i) res.transform[i][i] = 1;
        u = &res.transform;
    }
    const double delta = 1.0 - opt.epsilon;
    if (res.mode == GsoMode::ExactRational)
        res.swaps = detail::IntegralLll(res.basis, u, delta).run();
    else
        res.swaps = detail::FloatLll(res.basis, u, delta).run();
    return res;
}

inline LatticeBasis lll_reduce(const LatticeBasis& in, double epsilon = 0.01) {
    LllOptions opt;
    opt.epsilon = epsilon;
    return lll(in, opt).basis;
}

/// Checks |mu_ij| <= 1/2 and the Lovasz condition with factor 1 - epsilon exactly.
inline bool is_lll_reduced(const LatticeBasis& b, double epsilon = 0.01) {
    auto g = IntegralGso::of(b);
    const mpq_class half(1, 2);
    mpq_class delta(static_cast<long>(std::llround((1 - epsilon) * 1e6)), 1000000);
    for (std::size_t i = 0; i < b.dim(); ++i) {
        for (std::size_t j = 0; j < i; ++j)
            if (abs(g.mu(i, j)) > half) return false;
        if (i > 0) {
            const mpq_class m = g.mu(i, i - 1);
            if (g.bstar_sq(i) < (delta - m * m) * g.bstar_sq(i - 1)) return false;
        }
    }
    return true;
}

}  // namespace ressd

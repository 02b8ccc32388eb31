#pragma once

// BKZ with an enumeration SVP oracle on projected blocks.

#include <cstdlib>
#include <vector>

#include "ressd/lattice/basis.hpp"
#include "ressd/lattice/enumeration.hpp"
#include "ressd/lattice/gso.hpp"
#include "ressd/lattice/lll.hpp"

namespace ressd {

struct BkzOptions {
    std::size_t max_tours = 20;
    std::size_t ceiling = kDefaultEnumCeiling;
    double epsilon = 0.01;
};

struct BkzResult {
    LatticeBasis basis;
    std::size_t tours = 0;
    bool converged = false;  ///< last tour changed nothing
    std::size_t insertions = 0;
    GsoMode mode = GsoMode::ExactRational;
};

namespace detail {

/// Replace rows [j, k] by a basis of the same sublattice whose first row is
/// sum_i x_i b_{j+i}, via Euclid steps on the coefficient vector.
inline void insert_combination(LatticeBasis& b, std::size_t j, std::vector<std::int64_t> x) {
    auto& rows = b.rows_mut();
    while (true) {
        std::size_t piv = x.size();
        std::size_t nonzero = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!x[i]) continue;
            ++nonzero;
            if (piv == x.size() || std::llabs(x[i]) < std::llabs(x[piv])) piv = i;
        }
        if (nonzero <= 1) {
            if (x[piv] < 0)
                for (auto& t : rows[j + piv]) t = -t;
            std::rotate(rows.begin() + static_cast<std::ptrdiff_t>(j),
                        rows.begin() + static_cast<std::ptrdiff_t>(j + piv),
                        rows.begin() + static_cast<std::ptrdiff_t>(j + piv + 1));
            return;
        }
        // c_l b_l + c_p b_p = (c_l - q c_p) b_l + c_p (b_p + q b_l)
        for (std::size_t l = 0; l < x.size(); ++l) {
            if (l == piv || !x[l]) continue;
            const std::int64_t q = x[l] / x[piv];
            if (!q) continue;
            x[l] -= q * x[piv];
            auto& rp = rows[j + piv];
            const auto& rl = rows[j + l];
            for (std::size_t c = 0; c < rp.size(); ++c) rp[c] = checked_add(rp[c], checked_mul(q, rl[c]));
        }
    }
}

}  // namespace detail

inline BkzResult bkz(const LatticeBasis& in, std::size_t beta, const BkzOptions& opt = {}) {
    const std::size_t n = in.dim();
    if (beta < 2 || beta > n) throw InvalidParameters("BKZ needs 2 <= beta <= dim");
    detail::check_ceiling(beta, opt.ceiling);
    BkzResult res;
    res.basis = lll_reduce(in, opt.epsilon);
    res.mode = default_gso_mode(n);
    for (res.tours = 0; res.tours < opt.max_tours;) {
        ++res.tours;
        bool changed = false;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const std::size_t k = std::min(j + beta - 1, n - 1), bs = k - j + 1;
            const auto g = gram_schmidt(res.basis);
            std::vector<double> bound(bs, g.bstar_sq[j] * (1 - 1e-6));
            std::vector<std::int64_t> best;
            detail::SchnorrEuchner se(bs, g.mu, g.bstar_sq, j);
            se.run({}, bound, true, [&](const std::int64_t* x, double nd) {
                best.assign(x, x + bs);
                std::fill(bound.begin(), bound.end(), nd * (1 - 1e-12));
            });
            if (best.empty()) continue;
            detail::insert_combination(res.basis, j, std::move(best));
            res.basis = lll_reduce(res.basis, opt.epsilon);
            ++res.insertions;
            changed = true;
        }
        if (!changed) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace ressd

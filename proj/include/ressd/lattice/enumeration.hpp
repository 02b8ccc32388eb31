#pragma once

// Schnorr-Euchner enumeration: exact SVP, and List-SVP / List-CVP with optional
// linear pruning and randomized repeats.

#include <gmpxx.h>

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "ressd/lattice/basis.hpp"
#include "ressd/lattice/gso.hpp"
#include "ressd/lattice/lll.hpp"
#include "ressd/rng.hpp"

namespace ressd {

inline constexpr std::size_t kDefaultEnumCeiling = 60;

enum class Pruning { None, Linear };

struct EnumConfig {
    Pruning pruning = Pruning::None;
    std::size_t repeats = 1;  ///< passes; passes after the first use randomized bases
    bool randomize_basis = true;
    std::uint64_t seed = 0;
    std::size_t ceiling = kDefaultEnumCeiling;
    std::size_t output_cap = std::size_t{1} << 24;
};

/// Closed ball of squared radius `radius_sq`; no center means the origin.
struct BallSpec {
    std::size_t dim = 0;
    long double radius_sq = 0;
    std::optional<std::vector<double>> center;

    static BallSpec origin(std::size_t dim, double radius) {
        if (radius < 0) throw InvalidParameters("negative radius");
        return {dim, static_cast<long double>(radius) * radius, std::nullopt};
    }
    static BallSpec around(std::vector<double> center, double radius) {
        if (radius < 0) throw InvalidParameters("negative radius");
        const auto d = center.size();
        return {d, static_cast<long double>(radius) * radius, std::move(center)};
    }
    static BallSpec around_sq(std::vector<double> center, long double radius_sq) {
        if (radius_sq < 0) throw InvalidParameters("negative radius");
        const auto d = center.size();
        return {d, radius_sq, std::move(center)};
    }
};

struct EnumStats {
    std::uint64_t nodes = 0;
    std::uint64_t emitted = 0;
    std::size_t passes = 0;
    bool stopped = false;  ///< the visitor asked to stop early
    GsoMode mode = GsoMode::ExactRational;
};

namespace detail {

/// Core depth-first enumeration of coefficient vectors x with
///   sum_j (x_j - c_j(x))^2 |b*_j|^2 <= bound[level]
/// at every level. `bound` may be modified by `leaf` (radius shrinking).
/// With `symmetric` (origin-centred SVP) only one of x, -x is visited and the
/// zero vector is skipped.
class SchnorrEuchner {
public:
    SchnorrEuchner(std::size_t n, const std::vector<std::vector<double>>& mu, const std::vector<double>& bstar,
                   std::size_t offset = 0)
        : n_(n), off_(offset), mu_(mu), bstar_(bstar) {}

    template <typename Leaf>
    std::uint64_t run(const std::vector<double>& target, std::vector<double>& bound, bool symmetric, Leaf&& leaf) {
        const std::size_t n = n_, w = n + 1;
        std::vector<double> cps(n * w, 0.0), center(n, 0.0), partdist(n + 1, 0.0);
        std::vector<std::size_t> begin(n, n - 1);
        std::vector<std::int64_t> x(n, 0), dx(n, 0), ddx(n, 0);
        for (std::size_t k = 0; k < n; ++k) cps[k * w + n] = target.empty() ? 0.0 : target[k];
        std::uint64_t nodes = 0;

        auto mu = [&](std::size_t i, std::size_t j) { return mu_[off_ + i][off_ + j]; };
        auto start = [&](std::size_t k) {
            const double c = center[k];
            x[k] = static_cast<std::int64_t>(std::nearbyint(c));
            dx[k] = ddx[k] = (c >= static_cast<double>(x[k])) ? 1 : -1;
        };
        auto step = [&](std::size_t k) {
            if (symmetric && partdist[k + 1] == 0.0) {
                ++x[k];
            } else {
                x[k] += dx[k];
                ddx[k] = -ddx[k];
                dx[k] = ddx[k] - dx[k];
            }
        };

        std::size_t k = n - 1;
        center[k] = cps[k * w + n];
        start(k);
        if (symmetric) x[k] = 0;
        while (true) {
            const double diff = static_cast<double>(x[k]) - center[k];
            const double nd = partdist[k + 1] + diff * diff * bstar_[off_ + k];
            ++nodes;
            if (nd <= bound[k]) {
                if (k == 0) {
                    if (!(symmetric && nd == 0.0)) leaf(x.data(), nd);
                    step(0);
                    continue;
                }
                partdist[k] = nd;
                const std::size_t km = k - 1;
                if (begin[km] < begin[k]) begin[km] = begin[k];
                for (std::size_t j = begin[km]; j >= k; --j) {
                    cps[km * w + j] = cps[km * w + j + 1] - static_cast<double>(x[j]) * mu(j, km);
                    if (j == 0) break;
                }
                begin[k] = k;
                center[km] = cps[km * w + k];
                k = km;
                start(k);
                if (symmetric && partdist[k + 1] == 0.0) x[k] = 0;
            } else {
                ++k;
                if (k == n) break;
                step(k);
            }
        }
        return nodes;
    }

private:
    std::size_t n_, off_;
    const std::vector<std::vector<double>>& mu_;
    const std::vector<double>& bstar_;
};

inline std::vector<double> linear_bounds(std::size_t n, long double radius_sq, Pruning pruning) {
    // Loose by a relative 1e-9 so that float error never drops a boundary point;
    // candidates are re-checked exactly.
    const double r2 = static_cast<double>(radius_sq) * (1 + 1e-9) + 1e-9;
    std::vector<double> b(n, r2);
    if (pruning == Pruning::Linear)
        for (std::size_t k = 0; k < n; ++k) b[k] = r2 * static_cast<double>(n - k) / static_cast<double>(n);
    return b;
}

/// Coordinates c_j of the target along b*_j: with v = sum y_i b_i,
/// c_j = y_j + sum_{i>j} y_i mu_ij.
inline std::vector<double> target_coordinates(const LatticeBasis& b, const GsoProfile& g,
                                              const std::vector<double>& center) {
    std::vector<mpq_class> v(center.begin(), center.end());
    auto yq = rational_coordinates(b, v);
    const std::size_t n = b.dim();
    std::vector<long double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = yq[i].get_d();
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        long double s = y[j];
        for (std::size_t i = j + 1; i < n; ++i) s += y[i] * g.mu[i][j];
        c[j] = static_cast<double>(s);
    }
    return c;
}

inline long double exact_dist_sq(const IntVec& u, const std::optional<std::vector<double>>& center) {
    long double s = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const long double d = static_cast<long double>(u[i]) - (center ? static_cast<long double>((*center)[i]) : 0.0L);
        s += d * d;
    }
    return s;
}

inline void check_ceiling(std::size_t dim, std::size_t ceiling) {
    if (dim > ceiling)
        throw DimensionTooLarge("dimension " + std::to_string(dim) + " exceeds enumeration ceiling " +
                                std::to_string(ceiling));
}

}  // namespace detail

/// A nonzero lattice vector of minimal Euclidean norm.
inline IntVec svp_enum(const LatticeBasis& in, std::size_t ceiling = kDefaultEnumCeiling) {
    detail::check_ceiling(in.dim(), ceiling);
    const auto b = lll_reduce(in);
    const auto g = gram_schmidt(b);
    const std::size_t n = b.dim();
    IntVec best = b[0];
    mpz_class best_norm = norm_sq(best);
    std::vector<double> bound(n, best_norm.get_d() * (1 + 1e-9));
    detail::SchnorrEuchner se(n, g.mu, g.bstar_sq);
    se.run({}, bound, true, [&](const std::int64_t* x, double) {
        IntVec v = b.combine(x);
        mpz_class nv = norm_sq(v);
        if (nv < best_norm) {
            best = std::move(v);
            best_norm = nv;
            std::fill(bound.begin(), bound.end(), best_norm.get_d() * (1 + 1e-9));
        }
    });
    return best;
}

/// Streams every lattice vector in the ball (List-SVP excludes 0; List-CVP
/// includes any in-range vector). Under linear pruning the output is a subset;
/// repeated passes on randomized bases add coverage and duplicates are removed.
/// `visit` returns true to stop the enumeration.
inline EnumStats list_enum_visit_until(const LatticeBasis& b, const BallSpec& ball, const EnumConfig& cfg,
                                       const std::function<bool(const IntVec&, long double)>& visit) {
    const std::size_t n = b.dim();
    detail::check_ceiling(n, cfg.ceiling);
    if (ball.dim != n) throw DimensionMismatch("ball dimension vs lattice dimension");
    if (cfg.repeats < 1) throw InvalidParameters("repeats must be >= 1");
    EnumStats stats;
    const bool dedup = cfg.pruning == Pruning::Linear && cfg.repeats > 1;
    const std::size_t passes = cfg.pruning == Pruning::None ? 1 : cfg.repeats;
    std::set<IntVec> seen;
    Rng rng(cfg.seed);
    for (std::size_t pass = 0; pass < passes && !stats.stopped; ++pass) {
        LatticeBasis basis = b;
        if (pass > 0 && cfg.randomize_basis) basis = lll_reduce(randomize_basis(b, rng));
        const auto g = gram_schmidt(basis);
        stats.mode = g.mode;
        std::vector<double> target;
        if (ball.center) target = detail::target_coordinates(basis, g, *ball.center);
        auto bound = detail::linear_bounds(n, ball.radius_sq, cfg.pruning);
        detail::SchnorrEuchner se(n, g.mu, g.bstar_sq);
        stats.nodes += se.run(target, bound, false, [&](const std::int64_t* x, double) {
            IntVec v = basis.combine(x);
            if (!ball.center && std::all_of(v.begin(), v.end(), [](std::int64_t t) { return t == 0; })) return;
            const long double d2 = detail::exact_dist_sq(v, ball.center);
            if (d2 > ball.radius_sq) return;
            if (dedup && !seen.insert(v).second) return;
            if (++stats.emitted > cfg.output_cap)
                throw OutputCapExceeded("more than " + std::to_string(cfg.output_cap) + " vectors");
            if (visit(v, d2)) {
                stats.stopped = true;
                std::fill(bound.begin(), bound.end(), -1.0);  // unwinds the search
            }
        });
        ++stats.passes;
    }
    return stats;
}

inline EnumStats list_enum_visit(const LatticeBasis& b, const BallSpec& ball, const EnumConfig& cfg,
                                 const std::function<void(const IntVec&, long double)>& visit) {
    return list_enum_visit_until(b, ball, cfg, [&](const IntVec& v, long double d2) {
        visit(v, d2);
        return false;
    });
}

/// Sorted list of the lattice vectors in the ball (see list_enum_visit).
inline std::vector<IntVec> list_enum(const LatticeBasis& b, const BallSpec& ball, const EnumConfig& cfg = {}) {
    std::vector<IntVec> out;
    list_enum_visit(b, ball, cfg, [&](const IntVec& v, long double) { out.push_back(v); });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ressd

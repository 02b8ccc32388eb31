#pragma once

// ResSD to lattice reductions: the exact CVP reduction over the expanded code,
// block guessing for the hybrid attack, the compact List-CVP / List-SVP
// reductions, affine diameter, centers and radii.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ressd/lattice.hpp"
#include "ressd/regsd.hpp"
#include "ressd/ressd.hpp"

namespace ressd {

// ---------------------------------------------------------------------------
// Exact CVP reduction

struct CvpReductionContext {
    std::shared_ptr<const ResSdInstance> original;
    std::vector<fp_t> fixed;  ///< values of the guessed leading coordinates
    ExpandedInstance base;    ///< expansion of the residual instance on the last n - g coordinates
    LatticeBasis lattice;     ///< L(C~), dimension z(n - g)
    IntVec target;            ///< y* = Z(y~); empty when infeasible
    bool feasible = true;     ///< false when the residual system has no particular solution

    std::size_t dim() const noexcept { return lattice.dim(); }
    std::size_t residual_n() const noexcept { return base.n; }
    std::size_t guessed() const noexcept { return fixed.size(); }
    std::vector<double> target_real() const { return {target.begin(), target.end()}; }
};

namespace detail {

inline IntVec lift_signed(const FpVector& v) {
    IntVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

inline FpVector reduce_mod(const PrimeField& f, const IntVec& y) {
    return FpVector::from_integers<std::int64_t>(f, std::span<const std::int64_t>(y));
}

inline CvpReductionContext build_cvp_context(std::shared_ptr<const ResSdInstance> original, std::vector<fp_t> fixed,
                                             const ResSdInstance& residual) {
    CvpReductionContext ctx;
    ctx.original = std::move(original);
    ctx.fixed = std::move(fixed);
    ctx.base = expand(residual);
    if (residual.n == 0) {
        ctx.feasible = residual.s.is_zero();
        return ctx;
    }
    ctx.lattice = code_lattice_from_parity(ctx.base.H_tilde);
    auto y = solve_particular(ctx.base.H_tilde, ctx.base.s_tilde);
    if (!y) {
        ctx.feasible = false;
        return ctx;
    }
    ctx.target = lift_signed(*y);
    return ctx;
}

}  // namespace detail

inline CvpReductionContext ressd_to_cvp(const ResSdInstance& inst) {
    auto ctx = detail::build_cvp_context(std::make_shared<const ResSdInstance>(inst), {}, inst);
    if (!ctx.feasible) throw NoParticularSolution("expanded system has no solution");
    return ctx;
}

/// Lattice vector of the context corresponding to a solution of the original
/// instance whose guessed prefix agrees with the context: y* - Z(phi(e)).
inline IntVec cvp_embed_solution(const CvpReductionContext& ctx, const FpVector& e) {
    if (!ctx.feasible) throw NoParticularSolution("infeasible context");
    const std::size_t g = ctx.guessed();
    if (e.size() != g + ctx.residual_n()) throw DimensionMismatch("solution length");
    std::vector<fp_t> tail(e.entries().begin() + static_cast<std::ptrdiff_t>(g), e.entries().end());
    const auto lr = phi(FpVector(e.field(), tail), ctx.base.base->E).to_vector(e.field());
    IntVec u = ctx.target;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= lr[i];
    return u;
}

inline FpVector cvp_solution_to_ressd(const CvpReductionContext& ctx, const IntVec& u_star) {
    if (!ctx.feasible) throw NoParticularSolution("infeasible context");
    if (u_star.size() != ctx.target.size()) throw DimensionMismatch("lattice vector length");
    IntVec x(u_star.size());
    mpz_class d2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = detail::checked_add(ctx.target[i], -u_star[i]);
        d2 += mpz_class(static_cast<long>(x[i])) * x[i];
    }
    if (d2 > static_cast<unsigned long>(ctx.residual_n())) throw TooFar("distance^2 " + d2.get_str() + " > n");
    if (!in_lattice(ctx.lattice, u_star)) throw NotInLattice("vector is not in L(C~)");
    const auto& inst = *ctx.base.base;
    auto lr = LightRegularVector::from_vector(detail::reduce_mod(inst.field(), x), inst.E.z());
    // within distance sqrt(n) every block holds exactly one +1 (p > 2)
    if (!lr) throw std::logic_error("close vector is not light-regular");
    const auto tail = phi_inv(*lr, inst.E);
    std::vector<fp_t> full = ctx.fixed;
    full.insert(full.end(), tail.entries().begin(), tail.entries().end());
    return FpVector(inst.field(), std::move(full));
}

/// Fixes coordinate i < g of the residual to E[assignment[i] - 1] (the light-
/// regular block with its 1 at position assignment[i]). The batch index is the
/// mixed-radix value sum (a_i - 1) z^i.
inline std::pair<CvpReductionContext, std::uint64_t> guess_blocks(const CvpReductionContext& ctx, std::size_t g,
                                                                  const std::vector<std::size_t>& assignment) {
    const auto& res = *ctx.base.base;
    const std::size_t n = res.n, z = res.E.z();
    if (g > n) throw BadAssignment("g = " + std::to_string(g) + " exceeds n = " + std::to_string(n));
    if (assignment.size() != g) throw BadAssignment("assignment length != g");
    std::uint64_t index = 0, radix = 1;
    for (std::size_t i = 0; i < g; ++i) {
        if (assignment[i] < 1 || assignment[i] > z) throw BadAssignment("block value outside 1..z");
        if (index > std::numeric_limits<std::uint64_t>::max() - (assignment[i] - 1) * radix)
            throw IntegerOverflow("batch index");
        index += (assignment[i] - 1) * radix;
        if (i + 1 < g) {
            if (radix > std::numeric_limits<std::uint64_t>::max() / z) throw IntegerOverflow("batch index");
            radix *= z;
        }
    }
    if (g == 0) return {ctx, 0};

    const auto f = res.field();
    std::vector<fp_t> fixed = ctx.fixed;
    FpVector s = res.s;
    for (std::size_t i = 0; i < g; ++i) {
        const fp_t v = res.E[assignment[i] - 1];
        fixed.push_back(v);
        s = s - scale(res.H.column(i), v);
    }
    ResSdInstance r;
    r.p = res.p;
    r.n = n - g;
    const std::size_t rows = res.H.rows();
    r.k = rows <= r.n ? r.n - rows : 0;
    r.H = res.H.column_block(g, n - g);
    r.s = s;
    r.E = res.E;
    r.seed = res.seed;
    r.generator_id = res.generator_id;
    if (res.planted) {
        const auto& e = res.planted->entries();
        bool match = true;
        for (std::size_t i = 0; i < g; ++i) match = match && e[i] == fixed[ctx.fixed.size() + i];
        if (match) r.planted = FpVector(f, std::vector<fp_t>(e.begin() + static_cast<std::ptrdiff_t>(g), e.end()));
    }
    return {detail::build_cvp_context(ctx.original, std::move(fixed), r), index};
}

/// Mixed-radix inverse of the batch index.
inline std::vector<std::size_t> batch_assignment(std::uint64_t index, std::size_t g, std::size_t z) {
    std::vector<std::size_t> a(g);
    for (std::size_t i = 0; i < g; ++i) {
        a[i] = static_cast<std::size_t>(index % z) + 1;
        index /= z;
    }
    return a;
}

/// All solutions of the original instance recovered from the lattice vectors
/// within sqrt(n - g) of the target (exact enumeration after LLL).
inline std::vector<FpVector> cvp_context_solutions(const CvpReductionContext& ctx, std::size_t ceiling = kDefaultEnumCeiling) {
    std::vector<FpVector> out;
    if (!ctx.feasible) return out;
    const auto f = ctx.original->field();
    if (ctx.residual_n() == 0) {
        out.emplace_back(f, ctx.fixed);
        return out;
    }
    EnumConfig cfg;
    cfg.ceiling = ceiling;
    const auto reduced = lll_reduce(ctx.lattice);
    const auto ball = BallSpec::around_sq(ctx.target_real(), static_cast<long double>(ctx.residual_n()));
    list_enum_visit(reduced, ball, cfg, [&](const IntVec& u, long double) { out.push_back(cvp_solution_to_ressd(ctx, u)); });
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Affine diameter

struct DiameterResult {
    std::int64_t D = 0;
    fp_t a = 1, b = 0;
    std::vector<std::int64_t> shifted_set;  ///< sorted Z(aE + b); min 0, max D
};

/// Exact search over a != 0 and the element x0 sent to 0. Ties: smallest a,
/// then smallest Z(a·x0).
inline DiameterResult affine_diameter(const std::vector<fp_t>& E, std::uint64_t p) {
    const PrimeField f(p);
    if (E.empty()) throw InvalidParameters("affine diameter of an empty set");
    DiameterResult best;
    best.D = std::numeric_limits<std::int64_t>::max();
    fp_t best_ax0 = 0;
    for (fp_t a = 1; a < f.p(); ++a) {
        for (fp_t x0 : E) {
            const fp_t ax0 = f.mul(a, x0);
            std::int64_t m = 0;
            for (fp_t x : E) m = std::max<std::int64_t>(m, f.sub(f.mul(a, x), ax0));
            if (m < best.D || (m == best.D && a == best.a && ax0 < best_ax0)) {
                best.D = m;
                best.a = a;
                best_ax0 = ax0;
            }
        }
    }
    best.b = f.neg(best_ax0);
    for (fp_t x : E) best.shifted_set.push_back(f.add(f.mul(best.a, x), best.b));
    std::sort(best.shifted_set.begin(), best.shifted_set.end());
    best.shifted_set.erase(std::unique(best.shifted_set.begin(), best.shifted_set.end()), best.shifted_set.end());
    return best;
}

inline DiameterResult affine_diameter(const RestrictionSet& E) {
    return affine_diameter(E.elements(), E.field().p());
}

/// D_E only: p minus the largest circular gap of aE, minimised over a. Since a
/// and -a give mirror images, a <= (p-1)/2 suffices.
inline std::int64_t affine_diameter_value(const std::vector<fp_t>& E, std::uint64_t p) {
    const std::size_t z = E.size();
    if (z == 0) throw InvalidParameters("affine diameter of an empty set");
    if (z == 1) return 0;
    std::vector<std::uint64_t> pts(z);
    std::int64_t best = static_cast<std::int64_t>(p);
    for (std::uint64_t a = 1; a <= (p - 1) / 2 || (p == 2 && a == 1); ++a) {
        for (std::size_t i = 0; i < z; ++i) pts[i] = (a * E[i]) % p;
        std::sort(pts.begin(), pts.end());
        std::uint64_t gap = pts[0] + p - pts[z - 1];
        for (std::size_t i = 1; i < z; ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
        best = std::min(best, static_cast<std::int64_t>(p - gap));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Centers, radii, success probability

inline std::vector<std::int64_t> integer_values(const RestrictionSet& E) {
    return {E.elements().begin(), E.elements().end()};
}

inline double mean_center(const std::vector<std::int64_t>& values) {
    if (values.empty()) throw InvalidParameters("empty set");
    long double s = 0;
    for (auto v : values) s += v;
    return static_cast<double>(s / values.size());
}
inline double mean_center(const RestrictionSet& E) { return mean_center(integer_values(E)); }

/// Per-coordinate variance of the uniform distribution on `values` about the mean.
inline double set_variance(const std::vector<std::int64_t>& values) {
    const long double mu = mean_center(values);
    long double s = 0;
    for (auto v : values) s += (v - mu) * (v - mu);
    return static_cast<double>(s / values.size());
}

inline double median_radius(const std::vector<std::int64_t>& values, std::size_t n) {
    if (n < 1) throw InvalidParameters("n must be >= 1");
    return std::sqrt(static_cast<double>(n) * set_variance(values));
}
inline double median_radius(const RestrictionSet& E, std::size_t n) { return median_radius(integer_values(E), n); }

struct McEstimate {
    double estimate = 0;
    double lo = 0, hi = 0;  ///< 95% Wilson interval
    std::uint64_t hits = 0, samples = 0;
};

inline McEstimate wilson_interval(std::uint64_t hits, std::uint64_t samples, double zq = 1.959963984540054) {
    McEstimate r;
    r.hits = hits;
    r.samples = samples;
    const double nn = static_cast<double>(samples), ph = static_cast<double>(hits) / nn;
    r.estimate = ph;
    const double den = 1 + zq * zq / nn;
    const double mid = (ph + zq * zq / (2 * nn)) / den;
    const double half = zq * std::sqrt(ph * (1 - ph) / nn + zq * zq / (4 * nn * nn)) / den;
    r.lo = std::max(0.0, mid - half);
    r.hi = std::min(1.0, mid + half);
    return r;
}

/// Pr[sum (e_i - mu)^2 <= R^2] for e uniform in values^n.
inline McEstimate success_prob_mc(const std::vector<std::int64_t>& values, std::size_t n, double mu, double radius,
                                  std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidParameters("samples must be >= 1");
    if (values.empty()) throw InvalidParameters("empty set");
    Rng rng(seed);
    const long double r2 = static_cast<long double>(radius) * radius;
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < samples; ++t) {
        long double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double d = values[rng.below(values.size())] - static_cast<long double>(mu);
            s += d * d;
        }
        if (s <= r2) ++hits;
    }
    return wilson_interval(hits, samples);
}
inline McEstimate success_prob_mc(const RestrictionSet& E, std::size_t n, double mu, double radius,
                                  std::uint64_t samples, std::uint64_t seed) {
    return success_prob_mc(integer_values(E), n, mu, radius, samples, seed);
}

/// Exact Pr[sum (e_i - mu)^2 <= R^2] by convolving the distribution of the
/// integer-scaled sum; mu must be a rational with small denominator.
inline double success_prob_exact(const std::vector<std::int64_t>& values, std::size_t n, double mu, double radius) {
    std::int64_t den = 1;
    while (den < 1000000 && std::abs(mu * den - std::round(mu * den)) > 1e-9) ++den;
    if (std::abs(mu * den - std::round(mu * den)) > 1e-9) throw NonIntegerCenter("center is not a small rational");
    const std::int64_t num = std::llround(mu * den);
    std::vector<std::int64_t> w;
    for (auto v : values) w.push_back((v * den - num) * (v * den - num));
    const std::int64_t wmax = *std::max_element(w.begin(), w.end());
    std::vector<long double> dist(1, 1.0L);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<long double> next(dist.size() + static_cast<std::size_t>(wmax), 0.0L);
        for (std::size_t s = 0; s < dist.size(); ++s) {
            if (dist[s] == 0) continue;
            for (auto x : w) next[s + static_cast<std::size_t>(x)] += dist[s] / values.size();
        }
        dist = std::move(next);
    }
    const long double limit = static_cast<long double>(radius) * radius * den * den;
    long double p = 0;
    for (std::size_t s = 0; s < dist.size(); ++s)
        if (static_cast<long double>(s) <= limit * (1 + 1e-12L)) p += dist[s];
    return static_cast<double>(p);
}

// ---------------------------------------------------------------------------
// Compact reductions

enum class CompactVariant { ListCVP, ListSVP };

struct CompactReductionContext {
    CompactVariant variant = CompactVariant::ListCVP;
    std::shared_ptr<const ResSdInstance> base;
    LatticeBasis lattice;
    std::optional<std::vector<double>> target;  ///< v = mu·1 - Z(a); absent for List-SVP
    double mu = 0;
    /// ListCVP: particular solution a with a·H^T = s. ListSVP: the shift mu·1.
    FpVector anchor;
    FpMatrix H3;  ///< ListSVP: Q·H with the first row removed

    std::size_t dim() const noexcept { return lattice.dim(); }

    /// phi(e): Z(e) - Z(a) (ListCVP) or Z(e) - mu·1 (ListSVP).
    IntVec embed(const FpVector& e) const {
        if (e.size() != lattice.dim()) throw DimensionMismatch("embedding length");
        const auto m = static_cast<std::int64_t>(mu);
        IntVec y(e.size());
        for (std::size_t i = 0; i < e.size(); ++i)
            y[i] = static_cast<std::int64_t>(e[i]) -
                   (variant == CompactVariant::ListSVP ? m : static_cast<std::int64_t>(anchor[i]));
        return y;
    }

    /// Left inverse psi(y) = F_p(y + offset).
    FpVector pull_back(const IntVec& y) const {
        if (y.size() != lattice.dim()) throw DimensionMismatch("lattice vector length");
        IntVec t(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) t[i] = detail::checked_add(y[i], anchor[i]);
        return detail::reduce_mod(base->field(), t);
    }

    /// ||phi(e) - v||^2 (equals ||phi(e)||^2 for List-SVP).
    long double distance_sq(const IntVec& y) const {
        long double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const long double d = y[i] - (target ? static_cast<long double>((*target)[i]) : 0.0L);
            s += d * d;
        }
        return s;
    }

    BallSpec ball(double radius) const {
        return target ? BallSpec::around(*target, radius) : BallSpec::origin(dim(), radius);
    }
};

/// sum (Z(e_i) - mu)^2
inline long double center_distance_sq(const FpVector& e, double mu) {
    long double s = 0;
    for (auto x : e.entries()) s += (x - static_cast<long double>(mu)) * (x - static_cast<long double>(mu));
    return s;
}

inline CompactReductionContext compact_listcvp(const ResSdInstance& inst, double mu) {
    if (!(mu >= 0)) throw InvalidParameters("center must be >= 0");
    auto a = solve_particular(inst.H, inst.s);
    if (!a) throw NoParticularSolution("H has no solution for s");
    CompactReductionContext ctx;
    ctx.variant = CompactVariant::ListCVP;
    ctx.base = std::make_shared<const ResSdInstance>(inst);
    ctx.lattice = code_lattice_from_parity(inst.H);
    ctx.mu = mu;
    std::vector<double> v(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) v[i] = mu - static_cast<double>((*a)[i]);
    ctx.target = std::move(v);
    ctx.anchor = std::move(*a);
    return ctx;
}

inline CompactReductionContext listsvp_reduce(const ResSdInstance& inst, double mu) {
    if (!(mu >= 0)) throw InvalidParameters("center must be >= 0");
    if (mu != std::floor(mu)) throw NonIntegerCenter("List-SVP needs an integer center");
    const auto f = inst.field();
    const auto m = static_cast<fp_t>(static_cast<std::uint64_t>(mu) % f.p());
    const std::size_t r = inst.H.rows();
    // s' = s - mu·1·H^T, the syndrome after the shift by (1, -mu)
    FpVector s1 = inst.s - syndrome(FpVector(f, std::vector<fp_t>(inst.n, m)), inst.H);
    if (s1.is_zero()) throw ZeroSyndrome("shifted syndrome is zero");
    std::size_t piv = 0;
    while (s1[piv] == 0) ++piv;
    // M = [s'^T | e_j for j != piv]; Q = M^{-1} sends s'^T to e_0
    FpMatrix M(f, r, r);
    for (std::size_t i = 0; i < r; ++i) M.at(i, 0) = s1[i];
    for (std::size_t j = 0, c = 1; j < r; ++j)
        if (j != piv) M.at(j, c++) = 1;
    const auto Q = invert(M);
    const auto H2 = mat_mul(Q, inst.H);
    CompactReductionContext ctx;
    ctx.variant = CompactVariant::ListSVP;
    ctx.base = std::make_shared<const ResSdInstance>(inst);
    ctx.H3 = H2.row_block(1, r - 1);
    ctx.lattice = code_lattice_from_parity(ctx.H3);
    ctx.mu = mu;
    ctx.anchor = FpVector(f, std::vector<fp_t>(inst.n, m));
    return ctx;
}

struct CompactSolveResult {
    std::vector<FpVector> solutions;  ///< sorted, distinct
    EnumStats stats;
};

/// Enumerates the ball of radius R in the (LLL-reduced) compact lattice and
/// keeps the images under psi that solve the instance.
inline CompactSolveResult compact_solutions(const CompactReductionContext& ctx, double radius, EnumConfig cfg = {}) {
    CompactSolveResult out;
    const auto reduced = lll_reduce(ctx.lattice);
    out.stats = list_enum_visit(reduced, ctx.ball(radius), cfg, [&](const IntVec& y, long double) {
        auto e = ctx.pull_back(y);
        if (check_solution(*ctx.base, e)) out.solutions.push_back(std::move(e));
    });
    std::sort(out.solutions.begin(), out.solutions.end());
    out.solutions.erase(std::unique(out.solutions.begin(), out.solutions.end()), out.solutions.end());
    return out;
}

// ---------------------------------------------------------------------------
// Degeneracy

enum class DegeneracyKind { ListInstance, PureInstance };

inline const char* to_string(DegeneracyKind k) {
    return k == DegeneracyKind::PureInstance ? "PureInstance" : "ListInstance";
}

struct Degeneracy {
    DegeneracyKind kind = DegeneracyKind::ListInstance;
    double threshold = 0;         ///< sqrt(n / 2 pi e) · p^(1 - k/n)
    double gh_count_log2 = 0;     ///< exact ball volume over p^(n-k)
    double gh_simplified_log2 = 0;  ///< n·log2(R / threshold)
};

inline Degeneracy classify_degeneracy(std::size_t n, std::size_t k, std::uint64_t p, double radius) {
    if (n == 0 || k > n) throw InvalidParameters("need 0 <= k <= n, n >= 1");
    if (radius < 0) throw InvalidParameters("negative radius");
    Degeneracy d;
    const double nn = static_cast<double>(n), lp = std::log2(static_cast<double>(p));
    d.threshold = std::sqrt(nn / (2 * std::numbers::pi * std::numbers::e)) *
                  std::exp2((1 - static_cast<double>(k) / nn) * lp);
    d.kind = radius <= d.threshold ? DegeneracyKind::PureInstance : DegeneracyKind::ListInstance;
    d.gh_count_log2 = gh_count_log2(nn, radius, static_cast<double>(n - k) * lp);
    d.gh_simplified_log2 = radius == 0 ? -std::numeric_limits<double>::infinity() : nn * std::log2(radius / d.threshold);
    return d;
}

}  // namespace ressd

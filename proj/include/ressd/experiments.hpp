#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>

#include "ressd/estimator.hpp"
#include "ressd/lattice.hpp"
#include "ressd/reductions.hpp"
#include "ressd/regsd.hpp"
#include "ressd/ressd.hpp"

// Desk-scale verification experiments shared by the CLI and the acceptance run.

namespace ressd {

/// (done, total) callback for long loops.
using ProgressFn = std::function<void(std::uint64_t, std::uint64_t)>;

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// E' = {w^0, ..., w^(z'-1)} for the order-z subgroup of F_p^*.
inline RestrictionSet truncated_set(std::uint64_t p, std::size_t z, std::size_t z_prime) {
    const auto E = cross_restriction(p, z);
    if (z_prime < 1 || z_prime > z) throw BadZPrime("need 1 <= z' <= z");
    return RestrictionSet(E.field(), power_sequence(E.field(), subgroup_generator(E), z_prime));
}

// ---------------------------------------------------------------------------

struct MedianExperiment {
    double mu = 0, radius = 0;
    McEstimate mc;
    double exact = 0;
};

inline MedianExperiment run_median(const RestrictionSet& Ep, std::size_t n, std::uint64_t samples, std::uint64_t seed) {
    MedianExperiment r;
    const auto vals = integer_values(Ep);
    r.mu = mean_center(vals);
    r.radius = median_radius(vals, n);
    r.mc = success_prob_mc(vals, n, r.mu, r.radius, samples, seed);
    r.exact = success_prob_exact(vals, n, r.mu, r.radius);
    return r;
}

// ---------------------------------------------------------------------------

struct GhTrialOptions {
    std::size_t bkz_beta = 35;
    bool stop_at_planted = false;  ///< skip the full count once the planted vector shows up
    std::size_t ceiling = kDefaultEnumCeiling;
};

struct GhTrial {
    std::uint64_t seed = 0;
    double mu = 0, radius = 0;
    double predicted_log2 = 0;  ///< Gaussian-heuristic count
    std::uint64_t count = 0;    ///< lattice vectors emitted (partial when stopped early)
    std::uint64_t solutions = 0;
    std::uint64_t nodes = 0;
    bool complete = false;
    long double planted_dist_sq = 0;
    bool within_bound = false;
    bool recovered = false;
    double bkz_ms = 0, enum_ms = 0;
};

/// Instance planted directly over E' (the conditional event that truncation kept
/// the solution), compact List-CVP at the mean center and median radius, BKZ,
/// then unpruned enumeration of the whole ball.
inline GhTrial run_gh_trial(std::uint64_t p, std::size_t n, std::size_t k, const RestrictionSet& Ep,
                            std::uint64_t seed, const GhTrialOptions& opt = {}) {
    GhTrial t;
    t.seed = seed;
    const auto inst = generate_instance(p, n, k, Ep, seed);
    const auto vals = integer_values(Ep);
    t.mu = mean_center(vals);
    t.radius = median_radius(vals, n);
    t.predicted_log2 = gh_count_log2(static_cast<double>(n), t.radius,
                                     static_cast<double>(inst.H.rows()) * std::log2(static_cast<double>(p)));
    const auto ctx = compact_listcvp(inst, t.mu);
    t.planted_dist_sq = ctx.distance_sq(ctx.embed(*inst.planted));
    t.within_bound = t.planted_dist_sq <= static_cast<long double>(t.radius) * t.radius;

    auto t0 = std::chrono::steady_clock::now();
    BkzOptions bo;
    bo.ceiling = opt.ceiling;
    const auto reduced = opt.bkz_beta >= 2 ? bkz(lll_reduce(ctx.lattice), std::min(opt.bkz_beta, n), bo).basis
                                           : lll_reduce(ctx.lattice);
    t.bkz_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    EnumConfig cfg;
    cfg.ceiling = opt.ceiling;
    cfg.output_cap = std::size_t{1} << 30;
    const auto st = list_enum_visit_until(reduced, ctx.ball(t.radius), cfg, [&](const IntVec& y, long double) {
        ++t.count;
        const auto e = ctx.pull_back(y);
        if (!check_solution(inst, e)) return false;
        ++t.solutions;
        if (e == *inst.planted) t.recovered = true;
        return t.recovered && opt.stop_at_planted;
    });
    t.enum_ms = elapsed_ms(t0);
    t.nodes = st.nodes;
    t.complete = !st.stopped;
    return t;
}

// ---------------------------------------------------------------------------

struct TruncExperiment {
    std::uint64_t trials = 0, kept = 0;
    double predicted = 0;
    McEstimate ci;
};

/// How often mult_truncate keeps the planted solution: predicted (z'/z)^n.
inline TruncExperiment run_trunc_prob(std::uint64_t p, std::size_t n, std::size_t k, std::size_t z,
                                      std::size_t z_prime, std::uint64_t trials, std::uint64_t seed,
                                      const ProgressFn& progress = {}) {
    TruncExperiment r;
    const auto E = cross_restriction(p, z);
    Rng master(seed);
    for (std::uint64_t i = 0; i < trials; ++i) {
        const auto s = master.next();
        const auto inst = generate_instance(p, n, k, E, s);
        r.kept += mult_truncate(inst, z_prime, s ^ 0x9e3779b97f4a7c15ULL).planted_in_range;
        if (progress && (i + 1) % 1000 == 0) progress(i + 1, trials);
    }
    r.trials = trials;
    r.predicted = std::pow(static_cast<double>(z_prime) / static_cast<double>(z), static_cast<double>(n));
    r.ci = wilson_interval(r.kept, trials);
    return r;
}

// ---------------------------------------------------------------------------

struct RateExperiment {
    std::uint64_t iterations = 0, successes = 0, singular = 0;
    std::size_t solutions = 0;  ///< census size of the instance (the closed form assumes 1)
    double predicted = 0, rate = 0, sigma = 0;
    double z_score = 0;
};

/// Per-iteration success rate of permutation ISD against 2^(-k) (2/z)^n.
inline RateExperiment run_eq1_rate(std::uint64_t p, std::size_t n, std::size_t k, std::size_t z,
                                   std::uint64_t iterations, std::uint64_t seed) {
    RateExperiment r;
    // the closed form counts one solution; skip seeds with extra ones
    std::uint64_t s = seed;
    ResSdInstance inst;
    for (;; ++s) {
        inst = generate_instance(p, n, k, cross_restriction(p, z), s);
        const bool small = std::pow(static_cast<double>(z), static_cast<double>(k)) <= 1e6;
        r.solutions = small ? naive_census(inst).size() : 1;
        if (r.solutions == 1) break;
    }
    const auto exp = expand(inst);
    Rng rng(Rng(seed).split(1).next());
    const auto run = prange_regular_with(exp, [&] { return sample_biregular(n, z, rng); },
                                         PrangeOptions{iterations, false});
    r.iterations = run.iterations;
    r.successes = run.successes;
    r.singular = run.singular;
    r.predicted = std::exp2(prange_success_log2(static_cast<double>(n), static_cast<double>(k), static_cast<double>(z)));
    r.rate = static_cast<double>(r.successes) / static_cast<double>(r.iterations);
    r.sigma = std::sqrt(r.predicted * (1 - r.predicted) / static_cast<double>(r.iterations));
    r.z_score = (r.rate - r.predicted) / r.sigma;
    return r;
}

}  // namespace ressd

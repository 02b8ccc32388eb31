#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "ressd/reductions.hpp"

using namespace ressd;

namespace {

RestrictionSet e4() { return RestrictionSet(PrimeField(127), {1, 2, 4, 8}); }

mpz_class ipow(unsigned long p, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, e);
    return r;
}

long double dist_sq(const IntVec& a, const IntVec& b) {
    long double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

TEST(RessdToCvp, PlantedEmbeddingAndVolume) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), seed);
        auto ctx = ressd_to_cvp(inst);
        EXPECT_EQ(ctx.dim(), 18u);
        EXPECT_EQ(volume(ctx.lattice), ipow(127, 9));
        EXPECT_EQ(syndrome(detail::reduce_mod(inst.field(), ctx.target), ctx.base.H_tilde), ctx.base.s_tilde);
        auto u = cvp_embed_solution(ctx, *inst.planted);
        EXPECT_TRUE(in_lattice(ctx.lattice, u));
        EXPECT_EQ(dist_sq(ctx.target, u), 6.0L);
        EXPECT_EQ(cvp_solution_to_ressd(ctx, u), *inst.planted);
    }
}

TEST(RessdToCvp, Guards) {
    auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), 4);
    auto ctx = ressd_to_cvp(inst);
    auto u = cvp_embed_solution(ctx, *inst.planted);
    // pick a block coordinate holding the 1, so moving it by -3 lands at distance^2 >= 15 > (sqrt 6 + 1)^2
    std::size_t i = 0;
    while (ctx.target[i] - u[i] != 1) ++i;
    auto far = u;
    far[i] -= 3;
    EXPECT_THROW(cvp_solution_to_ressd(ctx, far), TooFar);
    auto off = u;
    off[i] += 1;  // distance^2 5 but not a lattice vector
    EXPECT_THROW(cvp_solution_to_ressd(ctx, off), NotInLattice);
    EXPECT_THROW(cvp_solution_to_ressd(ctx, IntVec(3, 0)), DimensionMismatch);
}

TEST(RessdToCvp, CensusEqualityExhaustive) {
    // (4,2,2) and (6,3,3): the close vectors are exactly the solutions
    const RestrictionSet e2(PrimeField(127), {1, 126});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (auto [n, k, E] : {std::tuple{std::size_t{4}, std::size_t{2}, e2},
                               std::tuple{std::size_t{6}, std::size_t{3}, cross_restriction(127, 3)}}) {
            auto inst = generate_instance(127, n, k, E, seed);
            auto ctx = ressd_to_cvp(inst);
            auto got = cvp_context_solutions(ctx);
            auto want = naive_census(inst);
            EXPECT_EQ(got, want) << "n=" << n << " seed=" << seed;
            // brute-force box scan agrees for the smallest case
            if (n == 4) {
                auto reduced = lll_reduce(ctx.lattice);
                auto close = oracle::box_enumerate(reduced, 4.0L, ctx.target_real(), false);
                EXPECT_EQ(close.size(), want.size());
            }
        }
    }
}

TEST(RessdToCvp, CensusWithSeveralSolutions) {
    // small p makes collisions likely; still p > 2
    std::size_t multi = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto inst = generate_instance(7, 6, 3, RestrictionSet(PrimeField(7), {1, 2, 4}), seed);
        auto want = naive_census(inst);
        multi += want.size() > 1;
        EXPECT_EQ(cvp_context_solutions(ressd_to_cvp(inst)), want);
    }
    EXPECT_GT(multi, 0u);
}

TEST(GuessBlocks, IdentityAndErrors) {
    auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), 2);
    auto ctx = ressd_to_cvp(inst);
    auto [same, idx] = guess_blocks(ctx, 0, {});
    EXPECT_EQ(idx, 0u);
    EXPECT_EQ(same.lattice, ctx.lattice);
    EXPECT_EQ(same.target, ctx.target);
    EXPECT_THROW(guess_blocks(ctx, 2, {1}), BadAssignment);
    EXPECT_THROW(guess_blocks(ctx, 2, {1, 4}), BadAssignment);
    EXPECT_THROW(guess_blocks(ctx, 2, {0, 1}), BadAssignment);
    EXPECT_THROW(guess_blocks(ctx, 7, std::vector<std::size_t>(7, 1)), BadAssignment);
}

TEST(GuessBlocks, FullGuessIsDirectVerification) {
    auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), 3);
    auto ctx = ressd_to_cvp(inst);
    std::vector<std::size_t> a;
    for (std::size_t i = 0; i < 6; ++i) a.push_back(*inst.E.index_of((*inst.planted)[i]) + 1);
    auto [sub, idx] = guess_blocks(ctx, 6, a);
    EXPECT_EQ(sub.dim(), 0u);
    EXPECT_TRUE(sub.feasible);
    EXPECT_EQ(batch_assignment(idx, 6, 3), a);
    EXPECT_EQ(cvp_context_solutions(sub), std::vector<FpVector>{*inst.planted});
    // changing one block breaks the syndrome unless it happens to be another solution
    a[0] = a[0] % 3 + 1;
    auto [bad, idx2] = guess_blocks(ctx, 6, a);
    std::vector<fp_t> e(inst.n);
    for (std::size_t i = 0; i < 6; ++i) e[i] = inst.E[a[i] - 1];
    EXPECT_EQ(bad.feasible, check_solution(inst, FpVector(inst.field(), e)));
    EXPECT_NE(idx, idx2);
}

TEST(GuessBlocks, BatchOfNineRecoversPlantedOnce) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), seed);
        auto ctx = ressd_to_cvp(inst);
        std::size_t hits = 0;
        std::set<FpVector> all;
        std::set<std::uint64_t> indices;
        for (std::uint64_t b = 0; b < 9; ++b) {
            auto [sub, idx] = guess_blocks(ctx, 2, batch_assignment(b, 2, 3));
            EXPECT_EQ(idx, b);
            indices.insert(idx);
            if (!sub.feasible) continue;
            EXPECT_EQ(sub.dim(), 12u);
            for (auto& e : cvp_context_solutions(sub)) {
                EXPECT_TRUE(check_solution(inst, e));
                hits += e == *inst.planted;
                all.insert(e);
            }
        }
        EXPECT_EQ(hits, 1u);
        EXPECT_EQ(indices.size(), 9u);
        auto census = naive_census(inst);
        EXPECT_EQ(std::vector<FpVector>(all.begin(), all.end()), census);
    }
}

TEST(GuessBlocks, NestedGuessesCompose) {
    auto inst = generate_instance(127, 6, 3, cross_restriction(127, 3), 9);
    auto ctx = ressd_to_cvp(inst);
    auto [a, ia] = guess_blocks(ctx, 1, {2});
    auto [b, ib] = guess_blocks(a, 1, {3});
    auto [c, ic] = guess_blocks(ctx, 2, {2, 3});
    EXPECT_EQ(b.fixed, c.fixed);
    EXPECT_EQ(b.target, c.target);
    EXPECT_EQ(b.lattice, c.lattice);
    EXPECT_EQ(ic, 1u + 3u * 2u);
}

TEST(AffineDiameter, Examples) {
    for (std::uint64_t p : {3u, 7u, 127u, 8191u}) EXPECT_EQ(affine_diameter({0, 1}, p).D, 1);
    std::vector<fp_t> cross;
    for (fp_t x = 1; x <= 64; x *= 2) cross.push_back(x);
    auto r = affine_diameter(cross, 127);
    EXPECT_EQ(r.D, 63);
    EXPECT_EQ(affine_diameter({0, 6, 13}, 127).D, 13);
    EXPECT_EQ(affine_diameter({0, 1, 20}, 127).D, 13);
    auto single = affine_diameter({42}, 127);
    EXPECT_EQ(single.D, 0);
    EXPECT_EQ(single.shifted_set, std::vector<std::int64_t>{0});
    EXPECT_THROW(affine_diameter(std::vector<fp_t>{}, 127), InvalidParameters);
    // CROSS prefix subsets {1, 2, ..., 2^(z-1)}
    for (std::size_t z = 1; z <= 7; ++z) {
        std::vector<fp_t> s(cross.begin(), cross.begin() + static_cast<std::ptrdiff_t>(z));
        EXPECT_EQ(affine_diameter(s, 127).D, (1 << (z - 1)) - 1);
    }
}

TEST(AffineDiameter, ResultShape) {
    Rng rng(5);
    PrimeField f(127);
    for (int t = 0; t < 200; ++t) {
        const std::size_t z = 1 + rng.below(9);
        std::set<fp_t> s;
        while (s.size() < z) s.insert(static_cast<fp_t>(rng.below(127)));
        std::vector<fp_t> E(s.begin(), s.end());
        auto r = affine_diameter(E, 127);
        ASSERT_EQ(r.shifted_set.size(), z);
        EXPECT_EQ(r.shifted_set.front(), 0);
        EXPECT_EQ(r.shifted_set.back(), r.D);
        EXPECT_GE(r.D, static_cast<std::int64_t>(z) - 1);
        std::vector<std::int64_t> img;
        for (auto x : E) img.push_back(f.add(f.mul(r.a, x), r.b));
        std::sort(img.begin(), img.end());
        EXPECT_EQ(img, r.shifted_set);
        EXPECT_EQ(affine_diameter_value(E, 127), r.D);
    }
}

TEST(AffineDiameter, BruteForceDefinition) {
    // min over all a != 0 and b of max Z(ax + b), without the x0 shortcut
    const std::uint64_t p = 13;
    PrimeField f(p);
    for (fp_t x = 0; x < p; ++x)
        for (fp_t y = x + 1; y < p; ++y)
            for (fp_t w = y + 1; w < p; ++w) {
                std::vector<fp_t> E{x, y, w};
                std::int64_t best = p;
                for (fp_t a = 1; a < p; ++a)
                    for (fp_t b = 0; b < p; ++b) {
                        std::int64_t m = 0;
                        for (auto e : E) m = std::max<std::int64_t>(m, f.add(f.mul(a, e), b));
                        best = std::min(best, m);
                    }
                EXPECT_EQ(affine_diameter(E, p).D, best);
            }
}

TEST(AffineDiameter, AffineInvariance) {
    const std::uint64_t p = 11;
    PrimeField f(p);
    for (fp_t x = 0; x < p; ++x)
        for (fp_t y = x + 1; y < p; ++y)
            for (fp_t w = y + 1; w < p; ++w) {
                const std::vector<fp_t> E{x, y, w};
                const auto d = affine_diameter(E, p).D;
                for (fp_t a = 1; a < p; ++a)
                    for (fp_t b = 0; b < p; ++b) {
                        std::vector<fp_t> img;
                        for (auto e : E) img.push_back(f.add(f.mul(a, e), b));
                        EXPECT_EQ(affine_diameter(img, p).D, d);
                    }
            }
}

TEST(AffineDiameter, ZEqualsThreeAverageAndMax) {
    double sum = 0;
    std::int64_t mx = 0;
    std::set<std::int64_t> values;
    for (fp_t a = 2; a < 127; ++a) {
        auto d = affine_diameter({0, 1, a}, 127).D;
        sum += static_cast<double>(d);
        mx = std::max(mx, d);
        values.insert(d);
    }
    EXPECT_NEAR(sum / 125, 8.032, 5e-4);
    EXPECT_EQ(mx, 13);
    // every integer 2..11 occurs, then 13
    std::set<std::int64_t> want{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 13};
    EXPECT_EQ(values, want);
}

TEST(Centers, MeanAndRadius) {
    EXPECT_DOUBLE_EQ(mean_center(e4()), 3.75);
    EXPECT_DOUBLE_EQ(mean_center(std::vector<std::int64_t>{9}), 9.0);
    EXPECT_DOUBLE_EQ(set_variance({9}), 0.0);
    EXPECT_NEAR(mean_center(std::vector<std::int64_t>{1, 2, 4}), 7.0 / 3, 1e-15);
    EXPECT_NEAR(set_variance({1, 2, 4}), 14.0 / 9, 1e-15);
    EXPECT_NEAR(median_radius(e4(), 35), 15.86, 0.005);
    EXPECT_DOUBLE_EQ(median_radius(std::vector<std::int64_t>{5}, 10), 0.0);
    EXPECT_THROW(median_radius(e4(), 0), InvalidParameters);
}

TEST(Centers, EmpiricalMedianMatchesRadius) {
    Rng rng(11);
    const auto E = e4();
    std::vector<double> d;
    for (int t = 0; t < 100000; ++t) {
        auto e = sample_from(E, 35, rng);
        d.push_back(std::sqrt(static_cast<double>(center_distance_sq(e, 3.75))));
    }
    std::nth_element(d.begin(), d.begin() + 50000, d.end());
    const double R = median_radius(E, 35);
    EXPECT_LT(std::abs(d[50000] - R) / R, 0.01);
}

TEST(SuccessProb, Examples) {
    const std::vector<std::int64_t> v{1, 2, 4, 8};
    auto mc = success_prob_mc(v, 35, 3.75, 15.86, 100000, 1);
    EXPECT_NEAR(mc.estimate, 0.51, 0.01);
    EXPECT_LE(mc.lo, mc.estimate);
    EXPECT_GE(mc.hi, mc.estimate);
    const double exact = success_prob_exact(v, 35, 3.75, 15.86);
    EXPECT_NEAR(exact, 0.5113, 5e-4);
    EXPECT_TRUE(mc.lo <= exact && exact <= mc.hi);
    // deterministic bound with the shifted set {0, 1, 3, 7}: D = 7
    const std::vector<std::int64_t> sh{0, 1, 3, 7};
    EXPECT_EQ(success_prob_mc(sh, 20, 3.5, 7 * std::sqrt(20.0), 2000, 3).estimate, 1.0);
    EXPECT_EQ(success_prob_mc(v, 10, 3.75, 0.0, 2000, 3).estimate, 0.0);
    EXPECT_THROW(success_prob_mc(v, 10, 3.75, 1.0, 0, 3), InvalidParameters);
}

TEST(CompactListCvp, VolumeEmbeddingAndDistance) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = generate_instance(127, 14, 7, e4(), seed);
        auto ctx = compact_listcvp(inst, 3.75);
        EXPECT_EQ(ctx.variant, CompactVariant::ListCVP);
        EXPECT_EQ(volume(ctx.lattice), ipow(127, 7));
        EXPECT_EQ(syndrome(ctx.anchor, inst.H), inst.s);
        auto y = ctx.embed(*inst.planted);
        EXPECT_TRUE(in_lattice(ctx.lattice, y));
        EXPECT_NEAR(static_cast<double>(ctx.distance_sq(y)),
                    static_cast<double>(center_distance_sq(*inst.planted, 3.75)), 1e-9);
        EXPECT_EQ(ctx.pull_back(y), *inst.planted);
        for (std::size_t i = 0; i < inst.n; ++i) EXPECT_DOUBLE_EQ((*ctx.target)[i], 3.75 - ctx.anchor[i]);
    }
}

TEST(CompactListCvp, ZeroCenterZeroSolution) {
    PrimeField f(127);
    auto inst = generate_instance(127, 8, 4, RestrictionSet(f, {0, 1}), 1);
    inst.s = FpVector(f, inst.H.rows());
    auto ctx = compact_listcvp(inst, 0.0);
    auto y = ctx.embed(FpVector(f, 8));
    EXPECT_EQ(ctx.distance_sq(y), 0.0L);
    EXPECT_THROW(compact_listcvp(inst, -1.0), InvalidParameters);
}

TEST(CompactListCvp, SoundnessPlantedFound) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto inst = generate_instance(127, 16, 8, e4(), seed);
        auto ctx = compact_listcvp(inst, 3.75);
        const double R = std::sqrt(static_cast<double>(center_distance_sq(*inst.planted, 3.75))) + 1e-9;
        auto res = compact_solutions(ctx, R);
        EXPECT_TRUE(std::binary_search(res.solutions.begin(), res.solutions.end(), *inst.planted));
        for (auto& e : res.solutions) EXPECT_LE(center_distance_sq(e, 3.75), R * R);
    }
}

TEST(ListSvp, VolumeAndErrors) {
    auto inst = generate_instance(127, 10, 4, e4(), 3);
    auto ctx = listsvp_reduce(inst, 4);
    EXPECT_EQ(ctx.variant, CompactVariant::ListSVP);
    EXPECT_FALSE(ctx.target);
    EXPECT_EQ(ctx.dim(), 10u);
    EXPECT_EQ(volume(ctx.lattice), ipow(127, 5));
    EXPECT_THROW(listsvp_reduce(inst, 3.75), NonIntegerCenter);
    EXPECT_THROW(listsvp_reduce(inst, -1), InvalidParameters);
    // s' = 0 when the all-mu vector is itself a solution
    PrimeField f(127);
    auto z = inst;
    z.s = syndrome(FpVector(f, std::vector<fp_t>(10, 4)), z.H);
    EXPECT_THROW(listsvp_reduce(z, 4), ZeroSyndrome);
}

TEST(ListSvp, EmbeddingNormEquality) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = generate_instance(127, 12, 5, e4(), 1000 + seed);
        const double mu = static_cast<double>(seed % 5);
        auto ctx = listsvp_reduce(inst, mu);
        auto y = ctx.embed(*inst.planted);
        EXPECT_TRUE(in_lattice(ctx.lattice, y));
        long double n2 = 0;
        for (auto t : y) n2 += static_cast<long double>(t) * t;
        EXPECT_EQ(n2, center_distance_sq(*inst.planted, mu));
        EXPECT_EQ(ctx.distance_sq(y), n2);
        EXPECT_EQ(ctx.pull_back(y), *inst.planted);
        // Q·s'^T = e_0, so the shifted solution is a codeword of H3
        EXPECT_TRUE(syndrome(*inst.planted - ctx.anchor, ctx.H3).is_zero());
    }
}

TEST(ListSvp, SoundnessPlantedFound) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto inst = generate_instance(127, 16, 7, e4(), seed);
        auto ctx = listsvp_reduce(inst, 4);
        const double R = std::sqrt(static_cast<double>(center_distance_sq(*inst.planted, 4))) + 1e-9;
        auto res = compact_solutions(ctx, R);
        EXPECT_TRUE(std::binary_search(res.solutions.begin(), res.solutions.end(), *inst.planted));
    }
}

TEST(Degeneracy, TableRows) {
    const double r3 = std::sqrt(127 * set_variance({1, 2, 4}));
    const double r4 = std::sqrt(127 * set_variance({1, 2, 4, 8}));
    auto d3 = classify_degeneracy(127, 76, 127, r3);
    EXPECT_EQ(d3.kind, DegeneracyKind::PureInstance);
    EXPECT_NEAR(d3.gh_count_log2, -60.3, 0.05);
    auto d4 = classify_degeneracy(127, 76, 127, r4);
    EXPECT_EQ(d4.kind, DegeneracyKind::ListInstance);
    EXPECT_NEAR(d4.gh_count_log2, 79.9, 0.05);
    auto d0 = classify_degeneracy(127, 76, 127, 0.0);
    EXPECT_EQ(d0.kind, DegeneracyKind::PureInstance);
    EXPECT_TRUE(std::isinf(d0.gh_count_log2));
    // simplified and exact counts differ by the small Stirling factor only
    EXPECT_NEAR(d4.gh_simplified_log2, d4.gh_count_log2, 5.0);
}

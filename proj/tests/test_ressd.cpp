#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ressd/ressd.hpp"

using namespace ressd;

namespace {

RestrictionSet cross7() { return cross_restriction(127, 7); }

/// All of E^n by brute force; the oracle for naive_census.
std::vector<FpVector> brute_census(const ResSdInstance& inst) {
    std::vector<FpVector> out;
    const auto f = inst.field();
    std::vector<std::size_t> idx(inst.n, 0);
    while (true) {
        FpVector e(f, inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) e.set(i, inst.E[idx[i]]);
        if (syndrome(e, inst.H) == inst.s) out.push_back(e);
        std::size_t t = 0;
        while (t < inst.n && ++idx[t] == inst.E.z()) idx[t++] = 0;
        if (t == inst.n) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(CrossRestriction, Examples) {
    EXPECT_EQ(cross7().elements(), (std::vector<fp_t>{1, 2, 4, 8, 16, 32, 64}));
    EXPECT_EQ(cross_restriction(127, 1).elements(), (std::vector<fp_t>{1}));
    EXPECT_THROW(cross_restriction(127, 5), NoSuchSubgroup);
    EXPECT_EQ(subgroup_generator(cross7()), 2u);
    EXPECT_TRUE(cross7().is_subgroup());
    EXPECT_FALSE(RestrictionSet(PrimeField(127), {0, 1}).is_subgroup());
}

TEST(GenerateInstance, DeterministicAndPlanted) {
    auto a = generate_instance(127, 35, 21, cross7(), 7);
    auto b = generate_instance(127, 35, 21, cross7(), 7);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, generate_instance(127, 35, 21, cross7(), 8));
    EXPECT_EQ(a.H.rows(), 14u);
    EXPECT_EQ(rank(a.H), 14u);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = generate_instance(127, 20, 8, cross7(), seed);
        EXPECT_TRUE(check_solution(inst, *inst.planted));
    }
    EXPECT_THROW(generate_instance(127, 5, 0, cross7(), 1), InvalidParameters);
    EXPECT_THROW(generate_instance(127, 5, 5, cross7(), 1), InvalidParameters);
}

TEST(CheckSolution, Examples) {
    auto inst = generate_instance(127, 12, 5, cross7(), 3);
    EXPECT_TRUE(check_solution(inst, *inst.planted));
    auto bad = *inst.planted;
    bad.set(0, 3);
    EXPECT_FALSE(check_solution(inst, bad));
    if (!inst.s.is_zero()) EXPECT_FALSE(check_solution(inst, FpVector(inst.field(), 12)));
    EXPECT_THROW(check_solution(inst, FpVector(inst.field(), 11)), DimensionMismatch);
}

TEST(AffineShift, Examples) {
    auto inst = generate_instance(127, 10, 4, cross7(), 1);
    auto id = affine_shift(inst, 1, 0);
    EXPECT_EQ(id.instance, inst);
    EXPECT_EQ(pull_back(id.context, *inst.planted), *inst.planted);

    auto sh = affine_shift(inst, 1, 126);
    EXPECT_EQ(sh.instance.E.elements(), (std::vector<fp_t>{0, 1, 3, 7, 15, 31, 63}));
    EXPECT_THROW(affine_shift(inst, 0, 3), ZeroScale);
}

TEST(AffineShift, RoundTripProperty) {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = generate_instance(127, 12, 5, cross7(), 1000 + trial);
        const auto a = static_cast<fp_t>(1 + rng.below(126)), b = static_cast<fp_t>(rng.below(127));
        auto sh = affine_shift(inst, a, b);
        EXPECT_EQ(sh.instance.E.z(), inst.E.z());
        ASSERT_TRUE(check_solution(sh.instance, *sh.instance.planted));
        EXPECT_EQ(pull_back(sh.context, *sh.instance.planted), *inst.planted);
    }
}

TEST(MultRandomize, PreservesSyndromeAndRank) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = generate_instance(127, 15, 6, cross7(), seed);
        auto r = mult_randomize(inst, seed + 77);
        EXPECT_EQ(r.instance.s, inst.s);
        EXPECT_EQ(rank(r.instance.H), rank(inst.H));
        ASSERT_TRUE(check_solution(r.instance, *r.instance.planted));
        auto back = pull_back(r.context, *r.instance.planted);
        EXPECT_EQ(back, *inst.planted);
        EXPECT_TRUE(check_solution(inst, back));
    }
    auto shifted = affine_shift(generate_instance(127, 6, 3, cross7(), 1), 1, 1).instance;
    EXPECT_THROW(mult_randomize(shifted, 1), NotSubgroup);
}

TEST(MultRandomize, AllOnesIsIdentity) {
    auto inst = generate_instance(127, 6, 3, cross_restriction(127, 1), 1);
    auto r = mult_randomize(inst, 5);
    EXPECT_EQ(r.instance, inst);
}

TEST(MultRandomize, ImageCoordinateIsUniform) {
    // Chi-square over the 7 cells; 6 dof, the 99.9% quantile is 22.46.
    auto inst = generate_instance(127, 8, 3, cross7(), 4);
    std::vector<int> counts(7, 0);
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
        auto r = mult_randomize(inst, static_cast<std::uint64_t>(seed));
        counts[*cross7().index_of((*r.instance.planted)[0])]++;
    }
    double chi2 = 0;
    const double expect = trials / 7.0;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    EXPECT_LT(chi2, 22.46);
}

TEST(MultTruncate, Boundaries) {
    auto inst = generate_instance(127, 10, 4, cross7(), 2);
    auto full = mult_truncate(inst, 7, 3);
    EXPECT_TRUE(full.planted_in_range);
    EXPECT_EQ(full.E_prime, inst.E);
    EXPECT_THROW(mult_truncate(inst, 0, 1), BadZPrime);
    EXPECT_THROW(mult_truncate(inst, 8, 1), BadZPrime);
    auto four = mult_truncate(inst, 4, 3);
    EXPECT_EQ(four.E_prime.elements(), (std::vector<fp_t>{1, 2, 4, 8}));
    // (6/7)^127
    EXPECT_NEAR(127 * std::log2(6.0 / 7.0), -28.2, 0.05);
}

TEST(MultTruncate, SuccessFrequency) {
    auto inst = generate_instance(127, 20, 8, cross7(), 5);
    const int trials = 100000;
    int hits = 0;
    for (int seed = 0; seed < trials; ++seed) {
        auto t = mult_truncate(inst, 4, static_cast<std::uint64_t>(seed));
        if (t.planted_in_range) {
            ++hits;
            ASSERT_TRUE(check_solution(t.instance, *t.instance.planted));
            auto back = pull_back(t.context, *t.instance.planted);
            ASSERT_EQ(back, *inst.planted);
        }
    }
    const double q = std::pow(4.0 / 7.0, 20);
    const double sigma = std::sqrt(trials * q * (1 - q));
    EXPECT_LE(std::abs(hits - trials * q), 3 * sigma);
}

TEST(PullBack, ComposedShiftTruncate) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto inst = generate_instance(127, 8, 3, cross7(), seed);
        auto tr = mult_truncate(inst, 7, seed * 3 + 1);
        auto sh = affine_shift(tr.instance, 5, 9);
        ASSERT_TRUE(check_solution(sh.instance, *sh.instance.planted));
        auto e = pull_back(tr.context, pull_back(sh.context, *sh.instance.planted));
        EXPECT_TRUE(check_solution(inst, e));
        EXPECT_THROW(pull_back(sh.context, FpVector(inst.field(), 7)), ContextMismatch);
    }
}

TEST(NaiveSolve, RecoversAndCensusMatchesBruteForce) {
    auto e3 = cross_restriction(127, 3);
    auto inst = generate_instance(127, 12, 5, e3, 11);
    auto sol = naive_solve(inst);
    ASSERT_TRUE(sol.has_value());
    EXPECT_TRUE(check_solution(inst, *sol));
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto small = generate_instance(7, 6, 3, RestrictionSet(PrimeField(7), {1, 2, 4}), seed);
        EXPECT_EQ(naive_census(small), brute_census(small));
    }
}

TEST(NaiveSolve, KZeroAndUnreachable) {
    PrimeField f(7);
    ResSdInstance inst;
    inst.p = 7;
    inst.n = 3;
    inst.k = 0;
    inst.H = FpMatrix::identity(f, 3);
    inst.E = RestrictionSet(f, {1, 2});
    inst.s = FpVector(f, {2, 1, 1});
    EXPECT_EQ(*naive_solve(inst), inst.s);
    inst.s = FpVector(f, {2, 1, 5});
    EXPECT_FALSE(naive_solve(inst).has_value());

    // Unreachable syndrome: every guess forces an entry outside E.
    auto gen = generate_instance(127, 12, 5, cross_restriction(127, 3), 4);
    gen.s = FpVector(gen.field(), 7);
    gen.s.set(0, 50);
    EXPECT_TRUE(naive_census(gen).empty());
    EXPECT_FALSE(naive_solve(gen).has_value());
}

TEST(NaiveSolve, UniqueSolutionRegime) {
    // n - k >= 2 k log_z p with z = 3, p = 127, k = 2: n - k >= 17.7.
    auto e3 = cross_restriction(127, 3);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = generate_instance(127, 20, 2, e3, seed);
        auto all = naive_census(inst);
        ASSERT_EQ(all.size(), 1u);
        EXPECT_EQ(all[0], *inst.planted);
    }
}

#include <gtest/gtest.h>

#include "ressd/ffmat.hpp"
#include "ressd/rng.hpp"

using namespace ressd;

namespace {

FpMatrix random_matrix(PrimeField f, std::size_t r, std::size_t c, Rng& rng) {
    FpMatrix m(f, r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = static_cast<fp_t>(rng.below(f.p()));
    return m;
}

bool is_rref(const FpMatrix& r, const std::vector<std::size_t>& pivots) {
    for (std::size_t i = 0; i < r.rows(); ++i) {
        std::size_t lead = r.cols();
        for (std::size_t j = 0; j < r.cols(); ++j)
            if (r(i, j)) { lead = j; break; }
        if (i < pivots.size()) {
            if (lead != pivots[i] || r(i, lead) != 1) return false;
            for (std::size_t t = 0; t < r.rows(); ++t)
                if (t != i && r(t, lead) != 0) return false;
        } else if (lead != r.cols()) {
            return false;
        }
    }
    return std::is_sorted(pivots.begin(), pivots.end());
}

}  // namespace

TEST(PrimeField, RejectsComposites) {
    EXPECT_THROW(PrimeField(1), InvalidParameters);
    EXPECT_THROW(PrimeField(9), NotPrime);
    EXPECT_THROW(PrimeField(std::uint64_t{1} << 31), InvalidParameters);
    EXPECT_NO_THROW(PrimeField(2147483647));
    EXPECT_EQ(PrimeField(127).inv(2), 64u);
    EXPECT_EQ(PrimeField(127).from_int(-1), 126u);
}

TEST(MatMul, IdentityZeroAndHandExample) {
    PrimeField f5(5);
    Rng rng(1);
    auto b = random_matrix(f5, 3, 4, rng);
    EXPECT_EQ(mat_mul(FpMatrix::identity(f5, 3), b), b);
    EXPECT_TRUE(mat_mul(FpMatrix(f5, 2, 3), b).is_zero());

    FpMatrix a(f5, {{1, 2}, {3, 4}});
    FpMatrix c(f5, {{0, 1}, {1, 1}});
    EXPECT_EQ(mat_mul(a, c), FpMatrix(f5, {{2, 3}, {4, 2}}));
}

TEST(MatMul, Errors) {
    PrimeField f5(5), f7(7);
    EXPECT_THROW(mat_mul(FpMatrix(f5, 2, 3), FpMatrix(f5, 2, 3)), DimensionMismatch);
    EXPECT_THROW(mat_mul(FpMatrix(f5, 2, 2), FpMatrix(f7, 2, 2)), FieldMismatch);
}

TEST(Rref, Examples) {
    PrimeField f5(5);
    auto id = rref(FpMatrix::identity(f5, 3));
    EXPECT_EQ(id.reduced, FpMatrix::identity(f5, 3));
    EXPECT_EQ(id.pivots, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(id.rank, 3u);
    EXPECT_EQ(id.transform, FpMatrix::identity(f5, 3));

    auto z = rref(FpMatrix(f5, 2, 3));
    EXPECT_TRUE(z.reduced.is_zero());
    EXPECT_TRUE(z.pivots.empty());
    EXPECT_EQ(z.transform, FpMatrix::identity(f5, 2));

    auto r = rref(FpMatrix(f5, {{2, 4}, {1, 2}}));
    EXPECT_EQ(r.rank, 1u);
    EXPECT_EQ(r.pivots, (std::vector<std::size_t>{0}));
}

TEST(Rref, RandomProperties) {
    PrimeField f(7);
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const auto rows = 1 + rng.below(6), cols = 1 + rng.below(8);
        auto a = random_matrix(f, rows, cols, rng);
        if (trial % 3 == 0 && rows > 1)  // force a dependent row
            for (std::size_t j = 0; j < cols; ++j) a.at(rows - 1, j) = f.mul(3, a(0, j));
        auto r = rref(a);
        EXPECT_EQ(mat_mul(r.transform, a), r.reduced);
        EXPECT_EQ(rank(r.transform), rows);
        EXPECT_TRUE(is_rref(r.reduced, r.pivots));
        EXPECT_EQ(rref(r.reduced).reduced, r.reduced);
    }
}

TEST(SolveParticular, Examples) {
    PrimeField f5(5);
    auto h = FpMatrix::identity(f5, 2);
    EXPECT_EQ(*solve_particular(h, FpVector(f5, {3, 1})), FpVector(f5, {3, 1}));
    EXPECT_TRUE(solve_particular(h, FpVector(f5, 2))->is_zero());

    FpMatrix dep(f5, {{1, 2}, {2, 4}});
    EXPECT_FALSE(solve_particular(dep, FpVector(f5, {1, 1})).has_value());
    EXPECT_THROW(solve_particular(dep, FpVector(f5, 3)), DimensionMismatch);
}

TEST(SolveParticular, RoundTrip) {
    PrimeField f7(7);
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        FpMatrix h;
        do h = random_matrix(f7, 3, 5, rng);
        while (rank(h) < 3);
        FpVector e(f7, 5);
        for (std::size_t i = 0; i < 5; ++i) e.set(i, static_cast<fp_t>(rng.below(7)));
        const auto s = syndrome(e, h);
        auto y = solve_particular(h, s);
        ASSERT_TRUE(y.has_value());
        EXPECT_EQ(syndrome(*y, h), s);
    }
}

TEST(SystematicForm, Examples) {
    PrimeField f5(5);
    FpMatrix g(f5, {{1, 0, 2, 3}, {0, 1, 4, 4}});
    auto sf = systematic_form(g);
    EXPECT_EQ(sf.generator, g);
    EXPECT_TRUE(sf.perm.is_identity());

    auto idf = systematic_form(FpMatrix::identity(f5, 3));
    EXPECT_EQ(idf.generator, FpMatrix::identity(f5, 3));
    EXPECT_TRUE(idf.perm.is_identity());

    FpMatrix g0(f5, {{0, 1, 2, 3}, {0, 2, 0, 1}});
    auto s0 = systematic_form(g0);
    EXPECT_FALSE(s0.perm.is_identity());
    EXPECT_EQ(s0.generator.column_block(0, 2), FpMatrix::identity(f5, 2));
    EXPECT_NE(s0.perm[0], 0u);

    EXPECT_THROW(systematic_form(FpMatrix(f5, {{1, 2}, {2, 4}})), RankDeficient);
}

TEST(SystematicForm, PreservesRowSpace) {
    PrimeField f(11);
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        FpMatrix g;
        do g = random_matrix(f, 3, 7, rng);
        while (rank(g) < 3);
        if (trial % 2 == 0)
            for (std::size_t i = 0; i < 3; ++i) g.at(i, 0) = 0;
        auto sf = systematic_form(g);
        EXPECT_EQ(sf.generator.column_block(0, 3), FpMatrix::identity(f, 3));
        auto back = sf.perm.inverse().apply_columns(sf.generator);
        EXPECT_EQ(rref(back).reduced, rref(g).reduced);
    }
}

TEST(Invert, Examples) {
    PrimeField f5(5);
    EXPECT_EQ(invert(FpMatrix::identity(f5, 4)), FpMatrix::identity(f5, 4));
    FpMatrix swap(f5, {{0, 1}, {1, 0}});
    EXPECT_EQ(invert(swap), swap);
    FpMatrix a(f5, {{2, 1}, {1, 1}});
    auto ai = invert(a);
    EXPECT_EQ(ai, FpMatrix(f5, {{1, 4}, {4, 2}}));
    EXPECT_EQ(mat_mul(a, ai), FpMatrix::identity(f5, 2));
    EXPECT_THROW(invert(FpMatrix(f5, {{1, 2}, {2, 4}})), Singular);
}

TEST(Permutation, ApplyAndInverse) {
    PrimeField f(13);
    Rng rng(9);
    std::vector<std::size_t> img(6);
    std::iota(img.begin(), img.end(), 0);
    rng.shuffle(img.begin(), img.end());
    Permutation p(img);
    auto m = random_matrix(f, 3, 6, rng);
    EXPECT_EQ(p.apply_columns(m), mat_mul(m, p.materialize(f)));
    EXPECT_EQ(p.inverse().apply_columns(p.apply_columns(m)), m);
    std::vector<int> x{0, 1, 2, 3, 4, 5};
    auto px = p.apply<int>(x);
    EXPECT_EQ(p.unapply<int>(px), x);
}

TEST(KernelBasis, Annihilates) {
    PrimeField f(7);
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto h = random_matrix(f, 3, 8, rng);
        auto k = kernel_basis(h);
        EXPECT_EQ(k.rows(), 8 - rank(h));
        EXPECT_EQ(rank(k), k.rows());
        EXPECT_TRUE(mat_mul(k, h.transpose()).is_zero());
    }
}

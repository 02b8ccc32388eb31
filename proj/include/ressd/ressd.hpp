#pragma once

// Restricted syndrome decoding instances and the instance transformations
// (affine shift, multiplicative randomization and truncation).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ressd/errors.hpp"
#include "ressd/ffmat.hpp"
#include "ressd/rng.hpp"

namespace ressd {

class RestrictionSet {
public:
    RestrictionSet() = default;
    RestrictionSet(PrimeField field, std::vector<fp_t> elements) : field_(field), e_(std::move(elements)) {
        for (auto x : e_)
            if (x >= field_.p()) throw InvalidParameters("restriction element out of range");
        std::sort(e_.begin(), e_.end());
        if (std::adjacent_find(e_.begin(), e_.end()) != e_.end())
            throw InvalidParameters("restriction elements must be distinct");
        if (e_.empty()) throw InvalidParameters("restriction set must be nonempty");
    }

    const PrimeField& field() const noexcept { return field_; }
    std::size_t z() const noexcept { return e_.size(); }
    const std::vector<fp_t>& elements() const noexcept { return e_; }
    fp_t operator[](std::size_t i) const { return e_[i]; }

    bool contains(fp_t x) const { return std::binary_search(e_.begin(), e_.end(), x); }
    std::optional<std::size_t> index_of(fp_t x) const {
        auto it = std::lower_bound(e_.begin(), e_.end(), x);
        if (it == e_.end() || *it != x) return std::nullopt;
        return static_cast<std::size_t>(it - e_.begin());
    }

    /// Nonzero and closed under multiplication (hence a cyclic subgroup of F_p^*).
    bool is_subgroup() const {
        if (e_.front() == 0) return false;
        for (auto a : e_)
            for (auto b : e_)
                if (!contains(field_.mul(a, b))) return false;
        return true;
    }

    friend bool operator==(const RestrictionSet&, const RestrictionSet&) = default;

private:
    PrimeField field_;
    std::vector<fp_t> e_;
};

namespace detail {

inline std::vector<std::uint64_t> prime_factors(std::uint64_t x) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= x; ++d) {
        if (x % d) continue;
        out.push_back(d);
        while (x % d == 0) x /= d;
    }
    if (x > 1) out.push_back(x);
    return out;
}

inline bool has_order(const PrimeField& f, fp_t w, std::uint64_t z) {
    if (w == 0 || f.pow(w, z) != 1) return false;
    for (auto q : prime_factors(z))
        if (f.pow(w, z / q) == 1) return false;
    return true;
}

}  // namespace detail

/// Smallest element of order |E|; requires E to be a subgroup.
inline fp_t subgroup_generator(const RestrictionSet& e) {
    if (!e.is_subgroup()) throw NotSubgroup("restriction set is not a multiplicative subgroup");
    for (auto w : e.elements())
        if (detail::has_order(e.field(), w, e.z())) return w;
    throw NotSubgroup("no generator found");  // unreachable for subgroups of F_p^*
}

/// {w^i : 0 <= i < count} in exponent order.
inline std::vector<fp_t> power_sequence(const PrimeField& f, fp_t w, std::size_t count) {
    std::vector<fp_t> out;
    fp_t x = 1 % f.p();
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(x);
        x = f.mul(x, w);
    }
    return out;
}

/// The order-z subgroup generated by the smallest primitive z-th root of unity.
inline RestrictionSet cross_restriction(std::uint64_t p, std::uint64_t z) {
    PrimeField f(p);
    if (z == 0 || (p - 1) % z != 0)
        throw NoSuchSubgroup(std::to_string(z) + " does not divide " + std::to_string(p - 1));
    for (fp_t w = 1; w < f.p(); ++w)
        if (detail::has_order(f, w, z)) return RestrictionSet(f, power_sequence(f, w, z));
    throw NoSuchSubgroup("no element of order " + std::to_string(z));
}

struct ResSdInstance {
    std::uint32_t p = 0;
    std::size_t n = 0, k = 0;
    FpMatrix H;  ///< (n-k) x n
    FpVector s;
    RestrictionSet E;
    std::optional<FpVector> planted;
    std::uint64_t seed = 0;
    std::string generator_id{Rng::kGeneratorId};

    PrimeField field() const { return H.field(); }

    friend bool operator==(const ResSdInstance&, const ResSdInstance&) = default;
};

inline bool in_restriction(const FpVector& e, const RestrictionSet& E) {
    return std::all_of(e.entries().begin(), e.entries().end(), [&](fp_t x) { return E.contains(x); });
}

inline bool check_solution(const ResSdInstance& inst, const FpVector& e) {
    if (e.size() != inst.n) throw DimensionMismatch("candidate length " + std::to_string(e.size()) + " != n");
    return in_restriction(e, inst.E) && syndrome(e, inst.H) == inst.s;
}

inline FpVector sample_from(const RestrictionSet& E, std::size_t n, Rng& rng) {
    FpVector e(E.field(), n);
    for (std::size_t i = 0; i < n; ++i) e.set(i, E[rng.below(E.z())]);
    return e;
}

/// H = (I_{n-k} | H') with H' uniform, planted e uniform over E^n, s = e·H^T.
inline ResSdInstance generate_instance(std::uint64_t p, std::size_t n, std::size_t k, const RestrictionSet& E,
                                       std::uint64_t seed) {
    if (!(0 < k && k < n)) throw InvalidParameters("need 0 < k < n");
    PrimeField f(p);
    require_same_field(f, E.field());
    Rng rng(seed);
    Rng hrng = rng.split(0), erng = rng.split(1);
    const std::size_t r = n - k;
    FpMatrix h(f, r, n);
    for (std::size_t i = 0; i < r; ++i) {
        h.at(i, i) = 1;
        for (std::size_t j = r; j < n; ++j) h.at(i, j) = static_cast<fp_t>(hrng.below(f.p()));
    }
    auto e = sample_from(E, n, erng);
    ResSdInstance inst;
    inst.p = f.p();
    inst.n = n;
    inst.k = k;
    inst.s = syndrome(e, h);
    inst.H = std::move(h);
    inst.E = E;
    inst.planted = std::move(e);
    inst.seed = seed;
    return inst;
}

struct AffineShift {
    fp_t a = 1, b = 0;
};
struct MultRandomize {
    std::vector<fp_t> c;
};
struct MultTruncate {
    std::vector<fp_t> c;
    std::size_t z_prime = 0;
};

struct TransformContext {
    std::variant<AffineShift, MultRandomize, MultTruncate> kind;
    PrimeField field;
    std::size_t n = 0;
};

struct TransformResult {
    ResSdInstance instance;
    TransformContext context;
};

inline TransformResult affine_shift(const ResSdInstance& inst, fp_t a, fp_t b) {
    const auto f = inst.field();
    a %= f.p();
    b %= f.p();
    if (a == 0) throw ZeroScale("affine shift needs a != 0");
    const fp_t ainv = f.inv(a);
    ResSdInstance out = inst;
    out.H = FpMatrix(f, inst.H.rows(), inst.n);
    for (std::size_t i = 0; i < inst.H.rows(); ++i)
        for (std::size_t j = 0; j < inst.n; ++j) out.H.at(i, j) = f.mul(ainv, inst.H(i, j));
    // s' = s + b a^{-1} u H^T, i.e. add b·a^{-1} times the row sums of H.
    out.s = inst.s;
    for (std::size_t i = 0; i < inst.H.rows(); ++i) {
        fp_t rowsum = 0;
        for (std::size_t j = 0; j < inst.n; ++j) rowsum = f.add(rowsum, inst.H(i, j));
        out.s.set(i, f.add(inst.s[i], f.mul(f.mul(b, ainv), rowsum)));
    }
    std::vector<fp_t> e2;
    for (auto x : inst.E.elements()) e2.push_back(f.add(f.mul(a, x), b));
    out.E = RestrictionSet(f, std::move(e2));
    if (inst.planted) {
        FpVector e(f, inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) e.set(i, f.add(f.mul(a, (*inst.planted)[i]), b));
        out.planted = std::move(e);
    }
    return {std::move(out), TransformContext{AffineShift{a, b}, f, inst.n}};
}

namespace detail {

inline ResSdInstance apply_diagonal(const ResSdInstance& inst, const std::vector<fp_t>& c) {
    const auto f = inst.field();
    ResSdInstance out = inst;
    for (std::size_t j = 0; j < inst.n; ++j) {
        const fp_t cinv = f.inv(c[j]);
        for (std::size_t i = 0; i < inst.H.rows(); ++i) out.H.at(i, j) = f.mul(inst.H(i, j), cinv);
    }
    if (inst.planted) {
        FpVector e(f, inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) e.set(i, f.mul((*inst.planted)[i], c[i]));
        out.planted = std::move(e);
    }
    return out;
}

}  // namespace detail

/// H' = H·C^{-1} for a diagonal C drawn uniformly from E^n.
inline TransformResult mult_randomize(const ResSdInstance& inst, std::uint64_t seed) {
    if (!inst.E.is_subgroup()) throw NotSubgroup("multiplicative randomization needs a subgroup E");
    Rng rng(seed);
    std::vector<fp_t> c(inst.n);
    for (auto& x : c) x = inst.E[rng.below(inst.E.z())];
    auto out = detail::apply_diagonal(inst, c);
    return {std::move(out), TransformContext{MultRandomize{std::move(c)}, inst.field(), inst.n}};
}

struct TruncateResult {
    ResSdInstance instance;  ///< planted is kept only when its image lands in E'^n
    TransformContext context;
    RestrictionSet E_prime;
    bool planted_in_range = false;
};

/// Randomize, then restrict to E' = {w^i : i < z'}. The planted image lies in
/// E'^n with probability (z'/z)^n over the seed.
inline TruncateResult mult_truncate(const ResSdInstance& inst, std::size_t z_prime, std::uint64_t seed) {
    const auto w = subgroup_generator(inst.E);
    if (z_prime < 1 || z_prime > inst.E.z())
        throw BadZPrime("z' = " + std::to_string(z_prime) + " outside [1, " + std::to_string(inst.E.z()) + "]");
    auto rnd = mult_randomize(inst, seed);
    RestrictionSet ep(inst.field(), power_sequence(inst.field(), w, z_prime));
    auto out = std::move(rnd.instance);
    out.E = ep;
    bool ok = false;
    if (out.planted) {
        ok = in_restriction(*out.planted, ep);
        if (!ok) out.planted.reset();
    }
    auto c = std::get<MultRandomize>(rnd.context.kind).c;
    return {std::move(out), TransformContext{MultTruncate{std::move(c), z_prime}, inst.field(), inst.n},
            std::move(ep), ok};
}

inline FpVector pull_back(const TransformContext& ctx, const FpVector& e_prime) {
    if (e_prime.size() != ctx.n || !(e_prime.field() == ctx.field))
        throw ContextMismatch("vector does not match the transform's instance");
    const auto& f = ctx.field;
    FpVector e(f, ctx.n);
    if (const auto* af = std::get_if<AffineShift>(&ctx.kind)) {
        const fp_t ainv = f.inv(af->a);
        for (std::size_t i = 0; i < ctx.n; ++i) e.set(i, f.mul(ainv, f.sub(e_prime[i], af->b)));
        return e;
    }
    const auto& c = std::holds_alternative<MultRandomize>(ctx.kind) ? std::get<MultRandomize>(ctx.kind).c
                                                                    : std::get<MultTruncate>(ctx.kind).c;
    if (c.size() != ctx.n) throw ContextMismatch("diagonal length");
    for (std::size_t i = 0; i < ctx.n; ++i) e.set(i, f.mul(e_prime[i], f.inv(c[i])));
    return e;
}

namespace detail {

/// Form (I | A) after a column permutation: x·P solves iff x_info = s' - x_rest·A^T.
struct NaiveSystem {
    Permutation perm;  // pivots first
    FpMatrix A;        // (n-k) x k block right of the identity
    FpVector s;        // T·s
    std::size_t r = 0, k = 0;
};

inline NaiveSystem naive_system(const ResSdInstance& inst) {
    auto red = rref(inst.H);
    if (red.rank < inst.H.rows()) throw RankDeficient("parity-check matrix is not full rank");
    std::vector<std::size_t> image = red.pivots;
    std::vector<bool> piv(inst.n, false);
    for (auto c : red.pivots) piv[c] = true;
    for (std::size_t c = 0; c < inst.n; ++c)
        if (!piv[c]) image.push_back(c);
    Permutation perm(std::move(image));
    const std::size_t r = inst.H.rows(), k = inst.n - r;
    auto sys = perm.apply_columns(red.reduced);
    auto s = vec_mat(inst.s, red.transform.transpose());
    return {std::move(perm), sys.column_block(r, k), std::move(s), r, k};
}

/// Enumerates E^k for the non-pivot coordinates and reports every consistent
/// full vector; the visitor returns false to stop.
inline void naive_enumerate(const ResSdInstance& inst, const std::function<bool(const FpVector&)>& visit) {
    const auto f = inst.field();
    auto sys = naive_system(inst);
    const std::size_t r = sys.r, k = sys.k, z = inst.E.z();
    std::vector<std::size_t> idx(k, 0);
    std::vector<fp_t> x(inst.n);
    while (true) {
        for (std::size_t t = 0; t < k; ++t) x[r + t] = inst.E[idx[t]];
        bool ok = true;
        for (std::size_t i = 0; i < r && ok; ++i) {
            fp_t v = sys.s[i];
            for (std::size_t t = 0; t < k; ++t) v = f.sub(v, f.mul(sys.A(i, t), x[r + t]));
            x[i] = v;
            ok = inst.E.contains(v);
        }
        if (ok) {
            FpVector e(f, sys.perm.unapply<fp_t>(x));
            if (!visit(e)) return;
        }
        std::size_t t = 0;
        while (t < k && ++idx[t] == z) idx[t++] = 0;
        if (t == k) return;
    }
}

}  // namespace detail

/// First solution found by enumerating z^k guesses, or nullopt.
inline std::optional<FpVector> naive_solve(const ResSdInstance& inst) {
    std::optional<FpVector> found;
    detail::naive_enumerate(inst, [&](const FpVector& e) {
        found = e;
        return false;
    });
    return found;
}

/// Every solution of the instance, sorted.
inline std::vector<FpVector> naive_census(const ResSdInstance& inst) {
    std::vector<FpVector> all;
    detail::naive_enumerate(inst, [&](const FpVector& e) {
        all.push_back(e);
        return true;
    });
    std::sort(all.begin(), all.end());
    return all;
}

}  // namespace ressd

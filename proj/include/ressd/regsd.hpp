#pragma once

// ResSD -> regular syndrome decoding with light-regular solutions, plus the
// permutation-based and enumeration-based ISD solvers on the expanded code.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ressd/errors.hpp"
#include "ressd/ffmat.hpp"
#include "ressd/ressd.hpp"
#include "ressd/rng.hpp"

namespace ressd {

struct ExpandedInstance {
    std::shared_ptr<const ResSdInstance> base;
    FpMatrix H_tilde;  ///< (n + rows(H)) x zn, i.e. (2n-k) x zn for full-rank H
    FpVector s_tilde;  ///< length 2n-k
    std::size_t n = 0, k = 0, z = 0;

    std::size_t rows() const noexcept { return H_tilde.rows(); }
    std::size_t cols() const noexcept { return z * n; }
};

/// H~ = [U_n ; H^E], s~ = (1,...,1, s), column j·z+t of H^E equal to r_t·H_j.
inline ExpandedInstance expand(const ResSdInstance& inst) {
    const auto f = inst.field();
    const std::size_t n = inst.n, r = inst.H.rows(), z = inst.E.z();
    FpMatrix ht(f, n + r, z * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < z; ++t) ht.at(i, i * z + t) = 1;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t t = 0; t < z; ++t) ht.at(n + i, j * z + t) = f.mul(inst.E[t], inst.H(i, j));
    FpVector st(f, n + r);
    for (std::size_t i = 0; i < n; ++i) st.set(i, 1);
    for (std::size_t i = 0; i < r; ++i) st.set(n + i, inst.s[i]);
    return {std::make_shared<const ResSdInstance>(inst), std::move(ht), std::move(st), n, inst.k, z};
}

struct LightRegularVector {
    std::size_t n_blocks = 0, z = 0;
    std::vector<std::size_t> positions;  ///< per block, index of the single 1

    FpVector to_vector(const PrimeField& f) const {
        FpVector v(f, n_blocks * z);
        for (std::size_t i = 0; i < n_blocks; ++i) v.set(i * z + positions[i], 1);
        return v;
    }

    /// nullopt unless v has exactly one entry equal to 1 per block and zeros elsewhere.
    static std::optional<LightRegularVector> from_vector(const FpVector& v, std::size_t z) {
        if (z == 0 || v.size() % z) return std::nullopt;
        LightRegularVector out{v.size() / z, z, {}};
        for (std::size_t i = 0; i < out.n_blocks; ++i) {
            std::optional<std::size_t> pos;
            for (std::size_t t = 0; t < z; ++t) {
                const fp_t x = v[i * z + t];
                if (x == 0) continue;
                if (x != 1 || pos) return std::nullopt;
                pos = t;
            }
            if (!pos) return std::nullopt;
            out.positions.push_back(*pos);
        }
        return out;
    }

    friend bool operator==(const LightRegularVector&, const LightRegularVector&) = default;
};

inline LightRegularVector phi(const FpVector& e, const RestrictionSet& E) {
    LightRegularVector v{e.size(), E.z(), {}};
    for (std::size_t i = 0; i < e.size(); ++i) {
        auto idx = E.index_of(e[i]);
        if (!idx) throw EntryOutsideE("coordinate " + std::to_string(i) + " = " + std::to_string(e[i]));
        v.positions.push_back(*idx);
    }
    return v;
}

inline FpVector phi_inv(const LightRegularVector& v, const RestrictionSet& E) {
    if (v.z != E.z() || v.positions.size() != v.n_blocks) throw DimensionMismatch("light-regular shape");
    FpVector e(E.field(), v.n_blocks);
    for (std::size_t i = 0; i < v.n_blocks; ++i) {
        if (v.positions[i] >= E.z()) throw InvalidParameters("position out of block");
        e.set(i, E[v.positions[i]]);
    }
    return e;
}

/// Per block: one coordinate to section 1, one to section 2, the remaining z-2
/// (in order) to section 3. Permuted column order is
/// [sec1 of every block][sec2 of every block][sec3 block-major].
struct BiRegularPermutation {
    std::size_t n = 0, z = 0;
    std::vector<std::size_t> sec1, sec2;
    std::vector<std::vector<std::size_t>> sec3;

    /// Column j of H~·P is column image[j] of H~.
    Permutation to_permutation() const {
        std::vector<std::size_t> image;
        image.reserve(n * z);
        for (std::size_t i = 0; i < n; ++i) image.push_back(i * z + sec1[i]);
        for (std::size_t i = 0; i < n; ++i) image.push_back(i * z + sec2[i]);
        for (std::size_t i = 0; i < n; ++i)
            for (auto t : sec3[i]) image.push_back(i * z + t);
        return Permutation(std::move(image));
    }

    /// Permuted position of block coordinate (i, t).
    std::size_t permuted_index(std::size_t i, std::size_t t) const {
        if (sec1[i] == t) return i;
        if (sec2[i] == t) return n + i;
        for (std::size_t u = 0; u < sec3[i].size(); ++u)
            if (sec3[i][u] == t) return 2 * n + i * (z - 2) + u;
        throw InvalidParameters("coordinate not in block layout");
    }

    static BiRegularPermutation identity(std::size_t n, std::size_t z) {
        if (z < 2) throw ZTooSmall("bi-regular permutations need z >= 2");
        BiRegularPermutation b{n, z, std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 1), {}};
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> rest;
            for (std::size_t t = 2; t < z; ++t) rest.push_back(t);
            b.sec3.push_back(std::move(rest));
        }
        return b;
    }
};

inline BiRegularPermutation sample_biregular(std::size_t n, std::size_t z, Rng& rng) {
    if (z < 2) throw ZTooSmall("bi-regular permutations need z >= 2");
    BiRegularPermutation b{n, z, {}, {}, {}};
    std::vector<std::size_t> idx(z);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        rng.shuffle(idx.begin(), idx.end());
        b.sec1.push_back(idx[0]);
        b.sec2.push_back(idx[1]);
        b.sec3.emplace_back(idx.begin() + 2, idx.end());
    }
    return b;
}

inline BiRegularPermutation sample_biregular(std::size_t n, std::size_t z, std::uint64_t seed) {
    Rng rng(seed);
    return sample_biregular(n, z, rng);
}

/// Maps a candidate on the expanded code back to the base instance; nullopt when
/// it is not light-regular or fails the base parity check.
inline std::optional<FpVector> lift_expanded_candidate(const ExpandedInstance& exp, const FpVector& x) {
    auto lr = LightRegularVector::from_vector(x, exp.z);
    if (!lr) return std::nullopt;
    auto e = phi_inv(*lr, exp.base->E);
    if (!check_solution(*exp.base, e)) return std::nullopt;
    return e;
}

struct IsdRun {
    std::optional<FpVector> solution;
    std::uint64_t iterations = 0;
    std::uint64_t singular = 0;   ///< draws whose information set was not invertible
    std::uint64_t successes = 0;  ///< iterations that produced a valid solution
    double wall_ms = 0;
};

struct PrangeOptions {
    std::uint64_t max_iters = 1'000'000;
    bool stop_at_success = true;  ///< false: keep counting successes (rate measurement)
};

/// Permutation-based ISD. `sampler()` must return a BiRegularPermutation; the
/// information set is section 1 plus section 2 of blocks 0..n-k-1.
template <typename Sampler>
IsdRun prange_regular_with(const ExpandedInstance& exp, Sampler&& sampler, PrangeOptions opt = {}) {
    if (exp.z < 2) throw ZTooSmall("Prange on the expanded code needs z >= 2");
    const auto t0 = std::chrono::steady_clock::now();
    const auto& f = exp.H_tilde.field();
    const std::size_t r = exp.rows(), w = r + 1;
    IsdRun run;
    std::vector<fp_t> buf(r * w);
    std::vector<std::size_t> info(r);
    for (run.iterations = 0; run.iterations < opt.max_iters;) {
        ++run.iterations;
        const BiRegularPermutation b = sampler();
        for (std::size_t i = 0; i < exp.n; ++i) info[i] = i * exp.z + b.sec1[i];
        for (std::size_t i = 0; i < exp.n - exp.k; ++i) info[exp.n + i] = i * exp.z + b.sec2[i];
        for (std::size_t row = 0; row < r; ++row) {
            for (std::size_t c = 0; c < r; ++c) buf[row * w + c] = exp.H_tilde(row, info[c]);
            buf[row * w + r] = exp.s_tilde[row];
        }
        const auto piv = detail::gauss_jordan(f, buf, r, w, r);
        if (piv.size() < r) {
            ++run.singular;
            continue;
        }
        std::size_t weight = 0;
        for (std::size_t row = 0; row < r; ++row) weight += buf[row * w + r] != 0;
        if (weight != exp.n) continue;
        FpVector x(f, exp.cols());
        for (std::size_t row = 0; row < r; ++row) x.set(info[row], buf[row * w + r]);
        auto e = lift_expanded_candidate(exp, x);
        if (!e) continue;
        ++run.successes;
        if (!run.solution) run.solution = std::move(e);
        if (opt.stop_at_success) break;
    }
    run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

inline IsdRun prange_regular(const ExpandedInstance& exp, std::uint64_t seed, std::uint64_t max_iters) {
    Rng rng(seed);
    return prange_regular_with(exp, [&] { return sample_biregular(exp.n, exp.z, rng); },
                               PrangeOptions{max_iters, true});
}

struct EnumIsdOptions {
    std::uint64_t max_iters = 100'000;
    std::size_t list_cap = std::size_t{1} << 26;
};

struct EnumIsdRun : IsdRun {
    std::size_t l1_size = 0, l2_size = 0;  ///< sizes in the last non-singular iteration
    std::size_t merged = 0;                ///< pairs surviving the l-coordinate merge, last iteration
};

namespace detail {

/// One half-list entry: the chosen e2-columns (each set to 1) and their
/// contribution to the bottom l syndrome coordinates.
struct HalfEntry {
    std::vector<std::size_t> cols;
    std::vector<fp_t> synd;
};

/// Quasi-systematic system for one bi-regular layout.
struct QuasiSystem {
    std::size_t m = 0, ell = 0;
    std::vector<std::size_t> e2_cols;  ///< original H~ column for each e2 index
    FpMatrix H1;                       ///< m x |e2|
    FpMatrix H2;                       ///< l x |e2|
    std::vector<fp_t> s1, s2;
    std::vector<std::size_t> e1_cols;  ///< original H~ column for each e1 index
};

inline std::optional<QuasiSystem> quasi_systematic(const ExpandedInstance& exp, const BiRegularPermutation& b,
                                                   std::size_t ell) {
    const auto& f = exp.H_tilde.field();
    const std::size_t r = exp.rows(), m = r - ell, N = exp.cols();
    const auto perm = b.to_permutation();
    const std::size_t w = N + 1;
    std::vector<fp_t> buf(r * w);
    for (std::size_t row = 0; row < r; ++row) {
        for (std::size_t c = 0; c < N; ++c) buf[row * w + c] = exp.H_tilde(row, perm[c]);
        buf[row * w + N] = exp.s_tilde[row];
    }
    if (gauss_jordan(f, buf, r, w, m).size() < m) return std::nullopt;
    QuasiSystem q;
    q.m = m;
    q.ell = ell;
    for (std::size_t c = 0; c < m; ++c) q.e1_cols.push_back(perm[c]);
    for (std::size_t c = m; c < N; ++c) q.e2_cols.push_back(perm[c]);
    const std::size_t n2 = N - m;
    q.H1 = FpMatrix(f, m, n2);
    q.H2 = FpMatrix(f, ell, n2);
    for (std::size_t row = 0; row < m; ++row) {
        for (std::size_t c = 0; c < n2; ++c) q.H1.at(row, c) = buf[row * w + m + c];
        q.s1.push_back(buf[row * w + N]);
    }
    for (std::size_t row = 0; row < ell; ++row) {
        for (std::size_t c = 0; c < n2; ++c) q.H2.at(row, c) = buf[(m + row) * w + m + c];
        q.s2.push_back(buf[(m + row) * w + N]);
    }
    return q;
}

/// All choices of `weight` blocks in [first, first+count), each contributing one
/// section-3 coordinate. Indices are into the e2 part of the quasi-systematic
/// layout, whose section-3 offset is `sec3_offset`.
inline std::vector<HalfEntry> build_half_list(const QuasiSystem& q, std::size_t z, std::size_t first,
                                              std::size_t count, std::size_t weight, std::size_t sec3_offset,
                                              std::size_t cap) {
    std::vector<HalfEntry> out;
    if (weight > count) return out;
    const auto& f = q.H2.field();
    const std::size_t width = z - 2;
    if (weight > 0 && width == 0) return out;
    std::vector<std::size_t> blocks(weight), choice(weight, 0);
    std::iota(blocks.begin(), blocks.end(), first);
    while (true) {
        std::fill(choice.begin(), choice.end(), 0);
        while (true) {
            if (out.size() >= cap) throw ListCapExceeded("half list exceeds " + std::to_string(cap) + " entries");
            HalfEntry h;
            h.synd.assign(q.ell, 0);
            for (std::size_t u = 0; u < weight; ++u) {
                const std::size_t col = sec3_offset + blocks[u] * width + choice[u];
                h.cols.push_back(col);
                for (std::size_t row = 0; row < q.ell; ++row) h.synd[row] = f.add(h.synd[row], q.H2(row, col));
            }
            out.push_back(std::move(h));
            std::size_t t = 0;
            while (t < weight && ++choice[t] == width) choice[t++] = 0;
            if (t == weight) break;
        }
        // next combination of blocks
        std::size_t i = weight;
        while (i > 0 && blocks[i - 1] == first + count - weight + i - 1) --i;
        if (i == 0) break;
        ++blocks[i - 1];
        for (std::size_t j = i; j < weight; ++j) blocks[j] = blocks[j - 1] + 1;
    }
    return out;
}

struct SyndHash {
    std::size_t operator()(const std::vector<fp_t>& v) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : v) h = (h ^ x) * 0x100000001b3ULL;
        return static_cast<std::size_t>(h);
    }
};

/// Pairs (i, j) with L1[i].synd + L2[j].synd = s2.
inline std::vector<std::pair<std::size_t, std::size_t>> merge_lists(const std::vector<HalfEntry>& l1,
                                                                    const std::vector<HalfEntry>& l2,
                                                                    const std::vector<fp_t>& s2,
                                                                    const PrimeField& f) {
    std::unordered_multimap<std::vector<fp_t>, std::size_t, SyndHash> table;
    table.reserve(l1.size());
    for (std::size_t i = 0; i < l1.size(); ++i) table.emplace(l1[i].synd, i);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<fp_t> need(s2.size());
    for (std::size_t j = 0; j < l2.size(); ++j) {
        for (std::size_t row = 0; row < s2.size(); ++row) need[row] = f.sub(s2[row], l2[j].synd[row]);
        auto [lo, hi] = table.equal_range(need);
        for (auto it = lo; it != hi; ++it) out.emplace_back(it->second, j);
    }
    return out;
}

}  // namespace detail

/// Enumeration-based ISD on the expanded code. Each iteration draws a
/// bi-regular layout, pivots the first m = 2n-k-l permuted columns, builds the
/// half lists over section 3 of blocks [0, ceil(n/2)) and [ceil(n/2), n) with
/// weights ceil(w/2) and floor(w/2), merges on the bottom l syndrome
/// coordinates and keeps candidates whose e1 has weight n - w.
inline EnumIsdRun enum_isd(const ExpandedInstance& exp, std::size_t w_enum, std::size_t ell, std::uint64_t seed,
                           EnumIsdOptions opt = {}) {
    if (exp.z < 2) throw ZTooSmall("enumeration ISD needs z >= 2");
    if (w_enum > exp.n) throw InvalidParameters("w_enum > n");
    if (ell > exp.n - exp.k)
        throw InvalidParameters("l = " + std::to_string(ell) + " exceeds n - k = " + std::to_string(exp.n - exp.k));
    const auto t0 = std::chrono::steady_clock::now();
    const auto& f = exp.H_tilde.field();
    const std::size_t n = exp.n, n1 = (n + 1) / 2, n2 = n / 2;
    const std::size_t w1 = (w_enum + 1) / 2, w2 = w_enum / 2;
    const std::size_t m = exp.rows() - ell;
    // e2 = [sec2 of blocks m-n..n-1][sec3 block-major]
    const std::size_t sec3_offset = 2 * n - m;
    Rng rng(seed);
    EnumIsdRun run;
    for (run.iterations = 0; run.iterations < opt.max_iters;) {
        ++run.iterations;
        const auto b = sample_biregular(n, exp.z, rng);
        auto q = detail::quasi_systematic(exp, b, ell);
        if (!q) {
            ++run.singular;
            continue;
        }
        auto l1 = detail::build_half_list(*q, exp.z, 0, n1, w1, sec3_offset, opt.list_cap);
        auto l2 = detail::build_half_list(*q, exp.z, n1, n2, w2, sec3_offset, opt.list_cap);
        run.l1_size = l1.size();
        run.l2_size = l2.size();
        const auto pairs = detail::merge_lists(l1, l2, q->s2, f);
        run.merged = pairs.size();
        for (const auto& [i, j] : pairs) {
            std::vector<fp_t> e1 = q->s1;
            for (const auto* h : {&l1[i], &l2[j]})
                for (auto c : h->cols)
                    for (std::size_t row = 0; row < m; ++row) e1[row] = f.sub(e1[row], q->H1(row, c));
            std::size_t weight = 0;
            for (auto x : e1) weight += x != 0;
            if (weight != n - w_enum) continue;
            FpVector x(f, exp.cols());
            for (std::size_t row = 0; row < m; ++row) x.set(q->e1_cols[row], e1[row]);
            for (const auto* h : {&l1[i], &l2[j]})
                for (auto c : h->cols) x.set(q->e2_cols[c], 1);
            auto e = lift_expanded_candidate(exp, x);
            if (!e) continue;
            ++run.successes;
            run.solution = std::move(e);
            break;
        }
        if (run.solution) break;
    }
    run.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

}  // namespace ressd

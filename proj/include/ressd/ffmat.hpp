#pragma once

// Dense linear algebra over prime fields F_p with p < 2^31.

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ressd/errors.hpp"

namespace ressd {

using fp_t = std::uint32_t;

class PrimeField {
public:
    PrimeField() = default;

    explicit PrimeField(std::uint64_t p) {
        if (p < 2 || p >= (std::uint64_t{1} << 31))
            throw InvalidParameters("modulus must satisfy 2 <= p < 2^31, got " + std::to_string(p));
        if (!is_prime(p)) throw NotPrime(std::to_string(p) + " is not prime");
        p_ = static_cast<fp_t>(p);
    }

    static constexpr bool is_prime(std::uint64_t p) noexcept {
        if (p < 2) return false;
        if (p % 2 == 0) return p == 2;
        for (std::uint64_t d = 3; d * d <= p; d += 2)
            if (p % d == 0) return false;
        return true;
    }

    fp_t p() const noexcept { return p_; }

    fp_t add(fp_t a, fp_t b) const noexcept {
        const std::uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    fp_t sub(fp_t a, fp_t b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    fp_t neg(fp_t a) const noexcept { return a == 0 ? 0 : p_ - a; }
    fp_t mul(fp_t a, fp_t b) const noexcept {
        return static_cast<fp_t>(static_cast<std::uint64_t>(a) * b % p_);
    }
    fp_t pow(fp_t a, std::uint64_t e) const noexcept {
        fp_t r = 1 % p_;
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    fp_t inv(fp_t a) const {
        if (a % p_ == 0) throw Singular("inverse of zero in F_" + std::to_string(p_));
        return pow(a, p_ - 2);
    }
    /// Canonical representative of an arbitrary integer.
    fp_t from_int(std::int64_t x) const noexcept {
        std::int64_t r = x % static_cast<std::int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<fp_t>(r);
    }
    bool contains(std::int64_t x) const noexcept { return x >= 0 && x < static_cast<std::int64_t>(p_); }

    friend bool operator==(const PrimeField&, const PrimeField&) = default;

private:
    fp_t p_ = 2;
};

inline void require_same_field(const PrimeField& a, const PrimeField& b) {
    if (!(a == b))
        throw FieldMismatch("F_" + std::to_string(a.p()) + " vs F_" + std::to_string(b.p()));
}

class FpVector {
public:
    FpVector() = default;
    FpVector(PrimeField field, std::size_t n) : field_(field), v_(n, 0) {}

    /// Entries must already be canonical.
    FpVector(PrimeField field, std::vector<fp_t> entries) : field_(field), v_(std::move(entries)) {
        for (auto x : v_)
            if (x >= field_.p()) throw InvalidParameters("non-canonical entry " + std::to_string(x));
    }
    FpVector(PrimeField field, std::initializer_list<fp_t> entries)
        : FpVector(field, std::vector<fp_t>(entries)) {}

    /// Reduces arbitrary integers modulo p.
    template <typename Int>
    static FpVector from_integers(PrimeField field, std::span<const Int> xs) {
        FpVector out(field, xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) out.v_[i] = field.from_int(static_cast<std::int64_t>(xs[i]));
        return out;
    }

    const PrimeField& field() const noexcept { return field_; }
    std::size_t size() const noexcept { return v_.size(); }
    fp_t operator[](std::size_t i) const { return v_[i]; }
    void set(std::size_t i, fp_t x) { v_[i] = x % field_.p(); }
    std::span<const fp_t> entries() const noexcept { return v_; }
    const std::vector<fp_t>& raw() const noexcept { return v_; }

    std::size_t weight() const noexcept {
        return static_cast<std::size_t>(std::count_if(v_.begin(), v_.end(), [](fp_t x) { return x != 0; }));
    }
    bool is_zero() const noexcept { return weight() == 0; }

    /// Z(v): the integer lift with representatives in {0,...,p-1}.
    std::vector<std::int64_t> lift() const { return {v_.begin(), v_.end()}; }

    friend bool operator==(const FpVector&, const FpVector&) = default;
    friend bool operator<(const FpVector& a, const FpVector& b) { return a.v_ < b.v_; }

private:
    PrimeField field_;
    std::vector<fp_t> v_;
};

inline FpVector operator+(const FpVector& a, const FpVector& b) {
    require_same_field(a.field(), b.field());
    if (a.size() != b.size()) throw DimensionMismatch("vector add");
    FpVector out(a.field(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().add(a[i], b[i]));
    return out;
}

inline FpVector operator-(const FpVector& a, const FpVector& b) {
    require_same_field(a.field(), b.field());
    if (a.size() != b.size()) throw DimensionMismatch("vector sub");
    FpVector out(a.field(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().sub(a[i], b[i]));
    return out;
}

inline FpVector scale(const FpVector& a, fp_t c) {
    FpVector out(a.field(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a.field().mul(a[i], c));
    return out;
}

class FpMatrix {
public:
    FpMatrix() = default;
    FpMatrix(PrimeField field, std::size_t rows, std::size_t cols)
        : field_(field), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    FpMatrix(PrimeField field, std::size_t rows, std::size_t cols, std::vector<fp_t> entries)
        : field_(field), rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != rows * cols) throw DimensionMismatch("entry count does not match shape");
        for (auto x : a_)
            if (x >= field_.p()) throw InvalidParameters("non-canonical entry " + std::to_string(x));
    }

    FpMatrix(PrimeField field, std::initializer_list<std::initializer_list<fp_t>> rows) : field_(field) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
            for (auto x : r) {
                if (x >= field_.p()) throw InvalidParameters("non-canonical entry");
                a_.push_back(x);
            }
        }
    }

    static FpMatrix identity(PrimeField field, std::size_t n) {
        FpMatrix m(field, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1 % field.p();
        return m;
    }

    const PrimeField& field() const noexcept { return field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    fp_t operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    fp_t& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    std::span<const fp_t> row(std::size_t i) const { return {a_.data() + i * cols_, cols_}; }
    std::span<fp_t> row_mut(std::size_t i) { return {a_.data() + i * cols_, cols_}; }
    const std::vector<fp_t>& raw() const noexcept { return a_; }

    FpVector row_vector(std::size_t i) const {
        return FpVector(field_, std::vector<fp_t>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_));
    }
    FpVector column(std::size_t j) const {
        FpVector c(field_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) c.set(i, (*this)(i, j));
        return c;
    }

    FpMatrix transpose() const {
        FpMatrix t(field_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = (*this)(i, j);
        return t;
    }

    /// Columns [first, first + count).
    FpMatrix column_block(std::size_t first, std::size_t count) const {
        FpMatrix out(field_, rows_, count);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < count; ++j) out.at(i, j) = (*this)(i, first + j);
        return out;
    }

    /// Rows [first, first + count).
    FpMatrix row_block(std::size_t first, std::size_t count) const {
        FpMatrix out(field_, count, cols_);
        std::copy(a_.begin() + first * cols_, a_.begin() + (first + count) * cols_, out.a_.begin());
        return out;
    }

    bool is_zero() const noexcept {
        return std::all_of(a_.begin(), a_.end(), [](fp_t x) { return x == 0; });
    }

    friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

private:
    PrimeField field_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<fp_t> a_;
};

/// Column permutation stored as an index array: column j of M·P is column
/// image[j] of M.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
        std::vector<bool> seen(image_.size(), false);
        for (auto x : image_) {
            if (x >= image_.size() || seen[x]) throw InvalidParameters("not a permutation");
            seen[x] = true;
        }
    }
    static Permutation identity(std::size_t n) {
        std::vector<std::size_t> id(n);
        std::iota(id.begin(), id.end(), std::size_t{0});
        return Permutation(std::move(id));
    }

    std::size_t size() const noexcept { return image_.size(); }
    std::size_t operator[](std::size_t j) const { return image_[j]; }
    const std::vector<std::size_t>& image() const noexcept { return image_; }
    bool is_identity() const noexcept {
        for (std::size_t j = 0; j < image_.size(); ++j)
            if (image_[j] != j) return false;
        return true;
    }

    Permutation inverse() const {
        std::vector<std::size_t> inv(image_.size());
        for (std::size_t j = 0; j < image_.size(); ++j) inv[image_[j]] = j;
        return Permutation(std::move(inv));
    }

    /// M·P.
    FpMatrix apply_columns(const FpMatrix& m) const {
        if (m.cols() != size()) throw DimensionMismatch("permutation size vs columns");
        FpMatrix out(m.field(), m.rows(), m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < size(); ++j) out.at(i, j) = m(i, image_[j]);
        return out;
    }

    /// x·P for a row vector: out[j] = x[image[j]].
    template <typename T>
    std::vector<T> apply(std::span<const T> x) const {
        std::vector<T> out(x.size());
        for (std::size_t j = 0; j < size(); ++j) out[j] = x[image_[j]];
        return out;
    }

    /// x·P^{-1}: out[image[j]] = x[j].
    template <typename T>
    std::vector<T> unapply(std::span<const T> x) const {
        std::vector<T> out(x.size());
        for (std::size_t j = 0; j < size(); ++j) out[image_[j]] = x[j];
        return out;
    }

    FpMatrix materialize(PrimeField field) const {
        FpMatrix m(field, size(), size());
        for (std::size_t j = 0; j < size(); ++j) m.at(image_[j], j) = 1;
        return m;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> image_;
};

inline FpMatrix mat_mul(const FpMatrix& a, const FpMatrix& b) {
    require_same_field(a.field(), b.field());
    if (a.cols() != b.rows())
        throw DimensionMismatch(std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    const auto p = static_cast<std::uint64_t>(a.field().p());
    FpMatrix c(a.field(), a.rows(), b.cols());
    std::vector<std::uint64_t> acc(b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t t = 0; t < a.cols(); ++t) {
            const std::uint64_t x = a(i, t);
            if (!x) continue;
            const auto brow = b.row(t);
            for (std::size_t j = 0; j < b.cols(); ++j) acc[j] = (acc[j] + x * brow[j]) % p;
        }
        for (std::size_t j = 0; j < b.cols(); ++j) c.at(i, j) = static_cast<fp_t>(acc[j]);
    }
    return c;
}

/// Row vector times matrix: x·M.
inline FpVector vec_mat(const FpVector& x, const FpMatrix& m) {
    require_same_field(x.field(), m.field());
    if (x.size() != m.rows()) throw DimensionMismatch("vector length vs matrix rows");
    const auto p = static_cast<std::uint64_t>(m.field().p());
    std::vector<std::uint64_t> acc(m.cols(), 0);
    for (std::size_t t = 0; t < m.rows(); ++t) {
        const std::uint64_t xt = x[t];
        if (!xt) continue;
        const auto r = m.row(t);
        for (std::size_t j = 0; j < m.cols(); ++j) acc[j] = (acc[j] + xt * r[j]) % p;
    }
    FpVector out(m.field(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) out.set(j, static_cast<fp_t>(acc[j]));
    return out;
}

/// x·H^T, the syndrome of x under parity-check matrix H.
inline FpVector syndrome(const FpVector& x, const FpMatrix& h) {
    require_same_field(x.field(), h.field());
    if (x.size() != h.cols()) throw DimensionMismatch("vector length vs parity-check columns");
    const auto p = static_cast<std::uint64_t>(h.field().p());
    FpVector s(h.field(), h.rows());
    for (std::size_t i = 0; i < h.rows(); ++i) {
        std::uint64_t acc = 0;
        const auto r = h.row(i);
        for (std::size_t j = 0; j < h.cols(); ++j) acc = (acc + static_cast<std::uint64_t>(x[j]) * r[j]) % p;
        s.set(i, static_cast<fp_t>(acc));
    }
    return s;
}

namespace detail {

/// In-place Gauss-Jordan on a row-major buffer; pivots are searched only in the
/// first `pivot_cols` columns but row operations span all `cols`. Returns pivot
/// columns in increasing order.
inline std::vector<std::size_t> gauss_jordan(const PrimeField& f, std::vector<fp_t>& a, std::size_t rows,
                                             std::size_t cols, std::size_t pivot_cols) {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < pivot_cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv * cols + c] == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            std::swap_ranges(a.begin() + piv * cols, a.begin() + (piv + 1) * cols, a.begin() + r * cols);
        const fp_t inv = f.inv(a[r * cols + c]);
        for (std::size_t j = c; j < cols; ++j) a[r * cols + j] = f.mul(a[r * cols + j], inv);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r) continue;
            const fp_t factor = a[i * cols + c];
            if (!factor) continue;
            for (std::size_t j = c; j < cols; ++j)
                a[i * cols + j] = f.sub(a[i * cols + j], f.mul(factor, a[r * cols + j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace detail

struct RrefResult {
    FpMatrix reduced;                 ///< R = T·A
    std::vector<std::size_t> pivots;  ///< increasing
    std::size_t rank = 0;
    FpMatrix transform;               ///< invertible T
};

inline RrefResult rref(const FpMatrix& a) {
    const std::size_t m = a.rows(), n = a.cols(), w = n + m;
    std::vector<fp_t> buf(m * w, 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), buf.begin() + i * w);
        buf[i * w + n + i] = 1 % a.field().p();
    }
    auto pivots = detail::gauss_jordan(a.field(), buf, m, w, n);
    FpMatrix r(a.field(), m, n), t(a.field(), m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) r.at(i, j) = buf[i * w + j];
        for (std::size_t j = 0; j < m; ++j) t.at(i, j) = buf[i * w + n + j];
    }
    const auto rank = pivots.size();
    return {std::move(r), std::move(pivots), rank, std::move(t)};
}

inline std::size_t rank(const FpMatrix& a) {
    std::vector<fp_t> buf = a.raw();
    return detail::gauss_jordan(a.field(), buf, a.rows(), a.cols(), a.cols()).size();
}

/// Some y with y·H^T = s (free variables set to zero), or nullopt.
inline std::optional<FpVector> solve_particular(const FpMatrix& h, const FpVector& s) {
    require_same_field(h.field(), s.field());
    if (h.rows() != s.size()) throw DimensionMismatch("syndrome length vs parity-check rows");
    const std::size_t m = h.rows(), n = h.cols(), w = n + 1;
    std::vector<fp_t> buf(m * w);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(h.row(i).begin(), h.row(i).end(), buf.begin() + i * w);
        buf[i * w + n] = s[i];
    }
    const auto pivots = detail::gauss_jordan(h.field(), buf, m, w, n);
    for (std::size_t i = pivots.size(); i < m; ++i)
        if (buf[i * w + n] != 0) return std::nullopt;
    FpVector y(h.field(), n);
    for (std::size_t i = 0; i < pivots.size(); ++i) y.set(pivots[i], buf[i * w + n]);
    return y;
}

struct SystematicForm {
    FpMatrix generator;  ///< (I_k | R)
    Permutation perm;    ///< generator = rref(G·P)
};

inline SystematicForm systematic_form(const FpMatrix& g) {
    auto r = rref(g);
    if (r.rank < g.rows())
        throw RankDeficient("rank " + std::to_string(r.rank) + " < " + std::to_string(g.rows()) + " rows");
    std::vector<std::size_t> image = r.pivots;
    std::vector<bool> is_pivot(g.cols(), false);
    for (auto c : r.pivots) is_pivot[c] = true;
    for (std::size_t c = 0; c < g.cols(); ++c)
        if (!is_pivot[c]) image.push_back(c);
    Permutation perm(std::move(image));
    return {perm.apply_columns(r.reduced), std::move(perm)};
}

inline FpMatrix invert(const FpMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("invert needs a square matrix");
    auto r = rref(a);
    if (r.rank < a.rows()) throw Singular("matrix of rank " + std::to_string(r.rank));
    return std::move(r.transform);
}

/// Rows form a basis of {x : x·H^T = 0}; row t is e_f - sum R[i][f] e_{pivot_i}
/// for the t-th free column f.
inline FpMatrix kernel_basis(const FpMatrix& h) {
    auto r = rref(h);
    const auto& f = h.field();
    std::vector<bool> is_pivot(h.cols(), false);
    for (auto c : r.pivots) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < h.cols(); ++c)
        if (!is_pivot[c]) free_cols.push_back(c);
    FpMatrix k(f, free_cols.size(), h.cols());
    for (std::size_t t = 0; t < free_cols.size(); ++t) {
        k.at(t, free_cols[t]) = 1 % f.p();
        for (std::size_t i = 0; i < r.pivots.size(); ++i)
            k.at(t, r.pivots[i]) = f.neg(r.reduced(i, free_cols[t]));
    }
    return k;
}

}  // namespace ressd

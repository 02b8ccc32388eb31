#pragma once

// Closed-form attack-cost models (log2 domain) and regeneration of the cost
// tables with a golden-value diff.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ressd/lattice/heuristics.hpp"
#include "ressd/reductions.hpp"
#include "ressd/ressd.hpp"

namespace ressd {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class CorrectionPolicy { Auto, None, Table3Style, Table6Style };

inline const char* to_string(CorrectionPolicy c) {
    switch (c) {
        case CorrectionPolicy::Auto: return "auto";
        case CorrectionPolicy::None: return "none";
        case CorrectionPolicy::Table3Style: return "table3";
        case CorrectionPolicy::Table6Style: return "table6";
    }
    return "?";
}

struct CostModelConfig {
    double sieve_time_coeff = 0.292;
    double sieve_mem_coeff = 0.208;
    double batch_time_coeff = 0.234;
    double batch_min_coeff = 0.058;
    /// Auto: Table3Style for Batch-CVP, Table6Style for List-CVP.
    CorrectionPolicy correction = CorrectionPolicy::Auto;
    double table3_correction = 1.3;  ///< calibrated against the published totals, not derived
    double table6_repeat_log2 = 2.0;  ///< each of the three x4 repetitions
    /// Permutation ISD per-iteration cost (z n)^c.
    double prange_poly_exponent = 2.0;

    bool overridden() const {
        const CostModelConfig d{};
        return sieve_time_coeff != d.sieve_time_coeff || sieve_mem_coeff != d.sieve_mem_coeff ||
               batch_time_coeff != d.batch_time_coeff || batch_min_coeff != d.batch_min_coeff ||
               table3_correction != d.table3_correction || table6_repeat_log2 != d.table6_repeat_log2 ||
               prange_poly_exponent != d.prange_poly_exponent;
    }
};

struct AttackEstimate {
    std::string attack;
    std::vector<std::pair<std::string, double>> params;
    double log2_time = 0;
    double log2_memory = 0;
    double log2_success = 0;
    std::vector<std::pair<std::string, double>> breakdown;
    std::vector<std::string> notes;

    std::optional<double> get(const std::string& key) const {
        for (const auto& [k, v] : breakdown)
            if (k == key) return v;
        for (const auto& [k, v] : params)
            if (k == key) return v;
        return std::nullopt;
    }
};

// ---------------------------------------------------------------------------
// log-domain helpers

inline double log2_binom(double n, double k) {
    if (k < 0 || k > n) return kNegInf;
    return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::numbers::ln2;
}

inline double log2_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

inline double log2_sum(const std::vector<double>& xs) {
    double acc = kNegInf;
    for (double x : xs) acc = log2_add(acc, x);
    return acc;
}

// ---------------------------------------------------------------------------
// Information set decoding on the expanded instance

inline double prange_success_log2(double n, double k, double z) {
    if (z < 2) throw InvalidParameters("Prange model needs z >= 2");
    return -k + n * std::log2(2.0 / z);
}

/// Permutation-based ISD: inverse success probability times (z n)^c per iteration.
inline AttackEstimate prange_cost(std::size_t n, std::size_t k, std::size_t z, const CostModelConfig& cfg = {}) {
    AttackEstimate e;
    e.attack = "regsd-prange";
    e.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"z", static_cast<double>(z)}};
    const double s = prange_success_log2(static_cast<double>(n), static_cast<double>(k), static_cast<double>(z));
    const double poly = cfg.prange_poly_exponent * std::log2(static_cast<double>(z * n));
    e.log2_success = s;
    e.log2_time = poly - s;
    e.log2_memory = 2 * std::log2(static_cast<double>(z * n));
    e.breakdown = {{"iterations", -s}, {"per_iteration", poly}};
    e.notes.push_back("per-iteration factor (z n)^c is calibrated, c = " + std::to_string(cfg.prange_poly_exponent));
    return e;
}

/// Enumeration-based ISD with the ceil/floor split n1 = ceil(n/2), w1 = ceil(w/2).
inline AttackEstimate enum_isd_cost(std::size_t n, std::size_t k, std::uint64_t q, std::size_t z, std::size_t w,
                                    std::size_t ell) {
    if (z < 2) throw InvalidParameters("z must be >= 2");
    if (k >= n) throw InvalidParameters("need k < n");
    if (w > n) throw InvalidParameters("w_enum exceeds n");
    if (ell < 1 || ell > n - k) throw InvalidParameters("ell must lie in [1, n - k]");
    const double n1 = static_cast<double>((n + 1) / 2), n2 = static_cast<double>(n / 2);
    const double w1 = static_cast<double>((w + 1) / 2), w2 = static_cast<double>(w / 2);
    const double nn = static_cast<double>(n), ww = static_cast<double>(w), zz = static_cast<double>(z);
    const double lz2 = z > 2 ? std::log2(zz - 2) : kNegInf;
    auto list_size = [&](double nh, double wh) {
        if (wh > nh) return kNegInf;
        if (wh == 0) return 0.0;
        return z > 2 ? log2_binom(nh, wh) + wh * lz2 : kNegInf;
    };
    const double L1 = list_size(n1, w1), L2 = list_size(n2, w2);
    const double L = L1 + L2 - static_cast<double>(ell) * std::log2(static_cast<double>(q));
    const double T0 = std::log2(nn) + std::max({L1, L2, L});
    double P0 = log2_binom(n1, w1) + log2_binom(n2, w2) + (nn - ww) * std::log2(2.0 / zz);
    if (w > 0) P0 += ww * (z > 2 ? std::log2((zz - 2) / zz) : kNegInf);
    const double f = static_cast<double>(k + ell);
    double P;
    std::vector<double> terms;
    if (f >= n2) {
        const double P2 = -(n2 - w2);
        const double m = f - n2;
        for (double i = 0; i <= m; ++i)
            terms.push_back(log2_binom(m, i) + log2_binom(n1 - m, n1 - w1 - i) - log2_binom(n1, w1) - i);
        P = log2_sum(terms) + P2;
    } else {
        for (double i = 0; i <= f; ++i)
            terms.push_back(log2_binom(f, i) + log2_binom(n2 - f, n2 - w2 - i) - log2_binom(n2, w2) - i);
        P = log2_sum(terms);
    }
    AttackEstimate e;
    e.attack = "regsd-enum";
    e.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"q", static_cast<double>(q)}, {"z", static_cast<double>(z)}, {"w_enum", static_cast<double>(w)}, {"ell", static_cast<double>(ell)}};
    const bool feasible = L1 != kNegInf && L2 != kNegInf && P0 != kNegInf && P != kNegInf;
    e.log2_time = feasible ? T0 - P0 - P : std::numeric_limits<double>::infinity();
    e.log2_memory = L1;
    e.log2_success = P0 + P;
    e.breakdown = {{"L1", L1}, {"L2", L2}, {"L", L}, {"T0", T0}, {"P0", P0}, {"P", P}};
    return e;
}

/// Grid search w in [0, n], ell in [1, n - k]; first minimum in (w, ell) order.
inline AttackEstimate optimize_enum_isd(std::size_t n, std::size_t k, std::uint64_t q, std::size_t z) {
    std::optional<AttackEstimate> best;
    std::size_t points = 0;
    for (std::size_t w = 0; w <= n; ++w)
        for (std::size_t ell = 1; ell <= n - k; ++ell) {
            auto e = enum_isd_cost(n, k, q, z, w, ell);
            ++points;
            if (!best || e.log2_time < best->log2_time) best = std::move(e);
        }
    best->breakdown.emplace_back("grid_points", static_cast<double>(points));
    best->notes.push_back("grid: w in [0, n], ell in [1, n - k], step 1");
    return *best;
}

/// O(n^2 z^k): enumerate the k information coordinates.
inline AttackEstimate naive_cost(std::size_t n, std::size_t k, std::size_t z) {
    AttackEstimate e;
    e.attack = "naive";
    e.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"z", static_cast<double>(z)}};
    const double search = static_cast<double>(k) * std::log2(static_cast<double>(std::max<std::size_t>(z, 1)));
    const double ln = std::log2(static_cast<double>(n));
    e.log2_time = search + 2 * ln;
    e.log2_memory = 0;
    e.breakdown = {{"search", search}, {"poly", 2 * ln}, {"time_linear_poly", search + ln}};
    e.notes.push_back("memory: poly(n)");
    e.notes.push_back("time_linear_poly uses an O(n) per-candidate factor (the attack-summary convention)");
    return e;
}

// ---------------------------------------------------------------------------
// Hybrid Batch-CVP

inline std::size_t batch_guess_blocks(std::size_t n, std::size_t z_prime, double coeff) {
    if (z_prime <= 1) return 0;
    const double g = std::ceil(coeff * static_cast<double>(z_prime * n) * std::numbers::ln2 /
                               std::log(static_cast<double>(z_prime)) - 1e-9);
    return std::min<std::size_t>(static_cast<std::size_t>(g), n);
}

inline AttackEstimate hybrid_batchcvp_estimate(std::size_t n, std::size_t k, std::uint64_t p, std::size_t z,
                                               std::size_t z_prime, const CostModelConfig& cfg = {}) {
    if (z_prime < 1 || z_prime > z) throw BadZPrime("need 1 <= z' <= z");
    const double nn = static_cast<double>(n);
    const double trunc = nn * std::log2(static_cast<double>(z_prime) / static_cast<double>(z));
    const std::size_t g = batch_guess_blocks(n, z_prime, cfg.batch_min_coeff);
    const double guesses = static_cast<double>(g) * std::log2(static_cast<double>(z_prime));
    const double dim = static_cast<double>(z_prime * (n - g));
    const double batch = cfg.batch_time_coeff * dim + guesses;
    double corr = 0;
    auto pol = cfg.correction == CorrectionPolicy::Auto ? CorrectionPolicy::Table3Style : cfg.correction;
    if (pol == CorrectionPolicy::Table3Style) corr = cfg.table3_correction;
    if (pol == CorrectionPolicy::Table6Style) corr = 3 * cfg.table6_repeat_log2;
    AttackEstimate e;
    e.attack = "hybrid-batchcvp";
    e.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"p", static_cast<double>(p)}, {"z", static_cast<double>(z)}, {"zprime", static_cast<double>(z_prime)}, {"g", static_cast<double>(g)}};
    e.log2_success = trunc;
    e.log2_time = batch - trunc + corr;
    e.log2_memory = cfg.sieve_mem_coeff * dim;
    e.breakdown = {{"trunc", trunc}, {"g", static_cast<double>(g)}, {"guesses", guesses}, {"dim", dim},
                   {"batch", batch}, {"correction", corr}};
    e.notes.push_back(std::string("correction policy ") + to_string(pol));
    if (pol == CorrectionPolicy::Table3Style) e.notes.push_back("table3 correction is calibrated, not derived");
    if (cfg.overridden()) e.notes.push_back("cost coefficients overridden");
    return e;
}

// ---------------------------------------------------------------------------
// Enumeration cost and Hybrid List-CVP

struct EnumCost {
    double sieve = 0;     ///< coeff · n
    double pruned = 0;    ///< log2 of n · sum_i Vol(B(i, R sqrt(i/n))) / GSA prefix
    double unpruned = 0;  ///< same with Vol(B(i, R)), i.e. full enumeration tree
    double total = 0;     ///< log2(2^sieve + 2^pruned)
};

/// o(n) terms dropped. R = 0 gives an empty sum, reported as 2^0.
inline EnumCost listcvp_enum_cost(std::size_t n, double radius, double log2_volume, double sieve_coeff = 0.292) {
    if (n < 2) throw InvalidParameters("need n >= 2");
    if (radius < 0) throw InvalidParameters("negative radius");
    const double nn = static_cast<double>(n);
    const double ld = std::log2(gsa_delta(nn));
    std::vector<double> pr, up;
    for (std::size_t i = 1; i <= n; ++i) {
        const double di = static_cast<double>(i);
        const double denom = di * (nn - di) * ld + di / nn * log2_volume;
        pr.push_back(log2_ball_volume(di, radius * std::sqrt(di / nn)) - denom);
        up.push_back(log2_ball_volume(di, radius) - denom);
    }
    EnumCost c;
    c.sieve = sieve_coeff * nn;
    if (radius == 0) {
        c.pruned = c.unpruned = 0;
        c.total = c.sieve;
        return c;
    }
    c.pruned = std::log2(nn) + log2_sum(pr);
    c.unpruned = std::log2(nn) + log2_sum(up);
    c.total = log2_add(c.sieve, c.pruned);
    return c;
}

/// Truncated CROSS-style set {w^0, ..., w^(z'-1)} as integers.
inline std::vector<std::int64_t> truncated_values(const RestrictionSet& E, std::size_t z_prime) {
    const auto w = subgroup_generator(E);
    auto seq = power_sequence(E.field(), w, z_prime);
    return {seq.begin(), seq.end()};
}

inline AttackEstimate hybrid_listcvp_estimate(std::size_t n, std::size_t k, std::uint64_t p, const RestrictionSet& E,
                                              std::size_t z_prime, const CostModelConfig& cfg = {}) {
    const std::size_t z = E.z();
    if (z_prime < 1 || z_prime > z) throw BadZPrime("need 1 <= z' <= z");
    const double nn = static_cast<double>(n);
    const auto values = truncated_values(E, z_prime);
    const double trunc = nn * std::log2(static_cast<double>(z_prime) / static_cast<double>(z));
    const double mu = mean_center(values);
    const double R = median_radius(values, n);
    const double log2vol = static_cast<double>(n - k) * std::log2(static_cast<double>(p));
    const auto deg = classify_degeneracy(n, k, p, R);
    const double gh = R == 0 ? kNegInf : gh_count_log2(nn, R, log2vol);
    const auto ec = listcvp_enum_cost(n, R, log2vol, cfg.sieve_time_coeff);
    const bool pure = R == 0 || gh < 0;
    auto pol = cfg.correction == CorrectionPolicy::Auto ? CorrectionPolicy::Table6Style : cfg.correction;
    double solve = ec.total, corr = 0;
    if (pol == CorrectionPolicy::Table6Style) {
        // x4 truncation retries, x4 randomized median repeats; pruned enumeration
        // is repeated x4 as well, unless sieving alone settles a unique target
        corr = 2 * cfg.table6_repeat_log2;
        solve = pure ? ec.sieve : log2_add(ec.sieve, ec.pruned + cfg.table6_repeat_log2);
    } else if (pol == CorrectionPolicy::Table3Style) {
        corr = cfg.table3_correction;
    }
    AttackEstimate e;
    e.attack = "hybrid-listcvp";
    e.params = {{"n", static_cast<double>(n)}, {"k", static_cast<double>(k)}, {"p", static_cast<double>(p)}, {"z", static_cast<double>(z)}, {"zprime", static_cast<double>(z_prime)}, {"mu", static_cast<double>(mu)}, {"R", static_cast<double>(R)}};
    e.log2_success = trunc - 1;  // median radius: one half
    e.log2_time = solve - trunc + corr;
    e.log2_memory = cfg.sieve_mem_coeff * nn;
    e.breakdown = {{"trunc", trunc},         {"gh_count", gh},          {"sieve", ec.sieve},
                   {"enum", ec.pruned},      {"enum_unpruned", ec.unpruned}, {"solve", solve},
                   {"correction", corr},     {"pure", pure ? 1.0 : 0.0}, {"gh_threshold", deg.threshold}};
    e.notes.push_back(std::string("correction policy ") + to_string(pol));
    e.notes.push_back(std::string("instance class ") + to_string(deg.kind));
    e.notes.push_back("enumeration cost drops o(n) terms");
    if (cfg.overridden()) e.notes.push_back("cost coefficients overridden");
    return e;
}

// ---------------------------------------------------------------------------
// Table artifacts and golden diff

enum class CheckKind { Exact, Abs, Info };

struct Cell {
    std::string text;
    CheckKind check = CheckKind::Info;
    double tol = 0;
};

struct TableArtifact {
    int which = 0;
    std::vector<std::string> header;
    std::size_t key_columns = 1;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;

    std::string to_csv() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i].text;
            os << "\n";
        }
        return os.str();
    }
};

inline std::string fmt(double x, int prec = 2) {
    if (x == kNegInf) return "-inf";
    if (std::isinf(x)) return "inf";
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << x;
    return os.str();
}

inline Cell key(const std::string& s) { return {s, CheckKind::Exact, 0}; }
inline Cell num(double x, double tol, int prec = 2) { return {fmt(x, prec), CheckKind::Abs, tol}; }
inline Cell info(const std::string& s) { return {s, CheckKind::Info, 0}; }

enum class CellStatus { Ok, Fail, Info, Missing };

inline const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Ok: return "ok";
        case CellStatus::Fail: return "FAIL";
        case CellStatus::Info: return "info";
        case CellStatus::Missing: return "missing";
    }
    return "?";
}

struct GoldenCheck {
    std::string row, column, expected, actual;
    double tol = 0;
    CellStatus status = CellStatus::Ok;
};

struct GoldenDiff {
    std::vector<GoldenCheck> cells;

    bool clean() const {
        return std::none_of(cells.begin(), cells.end(), [](const GoldenCheck& c) {
            return c.status == CellStatus::Fail || c.status == CellStatus::Missing;
        });
    }
    std::size_t count(CellStatus s) const {
        return static_cast<std::size_t>(
            std::count_if(cells.begin(), cells.end(), [&](const GoldenCheck& c) { return c.status == s; }));
    }
    std::string to_csv() const {
        std::ostringstream os;
        os << "row,column,expected,actual,tolerance,status\n";
        for (const auto& c : cells)
            os << c.row << "," << c.column << "," << c.expected << "," << c.actual << "," << c.tol << ","
               << to_string(c.status) << "\n";
        return os.str();
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(split_csv_line(line));
    }
    return rows;
}

inline std::optional<double> parse_number(const std::string& s) {
    if (s == "-inf") return kNegInf;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

/// Golden CSV: header naming a subset of the artifact's columns (keys first);
/// empty cells are not compared.
inline GoldenDiff diff_against_golden(const TableArtifact& t, const std::string& golden_csv) {
    const auto g = parse_csv(golden_csv);
    if (g.empty()) throw FormatError("empty golden file");
    const auto& gh = g[0];
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < t.header.size(); ++i) col[t.header[i]] = i;
    for (const auto& h : gh)
        if (!col.count(h)) throw FormatError("golden column '" + h + "' not in table");
    auto row_key = [&](const std::vector<std::string>& cells, const std::vector<std::size_t>& idx) {
        std::string k;
        for (std::size_t i = 0; i < t.key_columns; ++i) k += (i ? "/" : "") + cells[idx[i]];
        return k;
    };
    std::vector<std::size_t> gidx(gh.size());
    for (std::size_t i = 0; i < gh.size(); ++i) gidx[i] = i;
    std::vector<std::size_t> tidx(t.header.size());
    for (std::size_t i = 0; i < tidx.size(); ++i) tidx[i] = i;
    std::map<std::string, const std::vector<Cell>*> by_key;
    for (const auto& r : t.rows) {
        std::vector<std::string> txt;
        for (const auto& c : r) txt.push_back(c.text);
        by_key[row_key(txt, tidx)] = &r;
    }
    GoldenDiff d;
    for (std::size_t ri = 1; ri < g.size(); ++ri) {
        const auto& gr = g[ri];
        if (gr.size() != gh.size()) throw FormatError("golden row width mismatch");
        std::vector<std::size_t> kidx;
        for (std::size_t i = 0; i < t.key_columns; ++i) kidx.push_back(i);
        const std::string k = row_key(gr, kidx);
        const auto it = by_key.find(k);
        for (std::size_t ci = t.key_columns; ci < gh.size(); ++ci) {
            if (gr[ci].empty()) continue;
            GoldenCheck c{k, gh[ci], gr[ci], "", 0, CellStatus::Missing};
            if (it != by_key.end()) {
                const Cell& cell = (*it->second)[col[gh[ci]]];
                c.actual = cell.text;
                c.tol = cell.tol;
                if (cell.check == CheckKind::Info) {
                    c.status = CellStatus::Info;
                } else if (cell.check == CheckKind::Exact) {
                    c.status = cell.text == gr[ci] ? CellStatus::Ok : CellStatus::Fail;
                } else {
                    const auto a = parse_number(cell.text), e = parse_number(gr[ci]);
                    if (!a || !e)
                        c.status = CellStatus::Fail;
                    else if (std::isinf(*a) || std::isinf(*e))
                        c.status = *a == *e ? CellStatus::Ok : CellStatus::Fail;
                    else
                        c.status = std::abs(*a - *e) <= cell.tol + 1e-9 ? CellStatus::Ok : CellStatus::Fail;
                }
            }
            d.cells.push_back(std::move(c));
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Table regeneration

struct CrossParams {
    int security;
    std::size_t n, k;
};

inline const std::vector<CrossParams>& cross_parameter_sets() {
    static const std::vector<CrossParams> v{{128, 127, 76}, {192, 187, 111}, {256, 251, 150}};
    return v;
}

inline TableArtifact regenerate_table2(const CostModelConfig& cfg = {}) {
    TableArtifact t;
    t.which = 2;
    t.header = {"security", "n", "k", "prange_log2_success", "permutation_cost", "enum_time", "enum_memory", "w_enum", "ell"};
    t.key_columns = 1;
    for (const auto& c : cross_parameter_sets()) {
        auto pr = prange_cost(c.n, c.k, 7, cfg);
        auto en = optimize_enum_isd(c.n, c.k, 127, 7);
        t.rows.push_back({key(std::to_string(c.security)), info(std::to_string(c.n)), info(std::to_string(c.k)),
                          info(fmt(pr.log2_success)), num(pr.log2_time, 1.0), num(en.log2_time, 3.0),
                          num(en.log2_memory, 2.0), num(*en.get("w_enum"), 2.0, 0), num(*en.get("ell"), 2.0, 0)});
    }
    t.notes.push_back("q = 127, z = 7; permutation cost includes a calibrated (z n)^2 factor");
    return t;
}

inline TableArtifact regenerate_table3(const CostModelConfig& cfg = {}) {
    TableArtifact t;
    t.which = 3;
    t.header = {"n", "k", "zprime", "trunc", "g", "guesses", "batch", "total", "memory"};
    t.key_columns = 3;
    for (const auto& c : cross_parameter_sets())
        for (std::size_t zp = 7; zp >= 2; --zp) {
            auto e = hybrid_batchcvp_estimate(c.n, c.k, 127, 7, zp, cfg);
            t.rows.push_back({key(std::to_string(c.n)), key(std::to_string(c.k)), key(std::to_string(zp)),
                              num(*e.get("trunc"), 0.1), num(*e.get("g"), 0, 0), num(*e.get("guesses"), 0.1),
                              num(*e.get("batch"), 0.1), num(e.log2_time, 0.5), num(e.log2_memory, 0.1)});
        }
    t.notes.push_back("totals include the calibrated +1.3 bit correction");
    return t;
}

inline TableArtifact regenerate_table6(const CostModelConfig& cfg = {}) {
    TableArtifact t;
    t.which = 6;
    t.header = {"n", "k", "zprime", "trunc", "gh_count", "sieve", "enum", "total", "memory", "mu", "R", "enum_unpruned"};
    t.key_columns = 3;
    const auto E = cross_restriction(127, 7);
    std::vector<std::pair<std::size_t, std::size_t>> blocks{{35, 21}};
    for (const auto& c : cross_parameter_sets()) blocks.emplace_back(c.n, c.k);
    for (auto [n, k] : blocks)
        for (std::size_t zp = 7; zp >= 1; --zp) {
            auto e = hybrid_listcvp_estimate(n, k, 127, E, zp, cfg);
            t.rows.push_back({key(std::to_string(n)), key(std::to_string(k)), key(std::to_string(zp)),
                              num(*e.get("trunc"), 0.2), num(*e.get("gh_count"), 0.2), num(*e.get("sieve"), 0.2),
                              num(*e.get("enum"), 0.2), num(e.log2_time, 0.2), num(e.log2_memory, 0.2),
                              info(fmt(*e.get("mu"), 4)), info(fmt(*e.get("R"), 4)),
                              info(fmt(*e.get("enum_unpruned")))});
        }
    t.notes.push_back("enum is the pruned enumeration term alone; total adds sieving and the x4 repetitions");
    return t;
}

struct Table4Options {
    std::uint64_t p = 127;
    std::size_t z_min = 2, z_max = 10;
    std::size_t exhaustive_max_z = 5;  ///< larger z are sampled
    std::uint64_t samples = 200000;
    std::uint64_t seed = 1;
};

struct DiameterStats {
    std::size_t z = 0;
    bool exhaustive = false;
    std::uint64_t count = 0;
    std::int64_t min = 0, max = 0;
    double mean = 0, stderr_mean = 0;
    std::vector<std::int64_t> witness;  ///< lexicographically smallest shifted set attaining max
};

namespace detail {

/// D_E = p - (largest circular gap of aE), minimised over a <= (p-1)/2.
/// For p <= 128 the multiples a·e are kept incrementally and the gaps read off a
/// 128-bit occupancy mask; otherwise sorted.
inline std::int64_t diameter_fast(const fp_t* e, std::size_t z, std::uint32_t p) {
    if (z <= 1) return 0;
    std::uint32_t cur[64];
    std::uint32_t best = p;
    const auto zm1 = static_cast<std::uint32_t>(z - 1);
    for (std::size_t i = 0; i < z; ++i) cur[i] = 0;
    for (std::uint32_t a = 1; a <= (p - 1) / 2 && best > zm1; ++a) {
        for (std::size_t i = 0; i < z; ++i) {
            cur[i] += e[i];
            if (cur[i] >= p) cur[i] -= p;
        }
        std::uint32_t gap = 0;
        if (p <= 128) {
            unsigned __int128 mask = 0;
            for (std::size_t i = 0; i < z; ++i) mask |= static_cast<unsigned __int128>(1) << cur[i];
            const auto lo = static_cast<std::uint64_t>(mask), hi = static_cast<std::uint64_t>(mask >> 64);
            const std::uint32_t first = lo ? static_cast<std::uint32_t>(__builtin_ctzll(lo))
                                           : 64 + static_cast<std::uint32_t>(__builtin_ctzll(hi));
            std::uint32_t prev = first;
            mask &= mask - 1;
            while (mask) {
                const auto l = static_cast<std::uint64_t>(mask), h = static_cast<std::uint64_t>(mask >> 64);
                const std::uint32_t b = l ? static_cast<std::uint32_t>(__builtin_ctzll(l))
                                          : 64 + static_cast<std::uint32_t>(__builtin_ctzll(h));
                gap = std::max(gap, b - prev);
                prev = b;
                mask &= mask - 1;
            }
            gap = std::max(gap, first + p - prev);
        } else {
            std::uint32_t pts[64];
            std::copy(cur, cur + z, pts);
            std::sort(pts, pts + z);
            gap = pts[0] + p - pts[z - 1];
            for (std::size_t i = 1; i < z; ++i) gap = std::max(gap, pts[i] - pts[i - 1]);
        }
        best = std::min(best, p - gap);
    }
    return best;
}

}  // namespace detail

/// Statistics of D_E over z-subsets of F_p. Uniform z-subsets correspond
/// uniformly to normalised sets {0, 1} u T, which are enumerated or sampled.
inline DiameterStats diameter_statistics(std::size_t z, const Table4Options& opt) {
    if (z < 2 || z > 64 || z > opt.p) throw InvalidParameters("z out of range");
    const auto p = static_cast<std::uint32_t>(opt.p);
    DiameterStats st;
    st.z = z;
    st.exhaustive = z <= opt.exhaustive_max_z;
    st.min = std::numeric_limits<std::int64_t>::max();
    st.max = -1;
    long double sum = 0, sumsq = 0;
    std::vector<fp_t> e(z);
    e[0] = 0;
    e[1] = 1;
    auto visit = [&]() {
        const auto d = detail::diameter_fast(e.data(), z, p);
        ++st.count;
        sum += d;
        sumsq += static_cast<long double>(d) * d;
        st.min = std::min(st.min, d);
        if (d >= st.max) {
            auto sh = affine_diameter(e, p).shifted_set;
            if (d > st.max || sh < st.witness) st.witness = std::move(sh);
            st.max = d;
        }
    };
    if (st.exhaustive) {
        // combinations of z - 2 values from {2, ..., p - 1}
        const std::size_t m = z - 2;
        std::vector<fp_t> c(m);
        for (std::size_t i = 0; i < m; ++i) c[i] = static_cast<fp_t>(2 + i);
        while (true) {
            std::copy(c.begin(), c.end(), e.begin() + 2);
            visit();
            std::size_t i = m;
            while (i > 0 && c[i - 1] == p - m + i - 1) --i;
            if (i == 0) break;
            ++c[i - 1];
            for (std::size_t j = i; j < m; ++j) c[j] = c[j - 1] + 1;
        }
    } else {
        Rng rng = Rng(opt.seed).split(z);
        for (std::uint64_t t = 0; t < opt.samples; ++t) {
            std::size_t filled = 2;
            while (filled < z) {
                const auto x = static_cast<fp_t>(2 + rng.below(p - 2));
                if (std::find(e.begin() + 2, e.begin() + static_cast<std::ptrdiff_t>(filled), x) ==
                    e.begin() + static_cast<std::ptrdiff_t>(filled))
                    e[filled++] = x;
            }
            visit();
        }
    }
    const long double nn = st.count;
    st.mean = static_cast<double>(sum / nn);
    const long double var = std::max<long double>(0, sumsq / nn - (sum / nn) * (sum / nn));
    st.stderr_mean = static_cast<double>(std::sqrt(var / nn));
    return st;
}

inline std::string set_text(const std::vector<std::int64_t>& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
    return out;
}

inline TableArtifact regenerate_table4(const Table4Options& opt = {}) {
    TableArtifact t;
    t.which = 4;
    t.header = {"z", "cross", "min", "avg", "max", "example_max", "method", "samples", "avg_ci_lo", "avg_ci_hi"};
    t.key_columns = 1;
    for (std::size_t z = opt.z_min; z <= opt.z_max; ++z) {
        const auto st = diameter_statistics(z, opt);
        Cell cc = info("-");
        if (opt.p == 127 && z <= 7) {
            // {1, 2, ..., 2^(z-1)} inside the order-7 subgroup
            std::vector<fp_t> pre;
            for (fp_t x = 1; pre.size() < z; x *= 2) pre.push_back(x);
            cc = key(std::to_string(affine_diameter(pre, opt.p).D));
        }
        // min: D_E >= z - 1 always and {0, ..., z-1} attains it
        std::vector<fp_t> run(z);
        for (std::size_t i = 0; i < z; ++i) run[i] = static_cast<fp_t>(i);
        const auto structural_min = affine_diameter(run, opt.p).D;
        const std::int64_t minv = st.exhaustive ? st.min : structural_min;
        const double band = 4 * st.stderr_mean;
        Cell avg = st.exhaustive ? num(st.mean, 0.005) : num(st.mean, band + 0.005);
        Cell mx = st.exhaustive ? key(std::to_string(st.max)) : info(std::to_string(st.max));
        Cell ex = z <= 3 ? key(set_text(st.witness)) : info(set_text(st.witness));
        t.rows.push_back({key(std::to_string(z)), cc, key(std::to_string(minv)), avg, mx, ex,
                          info(st.exhaustive ? "exhaustive" : "sampled"), info(std::to_string(st.count)),
                          info(fmt(st.mean - 1.96 * st.stderr_mean, 3)), info(fmt(st.mean + 1.96 * st.stderr_mean, 3))});
    }
    t.notes.push_back("sampled rows report the sample maximum, a lower bound on the true maximum");
    return t;
}

inline TableArtifact regenerate_table(int which, const CostModelConfig& cfg = {}, const Table4Options& t4 = {}) {
    switch (which) {
        case 2: return regenerate_table2(cfg);
        case 3: return regenerate_table3(cfg);
        case 4: return regenerate_table4(t4);
        case 6: return regenerate_table6(cfg);
        default: throw InvalidParameters("tables 2, 3, 4 and 6 are supported");
    }
}

/// RESSD_DATA_DIR, else the build-time default.
inline std::string data_dir() {
    if (const char* env = std::getenv("RESSD_DATA_DIR"); env && *env) return env;
#ifdef RESSD_DEFAULT_DATA_DIR
    return RESSD_DEFAULT_DATA_DIR;
#else
    return "data";
#endif
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string golden_path(int which) { return data_dir() + "/golden/table" + std::to_string(which) + ".csv"; }

inline GoldenDiff diff_table(const TableArtifact& t) { return diff_against_golden(t, read_text_file(golden_path(t.which))); }

}  // namespace ressd

#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ressd/estimator.hpp"
#include "ressd/experiments.hpp"
#include "ressd/io.hpp"

namespace ressd::cli {

enum ExitCode : int { kOk = 0, kNotFound = 1, kBadInput = 2, kCeiling = 3 };

struct RunReport {
    std::string command;
    Json parameters = Json::object();
    std::uint64_t seed = 0;
    double wall_time_ms = 0;
    std::string outcome;
    std::vector<std::string> artifacts;
    Json metrics = Json::object();
    Json extra = Json::object();  ///< command-specific payload (solution, trials, ...)

    Json to_json() const {
        Json j = extra;
        j["command"] = command;
        j["parameters"] = parameters;
        j["seed"] = seed;
        j["wall_time_ms"] = wall_time_ms;
        j["outcome"] = outcome;
        j["artifacts"] = artifacts;
        j["metrics"] = metrics;
        return j;
    }
};

/// Line-delimited JSON events on the diagnostic stream.
class Events {
public:
    Events(std::ostream& os, bool enabled) : os_(os), on_(enabled) {}
    void emit(const std::string& event, Json fields = Json::object()) const {
        if (!on_) return;
        fields["event"] = event;
        os_ << fields.dump() << std::endl;
    }
    ProgressFn progress(const std::string& what) const {
        return [this, what](std::uint64_t done, std::uint64_t total) {
            emit("progress", {{"task", what}, {"done", done}, {"total", total}});
        };
    }

private:
    std::ostream& os_;
    bool on_;
};

namespace detail {

inline std::vector<fp_t> read_e_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    const auto text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
        Json j;
        try {
            j = Json::parse(text);
        } catch (const Json::exception& e) {
            throw FormatError(path + ": " + e.what());
        }
        if (j.is_object()) j = j.at("E");
        return j.get<std::vector<fp_t>>();
    }
    std::vector<fp_t> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        for (auto& c : tok)
            if (c == ',') c = ' ';
        std::istringstream t(tok);
        long long v;
        while (t >> v) {
            if (v < 0) throw FormatError("negative element in " + path);
            out.push_back(static_cast<fp_t>(v));
        }
    }
    return out;
}

inline Json estimate_json(const AttackEstimate& e) {
    Json j;
    j["attack"] = e.attack;
    auto kv = [](const std::vector<std::pair<std::string, double>>& xs) {
        Json o = Json::object();
        for (const auto& [k, v] : xs) o[k] = std::isfinite(v) ? Json(v) : Json(v > 0 ? "inf" : "-inf");
        return o;
    };
    j["params"] = kv(e.params);
    j["breakdown"] = kv(e.breakdown);
    j["log2_time"] = e.log2_time;
    j["log2_memory"] = e.log2_memory;
    j["log2_success"] = std::isfinite(e.log2_success) ? Json(e.log2_success) : Json("-inf");
    j["notes"] = e.notes;
    return j;
}

inline Json mc_json(const McEstimate& m) {
    return {{"estimate", m.estimate}, {"ci_lo", m.lo}, {"ci_hi", m.hi}, {"hits", m.hits}, {"samples", m.samples}};
}

inline CorrectionPolicy parse_correction(const std::string& s) {
    if (s == "auto") return CorrectionPolicy::Auto;
    if (s == "none") return CorrectionPolicy::None;
    if (s == "table3") return CorrectionPolicy::Table3Style;
    if (s == "table6") return CorrectionPolicy::Table6Style;
    throw InvalidParameters("unknown correction '" + s + "'");
}

/// R for a ball centred at the integer mu: sqrt(n E[(x - mu)^2]).
inline double radius_about(const std::vector<std::int64_t>& vals, std::size_t n, double mu) {
    double s = 0;
    for (auto v : vals) s += (static_cast<double>(v) - mu) * (static_cast<double>(v) - mu);
    return std::sqrt(static_cast<double>(n) * s / static_cast<double>(vals.size()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Options

struct GenOptions {
    std::uint64_t p = 127;
    std::size_t n = 0, k = 0;
    std::optional<std::size_t> z;
    std::string e_file;
    std::uint64_t seed = 1;
    std::string out;
};

struct SolveOptions {
    std::string instance, context;
    std::string method = "naive";
    std::uint64_t seed = 1;
    std::size_t ceiling = kDefaultEnumCeiling;
    std::optional<std::uint64_t> max_iters;
    std::optional<std::size_t> w, ell, z_prime;
    std::optional<double> mu, radius;
    std::size_t bkz_beta = 0;
    double naive_max_log2 = 32;
    std::string out;
};

struct ReduceOptions {
    std::string instance;
    std::string target;
    std::optional<double> mu, radius;
    std::vector<std::size_t> assign;  ///< cvp: guessed leading blocks, values 1..z
    std::string out;
};

struct EstimateOptions {
    std::string attack;
    std::optional<int> table;
    std::size_t n = 127, k = 76;
    std::uint64_t p = 127;
    std::size_t z = 7;
    std::optional<std::size_t> z_prime, w, ell;
    std::string correction = "auto";
    std::uint64_t samples = 1'000'000;
    std::uint64_t seed = 1;
    bool json = false, diff = false, strict = false, no_golden = false;
};

struct VerifyOptions {
    std::string experiment;
    std::optional<std::size_t> n, k, z_prime;
    std::uint64_t p = 127;
    std::optional<std::size_t> z;
    std::optional<std::uint64_t> samples, trials, iters;
    std::uint64_t seed = 1;
    std::size_t bkz_beta = 35;
};

// ---------------------------------------------------------------------------
// Commands. Each returns the exit code; errors escape as exceptions.

inline int cmd_gen(const GenOptions& o, std::ostream& out) {
    if (o.z.has_value() == !o.e_file.empty()) throw InvalidParameters("give exactly one of --z and --E-file");
    const PrimeField f(o.p);
    const RestrictionSet E = o.z ? cross_restriction(o.p, *o.z) : RestrictionSet(f, detail::read_e_file(o.e_file));
    const auto inst = generate_instance(o.p, o.n, o.k, E, o.seed);
    const auto j = to_json(inst);
    const auto hash = content_hash(j);
    if (o.out.empty()) {
        out << canonical_dump(j);
    } else {
        write_text(o.out, canonical_dump(j));
        out << hash << "\n";
    }
    return kOk;
}

namespace detail {

struct SolveOutcome {
    std::optional<FpVector> solution;
    Json metrics = Json::object();
};

inline std::optional<FpVector> enumerate_compact(const CompactReductionContext& ctx, const ResSdInstance& work,
                                                 double radius, std::size_t bkz_beta, std::size_t ceiling,
                                                 Json& metrics) {
    if (ctx.dim() > ceiling)
        throw DimensionTooLarge("lattice dimension " + std::to_string(ctx.dim()) + " exceeds ceiling " +
                                std::to_string(ceiling));
    BkzOptions bo;
    bo.ceiling = ceiling;
    const auto reduced = bkz_beta >= 2 ? bkz(lll_reduce(ctx.lattice), std::min(bkz_beta, ctx.dim()), bo).basis
                                       : lll_reduce(ctx.lattice);
    EnumConfig cfg;
    cfg.ceiling = ceiling;
    cfg.output_cap = std::size_t{1} << 30;
    std::optional<FpVector> found;
    const auto st = list_enum_visit_until(reduced, ctx.ball(radius), cfg, [&](const IntVec& y, long double) {
        auto e = ctx.pull_back(y);
        if (!check_solution(work, e)) return false;
        found = std::move(e);
        return true;
    });
    metrics["dim"] = ctx.dim();
    metrics["mu"] = ctx.mu;
    metrics["R"] = radius;
    metrics["nodes"] = st.nodes;
    metrics["emitted"] = st.emitted;
    return found;
}

inline SolveOutcome solve_instance(const ResSdInstance& inst, const SolveOptions& o) {
    SolveOutcome r;
    const auto& m = o.method;
    if (m == "naive") {
        const double work = static_cast<double>(inst.k) * std::log2(static_cast<double>(inst.E.z()));
        if (work > o.naive_max_log2)
            throw DimensionTooLarge("naive enumeration of 2^" + std::to_string(work) + " candidates");
        r.solution = naive_solve(inst);
        r.metrics["log2_candidates"] = work;
    } else if (m == "regsd-prange") {
        const auto run = prange_regular(expand(inst), o.seed, o.max_iters.value_or(1'000'000));
        r.solution = run.solution;
        r.metrics["iterations"] = run.iterations;
        r.metrics["singular"] = run.singular;
    } else if (m == "regsd-enum") {
        std::size_t w = 0, ell = 1;
        if (!o.w || !o.ell) {
            const auto best = optimize_enum_isd(inst.n, inst.k, inst.p, inst.E.z());
            w = static_cast<std::size_t>(*best.get("w_enum"));
            ell = static_cast<std::size_t>(*best.get("ell"));
        }
        w = o.w.value_or(w);
        ell = o.ell.value_or(ell);
        EnumIsdOptions eo;
        eo.max_iters = o.max_iters.value_or(eo.max_iters);
        const auto run = enum_isd(expand(inst), w, ell, o.seed, eo);
        r.solution = run.solution;
        r.metrics["iterations"] = run.iterations;
        r.metrics["singular"] = run.singular;
        r.metrics["w"] = w;
        r.metrics["ell"] = ell;
        r.metrics["l1_size"] = run.l1_size;
        r.metrics["l2_size"] = run.l2_size;
    } else if (m == "cvp") {
        const auto dim = inst.E.z() * inst.n;
        if (dim > o.ceiling)
            throw DimensionTooLarge("lattice dimension " + std::to_string(dim) + " exceeds ceiling " +
                                    std::to_string(o.ceiling));
        const auto ctx = ressd_to_cvp(inst);
        const auto sols = cvp_context_solutions(ctx, o.ceiling);
        if (!sols.empty()) r.solution = sols.front();
        r.metrics["dim"] = dim;
        r.metrics["solutions"] = sols.size();
    } else if (m == "listcvp" || m == "listsvp") {
        ResSdInstance work = inst;
        std::optional<TransformContext> trunc;
        if (o.z_prime) {
            auto t = mult_truncate(inst, *o.z_prime, o.seed);
            work = std::move(t.instance);
            trunc = std::move(t.context);
            r.metrics["planted_in_range"] = t.planted_in_range;
        }
        const auto vals = integer_values(work.E);
        std::optional<FpVector> found;
        if (m == "listcvp") {
            const double mu = o.mu.value_or(mean_center(vals));
            const double R = o.radius.value_or(median_radius(vals, work.n));
            found = enumerate_compact(compact_listcvp(work, mu), work, R, o.bkz_beta, o.ceiling, r.metrics);
        } else {
            const double mu = o.mu.value_or(std::round(mean_center(vals)));
            const double R = o.radius.value_or(radius_about(vals, work.n, mu));
            found = enumerate_compact(listsvp_reduce(work, mu), work, R, o.bkz_beta, o.ceiling, r.metrics);
        }
        if (found) r.solution = trunc ? pull_back(*trunc, *found) : *found;
    } else {
        throw InvalidParameters("unknown method '" + m + "'");
    }
    return r;
}

inline SolveOutcome solve_context(const Json& j, const SolveOptions& o, std::shared_ptr<const ResSdInstance>& src) {
    SolveOutcome r;
    const auto variant = context_variant(j);
    if (variant == "cvp") {
        const auto ctx = cvp_context_from_json(j);
        src = ctx.original;
        const auto sols = cvp_context_solutions(ctx, o.ceiling);
        if (!sols.empty()) r.solution = sols.front();
        r.metrics["dim"] = ctx.dim();
        r.metrics["solutions"] = sols.size();
    } else {
        const auto loaded = compact_context_from_json(j);
        src = loaded.ctx.base;
        r.solution = enumerate_compact(loaded.ctx, *src, o.radius.value_or(loaded.radius), o.bkz_beta, o.ceiling,
                                       r.metrics);
    }
    return r;
}

}  // namespace detail

inline int cmd_solve(const SolveOptions& o, std::ostream& out, const Events& ev) {
    if (o.instance.empty() == o.context.empty()) throw InvalidParameters("give exactly one of --instance and --context");
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.command = "solve";
    rep.seed = o.seed;
    rep.parameters = {{"method", o.method}, {"ceiling", o.ceiling}, {"bkz", o.bkz_beta}};
    if (o.z_prime) rep.parameters["zprime"] = *o.z_prime;
    if (o.mu) rep.parameters["mu"] = *o.mu;
    if (o.radius) rep.parameters["R"] = *o.radius;
    ev.emit("start", {{"command", "solve"}, {"method", o.method}});

    std::shared_ptr<const ResSdInstance> inst;
    detail::SolveOutcome res;
    if (!o.instance.empty()) {
        inst = std::make_shared<const ResSdInstance>(instance_from_json(read_json_file(o.instance)));
        rep.parameters["instance"] = instance_hash(*inst);
        res = detail::solve_instance(*inst, o);
    } else {
        const auto j = read_json_file(o.context);
        rep.parameters["context"] = content_hash(j);
        rep.parameters["method"] = context_variant(j);
        res = detail::solve_context(j, o, inst);
        rep.parameters["instance"] = instance_hash(*inst);
    }
    rep.metrics = res.metrics;
    int code = kNotFound;
    if (res.solution) {
        // independent re-check against the original instance
        if (check_solution(*inst, *res.solution)) {
            rep.outcome = "found";
            rep.extra["solution"] = res.solution->raw();
            if (!o.out.empty()) {
                write_text(o.out, canonical_dump(solution_json(*res.solution)));
                rep.artifacts.push_back(o.out);
            }
            code = kOk;
        } else {
            rep.outcome = "verification_failed";
        }
    } else {
        rep.outcome = "not_found";
    }
    rep.wall_time_ms = elapsed_ms(t0);
    ev.emit("done", {{"outcome", rep.outcome}});
    out << rep.to_json().dump(2) << "\n";
    return code;
}

inline int cmd_reduce(const ReduceOptions& o, std::ostream& out) {
    const auto inst = instance_from_json(read_json_file(o.instance));
    const auto vals = integer_values(inst.E);
    Json j, summary;
    if (o.target == "regsd") {
        const auto exp = expand(inst);
        j = to_json(exp);
        summary["rows"] = exp.rows();
        summary["cols"] = exp.cols();
    } else if (o.target == "cvp") {
        auto ctx = ressd_to_cvp(inst);
        if (!o.assign.empty()) ctx = guess_blocks(ctx, o.assign.size(), o.assign).first;
        j = to_json(ctx);
    } else if (o.target == "listcvp") {
        const double mu = o.mu.value_or(mean_center(vals));
        j = to_json(compact_listcvp(inst, mu), o.radius.value_or(median_radius(vals, inst.n)));
    } else if (o.target == "listsvp") {
        const double mu = o.mu.value_or(std::round(mean_center(vals)));
        j = to_json(listsvp_reduce(inst, mu), o.radius.value_or(detail::radius_about(vals, inst.n, mu)));
    } else {
        throw InvalidParameters("unknown target '" + o.target + "'");
    }
    if (j.contains("dim")) {
        summary["dim"] = j["dim"];
        summary["volume"] = j["volume"];
    }
    summary["target"] = o.target;
    summary["source_hash"] = instance_hash(inst);
    summary["hash"] = content_hash(j);
    if (!o.out.empty()) {
        write_text(o.out, canonical_dump(j));
        summary["out"] = o.out;
    } else {
        summary["artifact"] = j;
    }
    out << summary.dump(2) << "\n";
    return kOk;
}

inline int cmd_estimate(const EstimateOptions& o, std::ostream& out, const Events& ev) {
    CostModelConfig cfg;
    cfg.correction = detail::parse_correction(o.correction);
    if (o.table) {
        Table4Options t4;
        t4.samples = o.samples;
        t4.seed = o.seed;
        const auto t0 = std::chrono::steady_clock::now();
        ev.emit("start", {{"command", "estimate"}, {"table", *o.table}});
        const auto t = regenerate_table(*o.table, cfg, t4);
        std::optional<GoldenDiff> diff;
        if (!o.no_golden) diff = diff_table(t);
        const double ms = elapsed_ms(t0);
        ev.emit("done", {{"wall_time_ms", ms}});
        const bool clean = !diff || diff->clean();
        if (o.json) {
            Json j;
            j["table"] = t.which;
            j["header"] = t.header;
            Json rows = Json::array();
            for (const auto& r : t.rows) {
                Json row = Json::object();
                for (std::size_t c = 0; c < t.header.size() && c < r.size(); ++c) row[t.header[c]] = r[c].text;
                rows.push_back(row);
            }
            j["rows"] = rows;
            j["notes"] = t.notes;
            if (diff) {
                j["golden"] = {{"clean", diff->clean()},
                               {"ok", diff->count(CellStatus::Ok)},
                               {"fail", diff->count(CellStatus::Fail)},
                               {"missing", diff->count(CellStatus::Missing)},
                               {"info", diff->count(CellStatus::Info)}};
            }
            out << j.dump(2) << "\n";
        } else {
            out << t.to_csv();
            if (diff) {
                out << "# golden " << golden_path(t.which) << ": " << (diff->clean() ? "clean" : "MISMATCH") << " ("
                    << diff->count(CellStatus::Ok) << " ok, " << diff->count(CellStatus::Fail) << " fail, "
                    << diff->count(CellStatus::Missing) << " missing, " << diff->count(CellStatus::Info)
                    << " info)\n";
                if (o.diff) out << diff->to_csv();
            }
        }
        return o.strict && !clean ? kNotFound : kOk;
    }
    const auto& a = o.attack;
    AttackEstimate e;
    if (a == "prange" || a == "regsd-prange") {
        e = prange_cost(o.n, o.k, o.z, cfg);
    } else if (a == "enum-isd" || a == "regsd-enum") {
        e = (o.w && o.ell) ? enum_isd_cost(o.n, o.k, o.p, o.z, *o.w, *o.ell) : optimize_enum_isd(o.n, o.k, o.p, o.z);
    } else if (a == "naive") {
        e = naive_cost(o.n, o.k, o.z);
    } else if (a == "hybrid-batchcvp") {
        if (!o.z_prime) throw InvalidParameters("--zprime required");
        e = hybrid_batchcvp_estimate(o.n, o.k, o.p, o.z, *o.z_prime, cfg);
    } else if (a == "hybrid-listcvp") {
        if (!o.z_prime) throw InvalidParameters("--zprime required");
        e = hybrid_listcvp_estimate(o.n, o.k, o.p, cross_restriction(o.p, o.z), *o.z_prime, cfg);
    } else if (a.empty()) {
        throw InvalidParameters("give an attack or --table");
    } else {
        throw InvalidParameters("unknown attack '" + a + "'");
    }
    out << detail::estimate_json(e).dump(2) << "\n";
    return kOk;
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, const Events& ev) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.command = "verify";
    rep.seed = o.seed;
    const auto& x = o.experiment;
    const std::size_t z = o.z.value_or(x == "eq1-rate" ? 3 : 7);
    rep.parameters = {{"experiment", x}, {"p", o.p}, {"z", z}};
    ev.emit("start", {{"command", "verify"}, {"experiment", x}});
    if (x == "median") {
        const std::size_t n = o.n.value_or(35), zp = o.z_prime.value_or(4);
        const auto Ep = truncated_set(o.p, z, zp);
        const auto r = run_median(Ep, n, o.samples.value_or(100'000), o.seed);
        rep.parameters["n"] = n;
        rep.parameters["zprime"] = zp;
        rep.parameters["E_prime"] = Ep.elements();
        rep.metrics = {{"mu", r.mu}, {"R", r.radius}, {"exact", r.exact}, {"predicted", 0.5}};
        rep.extra["measured"] = detail::mc_json(r.mc);
        rep.outcome = std::abs(r.mc.estimate - r.exact) <= std::max(r.mc.hi - r.mc.lo, 1e-3) ? "consistent"
                                                                                          : "inconsistent";
    } else if (x == "gh-count") {
        const std::size_t n = o.n.value_or(35), k = o.k.value_or(21), zp = o.z_prime.value_or(4);
        const auto Ep = truncated_set(o.p, z, zp);
        const std::uint64_t trials = o.trials.value_or(1);
        rep.parameters["n"] = n;
        rep.parameters["k"] = k;
        rep.parameters["zprime"] = zp;
        rep.parameters["bkz"] = o.bkz_beta;
        rep.parameters["trials"] = trials;
        Json list = Json::array();
        double sum = 0, pred = 0;
        std::uint64_t eligible = 0, recovered = 0;
        GhTrialOptions go;
        go.bkz_beta = o.bkz_beta;
        for (std::uint64_t i = 0; i < trials; ++i) {
            const auto t = run_gh_trial(o.p, n, k, Ep, o.seed + i, go);
            pred = t.predicted_log2;
            sum += static_cast<double>(t.count);
            eligible += t.within_bound;
            recovered += t.within_bound && t.recovered;
            Json tj = {{"seed", t.seed},           {"count", t.count},          {"solutions", t.solutions},
                       {"nodes", t.nodes},         {"within_bound", t.within_bound}, {"recovered", t.recovered},
                       {"bkz_ms", t.bkz_ms},       {"enum_ms", t.enum_ms}};
            ev.emit("trial", tj);
            list.push_back(std::move(tj));
        }
        const double mean = sum / static_cast<double>(trials);
        rep.extra["trials"] = list;
        rep.metrics = {{"mean_count", mean},
                       {"log2_mean_count", std::log2(mean)},
                       {"predicted_log2", pred},
                       {"ratio", mean / std::exp2(pred)},
                       {"eligible", eligible},
                       {"recovered", recovered}};
        rep.outcome = std::abs(mean / std::exp2(pred) - 1) <= 0.10 && recovered == eligible ? "consistent"
                                                                                           : "inconsistent";
    } else if (x == "trunc-prob") {
        const std::size_t n = o.n.value_or(8), k = o.k.value_or(4), zp = o.z_prime.value_or(4);
        const auto r = run_trunc_prob(o.p, n, k, z, zp, o.trials.value_or(20'000), o.seed, ev.progress("trunc-prob"));
        rep.parameters["n"] = n;
        rep.parameters["k"] = k;
        rep.parameters["zprime"] = zp;
        rep.metrics = {{"predicted", r.predicted}, {"log2_predicted", std::log2(r.predicted)}};
        rep.extra["measured"] = detail::mc_json(r.ci);
        rep.outcome = r.predicted >= r.ci.lo && r.predicted <= r.ci.hi ? "consistent" : "inconsistent";
    } else if (x == "eq1-rate") {
        const std::size_t n = o.n.value_or(10), k = o.k.value_or(4);
        const auto r = run_eq1_rate(o.p, n, k, z, o.iters.value_or(100'000), o.seed);
        rep.parameters["n"] = n;
        rep.parameters["k"] = k;
        rep.metrics = {{"iterations", r.iterations}, {"successes", r.successes}, {"singular", r.singular},
                       {"rate", r.rate},             {"predicted", r.predicted}, {"sigma", r.sigma},
                       {"z_score", r.z_score}};
        rep.outcome = std::abs(r.z_score) <= 3 ? "consistent" : "inconsistent";
    } else {
        throw InvalidParameters("unknown experiment '" + x + "'");
    }
    rep.wall_time_ms = elapsed_ms(t0);
    ev.emit("done", {{"outcome", rep.outcome}});
    out << rep.to_json().dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"ResSD cryptanalysis workbench"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress JSON progress events on stderr");

    GenOptions g;
    auto* gen = app.add_subcommand("gen", "Generate a planted instance");
    gen->add_option("--p", g.p, "Field characteristic")->capture_default_str();
    gen->add_option("--n", g.n, "Code length")->required();
    gen->add_option("--k", g.k, "Code dimension")->required();
    auto* gz = gen->add_option("--z", g.z, "Order of the multiplicative subgroup used as E");
    auto* ge = gen->add_option("--E-file", g.e_file, "File listing E (JSON array or whitespace separated)");
    gz->excludes(ge);
    gen->add_option("--seed", g.seed)->capture_default_str();
    gen->add_option("--out", g.out, "Output path (stdout when absent)");

    SolveOptions s;
    auto* solve = app.add_subcommand("solve", "Run a solver and verify its output");
    solve->add_option("--instance", s.instance);
    solve->add_option("--context", s.context, "Reduction context written by `reduce`");
    solve->add_option("--method", s.method)
        ->check(CLI::IsMember({"naive", "regsd-prange", "regsd-enum", "cvp", "listcvp", "listsvp"}))
        ->capture_default_str();
    solve->add_option("--seed", s.seed)->capture_default_str();
    solve->add_option("--ceiling", s.ceiling, "Maximum lattice dimension")->capture_default_str();
    solve->add_option("--max-iters", s.max_iters);
    solve->add_option("--w", s.w);
    solve->add_option("--ell", s.ell);
    solve->add_option("--zprime", s.z_prime, "Truncate to z' values first (listcvp/listsvp)");
    solve->add_option("--mu", s.mu);
    solve->add_option("--R", s.radius);
    solve->add_option("--bkz", s.bkz_beta, "BKZ block size before enumeration (0: LLL only)")->capture_default_str();
    solve->add_option("--naive-max-log2", s.naive_max_log2)->capture_default_str();
    solve->add_option("--out", s.out, "Write the solution here");

    ReduceOptions r;
    auto* reduce = app.add_subcommand("reduce", "Apply a reduction and write the result");
    reduce->add_option("--instance", r.instance)->required();
    reduce->add_option("--target", r.target)
        ->required()
        ->check(CLI::IsMember({"regsd", "cvp", "listcvp", "listsvp"}));
    reduce->add_option("--mu", r.mu);
    reduce->add_option("--R", r.radius);
    reduce->add_option("--assign", r.assign, "cvp: values 1..z for the leading guessed blocks");
    reduce->add_option("--out", r.out);

    EstimateOptions e;
    auto* est = app.add_subcommand("estimate", "Cost estimates and table regeneration");
    est->add_option("attack", e.attack, "prange | enum-isd | naive | hybrid-batchcvp | hybrid-listcvp");
    est->add_option("--table", e.table)->check(CLI::IsMember({2, 3, 4, 6}));
    est->add_option("--n", e.n)->capture_default_str();
    est->add_option("--k", e.k)->capture_default_str();
    est->add_option("--p", e.p)->capture_default_str();
    est->add_option("--z", e.z)->capture_default_str();
    est->add_option("--zprime", e.z_prime);
    est->add_option("--w", e.w);
    est->add_option("--ell", e.ell);
    est->add_option("--correction", e.correction)
        ->check(CLI::IsMember({"auto", "none", "table3", "table6"}))
        ->capture_default_str();
    est->add_option("--samples", e.samples, "Table 4: samples per sampled row")->capture_default_str();
    est->add_option("--seed", e.seed)->capture_default_str();
    est->add_flag("--json", e.json);
    est->add_flag("--diff", e.diff, "Print the cell-level golden diff");
    est->add_flag("--strict", e.strict, "Exit 1 when the golden diff is not clean");
    est->add_flag("--no-golden", e.no_golden);

    VerifyOptions v;
    auto* ver = app.add_subcommand("verify", "Desk-scale verification experiments");
    ver->add_option("experiment", v.experiment)
        ->required()
        ->check(CLI::IsMember({"median", "gh-count", "trunc-prob", "eq1-rate"}));
    ver->add_option("--n", v.n);
    ver->add_option("--k", v.k);
    ver->add_option("--p", v.p)->capture_default_str();
    ver->add_option("--z", v.z);
    ver->add_option("--zprime", v.z_prime);
    ver->add_option("--samples", v.samples);
    ver->add_option("--trials", v.trials);
    ver->add_option("--iters", v.iters);
    ver->add_option("--seed", v.seed)->capture_default_str();
    ver->add_option("--bkz", v.bkz_beta)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& pe) {
        const int rc = app.exit(pe, out, err);
        return rc == 0 ? kOk : kBadInput;
    }

    const Events ev(err, !quiet);
    try {
        if (*gen) return cmd_gen(g, out);
        if (*solve) return cmd_solve(s, out, ev);
        if (*reduce) return cmd_reduce(r, out);
        if (*est) return cmd_estimate(e, out, ev);
        if (*ver) return cmd_verify(v, out, ev);
    } catch (const DimensionTooLarge& x) {
        ev.emit("error", {{"kind", "ceiling"}, {"message", x.what()}});
        err << "error: " << x.what() << "\n";
        return kCeiling;
    } catch (const OutputCapExceeded& x) {
        err << "error: " << x.what() << "\n";
        return kCeiling;
    } catch (const ListCapExceeded& x) {
        err << "error: " << x.what() << "\n";
        return kCeiling;
    } catch (const Error& x) {
        err << "error: " << x.what() << "\n";
        return kBadInput;
    } catch (const Json::exception& x) {
        err << "error: " << x.what() << "\n";
        return kBadInput;
    }
    return kBadInput;
}

}  // namespace ressd::cli

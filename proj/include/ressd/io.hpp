#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ressd/errors.hpp"
#include "ressd/lattice/basis.hpp"
#include "ressd/reductions.hpp"
#include "ressd/regsd.hpp"
#include "ressd/ressd.hpp"

namespace ressd {

// nlohmann::json keeps object keys in a std::map, so dump() is already sorted.
using Json = nlohmann::json;

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Canonical text: sorted keys, two-space indent, trailing newline.
inline std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

inline std::string content_hash(const Json& j) { return hash_hex(fnv1a64(canonical_dump(j))); }

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write " + path);
    os << text;
    if (!os) throw FormatError("write failed: " + path);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path);
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

namespace detail {

template <typename T>
T require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

inline Json matrix_json(const FpMatrix& m) {
    Json a = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (auto x : m.row(i)) a.push_back(x);
    return a;
}

inline FpMatrix matrix_from(const PrimeField& f, std::size_t rows, std::size_t cols, const Json& a) {
    auto v = a.get<std::vector<fp_t>>();
    return FpMatrix(f, rows, cols, std::move(v));
}

inline Json vector_json(const FpVector& v) { return Json(v.raw()); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline Json to_json(const ResSdInstance& inst) {
    Json j;
    j["kind"] = "ressd";
    j["p"] = inst.p;
    j["n"] = inst.n;
    j["k"] = inst.k;
    j["E"] = inst.E.elements();
    j["rows"] = inst.H.rows();
    j["H"] = detail::matrix_json(inst.H);
    j["s"] = detail::vector_json(inst.s);
    if (inst.planted) j["planted"] = detail::vector_json(*inst.planted);
    j["seed"] = inst.seed;
    j["generator_id"] = inst.generator_id;
    return j;
}

inline ResSdInstance instance_from_json(const Json& j) {
    try {
        if (j.contains("kind") && j.at("kind") != "ressd") throw FormatError("not a ResSD instance");
        ResSdInstance inst;
        const auto p = detail::require<std::uint64_t>(j, "p");
        PrimeField f(p);
        inst.p = f.p();
        inst.n = detail::require<std::size_t>(j, "n");
        inst.k = detail::require<std::size_t>(j, "k");
        inst.E = RestrictionSet(f, detail::require<std::vector<fp_t>>(j, "E"));
        // "rows" is optional for hand-written files; default full rank
        const std::size_t rows = j.contains("rows") ? j.at("rows").get<std::size_t>() : inst.n - inst.k;
        inst.H = detail::matrix_from(f, rows, inst.n, j.at("H"));
        inst.s = FpVector(f, detail::require<std::vector<fp_t>>(j, "s"));
        if (inst.s.size() != rows) throw FormatError("syndrome length does not match H");
        if (j.contains("planted")) {
            inst.planted = FpVector(f, j.at("planted").get<std::vector<fp_t>>());
            if (inst.planted->size() != inst.n) throw FormatError("planted length != n");
        }
        inst.seed = j.value("seed", std::uint64_t{0});
        inst.generator_id = j.value("generator_id", std::string(Rng::kGeneratorId));
        return inst;
    } catch (const FormatError&) {
        throw;
    } catch (const Error& e) {
        throw FormatError(e.what());
    } catch (const Json::exception& e) {
        throw FormatError(e.what());
    }
}

inline std::string instance_hash(const ResSdInstance& inst) { return content_hash(to_json(inst)); }

/// Same envelope as an instance with kind "expanded"; H, s hold H~, s~ and
/// `source` embeds the original so phi^-1 can be applied after loading.
inline Json to_json(const ExpandedInstance& exp) {
    Json j;
    j["kind"] = "expanded";
    j["p"] = exp.H_tilde.field().p();
    j["n"] = exp.n;
    j["k"] = exp.k;
    j["z"] = exp.z;
    j["E"] = exp.base->E.elements();
    j["rows"] = exp.rows();
    j["cols"] = exp.cols();
    j["H"] = detail::matrix_json(exp.H_tilde);
    j["s"] = detail::vector_json(exp.s_tilde);
    j["seed"] = exp.base->seed;
    j["generator_id"] = exp.base->generator_id;
    j["source"] = to_json(*exp.base);
    j["source_hash"] = instance_hash(*exp.base);
    return j;
}

inline ExpandedInstance expanded_from_json(const Json& j) {
    if (detail::require<std::string>(j, "kind") != "expanded") throw FormatError("not an expanded instance");
    if (!j.contains("source")) throw FormatError("expanded instance lacks its source");
    auto exp = expand(instance_from_json(j.at("source")));
    // the stored matrix must be the expansion of the stored source
    if (detail::matrix_json(exp.H_tilde) != j.at("H") || detail::vector_json(exp.s_tilde) != j.at("s"))
        throw FormatError("expanded matrix does not match its source instance");
    return exp;
}

// ---------------------------------------------------------------------------
// Lattices and reduction contexts

struct Provenance {
    std::string instance_hash;
    std::string reduction;
};

inline Json to_json(const LatticeBasis& b, const Provenance& prov) {
    Json j;
    j["kind"] = "lattice";
    j["dim"] = b.dim();
    Json rows = Json::array();
    for (const auto& r : b.rows())
        for (auto x : r) rows.push_back(x);
    j["rows"] = std::move(rows);
    j["volume"] = volume(b).get_str();
    j["provenance"] = {{"instance_hash", prov.instance_hash}, {"reduction", prov.reduction}};
    return j;
}

inline LatticeBasis lattice_from_json(const Json& j) {
    const auto dim = detail::require<std::size_t>(j, "dim");
    const auto flat = detail::require<std::vector<std::int64_t>>(j, "rows");
    if (flat.size() != dim * dim) throw FormatError("lattice rows: expected dim^2 entries");
    std::vector<IntVec> rows(dim);
    for (std::size_t i = 0; i < dim; ++i) rows[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * dim),
                                                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    LatticeBasis b(std::move(rows));
    if (j.contains("volume") && volume(b).get_str() != j.at("volume").get<std::string>())
        throw FormatError("recorded volume does not match the basis");
    return b;
}

inline Json to_json(const CvpReductionContext& ctx) {
    const auto src = instance_hash(*ctx.original);
    Json j = to_json(ctx.lattice, {src, "cvp"});
    Json r;
    r["variant"] = "cvp";
    r["source_hash"] = src;
    r["fixed"] = ctx.fixed;
    r["target"] = ctx.target;
    r["feasible"] = ctx.feasible;
    r["R_sq"] = ctx.residual_n();
    r["source"] = to_json(*ctx.original);
    j["reduction"] = std::move(r);
    return j;
}

inline const char* to_string(CompactVariant v) { return v == CompactVariant::ListCVP ? "listcvp" : "listsvp"; }

inline Json to_json(const CompactReductionContext& ctx, double radius) {
    const auto src = instance_hash(*ctx.base);
    Json j = to_json(ctx.lattice, {src, to_string(ctx.variant)});
    Json r;
    r["variant"] = to_string(ctx.variant);
    r["source_hash"] = src;
    r["mu"] = ctx.mu;
    r["R"] = radius;
    r["anchor"] = ctx.anchor.raw();
    if (ctx.target) r["target"] = *ctx.target;
    if (ctx.variant == CompactVariant::ListSVP) {
        r["H3_rows"] = ctx.H3.rows();
        r["H3"] = detail::matrix_json(ctx.H3);
    }
    r["source"] = to_json(*ctx.base);
    j["reduction"] = std::move(r);
    return j;
}

/// Variant tag of a context file ("cvp", "listcvp", "listsvp"), or empty for a bare lattice.
inline std::string context_variant(const Json& j) {
    if (!j.contains("reduction")) return {};
    return detail::require<std::string>(j.at("reduction"), "variant");
}

/// Re-derives the context from its embedded source and checks it against the stored lattice.
inline CvpReductionContext cvp_context_from_json(const Json& j) {
    if (context_variant(j) != "cvp") throw FormatError("not a CVP context");
    const auto& r = j.at("reduction");
    auto src = std::make_shared<const ResSdInstance>(instance_from_json(r.at("source")));
    if (instance_hash(*src) != r.at("source_hash").get<std::string>()) throw FormatError("source hash mismatch");
    const auto fixed = r.at("fixed").get<std::vector<fp_t>>();
    auto ctx = ressd_to_cvp(*src);
    if (!fixed.empty()) {
        std::vector<std::size_t> assign;
        for (auto v : fixed) {
            const auto idx = src->E.index_of(v);
            if (!idx) throw FormatError("guessed value outside E");
            assign.push_back(*idx + 1);
        }
        ctx = guess_blocks(ctx, fixed.size(), assign).first;
    }
    if (ctx.lattice != lattice_from_json(j)) throw FormatError("lattice does not match the re-derived context");
    return ctx;
}

struct LoadedCompactContext {
    CompactReductionContext ctx;
    double radius = 0;
};

inline LoadedCompactContext compact_context_from_json(const Json& j) {
    const auto v = context_variant(j);
    if (v != "listcvp" && v != "listsvp") throw FormatError("not a compact context");
    const auto& r = j.at("reduction");
    const auto src = instance_from_json(r.at("source"));
    if (instance_hash(src) != r.at("source_hash").get<std::string>()) throw FormatError("source hash mismatch");
    const double mu = r.at("mu").get<double>();
    auto ctx = v == "listcvp" ? compact_listcvp(src, mu) : listsvp_reduce(src, mu);
    if (ctx.lattice != lattice_from_json(j)) throw FormatError("lattice does not match the re-derived context");
    return {std::move(ctx), r.at("R").get<double>()};
}

// ---------------------------------------------------------------------------
// Vectors and line-delimited streams

inline Json solution_json(const FpVector& e) { return {{"kind", "solution"}, {"p", e.field().p()}, {"e", e.raw()}}; }

/// One JSON array per line.
inline void write_vector_line(std::ostream& os, const IntVec& v) { os << Json(v).dump() << '\n'; }

}  // namespace ressd

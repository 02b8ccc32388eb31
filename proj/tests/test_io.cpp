#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "ressd/io.hpp"

using namespace ressd;

namespace {

ResSdInstance small(std::uint64_t seed, std::size_t n = 6, std::size_t k = 3) {
    return generate_instance(7, n, k, RestrictionSet(PrimeField(7), {1, 2, 4}), seed);
}

}  // namespace

TEST(Hash, Fnv1aKnownValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hash_hex(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}

TEST(InstanceJson, RoundTripIsLossless) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto inst = small(seed);
        const auto text = canonical_dump(to_json(inst));
        auto back = instance_from_json(Json::parse(text));
        EXPECT_EQ(back, inst);
        EXPECT_EQ(canonical_dump(to_json(back)), text);
    }
}

TEST(InstanceJson, KeysSortedAndFieldsPresent) {
    const auto j = to_json(small(3));
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
    for (const char* k : {"p", "n", "k", "E", "H", "s", "planted", "seed", "generator_id"})
        EXPECT_TRUE(j.contains(k)) << k;
}

TEST(InstanceJson, HashStableAndSensitive) {
    EXPECT_EQ(instance_hash(small(9)), instance_hash(small(9)));
    EXPECT_NE(instance_hash(small(9)), instance_hash(small(10)));
}

TEST(InstanceJson, RejectsMalformed) {
    auto j = to_json(small(2));
    auto bad = j;
    bad.erase("H");
    EXPECT_THROW(instance_from_json(bad), FormatError);
    bad = j;
    bad["p"] = 8;
    EXPECT_THROW(instance_from_json(bad), FormatError);
    bad = j;
    bad["s"].push_back(1);
    EXPECT_THROW(instance_from_json(bad), FormatError);
    bad = j;
    bad["E"] = {1, 1, 2};
    EXPECT_THROW(instance_from_json(bad), FormatError);
}

TEST(ExpandedJson, EnvelopeAndRoundTrip) {
    auto inst = small(4);
    auto exp = expand(inst);
    auto j = to_json(exp);
    EXPECT_EQ(j["kind"], "expanded");
    EXPECT_EQ(j["rows"], 9u);
    EXPECT_EQ(j["cols"], 18u);
    EXPECT_EQ(j["source_hash"], instance_hash(inst));
    auto back = expanded_from_json(Json::parse(canonical_dump(j)));
    EXPECT_EQ(back.H_tilde, exp.H_tilde);
    EXPECT_EQ(back.s_tilde, exp.s_tilde);
    j["H"][0] = (j["H"][0].get<int>() + 1) % 7;
    EXPECT_THROW(expanded_from_json(j), FormatError);
}

TEST(LatticeJson, RoundTripAndVolumeCheck) {
    auto inst = small(5);
    auto ctx = ressd_to_cvp(inst);
    auto j = to_json(ctx.lattice, {instance_hash(inst), "cvp"});
    EXPECT_EQ(j["dim"], 18u);
    EXPECT_EQ(j["volume"], volume(ctx.lattice).get_str());
    EXPECT_EQ(lattice_from_json(j), ctx.lattice);
    j["volume"] = "1";
    EXPECT_THROW(lattice_from_json(j), FormatError);
}

TEST(ContextJson, CvpRederivesIncludingGuesses) {
    auto inst = small(6);
    auto ctx = ressd_to_cvp(inst);
    auto j = to_json(ctx);
    EXPECT_EQ(j["reduction"]["variant"], "cvp");
    auto back = cvp_context_from_json(Json::parse(canonical_dump(j)));
    EXPECT_EQ(back.lattice, ctx.lattice);
    EXPECT_EQ(back.target, ctx.target);

    auto g = guess_blocks(ctx, 2, {2, 3}).first;
    auto gj = to_json(g);
    auto gb = cvp_context_from_json(gj);
    EXPECT_EQ(gb.fixed, g.fixed);
    EXPECT_EQ(gb.target, g.target);
}

TEST(ContextJson, CompactVariantsRecordReductionBlock) {
    auto inst = small(7);
    auto cvp = compact_listcvp(inst, 2.5);
    auto j = to_json(cvp, 3.0);
    const auto& r = j["reduction"];
    for (const char* k : {"variant", "mu", "R", "anchor", "source_hash"}) EXPECT_TRUE(r.contains(k)) << k;
    auto back = compact_context_from_json(j);
    EXPECT_EQ(back.ctx.anchor, cvp.anchor);
    EXPECT_DOUBLE_EQ(back.radius, 3.0);

    auto svp = listsvp_reduce(inst, 2);
    auto sj = to_json(svp, 3.0);
    EXPECT_EQ(sj["reduction"]["variant"], "listsvp");
    EXPECT_EQ(sj["volume"], "49");  // 7^(n-k-1)
    auto sb = compact_context_from_json(sj);
    EXPECT_EQ(sb.ctx.H3, svp.H3);

    sj["reduction"]["mu"] = 3;
    EXPECT_THROW(compact_context_from_json(sj), Error);
}

TEST(Files, WriteAndReadBack) {
    const auto path = (std::filesystem::temp_directory_path() / "ressd_io_test.json").string();
    const auto j = to_json(small(8));
    write_text(path, canonical_dump(j));
    EXPECT_EQ(read_json_file(path), j);
    std::remove(path.c_str());
    EXPECT_THROW(read_json_file(path), FormatError);
}

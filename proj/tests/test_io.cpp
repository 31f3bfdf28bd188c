#include "doctest.h"
#include "oracles.hpp"

using namespace rpf;

TEST_CASE("every fixture loads and validates") {
  for (const char* name : {"fix_a", "fix_a3", "fix_a_misaligned", "fix_b", "fix_c", "fix_d2", "fix_d3", "fix_e"}) {
    CAPTURE(name);
    const auto pr = oracle::fixture(name);
    CHECK(validate_problem(pr).ok());
    CHECK(pr.sd.has_value());
    CHECK(pr.series.has_value());
  }
}

TEST_CASE("invalid fixtures report the broken structure") {
  const auto bar = oracle::fixture("invalid_bar_fixed");
  const auto r1 = validate_problem(bar);
  REQUIRE_FALSE(r1.ok());
  CHECK(r1.violations.front().find("own opposite") != std::string::npos);
  CHECK_FALSE(bar.sd.has_value());
  const auto mono = oracle::fixture("invalid_noninjective");
  const auto r2 = validate_problem(mono);
  REQUIRE_FALSE(r2.ok());
  CHECK(r2.violations.front().find("not injective") != std::string::npos);
}

TEST_CASE("malformed problem files") {
  const auto base = Json::parse(R"({"prime": 2, "groups": {"C2": {"cyclic": 2}},
    "vertices": [{"name": "x", "group": "C2"}], "edges": []})");
  CHECK_NOTHROW(load_problem(base));
  SUBCASE("missing prime") {
    auto j = base;
    j.erase("prime");
    CHECK_THROWS_AS(load_problem(j), InputError);
  }
  SUBCASE("prime not prime") {
    auto j = base;
    j["prime"] = 4;
    CHECK_THROWS_AS(load_problem(j), InputError);
  }
  SUBCASE("unknown group") {
    auto j = base;
    j["vertices"][0]["group"] = "C4";
    CHECK_THROWS_AS(load_problem(j), InputError);
  }
  SUBCASE("format version") {
    auto j = base;
    j["format_version"] = 99;
    CHECK_THROWS_AS(load_problem(j), InputError);
  }
  SUBCASE("order not a power of p") {
    auto j = base;
    j["groups"]["C2"]["cyclic"] = 3;
    CHECK_FALSE(validate_problem(load_problem(j)).ok());
  }
  SUBCASE("table that is not a group") {
    auto j = base;
    j["groups"]["C2"] = Json::parse(R"({"table": [[0, 1], [1, 1]]})");
    CHECK_FALSE(validate_problem(load_problem(j)).ok());
  }
  SUBCASE("permutation generators") {
    auto j = base;
    j["groups"]["C2"] = Json::parse(R"({"permutations": [[1, 2, 3, 0]]})");
    const auto pr = load_problem(j);
    CHECK(pr.gg->vertex_group(0)->order() == 4);
    CHECK(validate_problem(pr).ok());
  }
}

TEST_CASE("word syntax") {
  const auto a = oracle::fixture("fix_a");
  const auto w = parse_word(a, "a b^-1 u:2 1 y");
  REQUIRE(w.size() == 4);
  CHECK(std::get<VertexLetter>(w.letters[0]) == VertexLetter{0, 1});
  CHECK(std::get<VertexLetter>(w.letters[1]) == VertexLetter{1, 3});
  CHECK(std::get<VertexLetter>(w.letters[2]) == VertexLetter{0, 2});
  CHECK(std::holds_alternative<StableLetter>(w.letters[3]));
  CHECK(parse_word(a, "a^3") == GWord{0, {VertexLetter{0, 3}}});
  CHECK(parse_word(a, "1").empty());
  CHECK(words_equal(*a.gg, *a.sd, parse_word(a, "z"), parse_word(a, "a a")));
  CHECK_THROWS_AS(parse_word(a, "a^x"), InputError);
  CHECK_THROWS_AS(parse_word(a, "u:9"), InputError);
  CHECK_THROWS_AS(parse_word(a, "q:1"), InputError);
  const auto back = word_from_json(*a.gg, to_json(*a.gg, w));
  CHECK(back == w);
}

TEST_CASE("free word syntax") {
  const auto w = parse_free_word("x1 x2^-1 x1^2");
  CHECK(w == FreeWord{{0, 1}, {1, -1}, {0, 1}, {0, 1}});
  CHECK(parse_free_word(format_free_word(w)) == w);
  CHECK(parse_free_word("").empty());
  CHECK_THROWS_AS(parse_free_word("y1"), InputError);
  CHECK_THROWS_AS(parse_free_word("x0"), InputError);
}

TEST_CASE("saved problems reload to the same graph of groups") {
  std::mt19937 rng(21);
  for (const char* name : {"fix_a", "fix_a3", "fix_b", "fix_c", "fix_e"}) {
    CAPTURE(name);
    const auto pr = oracle::fixture(name);
    const auto j = save_problem(*pr.gg, pr.p, &*pr.series);
    const auto back = load_problem(Json::parse(j.dump()));
    CHECK(validate_problem(back).ok());
    const auto& g = pr.gg->graph();
    const auto& h = back.gg->graph();
    REQUIRE(h.vertex_count() == g.vertex_count());
    REQUIRE(h.edge_count() == g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      CHECK(h.bar(e) == g.bar(e));
      CHECK(h.origin(e) == g.origin(e));
      CHECK(std::ranges::equal(back.gg->mono(e).map(), pr.gg->mono(e).map()));
    }
    for (int i = 0; i < 50; ++i) {
      const auto w = oracle::random_word(rng, *pr.gg, *pr.sd, 6);
      CHECK(is_trivial(*back.gg, *back.sd, w) == is_trivial(*pr.gg, *pr.sd, w));
    }
    CHECK(check_condition_I(*back.gg, *back.series).size() == check_condition_I(*pr.gg, *pr.series).size());
  }
}

TEST_CASE("exported covers reload and validate") {
  for (const char* name : {"fix_a", "fix_a3", "fix_e"}) {
    CAPTURE(name);
    const auto pr = oracle::fixture(name);
    const auto st = oracle::stage_of(pr);
    const auto ph = build_level_hom(*st.gg, st.sd, st.sa, st.lm, pr.p);
    const auto kc = build_kernel_cover(st.gg, st.sd, st.sa, st.lm, ph);
    const auto j = save_problem(*kc.cover, pr.p, &kc.series, &kc.maps);
    const auto back = load_problem(Json::parse(j.dump()));
    CHECK(validate_problem(back).ok());
    CHECK(graph_rank(back.gg->graph()) == graph_rank(kc.cover->graph()));
    REQUIRE(back.maps);
    CHECK(check_condition_II(*back.gg, *back.series, *back.maps, pr.p).ok);
  }
}

TEST_CASE("certificates round-trip through JSON") {
  for (const char* name : {"fix_a", "fix_e", "fix_d3"}) {
    CAPTURE(name);
    const auto pr = oracle::fixture(name);
    const auto st = oracle::stage_of(pr);
    for (const auto& w : oracle::all_words(*pr.gg, *pr.sd, 3)) {
      if (is_trivial(*pr.gg, *pr.sd, w)) continue;
      const auto cert = separate(st, pr.p, w);
      const auto j = to_json(*pr.gg, cert);
      const auto back = certificate_from_json(Json::parse(j.dump()));
      CHECK(back.steps.size() == cert.steps.size());
      CHECK(back.terminal_word == cert.terminal_word);
      CHECK(verify_certificate(st, pr.p, w, back).ok);
    }
  }
  CHECK_THROWS_AS(certificate_from_json(Json::parse(R"({"prime": 2})")), InputError);
}

TEST_CASE("reports") {
  const auto bad = oracle::fixture("fix_a_misaligned");
  const auto r = check_conditions(*bad.gg, *bad.series, 2);
  const auto j = to_json(*bad.gg, r, nullptr);
  CHECK(j["condition_I"]["ok"] == false);
  const auto b = oracle::fixture("fix_b");
  const auto jb = to_json(*b.gg, check_conditions(*b.gg, *b.series, 3), nullptr);
  CHECK(jb["condition_II"]["ok"] == false);
  CHECK(jb["condition_II"]["witness"]["holonomy"] == 2);
}

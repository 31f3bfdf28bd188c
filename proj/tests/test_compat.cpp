#include "doctest.h"
#include "oracles.hpp"

using namespace rpf;

TEST_CASE("FIX-A satisfies both conditions") {
  const auto a = oracle::fixture("fix_a");
  CHECK(validate_assignment(*a.gg, *a.series, 2).ok());
  CHECK(a.series->length_bound() == 2);
  LevelMaps lm;
  const auto r = check_conditions(*a.gg, *a.series, 2, &lm);
  CHECK(r.ok());
  REQUIRE(lm.levels() == 2);
  CHECK(check_condition_II(*a.gg, *a.series, lm, 2).ok);
  // edge factor at level 0 is trivial, at level 1 it maps onto z = a^2
  const auto m0 = induced_edge_factor_map(*a.gg, *a.series, 2, 0, 0);
  CHECK(m0.collapses);
  const auto m1 = induced_edge_factor_map(*a.gg, *a.series, 2, 0, 1);
  CHECK_FALSE(m1.collapses);
  CHECK(m1.scalar == FpScalar{1});
}

TEST_CASE("misaligned edge series fails condition I at level 1") {
  const auto bad = oracle::fixture("fix_a_misaligned");
  const auto f = check_condition_I(*bad.gg, *bad.series);
  REQUIRE(f.size() == 2);
  for (const auto& x : f) {
    CHECK(x.level == 1);
    CHECK(x.image == std::vector<Elem>{0});
    CHECK(x.intersection == std::vector<Elem>{0, 2});
  }
  CHECK_THROWS_AS(induced_edge_factor_map(*bad.gg, *bad.series, 2, 0, 1), InputError);
  CHECK_FALSE(check_conditions(*bad.gg, *bad.series, 2).ok());
}

TEST_CASE("FIX-B fails condition II with holonomy 2") {
  const auto b = oracle::fixture("fix_b");
  CHECK(check_condition_I(*b.gg, *b.series).empty());
  const auto s = solve_condition_II(*b.gg, *b.series, 3);
  REQUIRE(std::holds_alternative<CycleWitness>(s));
  const auto& w = std::get<CycleWitness>(s);
  CHECK(w.level == 0);
  CHECK(w.holonomy == FpScalar{2});
  CHECK(w.forest_path.empty());
  const auto& g = b.gg->graph();
  CHECK(g.origin(w.closing_edge) == g.terminus(w.closing_edge));
}

TEST_CASE("perturbed level map on FIX-A3 is rejected") {
  const auto a3 = oracle::fixture("fix_a3");
  LevelMaps lm;
  REQUIRE(check_conditions(*a3.gg, *a3.series, 3, &lm).ok());
  CHECK(check_condition_II(*a3.gg, *a3.series, lm, 3).ok);
  for (std::size_t k = 0; k < lm.levels(); ++k)
    for (VertexId v = 0; v < 2; ++v) {
      CAPTURE(k);
      CAPTURE(v);
      auto bad = lm;
      REQUIRE(bad.vertex[k][v]);
      bad.vertex[k][v] = FpScalar{bad.vertex[k][v]->value == 1 ? 2u : 1u};
      const auto c = check_condition_II(*a3.gg, *a3.series, bad, 3);
      // level 0 has no edge factor, so rescaling one vertex there is harmless
      CHECK(c.ok == (k == 0));
    }
  auto split = lm;
  split.edge[1][0] = FpScalar{2};
  const auto c = check_condition_II(*a3.gg, *a3.series, split, 3);
  CHECK_FALSE(c.ok);
  CHECK(c.reason.find("opposite") != std::string::npos);
  auto zero = lm;
  zero.vertex[1][0] = FpScalar{0};
  CHECK_FALSE(check_condition_II(*a3.gg, *a3.series, zero, 3).ok);
  auto shortened = lm;
  shortened.vertex.pop_back();
  CHECK_FALSE(check_condition_II(*a3.gg, *a3.series, shortened, 3).ok);
}

TEST_CASE("solved maps satisfy the checker on random scalings") {
  const auto a3 = oracle::fixture("fix_a3");
  LevelMaps lm;
  REQUIRE(check_conditions(*a3.gg, *a3.series, 3, &lm).ok());
  // scaling a whole level uniformly keeps every diagram commuting
  const PrimeField F(3);
  auto scaled = lm;
  for (auto& row : scaled.vertex[1])
    if (row) row = F.mul(*row, FpScalar{2});
  for (auto& row : scaled.edge[1])
    if (row) row = F.mul(*row, FpScalar{2});
  CHECK(check_condition_II(*a3.gg, *a3.series, scaled, 3).ok);
}

TEST_CASE("assignment validation") {
  const auto a = oracle::fixture("fix_a");
  auto sa = *a.series;
  CHECK_FALSE(validate_assignment(*a.gg, sa, 3).ok());
  sa.edge[1] = ChiefSeries({Subgroup::whole(a.gg->edge_group(1)), Subgroup::trivial(a.gg->edge_group(1))});
  CHECK_FALSE(validate_assignment(*a.gg, sa, 2).ok());
}

TEST_CASE("search finds assignments for FIX-A and FIX-D, exhausts FIX-B") {
  for (const char* name : {"fix_a", "fix_a3", "fix_d2", "fix_d3", "fix_e", "fix_c"}) {
    CAPTURE(name);
    const auto pr = oracle::fixture(name);
    const auto r = search_series_assignment(*pr.gg, pr.p);
    REQUIRE(r.found());
    CHECK(validate_assignment(*pr.gg, *r.assignment, pr.p).ok());
    CHECK(check_condition_I(*pr.gg, *r.assignment).empty());
    CHECK(check_condition_II(*pr.gg, *r.assignment, *r.maps, pr.p).ok);
  }
  const auto b = oracle::fixture("fix_b");
  const auto r = search_series_assignment(*b.gg, 3);
  CHECK_FALSE(r.found());
  CHECK(r.min_length == 1);
  CHECK(r.max_length == 3);
  CHECK(r.candidates > 0);
  SearchOptions tight;
  tight.max_group_order = 2;
  CHECK_THROWS_AS(search_series_assignment(*b.gg, 3, tight), BudgetExceeded);
}

TEST_CASE("search agrees with a brute-force check over all padded series") {
  // single-vertex graphs: the search succeeds iff some series of the vertex
  // group passes both conditions
  const auto a3 = oracle::fixture("fix_a3");
  const auto gp = a3.gg->vertex_group(0);
  std::size_t pass = 0;
  for (std::size_t len = 2; len <= 3; ++len)
    for (const auto& s : enumerate_chief_series(gp, 3, len, 1000)) {
      SeriesAssignment sa{{s, s}, {}};
      for (EdgeId e = 0; e < 2; ++e) {
        const auto& mono = a3.gg->mono(e);
        std::vector<Subgroup> terms;
        for (std::size_t k = 0; k <= len; ++k) terms.push_back(mono.preimage(s.term(k)));
        sa.edge.emplace_back(terms);
      }
      if (check_conditions(*a3.gg, sa, 3).ok()) ++pass;
    }
  CHECK(pass > 0);
  CHECK(search_series_assignment(*a3.gg, 3).found());
}

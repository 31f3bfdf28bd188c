#include "doctest.h"
#include "oracles.hpp"

using namespace rpf;

namespace {

GroupPtr c(std::size_t n) { return share(FiniteGroup::cyclic(n)); }

GroupPtr d4() { return share(oracle::metacyclic(4, 2, 3)); }

}  // namespace

TEST_CASE("cyclic groups and prime powers") {
  const auto g = c(8);
  CHECK(g->order() == 8);
  CHECK(g->mul(5, 6) == 3);
  CHECK(g->inv(3) == 5);
  CHECK(g->pow(3, -1) == 5);
  CHECK(g->element_order(2) == 4);
  const auto v = validate_group(*g);
  CHECK(v.report.ok());
  REQUIRE(v.prime_power);
  CHECK(v.prime_power->p == 2);
  CHECK(v.prime_power->m == 3);
  CHECK_FALSE(prime_power_of(12));
  CHECK(prime_power_of(27)->m == 3);
  CHECK(prime_power_of(1)->m == 0);
}

TEST_CASE("validate_group rejects broken tables") {
  SUBCASE("not associative") {
    // a Latin square with identity 0 that is not a group table
    std::vector<Elem> mul{0, 1, 2, 3, 4, 1, 0, 3, 4, 2, 2, 4, 0, 1, 3, 3, 2, 4, 0, 1, 4, 3, 1, 2, 0};
    const FiniteGroup g(5, mul);
    CHECK_FALSE(validate_group(g).report.ok());
    const auto s = find_associativity_violation_serial(g);
    const auto p = find_associativity_violation(g);
    REQUIRE(s);
    REQUIRE(p);
    CHECK(s->a == p->a);
    CHECK(s->b == p->b);
    CHECK(s->c == p->c);
  }
  SUBCASE("identity not at 0") {
    const FiniteGroup g(2, {1, 0, 0, 1});
    CHECK_FALSE(validate_group(g).report.ok());
  }
  SUBCASE("index out of range") { CHECK_THROWS_AS(FiniteGroup(2, {0, 1, 1, 2}), InputError); }
}

TEST_CASE("associativity check agrees between serial and parallel") {
  for (const auto& [name, g] : oracle::two_groups_upto_16()) {
    CAPTURE(name);
    CHECK_FALSE(find_associativity_violation_serial(g));
    CHECK_FALSE(find_associativity_violation(g));
    CHECK(validate_group(g).report.ok());
  }
}

TEST_CASE("catalogue groups are pairwise sound p-groups") {
  for (const auto& [name, g] : oracle::three_groups_upto_27()) {
    CAPTURE(name);
    const auto v = validate_group(g);
    CHECK(v.report.ok());
    REQUIRE(v.prime_power);
    CHECK(v.prime_power->p == 3);
  }
}

TEST_CASE("quotient of C4 by {0,2} is C2") {
  const auto g = c(4);
  const Subgroup n(g, {0, 2});
  CHECK(is_closed(n));
  CHECK(is_normal(n));
  const auto q = quotient_group(g, n);
  CHECK(q.group->order() == 2);
  CHECK(q.projection(1) == 1);
  CHECK(q.projection(2) == 0);
  CHECK(q.projection(3) == 1);
  CHECK(validate_hom(q.projection).ok());
  CHECK(q.projection.kernel() == n);
}

TEST_CASE("D4 modulo its centre is the Klein four group") {
  const auto g = d4();
  const auto normals = normal_subgroups(g);
  // centre: the unique normal subgroup of order 2
  std::optional<Subgroup> centre;
  for (const auto& n : normals)
    if (n.order() == 2) centre = n;
  REQUIRE(centre);
  const auto q = quotient_group(g, *centre);
  CHECK(q.group->order() == 4);
  for (Elem x = 1; x < 4; ++x) CHECK(q.group->element_order(x) == 2);
}

TEST_CASE("quotient by a non-normal subgroup reports a witness") {
  const auto g = d4();
  const Subgroup h(g, {0, 4});  // a reflection
  REQUIRE(is_closed(h));
  const auto w = normality_violation(h);
  REQUIRE(w);
  CHECK_FALSE(h.contains(g->conj(w->g, w->h)));
  CHECK_THROWS_AS(quotient_group(g, h), InputError);
}

TEST_CASE("closures, intersections and joins") {
  const auto g = c(8);
  const Elem two[] = {2};
  const auto s = subgroup_closure(g, two);
  CHECK(s.order() == 4);
  const Elem four[] = {4};
  const auto t = subgroup_closure(g, four);
  CHECK(intersect(s, t) == t);
  CHECK(join(s, t) == s);
  CHECK(t.subset_of(s));
  const auto d = d4();
  const Elem refl[] = {4};
  CHECK(normal_closure(d, refl).order() == 4);
}

TEST_CASE("normal subgroups are sorted and normal") {
  for (const auto& [name, g] : oracle::two_groups_upto_16()) {
    CAPTURE(name);
    const auto gp = share(g);
    const auto ns = normal_subgroups(gp);
    CHECK(ns.front().is_trivial());
    CHECK(ns.back().is_whole());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      CHECK(is_normal(ns[i]));
      if (i) CHECK(ns[i - 1].order() <= ns[i].order());
    }
  }
}

TEST_CASE("homomorphisms") {
  const auto c4 = c(4), c2 = c(2);
  const GroupHom f(c2, c4, {0, 2});
  CHECK(validate_hom(f).ok());
  CHECK(f.is_injective());
  CHECK(f.image() == Subgroup(c4, {0, 2}));
  const GroupHom bad(c2, c4, {0, 1});
  CHECK_FALSE(validate_hom(bad).ok());
  const GroupHom proj(c4, c2, {0, 1, 0, 1});
  const auto comp = compose(proj, f);
  CHECK(comp(1) == 0);
  CHECK(proj.preimage(Subgroup::trivial(c2)) == Subgroup(c4, {0, 2}));
}

TEST_CASE("subgroup relabelling keeps the identity at 0") {
  const auto g = c(9);
  const auto sg = subgroup_as_group(Subgroup(g, {0, 3, 6}));
  CHECK(sg.group->order() == 3);
  CHECK(sg.to_parent == std::vector<Elem>{0, 3, 6});
  CHECK(sg.from_parent[6] == 2);
  CHECK(sg.from_parent[1] == SubgroupGroup::npos);
  CHECK(validate_group(*sg.group).report.ok());
}

TEST_CASE("chief series of C4") {
  const auto g = c(4);
  const ChiefSeries s({Subgroup::whole(g), Subgroup(g, {0, 2}), Subgroup::trivial(g)});
  const auto v = verify_chief_series(s, 2);
  CHECK(v.report.ok());
  CHECK(v.length == 2);
  const auto f = chief_factor(s, 0);
  CHECK(f.kind == ChiefFactor::Kind::OrderP);
  CHECK(f.generator == 1);
  CHECK(factor_coordinate(s, 0, 2, 3) == 1u);
  CHECK(factor_coordinate(s, 0, 2, 2) == 0u);
  CHECK(factor_coordinate(s, 1, 2, 2) == 1u);
  CHECK_FALSE(factor_coordinate(s, 1, 2, 1));
  CHECK(chief_factor(s, 5).trivial());
}

TEST_CASE("verify_chief_series rejects bad series") {
  const auto g = c(4);
  SUBCASE("factor of order 4") {
    const ChiefSeries s({Subgroup::whole(g), Subgroup::trivial(g)});
    CHECK_FALSE(verify_chief_series(s, 2).report.ok());
  }
  SUBCASE("not starting at the whole group") {
    const ChiefSeries s({Subgroup(g, {0, 2}), Subgroup::trivial(g)});
    CHECK_FALSE(verify_chief_series(s, 2).report.ok());
  }
  SUBCASE("wrong prime") {
    const auto h = c(3);
    const ChiefSeries s({Subgroup::whole(h), Subgroup::trivial(h)});
    CHECK_FALSE(verify_chief_series(s, 2).report.ok());
  }
  SUBCASE("term not normal") {
    const auto d = d4();
    const ChiefSeries s({Subgroup::whole(d), Subgroup(d, {0, 2, 4, 6}), Subgroup(d, {0, 4}), Subgroup::trivial(d)});
    CHECK_FALSE(verify_chief_series(s, 2).report.ok());
  }
}

TEST_CASE("enumerated chief series all verify") {
  for (const auto& [name, g] : oracle::two_groups_upto_16()) {
    CAPTURE(name);
    const auto gp = share(g);
    const auto m = prime_power_of(g.order())->m;
    const auto all = enumerate_chief_series(gp, 2, m, 100000);
    CHECK_FALSE(all.empty());
    for (const auto& s : all) CHECK(verify_chief_series(s, 2).report.ok());
    const auto padded = enumerate_chief_series(gp, 2, m + 1, 100000);
    CHECK(padded.size() == all.size() * (m + 1));
  }
  // C2 x C2 has three maximal chains
  const auto k4 = share(FiniteGroup::direct_product(FiniteGroup::cyclic(2), FiniteGroup::cyclic(2)));
  CHECK(enumerate_chief_series(k4, 2, 2, 100).size() == 3);
}

TEST_CASE("from_permutations") {
  std::vector<Elem> idx;
  const auto g = FiniteGroup::from_permutations({{1, 2, 3, 0}, {0, 3, 2, 1}}, 100, &idx);
  CHECK(g.order() == 8);
  CHECK(validate_group(g).report.ok());
  REQUIRE(idx.size() == 2);
  CHECK(g.element_order(idx[0]) == 4);
  CHECK(g.element_order(idx[1]) == 2);
  CHECK_THROWS_AS(FiniteGroup::from_permutations({{1, 2, 3, 4, 0}, {1, 0, 2, 3, 4}}, 50), BudgetExceeded);
}

TEST_CASE("prime field arithmetic") {
  const PrimeField f(5);
  CHECK(f.make(-1).value == 4);
  CHECK(f.mul(f.make(3), f.inv(f.make(3))).value == 1);
  CHECK(f.pow(f.make(2), 4).value == 1);
  CHECK_THROWS_AS(f.inv(FpScalar{0}), InternalError);
  CHECK(is_prime(7));
  CHECK_FALSE(is_prime(9));
  CHECK_FALSE(is_prime(1));
}

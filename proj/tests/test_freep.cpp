#include "doctest.h"
#include "oracles.hpp"

using namespace rpf;

namespace {

FreeWord random_free_word(std::mt19937& rng, std::uint32_t rank, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), sign(0, 1);
  std::uniform_int_distribution<std::uint32_t> gen(0, rank - 1);
  FreeWord w;
  for (int n = len(rng); n > 0; --n) w.push_back({gen(rng), sign(rng) ? 1 : -1});
  return w;
}

// Dense reference: coefficients indexed by every monomial up to the degree.
std::map<Monomial, std::uint32_t> dense_product(const TruncatedPoly& a, const TruncatedPoly& b) {
  std::map<Monomial, std::uint32_t> out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (ma.size() + mb.size() > a.degree()) continue;
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      auto& c = out[m];
      c = static_cast<std::uint32_t>((c + std::uint64_t{ca} * cb) % a.prime());
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

}  // namespace

TEST_CASE("truncated polynomials") {
  TruncatedPoly a(3, 2, 2);
  a.add({}, 1);
  a.add({0}, 2);
  a.add({0, 1, 1}, 1);
  CHECK(a.terms().size() == 2);
  a.add({0}, 1);
  CHECK(a.coefficient({0}) == 0);
  CHECK(a.terms().size() == 1);
  CHECK(a.is_one());
  CHECK(TruncatedPoly::one(3, 2, 2) == a);
}

TEST_CASE("serial and parallel products agree with a dense reference") {
  std::mt19937 rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t p = i % 2 ? 3 : 2, rank = 1 + i % 3, d = 1 + i % 5;
    const auto u = magnus_image_serial(random_free_word(rng, rank, 6), p, rank, d);
    const auto v = magnus_image_serial(random_free_word(rng, rank, 6), p, rank, d);
    const auto s = multiply_serial(u, v);
    CHECK(s == multiply(u, v));
    CHECK(s.terms() == dense_product(u, v));
  }
}

TEST_CASE("free reduction") {
  const FreeWord w{{0, 1}, {1, 1}, {1, -1}, {0, -1}, {2, 1}};
  CHECK(free_reduce(w) == FreeWord{{2, 1}});
  CHECK(free_reduce(free_inverse(w)) == FreeWord{{2, -1}});
  std::mt19937 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto u = random_free_word(rng, 3, 10);
    const auto r = free_reduce(u);
    CHECK(free_reduce(r) == r);
    FreeWord uu = u;
    const auto inv = free_inverse(u);
    uu.insert(uu.end(), inv.begin(), inv.end());
    CHECK(free_reduce(uu).empty());
  }
}

TEST_CASE("Magnus letters") {
  const auto x = magnus_letter(2, 1, 4, {0, 1});
  CHECK(x.coefficient({}) == 1);
  CHECK(x.coefficient({0}) == 1);
  CHECK(x.terms().size() == 2);
  const auto xi = magnus_letter(3, 1, 4, {0, -1});
  // (1 + X)^-1 = 1 - X + X^2 - X^3 + X^4
  CHECK(xi.coefficient({0}) == 2);
  CHECK(xi.coefficient({0, 0}) == 1);
  CHECK(xi.coefficient({0, 0, 0}) == 2);
  CHECK(xi.coefficient({0, 0, 0, 0}) == 1);
  CHECK(multiply(magnus_letter(3, 1, 4, {0, 1}), xi).is_one());
}

TEST_CASE("Magnus separation examples") {
  SUBCASE("x^2 at p = 2 first shows at degree 2") {
    const auto w = separate_free({{0, 1}, {0, 1}}, 2, 1);
    CHECK(w.degree == 2);
    CHECK(w.monomial == Monomial{0, 0});
    CHECK(w.coefficient == 1);
  }
  SUBCASE("x^3 at p = 3 first shows at degree 3") {
    const auto w = separate_free({{0, 1}, {0, 1}, {0, 1}}, 3, 1);
    CHECK(w.degree == 3);
    CHECK(w.monomial == Monomial{0, 0, 0});
  }
  SUBCASE("x^p^2 at p = 2 first shows at degree 4") { CHECK(separate_free(FreeWord(4, {0, 1}), 2, 1).degree == 4); }
  SUBCASE("x^2 at p = 3 shows at degree 1") { CHECK(separate_free({{0, 1}, {0, 1}}, 3, 1).degree == 1); }
  SUBCASE("the commutator shows at degree 2 with X_1 X_2") {
    for (std::uint32_t p : {2u, 3u, 5u}) {
      const auto w = separate_free({{0, 1}, {1, 1}, {0, -1}, {1, -1}}, p, 2);
      CHECK(w.degree == 2);
      CHECK(w.monomial == Monomial{0, 1});
      CHECK(w.coefficient == 1);
    }
  }
  SUBCASE("trivial words are refused") {
    CHECK_THROWS_AS(separate_free({}, 2, 1), InputError);
    CHECK_THROWS_AS(separate_free({{0, 1}, {0, -1}}, 2, 1), InputError);
  }
  SUBCASE("degree cap") { CHECK_THROWS_AS(separate_free(FreeWord(8, {0, 1}), 2, 1, 4), BudgetExceeded); }
}

TEST_CASE("Magnus image is multiplicative with inverses") {
  std::mt19937 rng(9);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t p = i % 3 == 0 ? 5 : (i % 2 ? 3 : 2), rank = 1 + i % 3, d = 1 + i % 6;
    const auto u = random_free_word(rng, rank, 6), v = random_free_word(rng, rank, 6);
    FreeWord uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const auto iu = magnus_image(u, p, rank, d);
    CHECK(iu == magnus_image_serial(u, p, rank, d));
    CHECK(magnus_image(uv, p, rank, d) == multiply(iu, magnus_image(v, p, rank, d)));
    CHECK(multiply(iu, magnus_image(free_inverse(u), p, rank, d)).is_one());
    CHECK(magnus_image(u, p, rank, d) == magnus_image(free_reduce(u), p, rank, d));
  }
}

TEST_CASE("every nontrivial short word is separated") {
  std::mt19937 rng(4);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t p = i % 2 ? 3 : 2;
    const auto w = free_reduce(random_free_word(rng, 2, 8));
    if (w.empty()) continue;
    const auto s = separate_free(w, p, 2);
    const auto img = magnus_image(w, p, 2, s.degree);
    CHECK(img.coefficient(s.monomial) == s.coefficient);
    CHECK(s.monomial.size() == s.degree);
    if (s.degree > 1) CHECK(magnus_image(w, p, 2, s.degree - 1).is_one());
    const auto wit = magnus_witness(img);
    REQUIRE(wit);
    CHECK(wit->monomial == s.monomial);
  }
}

// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <chrono>
#include <cstdio>
#include <sstream>

#include "oracles.hpp"

using namespace rpf;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

Outcome conditions_checker() {
  Outcome o;
  const auto a = oracle::fixture("fix_a");
  const auto& gg = *a.gg;
  LevelMaps lm;
  const auto r = check_conditions(gg, *a.series, a.p, &lm);
  o.require(r.condition_I.empty(), "condition I fails on the aligned series");
  o.require(!r.condition_II.has_value(), "condition II unsolved on the aligned series");
  if (!o.pass) return o;
  o.require(check_condition_II(gg, *a.series, lm, a.p).ok, "solved maps do not recheck");
  for (VertexId v = 0; v < 2; ++v) o.require(lm.vertex[1][v] == FpScalar{1}, "level-1 vertex scalar differs from 1");

  const auto bad = oracle::fixture("fix_a_misaligned");
  const auto failures = check_condition_I(*bad.gg, *bad.series);
  o.require(!failures.empty(), "misaligned edge series passes condition I");
  for (const auto& f : failures) {
    o.require(f.level == 1, "failure reported at level " + std::to_string(f.level));
    // direct computation of the two subgroups
    const auto& g = bad.gg->graph();
    std::vector<Elem> image, inter;
    for (Elem h : bad.series->edge[f.edge].term(1).elements()) image.push_back(bad.gg->mono(f.edge)(h));
    std::sort(image.begin(), image.end());
    for (Elem x = 0; x < 4; ++x)
      if (bad.gg->in_image(f.edge, x) && bad.series->vertex[g.terminus(f.edge)].term(1).contains(x)) inter.push_back(x);
    o.require(f.image == image && f.intersection == inter, "witness differs from direct computation");
    o.require(f.image == std::vector<Elem>{0} && f.intersection == std::vector<Elem>{0, 2}, "witness is not {0} vs {0,2}");
  }
  return o;
}

Outcome holonomy_failure() {
  Outcome o;
  const auto b = oracle::fixture("fix_b");
  const auto r = check_conditions(*b.gg, *b.series, b.p);
  o.require(r.condition_I.empty(), "condition I fails on FIX-B");
  o.require(r.condition_II.has_value(), "condition II passes on FIX-B");
  if (!o.pass) return o;
  o.require(r.condition_II->holonomy == FpScalar{2}, "holonomy is " + std::to_string(r.condition_II->holonomy.value));

  bool a_survives = false;
  std::size_t homs = 0;
  const GWord a{0, {VertexLetter{0, 1}}};
  for (const auto& [name, P] : oracle::three_groups_upto_27()) {
    oracle::for_each_hom(*b.gg, *b.sd, P, [&](const auto& vimg, const auto& simg) {
      ++homs;
      if (oracle::evaluate(*b.gg, *b.sd, P, vimg, simg, a) != 0) a_survives = true;
      return true;
    });
  }
  o.require(homs > 0, "no homomorphisms enumerated");
  o.require(!a_survives, "a survives in some 3-group of order <= 27");
  o.detail = std::to_string(homs) + " homomorphisms, a killed in all";
  return o;
}

Outcome separation_soundness() {
  Outcome o;
  std::size_t runs = 0;
  for (const char* name : {"fix_a", "fix_d2", "fix_d3", "fix_e"}) {
    const auto pr = oracle::fixture(name);
    const auto st = oracle::stage_of(pr);
    const std::size_t n = st.sa.length_bound();
    std::vector<GWord> words;
    for (auto& w : oracle::all_words(*pr.gg, *pr.sd, 4))
      if (!is_trivial(*pr.gg, *pr.sd, w)) words.push_back(std::move(w));
    const auto results = separate_batch(st, pr.p, words);
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto& res = results[i];
      const auto where = std::string(name) + " " + format_word(*pr.gg, words[i]);
      o.require(res.certificate.has_value(), where + ": " + res.error);
      if (!res.certificate) continue;
      o.require(res.certificate->steps.size() <= n + 1, where + ": descent deeper than N + 1");
      const auto v = verify_certificate(st, pr.p, words[i], *res.certificate);
      o.require(v.ok, where + ": " + v.reason);
      ++runs;
    }
  }
  if (o.pass) o.detail = std::to_string(runs) + " words separated and verified";
  return o;
}

Outcome cover_invariants() {
  Outcome o;
  {
    const auto e = oracle::fixture("fix_e");
    const auto st = oracle::stage_of(e);
    const auto ph = build_level_hom(*st.gg, st.sd, st.sa, st.lm, e.p);
    const auto kc = build_kernel_cover(st.gg, st.sd, st.sa, st.lm, ph);
    const auto& cg = kc.cover->graph();
    o.require(check_kernel_cover(kc, ph).ok(), "FIX-E cover fails its checks");
    o.require(cg.vertex_count() == 2 && cg.edge_count() == 4, "FIX-E cover is not a 2-cycle");
    for (VertexId v = 0; v < cg.vertex_count(); ++v)
      o.require(kc.cover->vertex_group(v)->order() == 1, "FIX-E cover vertex group is nontrivial");
    o.require(graph_rank(cg) == 1, "FIX-E cover rank is " + std::to_string(graph_rank(cg)));
  }
  for (std::uint32_t p : {2u, 3u})
    for (std::uint32_t r : {1u, 2u, 3u}) {
      const auto pr = oracle::rose(p, r);
      const auto st = oracle::stage_of(pr);
      const auto ph = build_level_hom(*st.gg, st.sd, st.sa, st.lm, p);
      const auto kc = build_kernel_cover(st.gg, st.sd, st.sa, st.lm, ph);
      const auto where = "rose p=" + std::to_string(p) + " r=" + std::to_string(r);
      o.require(ph.forced_edge.has_value(), where + ": no forced stable letter");
      o.require(check_kernel_cover(kc, ph).ok(), where + ": cover fails its checks");
      const std::size_t expect = p * (r - 1) + 1;
      o.require(graph_rank(kc.cover->graph()) == expect,
                where + ": rank " + std::to_string(graph_rank(kc.cover->graph())) + " != " + std::to_string(expect));
    }
  return o;
}

Outcome free_base_case() {
  Outcome o;
  const auto w2 = separate_free({{0, 1}, {0, 1}}, 2, 1);
  o.require(w2.degree == 2, "x1^2 at p=2 separated at degree " + std::to_string(w2.degree));
  const auto w3 = separate_free({{0, 1}, {0, 1}, {0, 1}}, 3, 1);
  o.require(w3.degree == 3, "x1^3 at p=3 separated at degree " + std::to_string(w3.degree));

  std::mt19937 rng(20240611);
  auto word = [&](std::uint32_t rank) {
    std::uniform_int_distribution<int> len(0, 6), gen(0, static_cast<int>(rank) - 1), sign(0, 1);
    FreeWord w;
    for (int n = len(rng); n > 0; --n) w.push_back({static_cast<std::uint32_t>(gen(rng)), sign(rng) ? 1 : -1});
    return w;
  };
  for (int i = 0; i < 1000 && o.pass; ++i) {
    const std::uint32_t p = i % 2 ? 3 : 2;
    const std::uint32_t rank = 1 + static_cast<std::uint32_t>(rng() % 3);
    const std::uint32_t d = 1 + static_cast<std::uint32_t>(rng() % 6);
    const FreeWord u = word(rank), v = word(rank);
    FreeWord uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const auto iu = magnus_image(u, p, rank, d);
    o.require(magnus_image(uv, p, rank, d) == multiply_serial(iu, magnus_image(v, p, rank, d)), "multiplicativity fails");
    o.require(multiply(magnus_image(free_inverse(u), p, rank, d), iu).is_one(), "inverse law fails");
    o.require(iu.coefficient({}) == 1, "constant term is not 1");
  }
  return o;
}

Outcome normal_forms() {
  Outcome o;
  std::mt19937 rng(7);
  for (const char* name : {"fix_a", "fix_a3", "fix_b", "fix_c", "fix_d2", "fix_d3", "fix_e"}) {
    const auto pr = oracle::fixture(name);
    const auto& gg = *pr.gg;
    const auto& sd = *pr.sd;
    for (int i = 0; i < 1000; ++i) {
      const GWord w = oracle::random_word(rng, gg, sd, 8);
      const GWord r = reduce_word(gg, sd, w);
      o.require(reduce_word(gg, sd, r) == r, std::string(name) + ": reduce is not idempotent on " + format_word(gg, w));
      o.require(is_trivial(gg, sd, concat(w, inverse(gg, r))), std::string(name) + ": reduce changes " + format_word(gg, w));
      if (std::string(name) == "fix_a")
        o.require(oracle::amalgam_form(w) == oracle::amalgam_form(r), "FIX-A oracle disagrees on " + format_word(gg, w));
      if (std::string(name) == "fix_b")
        o.require(oracle::semidirect_form(w) == oracle::semidirect_form(r), "FIX-B oracle disagrees on " + format_word(gg, w));
    }
  }
  std::size_t pairs = 0;
  for (const char* name : {"fix_a", "fix_b"}) {
    const auto pr = oracle::fixture(name);
    const auto words = oracle::all_words(*pr.gg, *pr.sd, 3);
    const bool amalgam = std::string(name) == "fix_a";
    for (const auto& u : words)
      for (const auto& v : words) {
        const bool expect = amalgam ? oracle::amalgam_form(u) == oracle::amalgam_form(v)
                                    : oracle::semidirect_form(u) == oracle::semidirect_form(v);
        if (words_equal(*pr.gg, *pr.sd, u, v) != expect) {
          o.require(false, std::string(name) + ": words_equal disagrees on " + format_word(*pr.gg, u) + " vs " +
                               format_word(*pr.gg, v));
        }
        ++pairs;
      }
  }
  if (o.pass) o.detail = std::to_string(pairs) + " pairs compared";
  return o;
}

Outcome explicit_quotient() {
  Outcome o;
  const auto e = oracle::fixture("fix_e");
  const auto st = oracle::stage_of(e);
  const GWord w = parse_word(e, "a b a b");
  const auto cert = separate(st, e.p, w);
  const auto q = build_explicit_quotient(st, e.p, cert);
  const auto pp = prime_power_of(q.group->order());
  o.require(pp && pp->p == 2, "|P| = " + std::to_string(q.group->order()) + " is not a power of 2");
  o.require(q.group->order() <= 64, "|P| exceeds 2^6");
  o.require(check_quotient_relations(*e.gg, *e.sd, q).ok(), "relations do not map to the identity");
  o.require(q.image(w) != 0, "w maps to the identity");
  if (o.pass) o.detail = "|P| = " + std::to_string(q.group->order()) + " on " + std::to_string(q.cosets) + " cosets";
  return o;
}

Outcome converse_search() {
  Outcome o;
  for (const char* name : {"fix_a", "fix_d2", "fix_d3"}) {
    const auto pr = oracle::fixture(name);
    const auto r = search_series_assignment(*pr.gg, pr.p);
    o.require(r.found(), std::string(name) + ": search exhausted");
    if (r.found()) {
      LevelMaps lm;
      o.require(check_conditions(*pr.gg, *r.assignment, pr.p, &lm).ok(), std::string(name) + ": found series fail");
      o.require(check_condition_II(*pr.gg, *r.assignment, *r.maps, pr.p).ok, std::string(name) + ": found maps fail");
    }
  }
  const auto b = oracle::fixture("fix_b");
  const auto r = search_series_assignment(*b.gg, b.p);
  o.require(!r.found(), "FIX-B search found an assignment");
  if (o.pass) o.detail = "FIX-B exhausted over lengths " + std::to_string(r.min_length) + ".." + std::to_string(r.max_length);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "conditions checker", 1, conditions_checker},
      {2, "holonomy failure", 30, holonomy_failure},
      {3, "separation soundness", 60, separation_soundness},
      {4, "cover invariants", 5, cover_invariants},
      {5, "free base case", 10, free_base_case},
      {6, "normal forms", 30, normal_forms},
      {7, "explicit quotient", 10, explicit_quotient},
      {8, "converse search", 60, converse_search},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.pass && secs > c.limit_s) {
      o.pass = false;
      o.detail = "over time limit of " + std::to_string(c.limit_s) + " s";
    }
    failed += !o.pass;
    std::printf("criterion %d (%s): %s  %.2fs%s%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.empty() ? "" : "  ", o.detail.c_str());
  }
  return failed ? 1 : 0;
}

#include "rpf/separate.hpp"

#include <algorithm>
#include <map>

namespace rpf {

bool Stage::all_groups_trivial() const {
  for (VertexId v = 0; v < gg->graph().vertex_count(); ++v)
    if (gg->vertex_group(v)->order() != 1) return false;
  return true;
}

namespace {

void require_conditions(const Stage& s, std::uint32_t p) {
  if (auto r = validate_assignment(*s.gg, s.sa, p); !r.ok()) throw InputError("invalid series: " + r.violations.front());
  if (!check_condition_I(*s.gg, s.sa).empty()) throw InputError("condition I does not hold");
  if (auto c = check_condition_II(*s.gg, s.sa, s.lm, p); !c.ok) throw InputError("condition II does not hold: " + c.reason);
}

FreeWord to_free_word(const Stage& s, const GWord& w) {
  const auto stable = stable_edges(s.gg->graph(), s.sd);
  FreeWord out;
  for (const auto& letter : w.letters) {
    if (const auto* v = std::get_if<VertexLetter>(&letter)) {
      if (v->element != 0) throw InternalError("vertex letter in a free stage");
      continue;
    }
    const auto& x = std::get<StableLetter>(letter);
    if (s.sd.in_tree(x.edge)) continue;
    const EdgeId pos = s.sd.is_positive(x.edge) ? x.edge : s.gg->graph().bar(x.edge);
    const auto it = std::find(stable.begin(), stable.end(), pos);
    out.push_back({static_cast<std::uint32_t>(it - stable.begin()), x.exponent});
  }
  return free_reduce(out);
}

std::size_t edge_pairs(const Graph& g) { return g.edge_count() / 2; }

// The chain of stages, level homs and covers a certificate walks through.
struct Link {
  Stage stage;
  std::optional<LevelHom> ph;
  std::optional<KernelCover> kc;
};

Stage next_stage(const KernelCover& kc) { return Stage{kc.cover, kc.cover_sd, kc.series, kc.maps}; }

Stage reindexed(const Stage& s) { return Stage{s.gg, s.sd, shift_series(s.sa), shift_maps(s.lm)}; }

std::vector<Link> rebuild_chain(const Stage& stage, std::uint32_t p, const SeparationCertificate& cert) {
  std::vector<Link> chain;
  Stage cur = stage;
  for (const auto& step : cert.steps) {
    Link link{cur, build_level_hom(*cur.gg, cur.sd, cur.sa, cur.lm, p), std::nullopt};
    if (step.kind == DescentStep::Kind::Reindexed) {
      cur = reindexed(cur);
    } else {
      link.kc = build_kernel_cover(cur.gg, cur.sd, cur.sa, cur.lm, *link.ph);
      cur = next_stage(*link.kc);
    }
    chain.push_back(std::move(link));
  }
  Link last{cur, std::nullopt, std::nullopt};
  if (std::holds_alternative<LevelTerminal>(cert.terminal)) last.ph = build_level_hom(*cur.gg, cur.sd, cur.sa, cur.lm, p);
  chain.push_back(std::move(last));
  return chain;
}

}  // namespace

SeparationCertificate separate(const Stage& stage, std::uint32_t p, const GWord& w, const SeparateOptions& opts) {
  require_conditions(stage, p);
  SeparationCertificate cert;
  cert.p = p;
  cert.word = reduce_word(*stage.gg, stage.sd, w);
  if (cert.word.empty()) throw InputError("word reduces to the identity");

  const std::size_t guard = stage.sa.length_bound() + 1;
  Stage cur = stage;
  GWord word = cert.word;
  while (true) {
    if (cert.steps.size() > guard) throw InternalError("descent exceeded N + 1 steps");
    const std::size_t n = cur.sa.length_bound();
    if (cur.all_groups_trivial()) {
      FreeTerminal t;
      t.rank = static_cast<std::uint32_t>(stable_edges(cur.gg->graph(), cur.sd).size());
      t.word = to_free_word(cur, word);
      t.witness = separate_free(t.word, p, t.rank, opts.max_free_degree);
      cert.terminal_word = word;
      cert.terminal = std::move(t);
      return cert;
    }
    const LevelHom ph = build_level_hom(*cur.gg, cur.sd, cur.sa, cur.lm, p);
    DescentStep step;
    step.length_bound = n;
    step.forced_edge = ph.forced_edge;
    step.word = word;
    if (!ph.surjective()) {
      if (n == 0) throw InternalError("nontrivial groups with an empty series");
      step.kind = DescentStep::Kind::Reindexed;
      cert.steps.push_back(std::move(step));
      cur = reindexed(cur);
      continue;
    }
    const FpScalar value = eval_level_hom(ph, *cur.gg, word);
    if (value.value != 0) {
      cert.terminal_word = word;
      cert.terminal = LevelTerminal{value, ph.forced_edge};
      return cert;
    }
    const KernelCover kc = build_kernel_cover(cur.gg, cur.sd, cur.sa, cur.lm, ph);
    step.kind = DescentStep::Kind::Descended;
    step.rewritten = rewrite_into_kernel(kc, ph, word);
    step.cover_vertices = kc.cover->graph().vertex_count();
    step.cover_edge_pairs = edge_pairs(kc.cover->graph());
    if (step.rewritten.empty()) throw InternalError("nontrivial word rewrote to the identity");
    if (n > 0 && kc.series.length_bound() != n - 1) throw InternalError("series length did not drop in the cover");
    word = step.rewritten;
    cert.steps.push_back(std::move(step));
    cur = next_stage(kc);
  }
}

VerifyResult verify_certificate(const Stage& stage, std::uint32_t p, const GWord& w, const SeparationCertificate& cert) {
  auto fail = [](std::size_t step, std::string why) { return VerifyResult{false, step, std::move(why)}; };
  std::size_t at = 0;
  try {
    if (cert.p != p) return fail(0, "certificate is for a different prime");
    require_conditions(stage, p);
    check_word(*stage.gg, cert.word);
    if (w.basepoint != cert.word.basepoint || !words_equal(*stage.gg, stage.sd, w, cert.word))
      return fail(0, "certificate word differs from the input word");
    if (is_trivial(*stage.gg, stage.sd, w)) return fail(0, "input word is trivial");

    Stage cur = stage;
    GWord word = cert.word;
    for (std::size_t i = 0; i < cert.steps.size(); ++i, at = i) {
      const auto& step = cert.steps[i];
      if (cur.all_groups_trivial()) return fail(i, "descent continues past the free stage");
      if (step.length_bound != cur.sa.length_bound()) return fail(i, "recorded series length differs");
      if (!words_equal(*cur.gg, cur.sd, step.word, word)) return fail(i, "step word differs from the running word");
      const LevelHom ph = build_level_hom(*cur.gg, cur.sd, cur.sa, cur.lm, p);
      if (ph.forced_edge != step.forced_edge) return fail(i, "forced stable letter differs");
      if (step.kind == DescentStep::Kind::Reindexed) {
        if (ph.surjective()) return fail(i, "reindexing a level whose map is onto");
        cur = reindexed(cur);
        continue;
      }
      if (!ph.surjective()) return fail(i, "level map is not onto");
      if (eval_level_hom(ph, *cur.gg, word).value != 0) return fail(i, "level value of a descended word is nonzero");
      const KernelCover kc = build_kernel_cover(cur.gg, cur.sd, cur.sa, cur.lm, ph);
      if (step.cover_vertices != kc.cover->graph().vertex_count() ||
          step.cover_edge_pairs != edge_pairs(kc.cover->graph()))
        return fail(i, "cover shape differs");
      check_word(*kc.cover, step.rewritten);
      if (!words_equal(*cur.gg, cur.sd, kc.embed(step.rewritten), word))
        return fail(i, "rewritten word does not embed onto the running word");
      cur = next_stage(kc);
      word = step.rewritten;
    }

    const std::size_t t = at = cert.steps.size();
    if (!words_equal(*cur.gg, cur.sd, cert.terminal_word, word)) return fail(t, "terminal word differs");
    if (const auto* lv = std::get_if<LevelTerminal>(&cert.terminal)) {
      if (cur.all_groups_trivial()) return fail(t, "level terminal at a free stage");
      const LevelHom ph = build_level_hom(*cur.gg, cur.sd, cur.sa, cur.lm, p);
      const FpScalar value = eval_level_hom(ph, *cur.gg, word);
      if (value.value == 0 || value != lv->value) return fail(t, "level value does not reproduce");
      return {};
    }
    const auto& fr = std::get<FreeTerminal>(cert.terminal);
    if (!cur.all_groups_trivial()) return fail(t, "free terminal with nontrivial vertex groups");
    if (fr.rank != stable_edges(cur.gg->graph(), cur.sd).size()) return fail(t, "free rank differs");
    if (to_free_word(cur, word) != free_reduce(fr.word)) return fail(t, "free word differs");
    if (fr.witness.coefficient == 0 || fr.witness.monomial.empty()) return fail(t, "empty Magnus witness");
    const auto image = magnus_image(fr.word, p, fr.rank, fr.witness.degree);
    if (image.coefficient(fr.witness.monomial) != fr.witness.coefficient)
      return fail(t, "Magnus coefficient does not reproduce");
    return {};
  } catch (const Error& e) {
    return fail(at, e.what());
  }
}

namespace {

BatchResult separate_one(const Stage& stage, std::uint32_t p, const GWord& w, const SeparateOptions& opts) {
  BatchResult r;
  try {
    r.certificate = separate(stage, p, w, opts);
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<BatchResult> separate_batch_serial(const Stage& stage, std::uint32_t p, const std::vector<GWord>& words,
                                               const SeparateOptions& opts) {
  std::vector<BatchResult> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(separate_one(stage, p, w, opts));
  return out;
}

std::vector<BatchResult> separate_batch(const Stage& stage, std::uint32_t p, const std::vector<GWord>& words,
                                        const SeparateOptions& opts) {
  std::vector<BatchResult> out(words.size());
  const auto n = static_cast<std::ptrdiff_t>(words.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = separate_one(stage, p, words[i], opts);
  return out;
}

// ---------------------------------------------------------------------------
// explicit quotient

namespace {

bool in_terminal_subgroup(const std::vector<Link>& chain, const SeparationCertificate& cert, std::uint32_t p,
                          const GWord& w) {
  GWord word = w;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    const auto& link = chain[i];
    if (!link.kc) continue;
    word = reduce_word(*link.stage.gg, link.stage.sd, word);
    if (eval_level_hom(*link.ph, *link.stage.gg, word).value != 0) return false;
    word = rewrite_into_kernel(*link.kc, *link.ph, word);
  }
  const auto& last = chain.back();
  word = reduce_word(*last.stage.gg, last.stage.sd, word);
  if (last.ph) return eval_level_hom(*last.ph, *last.stage.gg, word).value == 0;
  const auto& fr = std::get<FreeTerminal>(cert.terminal);
  return magnus_image(to_free_word(last.stage, word), p, fr.rank, fr.witness.degree).is_one();
}

}  // namespace

Elem ExplicitQuotient::image(const GWord& w) const {
  Elem acc = 0;
  for (const auto& letter : w.letters) {
    std::uint32_t k = kNone;
    int exponent = 1;
    if (const auto* v = std::get_if<VertexLetter>(&letter)) {
      if (v->element != 0) k = vertex_offset.at(v->vertex) + v->element - 1;
    } else {
      const auto& s = std::get<StableLetter>(letter);
      k = edge_generator.at(s.edge);
      exponent = s.exponent;
    }
    if (k == kNone) continue;
    const Elem x = generator_images.at(k);
    acc = group->mul(acc, exponent > 0 ? x : group->inv(x));
  }
  return acc;
}

ExplicitQuotient build_explicit_quotient(const Stage& stage, std::uint32_t p, const SeparationCertificate& cert,
                                         const QuotientBudget& budget) {
  const auto& gg = *stage.gg;
  const auto& g = gg.graph();
  const auto chain = rebuild_chain(stage, p, cert);

  ExplicitQuotient q;
  std::vector<GWord> gen_words;
  q.edge_generator.assign(g.edge_count(), kNone);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    q.vertex_offset.push_back(static_cast<std::uint32_t>(q.generators.size()));
    for (Elem a = 1; a < gg.vertex_group(v)->order(); ++a) {
      q.generators.emplace_back(VertexLetter{v, a});
      gen_words.push_back(GWord{stage.sd.root, {VertexLetter{v, a}}});
    }
  }
  for (EdgeId y : stable_edges(g, stage.sd)) {
    q.edge_generator[y] = q.edge_generator[g.bar(y)] = static_cast<std::uint32_t>(q.generators.size());
    q.generators.emplace_back(StableLetter{y, 1});
    gen_words.push_back(GWord{stage.sd.root, {StableLetter{y, 1}}});
  }

  // left cosets R_i U, found breadth-first; x R_i U = R_j U iff R_j^-1 x R_i in U
  std::vector<GWord> reps{GWord{stage.sd.root, {}}};
  std::vector<std::vector<std::uint32_t>> action(gen_words.size());
  auto locate = [&](const GWord& u) -> std::optional<std::uint32_t> {
    for (std::uint32_t j = 0; j < reps.size(); ++j)
      if (in_terminal_subgroup(chain, cert, p, concat(inverse(gg, reps[j]), u))) return j;
    return std::nullopt;
  };
  for (std::size_t head = 0; head < reps.size(); ++head) {
    for (std::size_t k = 0; k < gen_words.size(); ++k) {
      const GWord u = reduce_word(gg, stage.sd, concat(gen_words[k], reps[head]));
      auto j = locate(u);
      if (!j) {
        if (reps.size() >= budget.max_cosets)
          throw BudgetExceeded("coset enumeration exceeds " + std::to_string(budget.max_cosets) + " cosets");
        j = static_cast<std::uint32_t>(reps.size());
        reps.push_back(u);
      }
      action[k].push_back(*j);
    }
  }
  q.cosets = reps.size();
  q.permutations = std::move(action);
  for (const auto& perm : q.permutations)
    if (perm.size() != q.cosets) throw InternalError("incomplete coset table");

  if (q.permutations.empty()) {
    q.group = share(FiniteGroup::trivial());
  } else {
    q.group = share(FiniteGroup::from_permutations(q.permutations, budget.max_order, &q.generator_images));
  }
  q.generator_images.resize(q.generators.size(), 0);
  q.word_image = q.image(cert.word);

  if (!prime_power_of(q.group->order()) || (q.group->order() > 1 && prime_power_of(q.group->order())->p != p))
    throw InternalError("quotient order is not a power of p");
  if (q.word_image == 0) throw InternalError("word maps to the identity in the quotient");
  if (auto r = check_quotient_relations(gg, stage.sd, q); !r.ok()) throw InternalError(r.violations.front());
  return q;
}

ValidationReport check_quotient_relations(const GraphOfGroups& gg, const SpanningData& sd, const ExplicitQuotient& q) {
  ValidationReport r;
  const auto& g = gg.graph();
  const auto& P = *q.group;
  auto img = [&](const GWord& w) { return q.image(w); };
  auto vl = [&](VertexId v, Elem a) { return GWord{sd.root, {VertexLetter{v, a}}}; };
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& gv = *gg.vertex_group(v);
    for (Elem a = 0; a < gv.order(); ++a)
      for (Elem b = 0; b < gv.order(); ++b)
        if (P.mul(img(vl(v, a)), img(vl(v, b))) != img(vl(v, gv.mul(a, b)))) {
          r.fail("vertex relation fails at " + g.vertex_name(v));
          a = b = static_cast<Elem>(gv.order());
        }
  }
  for (EdgeId y = 0; y < g.edge_count(); ++y) {
    if (!sd.is_positive(y)) continue;
    const Elem s = sd.in_tree(y) ? 0 : img(GWord{sd.root, {StableLetter{y, 1}}});
    for (Elem h = 0; h < gg.edge_group(y)->order(); ++h) {
      const Elem lhs = img(vl(g.origin(y), gg.mono(g.bar(y))(h)));
      const Elem rhs = P.conj(s, img(vl(g.terminus(y), gg.mono(y)(h))));
      if (lhs != rhs) {
        r.fail("edge relation fails at " + g.edge_name(y));
        break;
      }
    }
  }
  return r;
}

}  // namespace rpf

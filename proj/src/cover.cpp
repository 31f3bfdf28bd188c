#include "rpf/cover.hpp"

#include <algorithm>
#include <numeric>

namespace rpf {

// ---------------------------------------------------------------------------
// level homomorphism

FpScalar LevelHom::step(const Graph& g, const SpanningData& sd, EdgeId e) const {
  if (sd.in_tree(e)) return {0};
  if (sd.is_positive(e)) return stable_values[e];
  return {(p - stable_values[g.bar(e)].value) % p};
}

bool LevelHom::onto_at(VertexId v) const {
  return std::any_of(vertex_values[v].begin(), vertex_values[v].end(), [](FpScalar s) { return s.value != 0; });
}

bool LevelHom::surjective() const {
  for (VertexId v = 0; v < vertex_values.size(); ++v)
    if (onto_at(v)) return true;
  return std::any_of(stable_values.begin(), stable_values.end(), [](FpScalar s) { return s.value != 0; });
}

LevelHom build_level_hom(const GraphOfGroups& gg, const SpanningData& sd, const SeriesAssignment& sa,
                         const LevelMaps& lm, std::uint32_t p) {
  if (!check_condition_I(gg, sa).empty()) throw InputError("condition I does not hold");
  if (auto c = check_condition_II(gg, sa, lm, p); !c.ok) throw InputError("condition II does not hold: " + c.reason);
  const PrimeField F(p);
  const auto& g = gg.graph();
  LevelHom ph;
  ph.p = p;
  ph.vertex_values.resize(g.vertex_count());
  ph.stable_values.assign(g.edge_count(), FpScalar{0});
  bool any = false;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& gv = *gg.vertex_group(v);
    auto& values = ph.vertex_values[v];
    values.assign(gv.order(), FpScalar{0});
    if (chief_factor(sa.vertex[v], 0).trivial()) continue;
    any = true;
    const FpScalar scale = *lm.vertex[0][v];
    for (Elem x = 0; x < gv.order(); ++x) values[x] = F.mul(scale, FpScalar{*factor_coordinate(sa.vertex[v], 0, p, x)});
  }
  if (!any) {
    const auto stable = stable_edges(g, sd);
    if (!stable.empty()) {
      ph.forced_edge = stable.front();
      ph.stable_values[stable.front()] = ph.stable_values[g.bar(stable.front())] = FpScalar{1 % p};
    }
  }
  return ph;
}

FpScalar eval_level_hom(const LevelHom& ph, const GraphOfGroups& gg, const GWord& w) {
  check_word(gg, w);
  const PrimeField F(ph.p);
  FpScalar sum{0};
  for (const auto& letter : w.letters) {
    if (const auto* v = std::get_if<VertexLetter>(&letter))
      sum = F.add(sum, ph.vertex(v->vertex, v->element));
    else {
      const auto& s = std::get<StableLetter>(letter);
      sum = F.add(sum, F.mul(ph.stable_values[s.edge], F.make(s.exponent)));
    }
  }
  return sum;
}

// ---------------------------------------------------------------------------
// kernel cover

GWord KernelCover::transversal(std::uint32_t c) const {
  const PrimeField F(p);
  const std::uint32_t m = F.div(FpScalar{c % p}, transversal_value).value;
  GWord out{base_sd.root, {}};
  if (m == 0) return out;
  const auto& letter = transversal_letter.letters.front();
  if (const auto* v = std::get_if<VertexLetter>(&letter))
    out.letters.emplace_back(VertexLetter{v->vertex, base->vertex_group(v->vertex)->pow(v->element, m)});
  else
    out.letters.assign(m, letter);
  return out;
}

GWord KernelCover::embed_letter(const Letter& letter) const {
  if (const auto* v = std::get_if<VertexLetter>(&letter)) {
    const auto& info = vertices[v->vertex];
    GWord w = concat(tree_prefix[v->vertex], vertex_lift[v->vertex]);
    w.letters.emplace_back(VertexLetter{info.base, vertex_kernels[info.base].to_parent[v->element]});
    w = concat(w, inverse(*base, vertex_lift[v->vertex]));
    return concat(w, inverse(*base, tree_prefix[v->vertex]));
  }
  const auto& s = std::get<StableLetter>(letter);
  if (cover_sd.in_tree(s.edge)) return GWord{base_sd.root, {}};
  const auto& cg = cover->graph();
  const EdgeId pos = cover_sd.is_positive(s.edge) ? s.edge : cg.bar(s.edge);
  GWord w = concat(concat(tree_prefix[cg.origin(pos)], edge_image[pos]),
                   inverse(*base, tree_prefix[cg.terminus(pos)]));
  return s.exponent > 0 ? w : inverse(*base, w);
}

GWord KernelCover::embed(const GWord& w) const {
  check_word(*cover, w);
  GWord out{base_sd.root, {}};
  for (const auto& letter : w.letters) out = concat(out, embed_letter(letter));
  return reduce_word(*base, base_sd, out);
}

namespace {

Elem min_with_value(const LevelHom& ph, VertexId x, std::uint32_t value) {
  const auto& vals = ph.vertex_values[x];
  for (Elem g = 0; g < vals.size(); ++g)
    if (vals[g].value == value) return g;
  throw InternalError("no element of the required level value");
}

ChiefSeries shifted_into(const ChiefSeries& s, const SubgroupGroup& kernel) {
  std::vector<Subgroup> terms;
  const std::size_t last = std::max<std::size_t>(s.terms().size(), 2);
  for (std::size_t k = 1; k < last; ++k) {
    std::vector<Elem> mapped;
    for (Elem a : s.term(k).elements()) {
      const Elem b = kernel.from_parent[a];
      if (b == SubgroupGroup::npos) throw InternalError("shifted series term leaves the kernel");
      mapped.push_back(b);
    }
    terms.emplace_back(kernel.group, std::move(mapped));
  }
  return ChiefSeries(std::move(terms));
}

}  // namespace

KernelCover build_kernel_cover(const GogPtr& ggp, const SpanningData& sd, const SeriesAssignment& sa,
                               const LevelMaps& lm, const LevelHom& ph) {
  if (!ph.surjective()) throw InputError("level homomorphism is not surjective");
  const auto& gg = *ggp;
  const auto& g = gg.graph();
  const std::uint32_t p = ph.p;
  const PrimeField F(p);

  KernelCover kc;
  kc.base = ggp;
  kc.base_sd = sd;
  kc.p = p;

  auto edge_value = [&](EdgeId e, Elem h) { return ph.vertex(g.terminus(e), gg.mono(e)(h)); };

  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    std::vector<Elem> ker;
    for (Elem a = 0; a < gg.vertex_group(x)->order(); ++a)
      if (ph.vertex(x, a).value == 0) ker.push_back(a);
    kc.vertex_kernels.push_back(subgroup_as_group(Subgroup(gg.vertex_group(x), std::move(ker))));
  }
  kc.edge_kernels.resize(g.edge_count());
  std::vector<char> edge_onto(g.edge_count(), 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!sd.is_positive(e)) continue;
    std::vector<Elem> ker;
    for (Elem a = 0; a < gg.edge_group(e)->order(); ++a)
      if (edge_value(e, a).value == 0) ker.push_back(a);
    edge_onto[e] = edge_onto[g.bar(e)] = ker.size() < gg.edge_group(e)->order();
    kc.edge_kernels[e] = kc.edge_kernels[g.bar(e)] = subgroup_as_group(Subgroup(gg.edge_group(e), std::move(ker)));
  }

  // transversal generator: first vertex letter, then first stable letter, with Phi != 0
  for (VertexId x = 0; x < g.vertex_count() && kc.transversal_letter.empty(); ++x)
    for (Elem a = 0; a < gg.vertex_group(x)->order(); ++a)
      if (ph.vertex(x, a).value != 0) {
        kc.transversal_letter.letters.emplace_back(VertexLetter{x, a});
        kc.transversal_value = ph.vertex(x, a);
        break;
      }
  if (kc.transversal_letter.empty())
    for (EdgeId y : stable_edges(g, sd))
      if (ph.stable_values[y].value != 0) {
        kc.transversal_letter.letters.emplace_back(StableLetter{y, 1});
        kc.transversal_value = ph.stable_values[y];
        break;
      }
  kc.transversal_letter.basepoint = sd.root;

  // vertices: fibre over x is F_p / Phi(G_x)
  std::vector<std::vector<VertexId>> vertex_id(g.vertex_count(), std::vector<VertexId>(p, kNone));
  std::vector<std::string> vnames;
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    const std::uint32_t fibre = ph.onto_at(x) ? 1 : p;
    for (std::uint32_t a = 0; a < fibre; ++a) {
      vertex_id[x][a] = static_cast<VertexId>(kc.vertices.size());
      kc.vertices.push_back({x, a});
      kc.vertex_lift.push_back(reduce_word(gg, sd, kc.transversal(a)));
      vnames.push_back(g.vertex_name(x) + "." + std::to_string(a));
    }
  }
  auto rep = [&](VertexId x, std::uint32_t a) { return ph.onto_at(x) ? 0u : a % p; };

  // edges: fibre over the pair {y, bar y} is F_p / Phi(G_y)
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::vector<std::string> enames;
  std::vector<GroupPtr> edge_groups;
  std::vector<GroupHom> monos;
  for (EdgeId y = 0; y < g.edge_count(); ++y) {
    if (!sd.is_positive(y)) continue;
    const EdgeId yb = g.bar(y);
    const VertexId o = g.origin(y), t = g.terminus(y);
    const FpScalar sigma = ph.step(g, sd, y);
    const std::uint32_t fibre = edge_onto[y] ? 1 : p;
    for (std::uint32_t a = 0; a < fibre; ++a) {
      const std::uint32_t rep_o = rep(o, a);
      const Elem c = min_with_value(ph, o, F.sub(FpScalar{a}, FpScalar{rep_o}).value);
      const FpScalar pos_t = F.add(FpScalar{a}, sigma);
      const std::uint32_t rep_t = rep(t, pos_t.value);
      const Elem d = min_with_value(ph, t, F.sub(FpScalar{rep_t}, pos_t).value);
      const VertexId co = vertex_id[o][rep_o], ct = vertex_id[t][rep_t];

      const auto id = static_cast<EdgeId>(kc.edges.size());
      const auto& go = *gg.vertex_group(o);
      const auto& gt = *gg.vertex_group(t);
      kc.edges.push_back({y, a, c, d});
      kc.edges.push_back({yb, pos_t.value, gt.inv(d), go.inv(c)});
      kc.edge_lookup[{y, edge_onto[y] ? 0u : a}] = id;
      kc.edge_lookup[{yb, edge_onto[y] ? 0u : pos_t.value}] = id + 1;
      pairs.emplace_back(co, ct);
      enames.push_back(g.edge_name(y) + "." + std::to_string(a));
      enames.push_back(g.edge_name(y) + "." + std::to_string(a) + "~");

      const auto& ek = kc.edge_kernels[y];
      const auto& kt = kc.vertex_kernels[t];
      const auto& ko = kc.vertex_kernels[o];
      std::vector<Elem> to_t, to_o;
      for (Elem h : ek.to_parent) {
        to_t.push_back(kt.from_parent[gt.mul(gt.mul(gt.inv(d), gg.mono(y)(h)), d)]);
        to_o.push_back(ko.from_parent[go.conj(c, gg.mono(yb)(h))]);
      }
      if (std::count(to_t.begin(), to_t.end(), SubgroupGroup::npos) ||
          std::count(to_o.begin(), to_o.end(), SubgroupGroup::npos))
        throw InternalError("cover monomorphism leaves the vertex kernel");
      edge_groups.push_back(ek.group);
      edge_groups.push_back(ek.group);
      monos.emplace_back(ek.group, kt.group, std::move(to_t));
      monos.emplace_back(ek.group, ko.group, std::move(to_o));

      GWord w = kc.transversal(rep_o);
      if (c != 0) w.letters.emplace_back(VertexLetter{o, c});
      if (!sd.in_tree(y)) w.letters.emplace_back(StableLetter{y, 1});
      if (d != 0) w.letters.emplace_back(VertexLetter{t, d});
      w = reduce_word(gg, sd, concat(w, inverse(gg, kc.transversal(rep_t))));
      kc.edge_image.push_back(w);
      kc.edge_image.push_back(inverse(gg, w));
    }
  }

  Graph cg(kc.vertices.size(), pairs);
  cg.set_names(std::move(vnames), std::move(enames));
  std::vector<GroupPtr> vgroups;
  for (const auto& v : kc.vertices) vgroups.push_back(kc.vertex_kernels[v.base].group);
  kc.cover = std::make_shared<const GraphOfGroups>(std::move(cg), std::move(vgroups), std::move(edge_groups),
                                                   std::move(monos));
  kc.cover_sd = spanning_tree(kc.cover->graph());

  // images of cover-tree paths, in order of depth
  const auto& cgr = kc.cover->graph();
  std::vector<VertexId> order(cgr.vertex_count());
  std::iota(order.begin(), order.end(), VertexId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return kc.cover_sd.depth[a] < kc.cover_sd.depth[b]; });
  kc.tree_prefix.assign(cgr.vertex_count(), GWord{sd.root, {}});
  for (VertexId v : order) {
    const EdgeId e = kc.cover_sd.parent_edge[v];
    if (e == kNone) continue;
    kc.tree_prefix[v] = reduce_word(gg, sd, concat(kc.tree_prefix[cgr.origin(e)], kc.edge_image[e]));
  }

  // shifted series and inherited maps
  for (const auto& v : kc.vertices) kc.series.vertex.push_back(shifted_into(sa.vertex[v.base], kc.vertex_kernels[v.base]));
  for (const auto& e : kc.edges) kc.series.edge.push_back(shifted_into(sa.edge[e.base], kc.edge_kernels[e.base]));
  const std::size_t n = sa.length_bound();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::vector<LevelScalar> lv, le;
    for (const auto& v : kc.vertices) lv.push_back(lm.vertex[k + 1][v.base]);
    for (const auto& e : kc.edges) le.push_back(lm.edge[k + 1][e.base]);
    kc.maps.vertex.push_back(std::move(lv));
    kc.maps.edge.push_back(std::move(le));
  }
  return kc;
}

GWord rewrite_into_kernel(const KernelCover& kc, const LevelHom& ph, const GWord& w) {
  const auto& gg = *kc.base;
  const auto& g = gg.graph();
  if (w.basepoint != kc.base_sd.root) throw InputError("word must be based at the tree root");
  if (eval_level_hom(ph, gg, w).value != 0) throw InputError("word is not in the kernel of the level homomorphism");
  const PrimeField F(kc.p);
  const auto path = to_path(gg, kc.base_sd, w);
  const auto& cg = kc.cover->graph();

  PathWord out;
  VertexId here = 0;  // cover vertex over the basepoint, position 0
  out.vertices.push_back(here);
  Elem r = path.elements[0];
  FpScalar phi = ph.vertex(path.vertices[0], r);

  for (std::size_t i = 0; i < path.edges.size(); ++i) {
    const EdgeId e = path.edges[i];
    const VertexId x = g.origin(e), t = g.terminus(e);
    const auto& gx = *gg.vertex_group(x);
    const auto& gt = *gg.vertex_group(t);
    const bool onto = kc.edge_kernels[e].group->order() < gg.edge_group(e)->order();
    const auto it = kc.edge_lookup.find({e, onto ? 0u : phi.value});
    if (it == kc.edge_lookup.end()) throw InternalError("no cover edge over the current step");
    const EdgeId ce = it->second;
    const auto& info = kc.edges[ce];
    if (cg.origin(ce) != here) throw InternalError("cover edge does not start at the current cover vertex");

    // z in G_e with Phi(z) = phi - position
    const std::uint32_t want = F.sub(phi, FpScalar{info.position}).value;
    Elem z = kNone;
    for (Elem h = 0; h < gg.edge_group(e)->order(); ++h)
      if (ph.vertex(t, gg.mono(e)(h)).value == want) {
        z = h;
        break;
      }
    if (z == kNone) throw InternalError("edge group misses the required level value");

    // r = k' c f_{bar e}(z), and f_{bar e}(z) e = e f_e(z)
    const Elem k = gx.mul(gx.mul(r, gx.inv(gg.mono(g.bar(e))(z))), gx.inv(info.c));
    const Elem k_cover = kc.vertex_kernels[x].from_parent[k];
    if (k_cover == SubgroupGroup::npos) throw InternalError("rewriting left the vertex kernel");
    out.elements.push_back(k_cover);
    out.edges.push_back(ce);
    here = cg.terminus(ce);
    out.vertices.push_back(here);

    r = gt.mul(gt.mul(gt.inv(info.d), gg.mono(e)(z)), path.elements[i + 1]);
    phi = F.add(F.add(phi, ph.step(g, kc.base_sd, e)), ph.vertex(t, path.elements[i + 1]));
  }
  const Elem last = kc.vertex_kernels[path.vertices.back()].from_parent[r];
  if (here != 0 || last == SubgroupGroup::npos) throw InternalError("rewriting did not close up in the kernel");
  out.elements.push_back(last);
  return reduce_word(*kc.cover, kc.cover_sd, from_path(*kc.cover, kc.cover_sd, out, 0));
}

ValidationReport check_kernel_cover(const KernelCover& kc, const LevelHom& ph) {
  ValidationReport r = validate_gog(*kc.cover);
  if (!r.ok()) return r;
  r.merge(validate_spanning(kc.cover->graph(), kc.cover_sd));
  const auto& gg = *kc.base;
  const auto& g = gg.graph();
  const auto& cg = kc.cover->graph();

  // fibres
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    const std::size_t want = ph.onto_at(x) ? 1 : kc.p;
    const auto have = std::count_if(kc.vertices.begin(), kc.vertices.end(), [&](const CoverVertex& v) { return v.base == x; });
    if (static_cast<std::size_t>(have) != want) r.fail("fibre over " + g.vertex_name(x) + " has the wrong size");
    const std::size_t image = ph.onto_at(x) ? kc.p : 1;
    if (kc.vertex_kernels[x].group->order() * image != gg.vertex_group(x)->order())
      r.fail("cover group over " + g.vertex_name(x) + " has the wrong order");
  }

  // vertex groups embed homomorphically
  for (VertexId v = 0; v < cg.vertex_count(); ++v) {
    const auto& gv = *kc.cover->vertex_group(v);
    for (Elem a = 0; a < gv.order(); ++a)
      for (Elem b = 0; b < gv.order(); ++b) {
        const GWord lhs = concat(kc.embed_letter(VertexLetter{v, a}), kc.embed_letter(VertexLetter{v, b}));
        if (!words_equal(gg, kc.base_sd, lhs, kc.embed_letter(VertexLetter{v, gv.mul(a, b)}))) {
          r.fail("vertex group of " + cg.vertex_name(v) + " does not embed homomorphically");
          a = b = static_cast<Elem>(gv.order());
        }
      }
  }

  // edge relations: f_{bar e}(h) = s_e f_e(h) s_e^-1
  for (EdgeId e = 0; e < cg.edge_count(); ++e) {
    if (!kc.cover_sd.is_positive(e)) continue;
    const GWord s = kc.embed_letter(StableLetter{e, 1});
    const auto& ge = *kc.cover->edge_group(e);
    for (Elem h = 0; h < ge.order(); ++h) {
      const GWord lhs = kc.embed_letter(VertexLetter{cg.origin(e), kc.cover->mono(cg.bar(e))(h)});
      const GWord rhs = concat(concat(s, kc.embed_letter(VertexLetter{cg.terminus(e), kc.cover->mono(e)(h)})),
                               inverse(gg, s));
      if (!words_equal(gg, kc.base_sd, lhs, rhs)) {
        r.fail("relation of cover edge " + cg.edge_name(e) + " fails in G");
        break;
      }
    }
  }

  // index: every generator of G lies in T_c H
  std::vector<GWord> gens;
  for (VertexId x = 0; x < g.vertex_count(); ++x)
    for (Elem a = 1; a < gg.vertex_group(x)->order(); ++a) gens.push_back(GWord{kc.base_sd.root, {VertexLetter{x, a}}});
  for (EdgeId y : stable_edges(g, kc.base_sd)) gens.push_back(GWord{kc.base_sd.root, {StableLetter{y, 1}}});
  for (const auto& x : gens) {
    const auto c = eval_level_hom(ph, gg, x);
    const GWord in_kernel = concat(inverse(gg, kc.transversal(c.value)), x);
    const GWord rewritten = rewrite_into_kernel(kc, ph, in_kernel);
    if (!words_equal(gg, kc.base_sd, kc.embed(rewritten), in_kernel))
      r.fail("generator " + format_word(gg, x) + " is not covered by T_c H");
  }

  // shifted series
  r.merge(validate_assignment(*kc.cover, kc.series, kc.p));
  if (r.ok()) {
    if (!check_condition_I(*kc.cover, kc.series).empty()) r.fail("shifted series fail condition I");
    else if (auto c = check_condition_II(*kc.cover, kc.series, kc.maps, kc.p); !c.ok)
      r.fail("inherited maps fail condition II: " + c.reason);
  }
  return r;
}

SeriesAssignment shift_series(const SeriesAssignment& sa) {
  auto shift = [](const ChiefSeries& s) {
    std::vector<Subgroup> terms;
    const std::size_t last = std::max<std::size_t>(s.terms().size(), 2);
    for (std::size_t k = 1; k < last; ++k) terms.push_back(s.term(k));
    return ChiefSeries(std::move(terms));
  };
  SeriesAssignment out;
  for (const auto& s : sa.vertex) out.vertex.push_back(shift(s));
  for (const auto& s : sa.edge) out.edge.push_back(shift(s));
  return out;
}

LevelMaps shift_maps(const LevelMaps& lm) {
  LevelMaps out;
  if (lm.vertex.size() > 1) {
    out.vertex.assign(lm.vertex.begin() + 1, lm.vertex.end());
    out.edge.assign(lm.edge.begin() + 1, lm.edge.end());
  }
  return out;
}

}  // namespace rpf

#include "rpf/compat.hpp"

#include <algorithm>
#include <deque>

namespace rpf {

std::size_t SeriesAssignment::length_bound() const {
  std::size_t n = 0;
  for (const auto& s : vertex) n = std::max(n, s.length());
  for (const auto& s : edge) n = std::max(n, s.length());
  return n;
}

ValidationReport validate_assignment(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p) {
  ValidationReport r;
  const auto& g = gg.graph();
  if (sa.vertex.size() != g.vertex_count() || sa.edge.size() != g.edge_count()) {
    r.fail("series assignment does not cover every vertex and edge");
    return r;
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (sa.vertex[v].group() != gg.vertex_group(v)) r.fail("series at " + g.vertex_name(v) + " is for another group");
    for (auto& s : verify_chief_series(sa.vertex[v], p).report.violations)
      r.fail("series at " + g.vertex_name(v) + ": " + s);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (sa.edge[e].group() != gg.edge_group(e)) r.fail("series at " + g.edge_name(e) + " is for another group");
    for (auto& s : verify_chief_series(sa.edge[e], p).report.violations)
      r.fail("series at " + g.edge_name(e) + ": " + s);
    const auto& a = sa.edge[e];
    const auto& b = sa.edge[g.bar(e)];
    const auto n = std::max(a.terms().size(), b.terms().size());
    for (std::size_t k = 0; k < n; ++k)
      if (!(a.term(k) == b.term(k))) {
        r.fail("edge " + g.edge_name(e) + " and its opposite carry different series");
        break;
      }
  }
  return r;
}

std::vector<ConditionIFailure> check_condition_I(const GraphOfGroups& gg, const SeriesAssignment& sa) {
  std::vector<ConditionIFailure> out;
  const auto& g = gg.graph();
  const std::size_t n = sa.length_bound();
  for (EdgeId y = 0; y < g.edge_count(); ++y) {
    const auto& f = gg.mono(y);
    const auto image = f.image();
    const auto& target = sa.vertex[g.terminus(y)];
    for (std::size_t k = 0; k <= n; ++k) {
      const auto lhs = f.image_of(sa.edge[y].term(k));
      const auto rhs = intersect(image, target.term(k));
      if (!(lhs == rhs))
        out.push_back({y, k, {lhs.elements().begin(), lhs.elements().end()},
                       {rhs.elements().begin(), rhs.elements().end()}});
    }
  }
  return out;
}

FactorMap induced_edge_factor_map(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p, EdgeId y,
                                  std::size_t k) {
  const auto& g = gg.graph();
  const auto& f = gg.mono(y);
  const auto& target = sa.vertex[g.terminus(y)];
  for (std::size_t j : {k, k + 1}) {
    if (!(f.image_of(sa.edge[y].term(j)) == intersect(f.image(), target.term(j))))
      throw InputError("condition I fails at edge " + g.edge_name(y) + ", level " + std::to_string(j));
  }
  const auto source = chief_factor(sa.edge[y], k);
  if (source.trivial()) return {};
  const auto c = factor_coordinate(target, k, p, f(source.generator));
  if (!c || *c == 0) throw InternalError("induced factor map is not injective at edge " + g.edge_name(y));
  return {false, FpScalar{*c}};
}

namespace {

struct LevelData {
  std::vector<char> vertex_present;
  std::vector<char> edge_present;
  std::vector<FpScalar> c;  // per edge, induced scalar (when present)
};

LevelData level_data(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p, std::size_t k) {
  const auto& g = gg.graph();
  LevelData d;
  d.vertex_present.resize(g.vertex_count());
  d.edge_present.resize(g.edge_count());
  d.c.resize(g.edge_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) d.vertex_present[v] = !chief_factor(sa.vertex[v], k).trivial();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto m = induced_edge_factor_map(gg, sa, p, e, k);
    d.edge_present[e] = !m.collapses;
    d.c[e] = m.scalar;
  }
  return d;
}

}  // namespace

std::variant<LevelMaps, CycleWitness> solve_condition_II(const GraphOfGroups& gg, const SeriesAssignment& sa,
                                                         std::uint32_t p) {
  const PrimeField F(p);
  const auto& g = gg.graph();
  const std::size_t n = sa.length_bound();
  LevelMaps lm;
  lm.vertex.assign(n, std::vector<LevelScalar>(g.vertex_count()));
  lm.edge.assign(n, std::vector<LevelScalar>(g.edge_count()));

  for (std::size_t k = 0; k < n; ++k) {
    const auto d = level_data(gg, sa, p, k);
    auto& lv = lm.vertex[k];
    auto& le = lm.edge[k];
    std::vector<EdgeId> forest_parent(g.vertex_count(), kNone);
    std::vector<std::uint32_t> depth(g.vertex_count(), 0);
    std::vector<char> forest(g.edge_count(), 0);

    for (VertexId root = 0; root < g.vertex_count(); ++root) {
      if (!d.vertex_present[root] || lv[root]) continue;
      lv[root] = FpScalar{1};
      std::deque<VertexId> queue{root};
      while (!queue.empty()) {
        const VertexId u = queue.front();
        queue.pop_front();
        for (EdgeId e : g.out_edges(u)) {
          const VertexId w = g.terminus(e);
          if (!d.edge_present[e] || lv[w]) continue;
          // phi_e = c_{bar e} phi_u and phi_e = c_e phi_w
          const FpScalar edge_value = F.mul(d.c[g.bar(e)], *lv[u]);
          le[e] = le[g.bar(e)] = edge_value;
          lv[w] = F.div(edge_value, d.c[e]);
          forest[e] = forest[g.bar(e)] = 1;
          forest_parent[w] = e;
          depth[w] = depth[u] + 1;
          queue.push_back(w);
        }
      }
    }

    for (EdgeId y = 0; y < g.edge_count(); ++y) {
      if (y > g.bar(y) || !d.edge_present[y] || forest[y]) continue;
      const VertexId o = g.origin(y), t = g.terminus(y);
      const FpScalar from_origin = F.mul(d.c[g.bar(y)], *lv[o]);
      const FpScalar from_terminus = F.mul(d.c[y], *lv[t]);
      if (from_origin == from_terminus) {
        le[y] = le[g.bar(y)] = from_origin;
        continue;
      }
      CycleWitness w{k, y, {}, F.div(from_origin, from_terminus)};
      std::vector<EdgeId> down;
      VertexId a = o, b = t;
      while (depth[a] > depth[b]) {
        w.forest_path.push_back(g.bar(forest_parent[a]));
        a = g.origin(forest_parent[a]);
      }
      while (depth[b] > depth[a]) {
        down.push_back(forest_parent[b]);
        b = g.origin(forest_parent[b]);
      }
      while (a != b) {
        w.forest_path.push_back(g.bar(forest_parent[a]));
        a = g.origin(forest_parent[a]);
        down.push_back(forest_parent[b]);
        b = g.origin(forest_parent[b]);
      }
      w.forest_path.insert(w.forest_path.end(), down.rbegin(), down.rend());
      return w;
    }
  }
  return lm;
}

ConditionIICheck check_condition_II(const GraphOfGroups& gg, const SeriesAssignment& sa, const LevelMaps& lm,
                                    std::uint32_t p) {
  const PrimeField F(p);
  const auto& g = gg.graph();
  const std::size_t n = sa.length_bound();
  if (lm.vertex.size() < n || lm.edge.size() < n) return {false, std::nullopt, 0, "level maps cover too few levels"};
  for (std::size_t k = 0; k < n; ++k) {
    if (lm.vertex[k].size() != g.vertex_count() || lm.edge[k].size() != g.edge_count())
      return {false, std::nullopt, k, "level maps have the wrong shape"};
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      const bool present = !chief_factor(sa.vertex[v], k).trivial();
      const auto& s = lm.vertex[k][v];
      if (present != s.has_value() || (s && s->value == 0))
        return {false, std::nullopt, k, "map at vertex " + g.vertex_name(v) + " is not an injection of its factor"};
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      FactorMap m;
      try {
        m = induced_edge_factor_map(gg, sa, p, e, k);
      } catch (const InputError& err) {
        return {false, e, k, err.what()};
      }
      const auto& s = lm.edge[k][e];
      if (s != lm.edge[k][g.bar(e)])
        return {false, e, k, "maps at edge " + g.edge_name(e) + " and its opposite differ"};
      if (m.collapses != !s.has_value() || (s && s->value == 0))
        return {false, e, k, "map at edge " + g.edge_name(e) + " is not an injection of its factor"};
      if (m.collapses) continue;
      const auto& t = lm.vertex[k][g.terminus(e)];
      if (!t || F.mul(m.scalar, *t) != *s)
        return {false, e, k, "diagram at edge " + g.edge_name(e) + " does not commute"};
    }
  }
  return {};
}

ComplianceReport check_conditions(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p,
                                  LevelMaps* solved) {
  ComplianceReport r;
  r.condition_I = check_condition_I(gg, sa);
  if (!r.condition_I.empty()) return r;
  auto s = solve_condition_II(gg, sa, p);
  if (auto* w = std::get_if<CycleWitness>(&s))
    r.condition_II = *w;
  else if (solved)
    *solved = std::get<LevelMaps>(std::move(s));
  return r;
}

// ---------------------------------------------------------------------------
// search

SearchResult search_series_assignment(const GraphOfGroups& gg, std::uint32_t p, const SearchOptions& opts) {
  const auto& g = gg.graph();
  const std::size_t order_cap = opts.max_group_order ? opts.max_group_order : std::size_t{p} * p * p * p;
  std::size_t max_exp = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto& gv = gg.vertex_group(v);
    if (gv->order() > order_cap)
      throw BudgetExceeded("vertex group at " + g.vertex_name(v) + " has order " + std::to_string(gv->order()) +
                           " above the search bound " + std::to_string(order_cap));
    const auto pp = prime_power_of(gv->order());
    if (!pp || (pp->m > 0 && pp->p != p)) throw InputError("vertex group at " + g.vertex_name(v) + " is not a p-group");
    max_exp = std::max<std::size_t>(max_exp, pp->m);
  }

  SearchResult result;
  result.min_length = max_exp;
  result.max_length = opts.max_length ? std::max(opts.max_length, max_exp) : max_exp + 2;

  // edge series forced from each endpoint
  auto from_terminus = [&](EdgeId y, const ChiefSeries& t, std::size_t levels) {
    std::vector<Subgroup> terms;
    for (std::size_t k = 0; k <= levels; ++k) terms.push_back(gg.mono(y).preimage(t.term(k)));
    return terms;
  };

  for (std::size_t levels = result.min_length; levels <= result.max_length; ++levels) {
    std::vector<std::vector<ChiefSeries>> candidates;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      candidates.push_back(enumerate_chief_series(gg.vertex_group(v), p, levels, opts.max_candidates));

    std::vector<std::size_t> pick(g.vertex_count(), 0);
    auto assigned = [&](VertexId v) -> const ChiefSeries& { return candidates[v][pick[v]]; };

    // Edges are checked as soon as both endpoints carry a series.
    auto edges_agree = [&](VertexId v) {
      for (EdgeId y = 0; y < g.edge_count(); ++y) {
        if (y > g.bar(y)) continue;
        const VertexId o = g.origin(y), t = g.terminus(y);
        if (std::max(o, t) != v) continue;
        if (from_terminus(y, assigned(t), levels) != from_terminus(g.bar(y), assigned(o), levels)) return false;
      }
      return true;
    };

    std::optional<SearchResult> hit;
    auto dfs = [&](auto&& self, VertexId v) -> void {
      if (hit) return;
      if (v == g.vertex_count()) {
        if (++result.candidates > opts.max_candidates)
          throw BudgetExceeded("series search exceeded " + std::to_string(opts.max_candidates) + " candidates");
        SeriesAssignment sa;
        for (VertexId x = 0; x < g.vertex_count(); ++x) sa.vertex.push_back(assigned(x));
        for (EdgeId y = 0; y < g.edge_count(); ++y)
          sa.edge.emplace_back(from_terminus(y, assigned(g.terminus(y)), levels));
        LevelMaps lm;
        if (check_conditions(gg, sa, p, &lm).ok()) {
          hit = result;
          hit->assignment = std::move(sa);
          hit->maps = std::move(lm);
        }
        return;
      }
      for (pick[v] = 0; pick[v] < candidates[v].size() && !hit; ++pick[v])
        if (edges_agree(v)) self(self, v + 1);
    };
    dfs(dfs, 0);
    if (hit) {
      hit->candidates = result.candidates;
      return *hit;
    }
  }
  return result;
}

}  // namespace rpf

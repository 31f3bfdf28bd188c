#include "rpf/gog.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace rpf {

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(std::size_t vertices, const std::vector<std::pair<VertexId, VertexId>>& edge_pairs)
    : vertices_(vertices) {
  for (const auto& [o, t] : edge_pairs) {
    const auto id = static_cast<EdgeId>(bar_.size());
    bar_.push_back(id + 1);
    bar_.push_back(id);
    origin_.push_back(o);
    terminus_.push_back(t);
    origin_.push_back(t);
    terminus_.push_back(o);
  }
  index_out_edges();
}

Graph Graph::from_tables(std::size_t vertices, std::vector<EdgeId> bar, std::vector<VertexId> origin,
                         std::vector<VertexId> terminus) {
  if (bar.size() != origin.size() || bar.size() != terminus.size())
    throw InputError("edge tables have different sizes");
  Graph g;
  g.vertices_ = vertices;
  g.bar_ = std::move(bar);
  g.origin_ = std::move(origin);
  g.terminus_ = std::move(terminus);
  g.index_out_edges();
  return g;
}

void Graph::index_out_edges() {
  out_.assign(vertices_, {});
  for (EdgeId e = 0; e < origin_.size(); ++e)
    if (origin_[e] < vertices_) out_[origin_[e]].push_back(e);
}

void Graph::set_names(std::vector<std::string> vertex_names, std::vector<std::string> edge_names) {
  if (!vertex_names.empty() && vertex_names.size() != vertices_) throw InputError("vertex name count mismatch");
  if (!edge_names.empty() && edge_names.size() != bar_.size()) throw InputError("edge name count mismatch");
  vertex_names_ = std::move(vertex_names);
  edge_names_ = std::move(edge_names);
}

std::string Graph::vertex_name(VertexId v) const {
  return vertex_names_.empty() ? "v" + std::to_string(v) : vertex_names_[v];
}

std::string Graph::edge_name(EdgeId e) const {
  return edge_names_.empty() ? "e" + std::to_string(e) : edge_names_[e];
}

VertexId Graph::find_vertex(const std::string& name) const {
  for (VertexId v = 0; v < vertices_; ++v)
    if (vertex_name(v) == name) return v;
  return kNone;
}

EdgeId Graph::find_edge(const std::string& name) const {
  for (EdgeId e = 0; e < bar_.size(); ++e)
    if (edge_name(e) == name) return e;
  return kNone;
}

ValidationReport validate_graph(const Graph& g) {
  ValidationReport r;
  const auto V = g.vertex_count();
  if (V == 0) r.fail("graph has no vertices");
  bool tables_ok = true;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto name = g.edge_name(e);
    if (g.origin(e) >= V || g.terminus(e) >= V) {
      r.fail("edge " + name + " has an endpoint out of range");
      tables_ok = false;
      continue;
    }
    const EdgeId b = g.bar(e);
    if (b >= g.edge_count()) {
      r.fail("edge " + name + " has opposite edge out of range");
      tables_ok = false;
      continue;
    }
    if (b == e) {
      r.fail("edge " + name + " is its own opposite (bar-fixed)");
      tables_ok = false;
      continue;
    }
    if (g.bar(b) != e) {
      r.fail("bar is not an involution at edge " + name);
      tables_ok = false;
    }
    if (g.origin(b) != g.terminus(e)) r.fail("o(bar y) != t(y) at edge " + name);
  }
  if (V > 0 && tables_ok) {
    std::vector<char> seen(V, 0);
    std::vector<VertexId> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      for (EdgeId e : g.out_edges(v)) {
        const VertexId w = g.terminus(e);
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    for (VertexId v = 0; v < V; ++v)
      if (!seen[v]) {
        r.fail("graph is disconnected: vertex " + g.vertex_name(v) + " unreachable");
        break;
      }
  }
  return r;
}

// ---------------------------------------------------------------------------
// GraphOfGroups

GraphOfGroups::GraphOfGroups(Graph graph, std::vector<GroupPtr> vertex_groups, std::vector<GroupPtr> edge_groups,
                             std::vector<GroupHom> monos)
    : graph_(std::move(graph)),
      vertex_groups_(std::move(vertex_groups)),
      edge_groups_(std::move(edge_groups)),
      monos_(std::move(monos)) {
  if (vertex_groups_.size() != graph_.vertex_count()) throw InputError("vertex group count mismatch");
  if (edge_groups_.size() != graph_.edge_count() || monos_.size() != graph_.edge_count())
    throw InputError("edge group or monomorphism count mismatch");
  preimage_.resize(monos_.size());
  for (EdgeId e = 0; e < monos_.size(); ++e) {
    const auto& f = monos_[e];
    preimage_[e].assign(f.target()->order(), kNone);
    for (Elem a = 0; a < f.source()->order(); ++a)
      if (preimage_[e][f(a)] == kNone) preimage_[e][f(a)] = a;
  }
}

std::size_t GraphOfGroups::max_vertex_order() const {
  std::size_t m = 1;
  for (const auto& g : vertex_groups_) m = std::max(m, g->order());
  return m;
}

ValidationReport validate_gog(const GraphOfGroups& gg) {
  ValidationReport r = validate_graph(gg.graph());
  if (!r.ok()) return r;
  const auto& g = gg.graph();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto gv = validate_group(*gg.vertex_group(v));
    for (auto& s : gv.report.violations) r.fail("vertex group at " + g.vertex_name(v) + ": " + s);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto name = g.edge_name(e);
    const auto& f = gg.mono(e);
    if (gg.edge_group(e) != gg.edge_group(g.bar(e))) r.fail("edge " + name + " and its opposite carry different groups");
    if (f.source() != gg.edge_group(e)) r.fail("monomorphism of edge " + name + " has the wrong source");
    if (f.target() != gg.vertex_group(g.terminus(e))) {
      r.fail("monomorphism of edge " + name + " does not land in the group at its terminus");
      continue;
    }
    auto hv = validate_hom(f);
    for (auto& s : hv.violations) r.fail("monomorphism of edge " + name + ": " + s);
    std::vector<Elem> first(f.target()->order(), kNone);
    for (Elem a = 0; a < f.source()->order(); ++a) {
      if (first[f(a)] != kNone) {
        r.fail("monomorphism of edge " + name + " is not injective: " + std::to_string(first[f(a)]) + " and " +
               std::to_string(a) + " both map to " + std::to_string(f(a)));
        break;
      }
      first[f(a)] = a;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// spanning data

SpanningData spanning_tree(const Graph& g) {
  SpanningData sd;
  const auto V = g.vertex_count();
  sd.tree.assign(g.edge_count(), 0);
  sd.positive.assign(g.edge_count(), 0);
  sd.parent_edge.assign(V, kNone);
  sd.depth.assign(V, 0);
  for (EdgeId e = 0; e < g.edge_count(); ++e) sd.positive[e] = e < g.bar(e);
  if (V == 0) throw InputError("graph has no vertices");
  std::vector<char> seen(V, 0);
  std::deque<VertexId> queue{0};
  seen[0] = 1;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (EdgeId e : g.out_edges(v)) {
      const VertexId w = g.terminus(e);
      if (seen[w]) continue;
      seen[w] = 1;
      sd.parent_edge[w] = e;
      sd.depth[w] = sd.depth[v] + 1;
      sd.tree[e] = sd.tree[g.bar(e)] = 1;
      queue.push_back(w);
    }
  }
  for (VertexId v = 0; v < V; ++v)
    if (!seen[v]) throw InputError("graph is disconnected: vertex " + g.vertex_name(v) + " unreachable");
  return sd;
}

ValidationReport validate_spanning(const Graph& g, const SpanningData& sd) {
  ValidationReport r;
  std::size_t tree_pairs = 0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (sd.tree[e] != sd.tree[g.bar(e)]) r.fail("tree not closed under bar at edge " + g.edge_name(e));
    if (sd.positive[e] == sd.positive[g.bar(e)]) r.fail("orientation picks both or neither of " + g.edge_name(e));
    if (sd.tree[e] && sd.positive[e]) ++tree_pairs;
  }
  if (tree_pairs + 1 != g.vertex_count()) r.fail("tree edge count does not match a spanning tree");
  // acyclic + spanning: every vertex reaches the root along parent edges
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    VertexId x = v;
    std::size_t steps = 0;
    while (x != sd.root && steps <= g.vertex_count()) {
      const EdgeId e = sd.parent_edge[x];
      if (e == kNone || !sd.tree[e] || g.terminus(e) != x) break;
      x = g.origin(e);
      ++steps;
    }
    if (x != sd.root) {
      r.fail("vertex " + g.vertex_name(v) + " is not connected to the root inside the tree");
      break;
    }
  }
  return r;
}

std::vector<EdgeId> tree_path(const Graph& g, const SpanningData& sd, VertexId from, VertexId to) {
  std::vector<EdgeId> up, down;
  VertexId a = from, b = to;
  while (sd.depth[a] > sd.depth[b]) {
    up.push_back(g.bar(sd.parent_edge[a]));
    a = g.origin(sd.parent_edge[a]);
  }
  while (sd.depth[b] > sd.depth[a]) {
    down.push_back(sd.parent_edge[b]);
    b = g.origin(sd.parent_edge[b]);
  }
  while (a != b) {
    up.push_back(g.bar(sd.parent_edge[a]));
    a = g.origin(sd.parent_edge[a]);
    down.push_back(sd.parent_edge[b]);
    b = g.origin(sd.parent_edge[b]);
  }
  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

std::vector<EdgeId> stable_edges(const Graph& g, const SpanningData& sd) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (sd.is_positive(e) && !sd.in_tree(e)) out.push_back(e);
  return out;
}

std::size_t graph_rank(const Graph& g) { return g.edge_count() / 2 + 1 - g.vertex_count(); }

// ---------------------------------------------------------------------------
// words

void check_word(const GraphOfGroups& gg, const GWord& w) {
  const auto& g = gg.graph();
  if (w.basepoint >= g.vertex_count()) throw InputError("word basepoint out of range");
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    const auto pos = " at letter " + std::to_string(i);
    if (const auto* v = std::get_if<VertexLetter>(&w.letters[i])) {
      if (v->vertex >= g.vertex_count()) throw InputError("vertex out of range" + pos);
      if (v->element >= gg.vertex_group(v->vertex)->order()) throw InputError("element out of range" + pos);
    } else {
      const auto& s = std::get<StableLetter>(w.letters[i]);
      if (s.edge >= g.edge_count()) throw InputError("edge out of range" + pos);
      if (s.exponent != 1 && s.exponent != -1) throw InputError("stable letter exponent must be +-1" + pos);
    }
  }
}

GWord inverse(const GraphOfGroups& gg, const GWord& w) {
  GWord out{w.basepoint, {}};
  out.letters.reserve(w.size());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    if (const auto* v = std::get_if<VertexLetter>(&*it))
      out.letters.emplace_back(VertexLetter{v->vertex, gg.vertex_group(v->vertex)->inv(v->element)});
    else {
      const auto& s = std::get<StableLetter>(*it);
      out.letters.emplace_back(StableLetter{s.edge, -s.exponent});
    }
  }
  return out;
}

GWord concat(const GWord& a, const GWord& b) {
  GWord out = a;
  out.letters.insert(out.letters.end(), b.letters.begin(), b.letters.end());
  return out;
}

std::string format_word(const GraphOfGroups& gg, const GWord& w) {
  if (w.empty()) return "1";
  const auto& g = gg.graph();
  std::ostringstream os;
  for (std::size_t i = 0; i < w.letters.size(); ++i) {
    if (i) os << ' ';
    if (const auto* v = std::get_if<VertexLetter>(&w.letters[i]))
      os << g.vertex_name(v->vertex) << ':' << gg.vertex_group(v->vertex)->label(v->element);
    else {
      const auto& s = std::get<StableLetter>(w.letters[i]);
      os << g.edge_name(s.edge);
      if (s.exponent != 1) os << '^' << s.exponent;
    }
  }
  return os.str();
}

PathWord to_path(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w) {
  check_word(gg, w);
  const auto& g = gg.graph();
  PathWord p;
  p.vertices.push_back(w.basepoint);
  p.elements.push_back(0);
  auto push_edge = [&](EdgeId e) {
    p.edges.push_back(e);
    p.vertices.push_back(g.terminus(e));
    p.elements.push_back(0);
  };
  auto move_to = [&](VertexId v) {
    for (EdgeId e : tree_path(g, sd, p.vertices.back(), v)) push_edge(e);
  };
  for (const auto& letter : w.letters) {
    if (const auto* v = std::get_if<VertexLetter>(&letter)) {
      move_to(v->vertex);
      p.elements.back() = gg.vertex_group(v->vertex)->mul(p.elements.back(), v->element);
    } else {
      const auto& s = std::get<StableLetter>(letter);
      if (sd.in_tree(s.edge)) continue;  // s_y = 1 on T
      const EdgeId pos = sd.is_positive(s.edge) ? s.edge : g.bar(s.edge);
      const EdgeId e = s.exponent > 0 ? pos : g.bar(pos);
      move_to(g.origin(e));
      push_edge(e);
    }
  }
  move_to(w.basepoint);
  return p;
}

PathWord reduce_path(const GraphOfGroups& gg, const PathWord& p) {
  PathWord out;
  out.vertices.reserve(p.vertices.size());
  out.elements.reserve(p.elements.size());
  out.edges.reserve(p.edges.size());
  out.vertices.push_back(p.vertices.front());
  out.elements.push_back(p.elements.front());
  const auto& g = gg.graph();
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const EdgeId e = p.edges[i];
    if (!out.edges.empty() && e == g.bar(out.edges.back()) && gg.in_image(out.edges.back(), out.elements.back())) {
      const Elem c = gg.transfer(out.edges.back(), out.elements.back());
      out.edges.pop_back();
      out.elements.pop_back();
      out.vertices.pop_back();
      const auto& gv = *gg.vertex_group(out.vertices.back());
      out.elements.back() = gv.mul(out.elements.back(), c);
    } else {
      out.edges.push_back(e);
      out.vertices.push_back(g.terminus(e));
      out.elements.push_back(0);
    }
    const auto& gv = *gg.vertex_group(out.vertices.back());
    out.elements.back() = gv.mul(out.elements.back(), p.elements[i + 1]);
  }
  return out;
}

GWord from_path(const GraphOfGroups& gg, const SpanningData& sd, const PathWord& p, VertexId basepoint) {
  const auto& g = gg.graph();
  GWord w{basepoint, {}};
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    if (p.elements[i] != 0) w.letters.emplace_back(VertexLetter{p.vertices[i], p.elements[i]});
    if (i < p.edges.size()) {
      const EdgeId e = p.edges[i];
      if (sd.in_tree(e)) continue;
      if (sd.is_positive(e))
        w.letters.emplace_back(StableLetter{e, 1});
      else
        w.letters.emplace_back(StableLetter{g.bar(e), -1});
    }
  }
  return w;
}

GWord reduce_word(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w) {
  return from_path(gg, sd, reduce_path(gg, to_path(gg, sd, w)), w.basepoint);
}

bool is_trivial(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w) {
  const auto p = reduce_path(gg, to_path(gg, sd, w));
  return p.edges.empty() && p.elements.front() == 0;
}

bool words_equal(const GraphOfGroups& gg, const SpanningData& sd, const GWord& u, const GWord& v) {
  if (u.basepoint != v.basepoint) throw InputError("words_equal needs a common basepoint");
  return is_trivial(gg, sd, concat(u, inverse(gg, v)));
}

// ---------------------------------------------------------------------------
// Bass-Serre tree

namespace {

// Minimal element of each left coset cK of K inside G, ascending.
std::vector<Elem> left_coset_reps(const FiniteGroup& g, std::span<const Elem> k) {
  std::vector<char> done(g.order(), 0);
  std::vector<Elem> reps;
  for (Elem c = 0; c < g.order(); ++c) {
    if (done[c]) continue;
    reps.push_back(c);
    for (Elem x : k) done[g.mul(c, x)] = 1;
  }
  return reps;
}

}  // namespace

std::size_t tree_degree(const GraphOfGroups& gg, VertexId x) {
  std::size_t d = 0;
  const auto& g = gg.graph();
  for (EdgeId e : g.out_edges(x)) {
    const auto image = gg.mono(g.bar(e)).image();
    d += gg.vertex_group(x)->order() / image.order();
  }
  return d;
}

TreeBall tree_ball(const GraphOfGroups& gg, const SpanningData& sd, std::uint32_t radius, std::size_t max_vertices) {
  const auto& g = gg.graph();
  TreeBall ball;
  ball.vertices.push_back({sd.root, GWord{sd.root, {}}, 0, kNone, kNone});
  for (std::size_t head = 0; head < ball.vertices.size(); ++head) {
    const BallVertex node = ball.vertices[head];
    if (node.distance == radius) continue;
    const auto& gx = *gg.vertex_group(node.over);
    for (EdgeId e : g.out_edges(node.over)) {
      const auto image = gg.mono(g.bar(e)).map();
      for (Elem c : left_coset_reps(gx, image)) {
        // the identity coset of bar(via) leads back to the parent
        if (node.parent != kNone && e == g.bar(node.via) && c == 0) continue;
        GWord label = node.label;
        if (c != 0) label.letters.emplace_back(VertexLetter{node.over, c});
        if (!sd.in_tree(e)) {
          if (sd.is_positive(e))
            label.letters.emplace_back(StableLetter{e, 1});
          else
            label.letters.emplace_back(StableLetter{g.bar(e), -1});
        }
        if (ball.vertices.size() >= max_vertices)
          throw BudgetExceeded("tree ball exceeds " + std::to_string(max_vertices) + " vertices");
        ball.edges.push_back({head, ball.vertices.size(), e});
        ball.vertices.push_back({g.terminus(e), reduce_word(gg, sd, label), node.distance + 1, head, e});
      }
    }
  }
  return ball;
}

std::string to_dot(const GraphOfGroups& gg, const SpanningData& sd) {
  const auto& g = gg.graph();
  std::ostringstream os;
  os << "graph X {\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    os << "  v" << v << " [label=\"" << g.vertex_name(v) << " |" << gg.vertex_group(v)->order() << "|\"];\n";
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!sd.is_positive(e)) continue;
    os << "  v" << g.origin(e) << " -- v" << g.terminus(e) << " [label=\"" << g.edge_name(e) << " |"
       << gg.edge_group(e)->order() << "|\"";
    if (!sd.in_tree(e)) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string to_dot(const GraphOfGroups& gg, const TreeBall& ball) {
  const auto& g = gg.graph();
  std::ostringstream os;
  os << "graph ball {\n";
  for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
    const auto& v = ball.vertices[i];
    os << "  n" << i << " [label=\"" << format_word(gg, v.label) << " . " << g.vertex_name(v.over) << "\"];\n";
  }
  for (const auto& e : ball.edges)
    os << "  n" << e.from << " -- n" << e.to << " [label=\"" << g.edge_name(e.edge) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace rpf

#pragma once

// Serre graphs, graphs of finite groups, spanning data and words in the
// fundamental group pi_1(X, G, T).
//
// A word is a sequence of vertex letters (an element of some G_v) and stable
// letters s_y^{+-1}. Stable letters of tree edges are trivial and vanish on
// reduction. Internally words are converted into edge paths based at the
// basepoint, where the relation  e f_e(h) e^-1 = f_{bar e}(h)  drives the
// pinch reduction.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rpf/pgroups.hpp"

namespace rpf {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

class Graph {
 public:
  Graph() = default;
  /// Edge pair i gets ids 2i (origin -> terminus as given) and 2i+1.
  Graph(std::size_t vertices, const std::vector<std::pair<VertexId, VertexId>>& edge_pairs);
  /// Arbitrary tables; nothing is checked until validate_graph.
  static Graph from_tables(std::size_t vertices, std::vector<EdgeId> bar, std::vector<VertexId> origin,
                           std::vector<VertexId> terminus);

  std::size_t vertex_count() const { return vertices_; }
  std::size_t edge_count() const { return bar_.size(); }
  EdgeId bar(EdgeId e) const { return bar_[e]; }
  VertexId origin(EdgeId e) const { return origin_[e]; }
  VertexId terminus(EdgeId e) const { return terminus_[e]; }
  /// Edges with origin v, ascending.
  std::span<const EdgeId> out_edges(VertexId v) const { return out_[v]; }

  void set_names(std::vector<std::string> vertex_names, std::vector<std::string> edge_names);
  std::string vertex_name(VertexId v) const;
  std::string edge_name(EdgeId e) const;
  VertexId find_vertex(const std::string& name) const;
  EdgeId find_edge(const std::string& name) const;

 private:
  void index_out_edges();

  std::size_t vertices_ = 0;
  std::vector<EdgeId> bar_;
  std::vector<VertexId> origin_, terminus_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::string> vertex_names_, edge_names_;
};

/// Involution, bar-fixed edges, endpoint consistency, connectivity.
ValidationReport validate_graph(const Graph& g);

class GraphOfGroups {
 public:
  /// edge_groups and monos are indexed by edge id; mono e is f_e into
  /// G_{t(e)}. Only table sizes are checked here.
  GraphOfGroups(Graph graph, std::vector<GroupPtr> vertex_groups, std::vector<GroupPtr> edge_groups,
                std::vector<GroupHom> monos);

  const Graph& graph() const { return graph_; }
  const GroupPtr& vertex_group(VertexId v) const { return vertex_groups_[v]; }
  const GroupPtr& edge_group(EdgeId e) const { return edge_groups_[e]; }
  const GroupHom& mono(EdgeId e) const { return monos_[e]; }

  /// h in f_e(G_e), h an element of G_{t(e)}.
  bool in_image(EdgeId e, Elem h) const { return preimage_[e][h] != kNone; }
  Elem preimage(EdgeId e, Elem h) const { return preimage_[e][h]; }
  /// f_{bar e}(f_e^{-1}(h)) for h in f_e(G_e): moves h across the edge.
  Elem transfer(EdgeId e, Elem h) const { return monos_[graph_.bar(e)](preimage_[e][h]); }
  std::size_t max_vertex_order() const;

 private:
  Graph graph_;
  std::vector<GroupPtr> vertex_groups_, edge_groups_;
  std::vector<GroupHom> monos_;
  std::vector<std::vector<Elem>> preimage_;  // per edge, over G_{t(e)}
};

ValidationReport validate_gog(const GraphOfGroups& gg);

/// Maximal subtree, orientation and epsilon.
struct SpanningData {
  VertexId root = 0;
  std::vector<char> tree;      // per edge, closed under bar
  std::vector<char> positive;  // per edge: E+X
  std::vector<EdgeId> parent_edge;  // per vertex: tree edge parent -> v, kNone at the root
  std::vector<std::uint32_t> depth;

  bool in_tree(EdgeId e) const { return tree[e] != 0; }
  bool is_positive(EdgeId e) const { return positive[e] != 0; }
  int epsilon(EdgeId e) const { return positive[e] ? 0 : 1; }
};

/// BFS tree from vertex 0 (edges scanned in id order); E+X is the smaller
/// id of each pair. Throws InputError on a disconnected graph.
SpanningData spanning_tree(const Graph& g);
ValidationReport validate_spanning(const Graph& g, const SpanningData& sd);
/// Edge path inside the tree.
std::vector<EdgeId> tree_path(const Graph& g, const SpanningData& sd, VertexId from, VertexId to);
/// Positive non-tree edges in id order; these index the stable letters.
std::vector<EdgeId> stable_edges(const Graph& g, const SpanningData& sd);
/// Rank of the free group pi_1 of the underlying graph.
std::size_t graph_rank(const Graph& g);

// ---------------------------------------------------------------------------
// words

struct VertexLetter {
  VertexId vertex;
  Elem element;
  friend bool operator==(const VertexLetter&, const VertexLetter&) = default;
};

/// s_y^exponent; s_y and s_{bar y} are the same letter.
struct StableLetter {
  EdgeId edge;
  int exponent;
  friend bool operator==(const StableLetter&, const StableLetter&) = default;
};

using Letter = std::variant<VertexLetter, StableLetter>;

struct GWord {
  VertexId basepoint = 0;
  std::vector<Letter> letters;

  bool empty() const { return letters.empty(); }
  std::size_t size() const { return letters.size(); }
  friend bool operator==(const GWord&, const GWord&) = default;
};

/// Throws InputError when a letter references a missing vertex, edge or
/// element, or a stable exponent is not +-1.
void check_word(const GraphOfGroups& gg, const GWord& w);
GWord inverse(const GraphOfGroups& gg, const GWord& w);
GWord concat(const GWord& a, const GWord& b);
std::string format_word(const GraphOfGroups& gg, const GWord& w);

/// g_0 e_1 g_1 ... e_n g_n with g_i in G_{vertices[i]} and e_i running from
/// vertices[i-1] to vertices[i].
struct PathWord {
  std::vector<VertexId> vertices;
  std::vector<Elem> elements;
  std::vector<EdgeId> edges;
};

PathWord to_path(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w);
/// Stack reduction: removes every pinch e h bar(e) with h in f_e(G_e).
PathWord reduce_path(const GraphOfGroups& gg, const PathWord& p);
/// Drops tree edges and identity elements.
GWord from_path(const GraphOfGroups& gg, const SpanningData& sd, const PathWord& p, VertexId basepoint);

/// Reduced form; empty exactly when w is trivial in pi_1.
GWord reduce_word(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w);
bool is_trivial(const GraphOfGroups& gg, const SpanningData& sd, const GWord& w);
bool words_equal(const GraphOfGroups& gg, const SpanningData& sd, const GWord& u, const GWord& v);

// ---------------------------------------------------------------------------
// Bass-Serre tree

struct BallVertex {
  VertexId over;       // image in X
  GWord label;         // g with this vertex = g . x~, reduced
  std::uint32_t distance;
  std::size_t parent;  // kNone at the centre
  EdgeId via;          // edge of X crossed from the parent
};

struct BallEdge {
  std::size_t from, to;
  EdgeId edge;
};

struct TreeBall {
  std::vector<BallVertex> vertices;
  std::vector<BallEdge> edges;
};

/// Ball of the given radius around the basepoint's vertex x~_0 = 1.G_{x0}.
/// Throws BudgetExceeded past max_vertices.
TreeBall tree_ball(const GraphOfGroups& gg, const SpanningData& sd, std::uint32_t radius,
                   std::size_t max_vertices);
/// Degree of x~ in the tree: sum over edges e out of x of [G_x : f_{bar e}(G_e)].
std::size_t tree_degree(const GraphOfGroups& gg, VertexId x);

std::string to_dot(const GraphOfGroups& gg, const SpanningData& sd);
std::string to_dot(const GraphOfGroups& gg, const TreeBall& ball);

}  // namespace rpf

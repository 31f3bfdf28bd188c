#pragma once

// The level homomorphism Phi: G -> F_p assembled from the level-0 factor maps,
// and the graph-of-groups decomposition of its kernel H (the quotient of the
// Bass-Serre tree by H), carrying the shifted chief series.

#include <map>
#include <memory>
#include <optional>

#include "rpf/compat.hpp"

namespace rpf {

using GogPtr = std::shared_ptr<const GraphOfGroups>;

struct LevelHom {
  std::uint32_t p = 0;
  std::vector<std::vector<FpScalar>> vertex_values;  // [v][element]
  std::vector<FpScalar> stable_values;                // [edge] value of s_y; tree edges 0
  std::optional<EdgeId> forced_edge;                  // stable letter sent to 1 when every level-0 factor is trivial

  FpScalar vertex(VertexId v, Elem g) const { return vertex_values[v][g]; }
  /// Value of the path step along e: +s for positive e, -s for the opposite.
  FpScalar step(const Graph& g, const SpanningData& sd, EdgeId e) const;
  /// Whether Phi restricted to G_v is onto F_p.
  bool onto_at(VertexId v) const;
  bool surjective() const;
};

/// Phi on each G_x is the projection to gamma^0 followed by the level-0 map;
/// stable letters go to 0, except that when all level-0 factors are trivial
/// the first stable letter goes to 1. Throws InputError when condition I or
/// II fails for (sa, lm).
LevelHom build_level_hom(const GraphOfGroups& gg, const SpanningData& sd, const SeriesAssignment& sa,
                         const LevelMaps& lm, std::uint32_t p);

FpScalar eval_level_hom(const LevelHom& ph, const GraphOfGroups& gg, const GWord& w);

struct CoverVertex {
  VertexId base;
  std::uint32_t position;  // representative of the class in F_p / Phi(G_x)
};

struct CoverEdge {
  EdgeId base;
  std::uint32_t position;  // Phi value of the edge's base point
  Elem c;                  // in G_{o(base)}
  Elem d;                  // in G_{t(base)}
};

struct KernelCover {
  GogPtr base;
  SpanningData base_sd;
  std::uint32_t p = 0;

  GogPtr cover;
  SpanningData cover_sd;
  SeriesAssignment series;  // level k is the base level k+1
  LevelMaps maps;           // inherited from base level k+1

  std::vector<CoverVertex> vertices;
  std::vector<CoverEdge> edges;
  std::vector<SubgroupGroup> vertex_kernels;  // per base vertex: ker Phi|G_x
  std::vector<SubgroupGroup> edge_kernels;    // per base edge
  GWord transversal_letter;                   // u with Phi(u) != 0, as a word
  FpScalar transversal_value{0};

  /// Image in G of each cover generator. vertex_lift[v] is the loop T_a
  /// reaching the fibre of v; edge_image[e] is the image of the edge step;
  /// tree_prefix[v] is the image of the cover-tree path from the basepoint.
  std::vector<GWord> vertex_lift;
  std::vector<GWord> edge_image;
  std::vector<GWord> tree_prefix;
  std::map<std::pair<EdgeId, std::uint32_t>, EdgeId> edge_lookup;

  /// T_c: a fixed word with Phi-value c.
  GWord transversal(std::uint32_t c) const;
  GWord embed_letter(const Letter& letter) const;
  /// Image of a cover word in G, reduced.
  GWord embed(const GWord& w) const;
};

KernelCover build_kernel_cover(const GogPtr& gg, const SpanningData& sd, const SeriesAssignment& sa,
                               const LevelMaps& lm, const LevelHom& ph);

/// Word over the cover presentation whose embedding equals w in G. Throws
/// InputError when Phi(w) != 0.
GWord rewrite_into_kernel(const KernelCover& kc, const LevelHom& ph, const GWord& w);

/// Structural checks: the cover validates, fibre sizes match, every cover
/// relation embeds to the identity, every generator of G lies in some T_c H,
/// and the shifted series with the inherited maps satisfy conditions I and II.
ValidationReport check_kernel_cover(const KernelCover& kc, const LevelHom& ph);

/// Drops level 0 (used when every level-0 factor is trivial and there is no
/// stable letter to carry Phi).
SeriesAssignment shift_series(const SeriesAssignment& sa);
LevelMaps shift_maps(const LevelMaps& lm);

}  // namespace rpf

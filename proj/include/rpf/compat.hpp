#pragma once

// Compatibility of chief series along the edges of a graph of p-groups:
// alignment of the series with the edge images (condition I) and a coherent
// choice of injections of the chief factors into F_p (condition II).

#include <optional>
#include <variant>
#include <vector>

#include "rpf/gog.hpp"

namespace rpf {

/// One chief series per vertex and per edge; y and bar(y) hold equal series.
struct SeriesAssignment {
  std::vector<ChiefSeries> vertex;
  std::vector<ChiefSeries> edge;

  /// N: the largest series length.
  std::size_t length_bound() const;
};

/// Every series valid for p and sitting in the right group; opposite edges agree.
ValidationReport validate_assignment(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p);

/// The injection of a nontrivial factor into F_p, stored as the image of the
/// factor generator chosen by chief_factor. Absent on trivial factors.
using LevelScalar = std::optional<FpScalar>;

struct LevelMaps {
  std::vector<std::vector<LevelScalar>> vertex;  // [level][vertex]
  std::vector<std::vector<LevelScalar>> edge;    // [level][edge]

  std::size_t levels() const { return vertex.size(); }
};

struct ConditionIFailure {
  EdgeId edge;
  std::size_t level;
  std::vector<Elem> image;         // f_y(G_y^(k))
  std::vector<Elem> intersection;  // f_y(G_y) ∩ G_t(y)^(k)
};

/// A non-forest edge whose cycle through the forest of Y_k has holonomy != 1.
struct CycleWitness {
  std::size_t level;
  EdgeId closing_edge;
  std::vector<EdgeId> forest_path;  // from o(closing_edge) to t(closing_edge)
  FpScalar holonomy;
};

struct ComplianceReport {
  std::vector<ConditionIFailure> condition_I;
  std::optional<CycleWitness> condition_II;

  bool ok() const { return condition_I.empty() && !condition_II; }
};

/// All failures of f_y(G_y^(k)) = f_y(G_y) ∩ G_t(y)^(k), for every edge and k <= N.
std::vector<ConditionIFailure> check_condition_I(const GraphOfGroups& gg, const SeriesAssignment& sa);

/// The map gamma^k(G_y) -> gamma^k(G_t(y)) induced by f_y.
struct FactorMap {
  bool collapses = true;  // source factor trivial
  FpScalar scalar{0};     // f_y(u_y) = u_t^scalar modulo G_t^(k+1)
};

/// Throws InputError when condition I fails at (y, k).
FactorMap induced_edge_factor_map(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p, EdgeId y,
                                  std::size_t k);

/// Forest propagation over Y_k with roots scaled to 1, then holonomy checks
/// on the remaining edges. Requires condition I.
std::variant<LevelMaps, CycleWitness> solve_condition_II(const GraphOfGroups& gg, const SeriesAssignment& sa,
                                                         std::uint32_t p);

struct ConditionIICheck {
  bool ok = true;
  std::optional<EdgeId> edge;
  std::size_t level = 0;
  std::string reason;
};

ConditionIICheck check_condition_II(const GraphOfGroups& gg, const SeriesAssignment& sa, const LevelMaps& lm,
                                    std::uint32_t p);

/// Convenience: condition I failures, then (if none) the solver outcome.
ComplianceReport check_conditions(const GraphOfGroups& gg, const SeriesAssignment& sa, std::uint32_t p,
                                  LevelMaps* solved = nullptr);

struct SearchOptions {
  std::size_t max_length = 0;        // 0: largest group exponent + 2
  std::size_t max_group_order = 0;   // 0: p^4
  std::size_t max_candidates = 1'000'000;
};

struct SearchResult {
  std::optional<SeriesAssignment> assignment;
  std::optional<LevelMaps> maps;
  std::size_t min_length = 0;  // padded lengths tried: [min_length, max_length]
  std::size_t max_length = 0;
  std::size_t candidates = 0;  // full vertex assignments examined

  bool found() const { return assignment.has_value(); }
};

/// Exhaustive search over chief series of the vertex groups, padded to a
/// common length. Edge series are forced by condition I (the preimage of the
/// terminus series), so only vertex series are enumerated.
SearchResult search_series_assignment(const GraphOfGroups& gg, std::uint32_t p, const SearchOptions& opts = {});

}  // namespace rpf

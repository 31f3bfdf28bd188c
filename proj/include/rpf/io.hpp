#pragma once

// JSON problem files, word syntax, and JSON reports.
//
// Problem file (format_version 1):
//   prime, groups {name: {cyclic: n} | {table: [[..]], labels: [..]} |
//   {permutations: [[..]]}}, vertices [{name, group}], edges, optional
//   letters, series, level_maps and words.
// An edge is either {name, o, t, group, to_t, to_o} (the opposite edge is
// named name~) or, when every edge carries a "bar" field, one entry per edge
// id {name, o, t, group, map, bar}.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpf/separate.hpp"

namespace rpf {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct Problem {
  std::uint32_t p = 0;
  std::vector<std::string> group_names;
  std::map<std::string, GroupPtr> groups;
  GogPtr gg;
  std::optional<SpanningData> sd;  // absent when the graph does not validate
  std::optional<SeriesAssignment> series;
  std::optional<LevelMaps> maps;
  std::map<std::string, VertexLetter> letters;
  std::vector<std::pair<std::string, std::string>> words;  // name, text

  Stage stage() const;
};

/// Resolves names and builds the tables. Throws InputError on malformed JSON
/// or dangling references; structural validity is checked separately.
Problem load_problem(const Json& j);
Problem load_problem_file(const std::filesystem::path& path);

/// Groups, graph, edge maps, spanning tree and (if present) series and maps.
ValidationReport validate_problem(const Problem& pr);

/// Problem file for a graph of groups, with optional series and maps. Group
/// tables are written out in full; a cover exported this way reloads.
Json save_problem(const GraphOfGroups& gg, std::uint32_t p, const SeriesAssignment* sa = nullptr,
                  const LevelMaps* lm = nullptr);

/// Tokens separated by spaces:
///   name[^k]       a letter from the problem's letters table, or an edge name
///                  (stable letter; k = +-1, or any k for repeated letters)
///   vertex:elem    a vertex letter (elem is an index or a label)
///   1              the identity
/// A word name from the problem's words table is expanded first.
GWord parse_word(const Problem& pr, const std::string& text);

/// Words over x1 .. xr: "x1 x2^-1 x1^2".
FreeWord parse_free_word(const std::string& text);
std::string format_free_word(const FreeWord& w);

Json to_json(const GraphOfGroups& gg, const GWord& w);
GWord word_from_json(const GraphOfGroups& gg, const Json& j);

Json to_json(const GraphOfGroups& gg, const ComplianceReport& r, const LevelMaps* solved);
Json to_json(const GraphOfGroups& gg, const SeriesAssignment& sa);
Json to_json(const GraphOfGroups& gg, const LevelMaps& lm);
Json to_json(const MagnusWitness& w);

/// Words inside the certificate are stored letter by letter; rewritten words
/// refer to the cover built at that step, so they are read back by index.
Json to_json(const GraphOfGroups& gg, const SeparationCertificate& cert);
SeparationCertificate certificate_from_json(const Json& j);

Json to_json(const ExplicitQuotient& q, const GraphOfGroups& gg);

}  // namespace rpf

#pragma once

// Separation of nontrivial elements by descent through index-p kernel covers,
// certificates that can be replayed independently, and the finite p-quotient
// obtained from the coset action on the certificate's terminal subgroup.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpf/cover.hpp"
#include "rpf/freep.hpp"

namespace rpf {

/// One graph of groups with its series data.
struct Stage {
  GogPtr gg;
  SpanningData sd;
  SeriesAssignment sa;
  LevelMaps lm;

  bool all_groups_trivial() const;
};

struct DescentStep {
  enum class Kind {
    Descended,  // Phi(w) = 0: w rewritten into the kernel cover
    Reindexed   // Phi identically 0 with nothing to force: level 0 dropped
  };
  Kind kind = Kind::Descended;
  std::size_t length_bound = 0;       // N before the step
  std::optional<EdgeId> forced_edge;  // stable letter sent to 1, if any
  GWord word;                         // entering the step
  GWord rewritten;                    // Descended only, over the cover
  std::size_t cover_vertices = 0;
  std::size_t cover_edge_pairs = 0;
};

struct LevelTerminal {
  FpScalar value;  // Phi(w) != 0
  std::optional<EdgeId> forced_edge;
};

struct FreeTerminal {
  std::uint32_t rank = 0;
  FreeWord word;  // over the positive non-tree edges in id order
  MagnusWitness witness;
};

struct SeparationCertificate {
  std::uint32_t p = 0;
  GWord word;  // reduced input
  std::vector<DescentStep> steps;
  GWord terminal_word;
  std::variant<LevelTerminal, FreeTerminal> terminal;

  /// Descent steps plus the terminal step.
  std::size_t depth() const { return steps.size() + 1; }
};

struct SeparateOptions {
  std::uint32_t max_free_degree = 64;
};

/// Throws InputError when conditions I/II fail or w is trivial, InternalError
/// when the descent exceeds N + 1 steps.
SeparationCertificate separate(const Stage& stage, std::uint32_t p, const GWord& w, const SeparateOptions& opts = {});

struct VerifyResult {
  bool ok = true;
  std::size_t step = 0;  // first failing step; steps.size() means the terminal
  std::string reason;

  explicit operator bool() const { return ok; }
};

/// Replays the certificate against (stage, w): rebuilds every cover, checks
/// the level values, the embedding round-trip of every rewritten word and the
/// terminal witness.
VerifyResult verify_certificate(const Stage& stage, std::uint32_t p, const GWord& w, const SeparationCertificate& cert);

struct BatchResult {
  std::optional<SeparationCertificate> certificate;
  std::string error;
};

/// Reference loop.
std::vector<BatchResult> separate_batch_serial(const Stage& stage, std::uint32_t p, const std::vector<GWord>& words,
                                               const SeparateOptions& opts = {});
/// Same results, OpenMP over the words.
std::vector<BatchResult> separate_batch(const Stage& stage, std::uint32_t p, const std::vector<GWord>& words,
                                        const SeparateOptions& opts = {});

// ---------------------------------------------------------------------------
// explicit quotient

struct QuotientBudget {
  std::size_t max_cosets = 64;
  std::size_t max_order = 1u << 16;
};

struct ExplicitQuotient {
  GroupPtr group;  // P
  std::size_t cosets = 0;
  std::vector<std::vector<std::uint32_t>> permutations;  // one per generator, left action on cosets
  std::vector<Letter> generators;                        // nonidentity vertex letters, then stable letters
  std::vector<Elem> generator_images;
  std::vector<std::uint32_t> vertex_offset;   // generator index of (v, 1)
  std::vector<std::uint32_t> edge_generator;  // per edge, kNone on the tree
  Elem word_image = 0;

  Elem image(const GWord& w) const;
};

/// Coset action of G on G/U, U the terminal subgroup of the certificate
/// (membership decided by replaying the descent). Throws BudgetExceeded past
/// the budget and InternalError when the result fails its own checks.
ExplicitQuotient build_explicit_quotient(const Stage& stage, std::uint32_t p, const SeparationCertificate& cert,
                                         const QuotientBudget& budget = {});

/// Relation words of the presentation all map to the identity.
ValidationReport check_quotient_relations(const GraphOfGroups& gg, const SpanningData& sd, const ExplicitQuotient& q);

}  // namespace rpf

#pragma once

// Explicit finite groups given by Cayley tables, with the subgroup, quotient
// and chief-series machinery used for finite p-groups.
//
// Elements are indices 0..order-1 and index 0 is always the identity.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpf/errors.hpp"
#include "rpf/fp.hpp"

namespace rpf {

using Elem = std::uint32_t;

class FiniteGroup {
 public:
  /// Builds a group from a row-major multiplication table. Only the shape
  /// (size, index range) is checked here; algebraic checks live in
  /// validate_group. The inverse table is derived from the multiplication
  /// table unless given explicitly.
  FiniteGroup(std::size_t order, std::vector<Elem> mul, std::vector<std::string> labels = {},
              std::vector<Elem> inv = {});

  static FiniteGroup trivial();
  static FiniteGroup cyclic(std::size_t n);
  static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);
  /// Closure of permutations of {0..degree-1}. Element 0 is the identity
  /// permutation, the rest follow in breadth-first order over the generators.
  /// gen_index receives the element index of each generator.
  static FiniteGroup from_permutations(const std::vector<std::vector<std::uint32_t>>& gens,
                                       std::size_t max_order, std::vector<Elem>* gen_index = nullptr);

  std::size_t order() const { return n_; }
  Elem mul(Elem a, Elem b) const { return mul_[std::size_t{a} * n_ + b]; }
  Elem inv(Elem a) const { return inv_[a]; }
  Elem pow(Elem a, std::int64_t k) const;
  /// g h g^-1
  Elem conj(Elem g, Elem h) const { return mul(mul(g, h), inv(g)); }
  std::size_t element_order(Elem a) const;

  std::span<const Elem> table() const { return mul_; }
  std::span<const Elem> inverse_table() const { return inv_; }
  bool has_labels() const { return !labels_.empty(); }
  std::string label(Elem a) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::size_t n_;
  std::vector<Elem> mul_;
  std::vector<Elem> inv_;
  std::vector<std::string> labels_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

inline GroupPtr share(FiniteGroup g) { return std::make_shared<const FiniteGroup>(std::move(g)); }

// ---------------------------------------------------------------------------
// validation

struct AssocWitness {
  Elem a, b, c;
};

/// Lexicographically first triple with (ab)c != a(bc), reference loop.
std::optional<AssocWitness> find_associativity_violation_serial(const FiniteGroup& g);
/// Same result as the serial version, OpenMP over the first factor.
std::optional<AssocWitness> find_associativity_violation(const FiniteGroup& g);

struct PrimePower {
  std::uint32_t p;
  std::uint32_t m;
};

/// order = p^m with p prime, or nullopt (order 1 is reported as p = 1, m = 0).
std::optional<PrimePower> prime_power_of(std::size_t order);

struct GroupValidation {
  ValidationReport report;
  std::optional<PrimePower> prime_power;
};

GroupValidation validate_group(const FiniteGroup& g);

// ---------------------------------------------------------------------------
// subgroups

class Subgroup {
 public:
  /// Element list is sorted and deduplicated; closure is not checked.
  Subgroup(GroupPtr parent, std::vector<Elem> elements);

  static Subgroup whole(GroupPtr g);
  static Subgroup trivial(GroupPtr g);

  const GroupPtr& parent() const { return parent_; }
  std::span<const Elem> elements() const { return elems_; }
  std::size_t order() const { return elems_.size(); }
  bool contains(Elem a) const { return mask_[a] != 0; }
  bool is_trivial() const { return elems_.size() == 1; }
  bool is_whole() const { return elems_.size() == parent_->order(); }
  bool subset_of(const Subgroup& other) const;

  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.elems_ == b.elems_; }

 private:
  GroupPtr parent_;
  std::vector<Elem> elems_;
  std::vector<char> mask_;
};

/// Smallest subgroup containing seed.
Subgroup subgroup_closure(const GroupPtr& g, std::span<const Elem> seed);
/// Smallest normal subgroup containing seed.
Subgroup normal_closure(const GroupPtr& g, std::span<const Elem> seed);
Subgroup intersect(const Subgroup& a, const Subgroup& b);
/// Subgroup generated by a and b.
Subgroup join(const Subgroup& a, const Subgroup& b);
bool is_closed(const Subgroup& h);

/// g with g h g^-1 outside the subgroup.
struct ConjugationWitness {
  Elem g, h;
};

std::optional<ConjugationWitness> normality_violation(const Subgroup& h);
bool is_normal(const Subgroup& h);

/// Every normal subgroup, ordered by (order, element list).
std::vector<Subgroup> normal_subgroups(const GroupPtr& g);

/// Relabels a subgroup as a standalone group. The i-th smallest element of
/// the subgroup becomes index i, so the identity stays at 0.
struct SubgroupGroup {
  GroupPtr group;
  std::vector<Elem> to_parent;    // index in the new group -> parent element
  std::vector<Elem> from_parent;  // parent element -> index, or npos
  static constexpr Elem npos = static_cast<Elem>(-1);
};

SubgroupGroup subgroup_as_group(const Subgroup& h);

// ---------------------------------------------------------------------------
// homomorphisms

class GroupHom {
 public:
  GroupHom(GroupPtr source, GroupPtr target, std::vector<Elem> map);

  const GroupPtr& source() const { return source_; }
  const GroupPtr& target() const { return target_; }
  std::span<const Elem> map() const { return map_; }
  Elem operator()(Elem a) const { return map_[a]; }

  bool is_injective() const;
  Subgroup image() const;
  Subgroup kernel() const;
  Subgroup image_of(const Subgroup& h) const;
  Subgroup preimage(const Subgroup& h) const;

 private:
  GroupPtr source_;
  GroupPtr target_;
  std::vector<Elem> map_;
};

/// Checks table shape and multiplicativity; first failing pair is reported.
ValidationReport validate_hom(const GroupHom& f);
/// second ∘ first
GroupHom compose(const GroupHom& second, const GroupHom& first);

struct Quotient {
  GroupPtr group;
  GroupHom projection;
};

/// G/N on cosets, numbered by their minimal element (the coset of the
/// identity is 0). Throws InputError with a conjugation witness when N is not
/// normal.
Quotient quotient_group(const GroupPtr& g, const Subgroup& n);

// ---------------------------------------------------------------------------
// chief series

/// Descending chain S_0 >= S_1 >= ... >= S_n with S_k = 1 for every k past
/// the stored terms.
class ChiefSeries {
 public:
  explicit ChiefSeries(std::vector<Subgroup> terms);

  const GroupPtr& group() const { return terms_.front().parent(); }
  const Subgroup& term(std::size_t k) const { return k < terms_.size() ? terms_[k] : tail_; }
  std::span<const Subgroup> terms() const { return terms_; }
  /// Smallest n with S_n trivial.
  std::size_t length() const;

 private:
  std::vector<Subgroup> terms_;
  Subgroup tail_;
};

struct SeriesValidation {
  ValidationReport report;
  std::size_t length = 0;
};

SeriesValidation verify_chief_series(const ChiefSeries& s, std::uint32_t p);

struct ChiefFactor {
  enum class Kind { Trivial, OrderP };
  Kind kind = Kind::Trivial;
  /// Minimal element of S_k \ S_{k+1}; meaningful only for OrderP.
  Elem generator = 0;

  bool trivial() const { return kind == Kind::Trivial; }
};

ChiefFactor chief_factor(const ChiefSeries& s, std::size_t k);

/// For h in S_k, the exponent c in [0, p) with h in u^c S_{k+1}, u the factor
/// generator. Trivial factors give 0. nullopt if h is not in S_k.
std::optional<std::uint32_t> factor_coordinate(const ChiefSeries& s, std::size_t k,
                                               std::uint32_t p, Elem h);

/// Every chief series of g with exactly `levels` factors (some of them
/// trivial), i.e. every maximal normal chain padded with repeats. Order:
/// chains by depth-first choice of the next term in normal_subgroups order,
/// then padding patterns in lexicographic order of the nontrivial positions.
std::vector<ChiefSeries> enumerate_chief_series(const GroupPtr& g, std::uint32_t p,
                                                std::size_t levels, std::size_t max_count);

}  // namespace rpf

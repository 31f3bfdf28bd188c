#include "rpf/pgroups.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <sstream>

namespace rpf {

// ---------------------------------------------------------------------------
// F_p

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; std::uint64_t{d} * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p) {
  if (!is_prime(p)) throw InputError("not a prime: " + std::to_string(p));
}

FpScalar PrimeField::make(std::int64_t v) const {
  auto r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return {static_cast<std::uint32_t>(r)};
}

FpScalar PrimeField::pow(FpScalar a, std::uint64_t e) const {
  FpScalar r{1 % p_};
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

FpScalar PrimeField::inv(FpScalar a) const {
  if (a.value == 0) throw InternalError("inverse of zero in F_" + std::to_string(p_));
  return pow(a, p_ - 2);
}

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup::FiniteGroup(std::size_t order, std::vector<Elem> mul, std::vector<std::string> labels,
                         std::vector<Elem> inv)
    : n_(order), mul_(std::move(mul)), inv_(std::move(inv)), labels_(std::move(labels)) {
  if (n_ == 0) throw InputError("group of order 0");
  if (mul_.size() != n_ * n_)
    throw InputError("multiplication table has " + std::to_string(mul_.size()) +
                     " entries, expected " + std::to_string(n_ * n_));
  for (Elem x : mul_)
    if (x >= n_) throw InputError("multiplication table entry out of range: " + std::to_string(x));
  if (!labels_.empty() && labels_.size() != n_) throw InputError("label count differs from order");
  if (inv_.empty()) {
    // Elements without a two-sided inverse get the out-of-range marker n_;
    // validate_group reports them.
    inv_.assign(n_, static_cast<Elem>(n_));
    for (Elem a = 0; a < n_; ++a)
      for (Elem b = 0; b < n_; ++b)
        if (this->mul(a, b) == 0 && this->mul(b, a) == 0) {
          inv_[a] = b;
          break;
        }
  } else if (inv_.size() != n_) {
    throw InputError("inverse table has wrong size");
  }
}

FiniteGroup FiniteGroup::trivial() { return FiniteGroup(1, {0}); }

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  std::vector<Elem> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<Elem>((a + b) % n);
  return FiniteGroup(n, std::move(t));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const std::size_t na = a.order(), nb = b.order(), n = na * nb;
  std::vector<Elem> t(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      auto ax = static_cast<Elem>(x / nb), bx = static_cast<Elem>(x % nb);
      auto ay = static_cast<Elem>(y / nb), by = static_cast<Elem>(y % nb);
      t[x * n + y] = static_cast<Elem>(a.mul(ax, ay) * nb + b.mul(bx, by));
    }
  return FiniteGroup(n, std::move(t));
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<std::vector<std::uint32_t>>& gens,
                                           std::size_t max_order, std::vector<Elem>* gen_index) {
  using Perm = std::vector<std::uint32_t>;
  std::size_t degree = gens.empty() ? 0 : gens.front().size();
  for (const auto& g : gens) {
    if (g.size() != degree) throw InputError("permutations of different degrees");
    std::vector<char> seen(degree, 0);
    for (auto x : g) {
      if (x >= degree || seen[x]) throw InputError("not a permutation");
      seen[x] = 1;
    }
  }
  auto compose = [](const Perm& a, const Perm& b) {  // a after b
    Perm r(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
    return r;
  };
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<Perm> elems{id};
  std::map<Perm, Elem> index{{id, 0}};
  for (std::size_t head = 0; head < elems.size(); ++head) {
    for (const auto& g : gens) {
      Perm q = compose(g, elems[head]);
      if (index.emplace(q, static_cast<Elem>(elems.size())).second) {
        elems.push_back(std::move(q));
        if (elems.size() > max_order)
          throw BudgetExceeded("permutation group exceeds order " + std::to_string(max_order));
      }
    }
  }
  const std::size_t n = elems.size();
  std::vector<Elem> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = index.at(compose(elems[a], elems[b]));
  if (gen_index) {
    gen_index->clear();
    for (const auto& g : gens) gen_index->push_back(index.at(g));
  }
  return FiniteGroup(n, std::move(t));
}

Elem FiniteGroup::pow(Elem a, std::int64_t k) const {
  if (k < 0) {
    a = inv(a);
    k = -k;
  }
  Elem r = 0;
  while (k) {
    if (k & 1) r = mul(r, a);
    a = mul(a, a);
    k >>= 1;
  }
  return r;
}

std::size_t FiniteGroup::element_order(Elem a) const {
  std::size_t k = 1;
  for (Elem x = a; x != 0; x = mul(x, a)) ++k;
  return k;
}

std::string FiniteGroup::label(Elem a) const {
  return labels_.empty() ? std::to_string(a) : labels_[a];
}

// ---------------------------------------------------------------------------
// validation

std::optional<AssocWitness> find_associativity_violation_serial(const FiniteGroup& g) {
  const auto n = static_cast<Elem>(g.order());
  for (Elem a = 0; a < n; ++a)
    for (Elem b = 0; b < n; ++b) {
      const Elem ab = g.mul(a, b);
      for (Elem c = 0; c < n; ++c)
        if (g.mul(ab, c) != g.mul(a, g.mul(b, c))) return AssocWitness{a, b, c};
    }
  return std::nullopt;
}

std::optional<AssocWitness> find_associativity_violation(const FiniteGroup& g) {
  const auto n = static_cast<std::int64_t>(g.order());
  std::vector<std::optional<AssocWitness>> first(static_cast<std::size_t>(n));
  std::atomic<std::int64_t> best{n};
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t ai = 0; ai < n; ++ai) {
    if (ai > best.load(std::memory_order_relaxed)) continue;
    const auto a = static_cast<Elem>(ai);
    for (Elem b = 0; b < n && !first[ai]; ++b) {
      const Elem ab = g.mul(a, b);
      for (Elem c = 0; c < n; ++c)
        if (g.mul(ab, c) != g.mul(a, g.mul(b, c))) {
          first[ai] = AssocWitness{a, b, c};
          std::int64_t cur = best.load();
          while (ai < cur && !best.compare_exchange_weak(cur, ai)) {
          }
          break;
        }
    }
  }
  for (auto& w : first)
    if (w) return w;
  return std::nullopt;
}

std::optional<PrimePower> prime_power_of(std::size_t order) {
  if (order == 1) return PrimePower{1, 0};
  std::uint32_t p = 2;
  while (order % p != 0) ++p;
  std::uint32_t m = 0;
  while (order % p == 0) {
    order /= p;
    ++m;
  }
  if (order != 1) return std::nullopt;
  return PrimePower{p, m};
}

GroupValidation validate_group(const FiniteGroup& g) {
  GroupValidation out;
  const auto n = static_cast<Elem>(g.order());
  for (Elem a = 0; a < n; ++a) {
    if (g.mul(0, a) != a || g.mul(a, 0) != a) {
      out.report.fail("index 0 is not a two-sided identity at element " + std::to_string(a));
      break;
    }
  }
  for (Elem a = 0; a < n; ++a) {
    const Elem b = g.inv(a);
    if (b >= n || g.mul(a, b) != 0 || g.mul(b, a) != 0) {
      out.report.fail("inverse table inconsistent at element " + std::to_string(a));
      break;
    }
  }
  if (auto w = find_associativity_violation(g)) {
    std::ostringstream os;
    os << "associativity fails at (" << w->a << ", " << w->b << ", " << w->c << ")";
    out.report.fail(os.str());
  }
  out.prime_power = prime_power_of(g.order());
  return out;
}

// ---------------------------------------------------------------------------
// subgroups

Subgroup::Subgroup(GroupPtr parent, std::vector<Elem> elements)
    : parent_(std::move(parent)), elems_(std::move(elements)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
  mask_.assign(parent_->order(), 0);
  for (Elem a : elems_) {
    if (a >= parent_->order()) throw InputError("subgroup element out of range: " + std::to_string(a));
    mask_[a] = 1;
  }
}

Subgroup Subgroup::whole(GroupPtr g) {
  std::vector<Elem> all(g->order());
  std::iota(all.begin(), all.end(), Elem{0});
  return Subgroup(std::move(g), std::move(all));
}

Subgroup Subgroup::trivial(GroupPtr g) { return Subgroup(std::move(g), {0}); }

bool Subgroup::subset_of(const Subgroup& other) const {
  return std::all_of(elems_.begin(), elems_.end(), [&](Elem a) { return other.contains(a); });
}

namespace {

// Closure of `mask` under multiplication by the seed-generated elements.
std::vector<Elem> close_under(const FiniteGroup& g, std::vector<char>& mask, std::vector<Elem> elems,
                              std::span<const Elem> gens) {
  for (std::size_t head = 0; head < elems.size(); ++head)
    for (Elem s : gens) {
      const Elem x = g.mul(elems[head], s);
      if (!mask[x]) {
        mask[x] = 1;
        elems.push_back(x);
      }
    }
  return elems;
}

}  // namespace

Subgroup subgroup_closure(const GroupPtr& g, std::span<const Elem> seed) {
  std::vector<char> mask(g->order(), 0);
  mask[0] = 1;
  for (Elem s : seed)
    if (s >= g->order()) throw InputError("seed element out of range: " + std::to_string(s));
  // In a finite group the closure under right multiplication by the seed
  // is already the generated subgroup.
  auto elems = close_under(*g, mask, {0}, seed);
  return Subgroup(g, std::move(elems));
}

Subgroup normal_closure(const GroupPtr& g, std::span<const Elem> seed) {
  std::vector<Elem> conjugates;
  for (Elem s : seed)
    for (Elem x = 0; x < g->order(); ++x) conjugates.push_back(g->conj(x, s));
  return subgroup_closure(g, conjugates);
}

Subgroup intersect(const Subgroup& a, const Subgroup& b) {
  std::vector<Elem> out;
  for (Elem x : a.elements())
    if (b.contains(x)) out.push_back(x);
  return Subgroup(a.parent(), std::move(out));
}

Subgroup join(const Subgroup& a, const Subgroup& b) {
  std::vector<Elem> seed(a.elements().begin(), a.elements().end());
  seed.insert(seed.end(), b.elements().begin(), b.elements().end());
  return subgroup_closure(a.parent(), seed);
}

bool is_closed(const Subgroup& h) {
  const auto& g = *h.parent();
  if (!h.contains(0)) return false;
  for (Elem a : h.elements()) {
    if (!h.contains(g.inv(a))) return false;
    for (Elem b : h.elements())
      if (!h.contains(g.mul(a, b))) return false;
  }
  return true;
}

std::optional<ConjugationWitness> normality_violation(const Subgroup& h) {
  const auto& g = *h.parent();
  for (Elem x = 0; x < g.order(); ++x)
    for (Elem a : h.elements())
      if (!h.contains(g.conj(x, a))) return ConjugationWitness{x, a};
  return std::nullopt;
}

bool is_normal(const Subgroup& h) { return !normality_violation(h).has_value(); }

std::vector<Subgroup> normal_subgroups(const GroupPtr& g) {
  std::vector<Subgroup> minimal_normal;
  for (Elem x = 1; x < g->order(); ++x) {
    const Elem seed[] = {x};
    minimal_normal.push_back(normal_closure(g, seed));
  }
  std::vector<Subgroup> found{Subgroup::trivial(g)};
  std::map<std::vector<Elem>, bool> seen{{{0}, true}};
  for (std::size_t head = 0; head < found.size(); ++head)
    for (const auto& m : minimal_normal) {
      Subgroup j = join(found[head], m);
      std::vector<Elem> key(j.elements().begin(), j.elements().end());
      if (seen.emplace(std::move(key), true).second) found.push_back(std::move(j));
    }
  std::sort(found.begin(), found.end(), [](const Subgroup& a, const Subgroup& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return std::lexicographical_compare(a.elements().begin(), a.elements().end(),
                                        b.elements().begin(), b.elements().end());
  });
  return found;
}

SubgroupGroup subgroup_as_group(const Subgroup& h) {
  const auto& g = *h.parent();
  SubgroupGroup out;
  out.to_parent.assign(h.elements().begin(), h.elements().end());
  out.from_parent.assign(g.order(), SubgroupGroup::npos);
  for (std::size_t i = 0; i < out.to_parent.size(); ++i) out.from_parent[out.to_parent[i]] = static_cast<Elem>(i);
  const std::size_t n = out.to_parent.size();
  std::vector<Elem> t(n * n);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < n; ++a) {
    if (g.has_labels()) labels.push_back(g.label(out.to_parent[a]));
    for (std::size_t b = 0; b < n; ++b) {
      const Elem prod = out.from_parent[g.mul(out.to_parent[a], out.to_parent[b])];
      if (prod == SubgroupGroup::npos) throw InputError("subset is not closed under multiplication");
      t[a * n + b] = prod;
    }
  }
  out.group = share(FiniteGroup(n, std::move(t), std::move(labels)));
  return out;
}

// ---------------------------------------------------------------------------
// homomorphisms

GroupHom::GroupHom(GroupPtr source, GroupPtr target, std::vector<Elem> map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
  if (map_.size() != source_->order()) throw InputError("homomorphism table has wrong size");
  for (Elem x : map_)
    if (x >= target_->order()) throw InputError("homomorphism value out of range: " + std::to_string(x));
}

bool GroupHom::is_injective() const {
  std::vector<char> hit(target_->order(), 0);
  for (Elem x : map_) {
    if (hit[x]) return false;
    hit[x] = 1;
  }
  return true;
}

Subgroup GroupHom::image() const { return Subgroup(target_, map_); }

Subgroup GroupHom::kernel() const {
  std::vector<Elem> k;
  for (Elem a = 0; a < map_.size(); ++a)
    if (map_[a] == 0) k.push_back(a);
  return Subgroup(source_, std::move(k));
}

Subgroup GroupHom::image_of(const Subgroup& h) const {
  std::vector<Elem> out;
  for (Elem a : h.elements()) out.push_back(map_[a]);
  return Subgroup(target_, std::move(out));
}

Subgroup GroupHom::preimage(const Subgroup& h) const {
  std::vector<Elem> out;
  for (Elem a = 0; a < map_.size(); ++a)
    if (h.contains(map_[a])) out.push_back(a);
  return Subgroup(source_, std::move(out));
}

ValidationReport validate_hom(const GroupHom& f) {
  ValidationReport r;
  const auto& s = *f.source();
  const auto& t = *f.target();
  for (Elem a = 0; a < s.order(); ++a)
    for (Elem b = 0; b < s.order(); ++b)
      if (f(s.mul(a, b)) != t.mul(f(a), f(b))) {
        r.fail("not multiplicative at (" + std::to_string(a) + ", " + std::to_string(b) + ")");
        return r;
      }
  return r;
}

GroupHom compose(const GroupHom& second, const GroupHom& first) {
  if (first.target()->order() != second.source()->order())
    throw InputError("composition of incompatible homomorphisms");
  std::vector<Elem> m(first.source()->order());
  for (Elem a = 0; a < m.size(); ++a) m[a] = second(first(a));
  return GroupHom(first.source(), second.target(), std::move(m));
}

Quotient quotient_group(const GroupPtr& g, const Subgroup& n) {
  if (auto w = normality_violation(n))
    throw InputError("subgroup is not normal: conjugating " + std::to_string(w->h) + " by " +
                     std::to_string(w->g) + " leaves it");
  std::vector<Elem> coset_of(g->order(), SubgroupGroup::npos);
  std::vector<Elem> reps;
  for (Elem x = 0; x < g->order(); ++x) {
    if (coset_of[x] != SubgroupGroup::npos) continue;
    const auto id = static_cast<Elem>(reps.size());
    reps.push_back(x);
    for (Elem k : n.elements()) coset_of[g->mul(x, k)] = id;
  }
  const std::size_t q = reps.size();
  std::vector<Elem> t(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) t[a * q + b] = coset_of[g->mul(reps[a], reps[b])];
  auto qg = share(FiniteGroup(q, std::move(t)));
  return Quotient{qg, GroupHom(g, qg, std::move(coset_of))};
}

// ---------------------------------------------------------------------------
// chief series

namespace {

std::vector<Subgroup> checked_terms(std::vector<Subgroup> terms) {
  if (terms.empty()) throw InputError("chief series needs at least one term");
  for (const auto& t : terms)
    if (t.parent() != terms.front().parent()) throw InputError("chief series terms from different groups");
  return terms;
}

}  // namespace

ChiefSeries::ChiefSeries(std::vector<Subgroup> terms)
    : terms_(checked_terms(std::move(terms))), tail_(Subgroup::trivial(terms_.front().parent())) {}

std::size_t ChiefSeries::length() const {
  for (std::size_t k = 0; k < terms_.size(); ++k)
    if (terms_[k].is_trivial()) return k;
  return terms_.size();
}

SeriesValidation verify_chief_series(const ChiefSeries& s, std::uint32_t p) {
  SeriesValidation out;
  auto& r = out.report;
  const auto terms = s.terms();
  if (!terms.front().is_whole()) r.fail("first term is not the whole group");
  if (!terms.back().is_trivial()) r.fail("last term is not trivial");
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const auto& t = terms[k];
    if (!is_closed(t)) {
      r.fail("term " + std::to_string(k) + " is not a subgroup");
      continue;
    }
    if (auto w = normality_violation(t))
      r.fail("term " + std::to_string(k) + " is not normal: conjugating " + std::to_string(w->h) + " by " +
             std::to_string(w->g));
    if (k + 1 < terms.size()) {
      const auto& next = terms[k + 1];
      if (!next.subset_of(t)) {
        r.fail("term " + std::to_string(k + 1) + " is not contained in term " + std::to_string(k));
      } else if (t.order() != next.order() && t.order() != next.order() * p) {
        r.fail("factor " + std::to_string(k) + " has order " + std::to_string(t.order() / next.order()) +
               ", expected 1 or " + std::to_string(p));
      }
    }
  }
  out.length = s.length();
  return out;
}

ChiefFactor chief_factor(const ChiefSeries& s, std::size_t k) {
  const auto& top = s.term(k);
  const auto& below = s.term(k + 1);
  if (top.order() == below.order()) return {};
  for (Elem a : top.elements())
    if (!below.contains(a)) return {ChiefFactor::Kind::OrderP, a};
  return {};
}

std::optional<std::uint32_t> factor_coordinate(const ChiefSeries& s, std::size_t k, std::uint32_t p, Elem h) {
  if (!s.term(k).contains(h)) return std::nullopt;
  const auto f = chief_factor(s, k);
  if (f.trivial()) return 0u;
  const auto& g = *s.group();
  const auto& below = s.term(k + 1);
  Elem power = 0;  // u^c
  for (std::uint32_t c = 0; c < p; ++c) {
    if (below.contains(g.mul(g.inv(power), h))) return c;
    power = g.mul(power, f.generator);
  }
  return std::nullopt;
}

std::vector<ChiefSeries> enumerate_chief_series(const GroupPtr& g, std::uint32_t p, std::size_t levels,
                                                std::size_t max_count) {
  const auto pp = prime_power_of(g->order());
  if (!pp || (pp->m > 0 && pp->p != p))
    throw InputError("group of order " + std::to_string(g->order()) + " is not a " + std::to_string(p) + "-group");
  const std::size_t m = pp->m;
  if (levels < m) return {};

  const auto normals = normal_subgroups(g);
  std::vector<std::vector<Subgroup>> chains;
  std::vector<Subgroup> current{Subgroup::whole(g)};
  auto dfs = [&](auto&& self) -> void {
    const auto& top = current.back();
    if (top.is_trivial()) {
      chains.push_back(current);
      if (chains.size() > max_count) throw BudgetExceeded("too many chief series");
      return;
    }
    for (const auto& n : normals)
      if (n.order() * p == top.order() && n.subset_of(top)) {
        current.push_back(n);
        self(self);
        current.pop_back();
      }
  };
  dfs(dfs);

  // positions of the m nontrivial factors among `levels`, lexicographic
  std::vector<std::vector<std::size_t>> patterns;
  std::vector<std::size_t> pick;
  auto choose = [&](auto&& self, std::size_t from) -> void {
    if (pick.size() == m) {
      patterns.push_back(pick);
      return;
    }
    for (std::size_t i = from; i + (m - pick.size()) <= levels; ++i) {
      pick.push_back(i);
      self(self, i + 1);
      pick.pop_back();
    }
  };
  choose(choose, 0);

  if (chains.size() * patterns.size() > max_count) throw BudgetExceeded("too many chief series");
  std::vector<ChiefSeries> out;
  for (const auto& chain : chains)
    for (const auto& pattern : patterns) {
      std::vector<Subgroup> terms{chain[0]};
      std::size_t next = 0;
      for (std::size_t k = 0; k < levels; ++k) {
        if (next < pattern.size() && pattern[next] == k) ++next;
        terms.push_back(chain[next]);
      }
      out.emplace_back(std::move(terms));
    }
  return out;
}

}  // namespace rpf

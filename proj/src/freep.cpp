#include "rpf/freep.hpp"

#include <omp.h>

#include <algorithm>
#include <string>

namespace rpf {

TruncatedPoly::TruncatedPoly(std::uint32_t p, std::uint32_t rank, std::uint32_t degree)
    : p_(p), rank_(rank), degree_(degree) {
  if (!is_prime(p)) throw InputError("not a prime: " + std::to_string(p));
}

TruncatedPoly TruncatedPoly::one(std::uint32_t p, std::uint32_t rank, std::uint32_t degree) {
  TruncatedPoly t(p, rank, degree);
  t.add({}, 1);
  return t;
}

std::uint32_t TruncatedPoly::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? 0 : it->second;
}

void TruncatedPoly::add(const Monomial& m, std::uint32_t c) {
  if (m.size() > degree_ || c % p_ == 0) return;
  auto [it, fresh] = terms_.try_emplace(m, 0);
  it->second = (it->second + c) % p_;
  if (it->second == 0) terms_.erase(it);
}

bool TruncatedPoly::is_one() const {
  return terms_.size() == 1 && terms_.begin()->first.empty() && terms_.begin()->second == 1;
}

namespace {

void check_compatible(const TruncatedPoly& a, const TruncatedPoly& b) {
  if (a.prime() != b.prime() || a.degree() != b.degree() || a.rank() != b.rank())
    throw InputError("truncated polynomials over different algebras");
}

void accumulate(TruncatedPoly& out, const Monomial& ma, std::uint32_t ca, const TruncatedPoly& b) {
  const std::uint64_t p = out.prime();
  for (const auto& [mb, cb] : b.terms()) {
    if (ma.size() + mb.size() > out.degree()) continue;
    Monomial m = ma;
    m.insert(m.end(), mb.begin(), mb.end());
    out.add(m, static_cast<std::uint32_t>(std::uint64_t{ca} * cb % p));
  }
}

}  // namespace

TruncatedPoly multiply_serial(const TruncatedPoly& a, const TruncatedPoly& b) {
  check_compatible(a, b);
  TruncatedPoly out(a.prime(), a.rank(), a.degree());
  for (const auto& [ma, ca] : a.terms()) accumulate(out, ma, ca, b);
  return out;
}

TruncatedPoly multiply(const TruncatedPoly& a, const TruncatedPoly& b) {
  check_compatible(a, b);
  const std::vector<std::pair<Monomial, std::uint32_t>> left(a.terms().begin(), a.terms().end());
  const int n = static_cast<int>(left.size());
  std::vector<TruncatedPoly> partial;
#pragma omp parallel
  {
#pragma omp single
    partial.assign(omp_get_num_threads(), TruncatedPoly(a.prime(), a.rank(), a.degree()));
    auto& mine = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
    for (int i = 0; i < n; ++i) accumulate(mine, left[i].first, left[i].second, b);
  }
  TruncatedPoly out(a.prime(), a.rank(), a.degree());
  for (const auto& part : partial)
    for (const auto& [m, c] : part.terms()) out.add(m, c);
  return out;
}

FreeWord free_reduce(const FreeWord& w) {
  FreeWord out;
  for (const auto& x : w) {
    if (!out.empty() && out.back().gen == x.gen && out.back().exponent == -x.exponent)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

FreeWord free_inverse(const FreeWord& w) {
  FreeWord out(w.rbegin(), w.rend());
  for (auto& x : out) x.exponent = -x.exponent;
  return out;
}

TruncatedPoly magnus_letter(std::uint32_t p, std::uint32_t rank, std::uint32_t degree, FreeLetter x) {
  if (x.gen >= rank) throw InputError("generator x" + std::to_string(x.gen + 1) + " exceeds the rank");
  if (x.exponent != 1 && x.exponent != -1) throw InputError("free letter exponent must be +-1");
  TruncatedPoly t = TruncatedPoly::one(p, rank, degree);
  if (x.exponent == 1) {
    t.add({x.gen}, 1);
    return t;
  }
  for (std::uint32_t k = 1; k <= degree; ++k) t.add(Monomial(k, x.gen), k % 2 ? p - 1 : 1);
  return t;
}

namespace {

template <class Mul>
TruncatedPoly image_with(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t degree, Mul mul) {
  if (degree == 0) throw InputError("degree must be at least 1");
  TruncatedPoly acc = TruncatedPoly::one(p, rank, degree);
  for (const auto& x : w) acc = mul(acc, magnus_letter(p, rank, degree, x));
  return acc;
}

}  // namespace

TruncatedPoly magnus_image(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t degree) {
  return image_with(w, p, rank, degree, [](const auto& a, const auto& b) { return multiply(a, b); });
}

TruncatedPoly magnus_image_serial(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t degree) {
  return image_with(w, p, rank, degree, [](const auto& a, const auto& b) { return multiply_serial(a, b); });
}

std::optional<MagnusWitness> magnus_witness(const TruncatedPoly& image) {
  std::optional<MagnusWitness> best;
  for (const auto& [m, c] : image.terms()) {
    if (m.empty()) continue;
    if (!best || m.size() < best->monomial.size() || (m.size() == best->monomial.size() && m < best->monomial))
      best = MagnusWitness{image.degree(), m, c};
  }
  return best;
}

MagnusWitness separate_free(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t max_degree) {
  const FreeWord r = free_reduce(w);
  if (r.empty()) throw InputError("free word reduces to the identity");
  for (std::uint32_t d = 1; d <= max_degree; ++d)
    if (auto wit = magnus_witness(magnus_image(r, p, rank, d))) return *wit;
  throw BudgetExceeded("no Magnus witness up to degree " + std::to_string(max_degree));
}

}  // namespace rpf

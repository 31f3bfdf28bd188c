#pragma once

// Truncated noncommutative polynomials over F_p and the Magnus map
// x_i -> 1 + X_i, used to separate elements of free groups.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "rpf/errors.hpp"
#include "rpf/fp.hpp"

namespace rpf {

/// A word in the variables X_0 .. X_{r-1}.
using Monomial = std::vector<std::uint32_t>;

class TruncatedPoly {
 public:
  TruncatedPoly(std::uint32_t p, std::uint32_t rank, std::uint32_t degree);

  static TruncatedPoly one(std::uint32_t p, std::uint32_t rank, std::uint32_t degree);

  std::uint32_t prime() const { return p_; }
  std::uint32_t rank() const { return rank_; }
  std::uint32_t degree() const { return degree_; }
  const std::map<Monomial, std::uint32_t>& terms() const { return terms_; }

  std::uint32_t coefficient(const Monomial& m) const;
  /// Adds c to the coefficient of m; terms past the degree cap are dropped.
  void add(const Monomial& m, std::uint32_t c);
  bool is_one() const;

  friend bool operator==(const TruncatedPoly& a, const TruncatedPoly& b) {
    return a.p_ == b.p_ && a.degree_ == b.degree_ && a.terms_ == b.terms_;
  }

 private:
  std::uint32_t p_, rank_, degree_;
  std::map<Monomial, std::uint32_t> terms_;  // nonzero coefficients only
};

/// Reference product.
TruncatedPoly multiply_serial(const TruncatedPoly& a, const TruncatedPoly& b);
/// Same product, OpenMP over the terms of a.
TruncatedPoly multiply(const TruncatedPoly& a, const TruncatedPoly& b);

/// x_gen^exponent with exponent +-1.
struct FreeLetter {
  std::uint32_t gen;
  int exponent;
  friend bool operator==(const FreeLetter&, const FreeLetter&) = default;
};

using FreeWord = std::vector<FreeLetter>;

FreeWord free_reduce(const FreeWord& w);
FreeWord free_inverse(const FreeWord& w);

/// Image of 1 + X_i (exponent 1) or its truncated inverse.
TruncatedPoly magnus_letter(std::uint32_t p, std::uint32_t rank, std::uint32_t degree, FreeLetter x);
TruncatedPoly magnus_image(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t degree);
TruncatedPoly magnus_image_serial(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t degree);

struct MagnusWitness {
  std::uint32_t degree;
  Monomial monomial;        // shortest, then lexicographically first
  std::uint32_t coefficient;
};

/// Witness read off an image: first nonconstant term of minimal length.
std::optional<MagnusWitness> magnus_witness(const TruncatedPoly& image);

/// Iterative deepening d = 1, 2, ... up to max_degree. Throws InputError on a
/// word that reduces to the identity and BudgetExceeded at the cap.
MagnusWitness separate_free(const FreeWord& w, std::uint32_t p, std::uint32_t rank, std::uint32_t max_degree = 64);

}  // namespace rpf

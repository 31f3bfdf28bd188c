#pragma once

#include <compare>
#include <cstdint>

namespace rpf {

bool is_prime(std::uint32_t n);

/// An element of F_p, always kept in [0, p).
struct FpScalar {
  std::uint32_t value = 0;

  friend auto operator<=>(const FpScalar&, const FpScalar&) = default;
};

/// Arithmetic in the prime field F_p.
class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p);

  std::uint32_t prime() const { return p_; }

  FpScalar make(std::int64_t v) const;
  FpScalar add(FpScalar a, FpScalar b) const { return {(a.value + b.value) % p_}; }
  FpScalar sub(FpScalar a, FpScalar b) const { return {(a.value + p_ - b.value) % p_}; }
  FpScalar neg(FpScalar a) const { return {(p_ - a.value) % p_}; }
  FpScalar mul(FpScalar a, FpScalar b) const {
    return {static_cast<std::uint32_t>(std::uint64_t{a.value} * b.value % p_)};
  }
  FpScalar pow(FpScalar a, std::uint64_t e) const;
  /// Multiplicative inverse; throws InternalError on zero.
  FpScalar inv(FpScalar a) const;
  FpScalar div(FpScalar a, FpScalar b) const { return mul(a, inv(b)); }

 private:
  std::uint32_t p_;
};

}  // namespace rpf

#ifndef FBE_POSITION_HPP
#define FBE_POSITION_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "fbe/numeric.hpp"

namespace fbe {

using BigInt = mpz_class;

/// An index into a virtual array of up to d^n entries.
///
/// Backed by an MPFR float whose precision is chosen per spectrum: when the
/// precision covers twice the bit length of d^n every operation used here
/// (sums, products with d^m, floor/ceil division by d^m, residues) is exact.
/// Past that, positions carry a relative error of 2^-prec. Every mass derived
/// from a position range is bounded by (range end) x (probability at the
/// range), which is at most 1 for a descending distribution, so the
/// resulting mass error stays below 2^-prec per segment.
class Position {
 public:
  static constexpr mpfr_prec_t kMaxBits = 1024;

  explicit Position(mpfr_prec_t bits = 64);
  Position(unsigned long value, mpfr_prec_t bits);
  Position(const BigInt& value, mpfr_prec_t bits);
  Position(const Position& other);
  Position(Position&& other) noexcept;
  Position& operator=(const Position& other);
  Position& operator=(Position&& other) noexcept;
  ~Position();

  /// d^k at the given precision.
  static Position power(unsigned long d, unsigned long k, mpfr_prec_t bits);

  /// Precision that keeps all positions of a d^n-sized array exact, capped
  /// at kMaxBits.
  static mpfr_prec_t bits_for(unsigned long d, unsigned long n);

  mpfr_prec_t bits() const { return mpfr_get_prec(value_); }

  friend Position operator+(const Position& a, const Position& b);
  friend Position operator-(const Position& a, const Position& b);
  friend Position operator*(const Position& a, const Position& b);
  Position& operator+=(const Position& other);
  Position& operator-=(const Position& other);

  Position plus(unsigned long k) const;
  Position minus(unsigned long k) const;

  /// floor(this / g) and ceil(this / g) for g > 0.
  Position floor_div(const Position& g) const;
  Position ceil_div(const Position& g) const;
  /// this - g * floor(this / g).
  Position mod(const Position& g) const;

  /// max(this - other, 0).
  Position clamped_difference(const Position& other) const;

  friend bool operator==(const Position& a, const Position& b);
  friend std::partial_ordering operator<=>(const Position& a, const Position& b);

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_positive() const { return mpfr_sgn(value_) > 0; }

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  std::string to_string(int digits = 20) const;

  /// Natural logarithm, -inf for zero.
  template <class Scalar>
  Scalar log() const;

  /// Value as Scalar (may overflow to inf for huge positions).
  template <class Scalar>
  Scalar as() const;

  /// Exact integer value; only meaningful while the precision is exact.
  BigInt to_bigint() const;

  const mpfr_t& raw() const { return value_; }

 private:
  mpfr_t value_;
};

inline Position min(const Position& a, const Position& b) { return b < a ? b : a; }
inline Position max(const Position& a, const Position& b) { return a < b ? b : a; }

}  // namespace fbe

#endif  // FBE_POSITION_HPP

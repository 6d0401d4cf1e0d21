#include "fbe/position.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace fbe {

namespace {

// Mantissa of x as (hi + lo) in [0.5, 1) with x = (hi + lo) * 2^exponent.
struct SplitMantissa {
  double hi = 0.0;
  double lo = 0.0;
  long exponent = 0;
};

SplitMantissa split(const mpfr_t x) {
  SplitMantissa s;
  s.hi = mpfr_get_d_2exp(&s.exponent, x, MPFR_RNDN);
  mpfr_t rest;
  mpfr_init2(rest, mpfr_get_prec(x));
  mpfr_set_d(rest, s.hi, MPFR_RNDN);
  mpfr_mul_2si(rest, rest, s.exponent, MPFR_RNDN);
  mpfr_sub(rest, x, rest, MPFR_RNDN);
  mpfr_mul_2si(rest, rest, -s.exponent, MPFR_RNDN);
  s.lo = mpfr_get_d(rest, MPFR_RNDN);
  mpfr_clear(rest);
  return s;
}

}  // namespace

Position::Position(mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

Position::Position(unsigned long value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_ui(value_, value, MPFR_RNDN);
}

Position::Position(const BigInt& value, mpfr_prec_t bits) {
  mpfr_init2(value_, bits);
  mpfr_set_z(value_, value.get_mpz_t(), MPFR_RNDN);
}

Position::Position(const Position& other) {
  mpfr_init2(value_, other.bits());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Position::Position(Position&& other) noexcept {
  mpfr_init2(value_, other.bits());
  mpfr_swap(value_, other.value_);
}

Position& Position::operator=(const Position& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.bits());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

Position& Position::operator=(Position&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

Position::~Position() { mpfr_clear(value_); }

Position Position::power(unsigned long d, unsigned long k, mpfr_prec_t bits) {
  Position out(bits);
  mpfr_ui_pow_ui(out.value_, d, k, MPFR_RNDN);
  return out;
}

mpfr_prec_t Position::bits_for(unsigned long d, unsigned long n) {
  const double bits = std::ceil(static_cast<double>(n) * std::log2(static_cast<double>(d))) + 1.0;
  const double wanted = 2.0 * bits + 64.0;
  return static_cast<mpfr_prec_t>(std::min<double>(wanted, static_cast<double>(kMaxBits)));
}

Position operator+(const Position& a, const Position& b) {
  Position out(std::max(a.bits(), b.bits()));
  mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Position operator-(const Position& a, const Position& b) {
  Position out(std::max(a.bits(), b.bits()));
  mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Position operator*(const Position& a, const Position& b) {
  Position out(std::max(a.bits(), b.bits()));
  mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
  return out;
}

Position& Position::operator+=(const Position& other) {
  mpfr_add(value_, value_, other.value_, MPFR_RNDN);
  return *this;
}

Position& Position::operator-=(const Position& other) {
  mpfr_sub(value_, value_, other.value_, MPFR_RNDN);
  return *this;
}

Position Position::plus(unsigned long k) const {
  Position out(bits());
  mpfr_add_ui(out.value_, value_, k, MPFR_RNDN);
  return out;
}

Position Position::minus(unsigned long k) const {
  Position out(bits());
  mpfr_sub_ui(out.value_, value_, k, MPFR_RNDN);
  return out;
}

Position Position::floor_div(const Position& g) const {
  Position out(std::max(bits(), g.bits()));
  mpfr_div(out.value_, value_, g.value_, MPFR_RNDD);
  mpfr_floor(out.value_, out.value_);
  return out;
}

Position Position::ceil_div(const Position& g) const {
  Position out(std::max(bits(), g.bits()));
  mpfr_div(out.value_, value_, g.value_, MPFR_RNDU);
  mpfr_ceil(out.value_, out.value_);
  return out;
}

Position Position::mod(const Position& g) const {
  Position r = *this - floor_div(g) * g;
  if (mpfr_sgn(r.value_) < 0) mpfr_set_zero(r.value_, 1);
  return r;
}

Position Position::clamped_difference(const Position& other) const {
  Position out = *this - other;
  if (mpfr_sgn(out.value_) < 0) mpfr_set_zero(out.value_, 1);
  return out;
}

bool operator==(const Position& a, const Position& b) {
  return mpfr_equal_p(a.value_, b.value_) != 0;
}

std::partial_ordering operator<=>(const Position& a, const Position& b) {
  if (mpfr_less_p(a.value_, b.value_)) return std::partial_ordering::less;
  if (mpfr_greater_p(a.value_, b.value_)) return std::partial_ordering::greater;
  if (mpfr_equal_p(a.value_, b.value_)) return std::partial_ordering::equivalent;
  return std::partial_ordering::unordered;
}

std::string Position::to_string(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg", digits, value_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

template <>
double Position::log<double>() const {
  if (mpfr_zero_p(value_)) return -std::numeric_limits<double>::infinity();
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, value_, MPFR_RNDN);
  return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

template <>
Extended Position::log<Extended>() const {
  if (mpfr_zero_p(value_)) return -infinity<Extended>();
  const SplitMantissa s = split(value_);
  static const Extended kLog2 = boost::multiprecision::log(Extended(2));
  return boost::multiprecision::log(Extended(s.hi) + Extended(s.lo)) +
         Extended(s.exponent) * kLog2;
}

template <>
double Position::as<double>() const {
  return mpfr_get_d(value_, MPFR_RNDN);
}

template <>
Extended Position::as<Extended>() const {
  if (mpfr_zero_p(value_)) return Extended(0);
  const SplitMantissa s = split(value_);
  return boost::multiprecision::ldexp(Extended(s.hi) + Extended(s.lo),
                                      static_cast<int>(s.exponent));
}

BigInt Position::to_bigint() const {
  BigInt out;
  mpfr_get_z(out.get_mpz_t(), value_, MPFR_RNDN);
  return out;
}

std::string_view to_string(Precision p) {
  return p == Precision::Double ? "double" : "extended";
}

}  // namespace fbe

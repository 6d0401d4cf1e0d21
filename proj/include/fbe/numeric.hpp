#ifndef FBE_NUMERIC_HPP
#define FBE_NUMERIC_HPP

#include <cmath>
#include <limits>
#include <span>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/float128.hpp>

namespace fbe {

/// 113-bit binary floating point. All numeric kernels are templated on the
/// scalar type and instantiated for `double` and `Extended`.
using Extended = boost::multiprecision::float128;

enum class Precision { Double, Extended };

std::string_view to_string(Precision p);

/// Scalar-generic elementary functions: std:: for double, ADL for Extended.
namespace sx {
#define FBE_SX_UNARY(name)                        \
  template <class Scalar>                         \
  inline Scalar name(const Scalar& x) {           \
    using std::name;                              \
    using boost::multiprecision::name;            \
    return name(x);                               \
  }
FBE_SX_UNARY(exp)
FBE_SX_UNARY(log)
FBE_SX_UNARY(log1p)
FBE_SX_UNARY(expm1)
FBE_SX_UNARY(abs)
FBE_SX_UNARY(sqrt)
FBE_SX_UNARY(tanh)
FBE_SX_UNARY(atanh)
FBE_SX_UNARY(cosh)
FBE_SX_UNARY(sinh)
FBE_SX_UNARY(floor)
#undef FBE_SX_UNARY
}  // namespace sx

template <class Scalar>
inline constexpr Precision precision_of =
    std::is_same_v<Scalar, double> ? Precision::Double : Precision::Extended;

template <class Scalar>
inline Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

template <class Scalar>
inline Scalar quiet_nan() {
  return std::numeric_limits<Scalar>::quiet_NaN();
}

template <class Scalar>
inline double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

template <class Scalar>
inline bool is_finite(const Scalar& x) {
  using std::isfinite;
  using boost::multiprecision::isfinite;
  return isfinite(x);
}

/// Neumaier's variant of Kahan summation.
template <class Scalar>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(Scalar init) : sum_(init) {}

  void add(const Scalar& x) {
    using std::abs;
    using boost::multiprecision::abs;
    const Scalar t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(const Scalar& x) {
    add(x);
    return *this;
  }

  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

/// log(e^a + e^b) without overflow; -inf is the additive identity.
template <class Scalar>
inline Scalar log_add_exp(const Scalar& a, const Scalar& b) {
  using std::exp;
  using std::log1p;
  using boost::multiprecision::exp;
  using boost::multiprecision::log1p;
  if (a == -infinity<Scalar>()) return b;
  if (b == -infinity<Scalar>()) return a;
  return a > b ? a + log1p(exp(b - a)) : b + log1p(exp(a - b));
}

/// log(1 - e^x) for x <= 0 (Maechler's split at -log 2).
template <class Scalar>
inline Scalar log1m_exp(const Scalar& x) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  using boost::multiprecision::exp;
  using boost::multiprecision::expm1;
  using boost::multiprecision::log;
  using boost::multiprecision::log1p;
  if (x >= Scalar(0)) return -infinity<Scalar>();
  static const Scalar kLog2 = log(Scalar(2));
  return x > -kLog2 ? log(-expm1(x)) : log1p(-exp(x));
}

template <class Scalar>
Scalar log_sum_exp(std::span<const Scalar> xs) {
  using std::exp;
  using std::log;
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  Scalar top = -infinity<Scalar>();
  for (const auto& x : xs) top = x > top ? x : top;
  if (top == -infinity<Scalar>()) return top;
  CompensatedSum<Scalar> acc;
  for (const auto& x : xs) acc += exp(x - top);
  return top + log(acc.value());
}

/// x log x with the 0 log 0 = 0 convention, given log x.
template <class Scalar>
inline Scalar xlogx_from_log(const Scalar& log_x) {
  using std::exp;
  using boost::multiprecision::exp;
  if (log_x == -infinity<Scalar>()) return Scalar(0);
  return exp(log_x) * log_x;
}

}  // namespace fbe

#endif  // FBE_NUMERIC_HPP

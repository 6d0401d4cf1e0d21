#ifndef FBE_STEP_FUNCTION_HPP
#define FBE_STEP_FUNCTION_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "fbe/numeric.hpp"
#include "fbe/position.hpp"

namespace fbe {

/// A nonnegative function on {0, ..., size-1} that is constant on runs.
/// Values are kept as logarithms; run masses (value x length) are summed
/// into prefix and suffix tables so that range masses cost O(log runs).
template <class Scalar>
class StepFunction {
 public:
  StepFunction() = default;
  /// starts[0] must be 0 and starts strictly increasing below size.
  StepFunction(Position size, std::vector<Position> starts, std::vector<Scalar> log_values);

  const Position& size() const { return bounds_.back(); }
  std::size_t run_count() const { return log_values_.size(); }
  const Position& start(std::size_t r) const { return bounds_[r]; }
  const Position& start_or_size(std::size_t r) const { return bounds_[r]; }
  const Position& end(std::size_t r) const { return bounds_[r + 1]; }
  const Scalar& log_value(std::size_t r) const { return log_values_[r]; }
  const Scalar& log_length(std::size_t r) const { return log_lengths_[r]; }
  Scalar run_mass(std::size_t r) const { return sx::exp(log_values_[r] + log_lengths_[r]); }

  /// Run containing p (0 <= p < size).
  std::size_t run_at(const Position& p) const;
  Scalar log_value_at(const Position& p) const { return log_values_[run_at(p)]; }

  /// Sum of values over [a, b).
  Scalar mass(const Position& a, const Position& b) const;
  Scalar total() const { return prefix_.back(); }
  /// Mass of runs [r0, r1) from whichever table avoids the larger operands.
  Scalar runs_mass(std::size_t r0, std::size_t r1) const;

  /// -sum v log v over all points.
  Scalar entropy() const;

 private:
  std::vector<Position> bounds_{Position()};  // run starts, then size
  std::vector<Scalar> log_values_;
  std::vector<Scalar> log_lengths_;
  std::vector<Scalar> prefix_{Scalar(0)};
  std::vector<Scalar> suffix_{Scalar(0)};
};

/// g(k) = sum_{l < width} f(k width + l) on {0, ..., size/width - 1}.
template <class Scalar>
StepFunction<Scalar> group_sums(const StepFunction<Scalar>& f, const Position& width);

/// g(l) = sum_k f(k modulus + l) on {0, ..., modulus - 1}; f nonincreasing.
template <class Scalar>
StepFunction<Scalar> residue_sums(const StepFunction<Scalar>& f, const Position& modulus);

/// sum_{p in [s, e)} row(floor(p / width)) col(p mod width).
template <class Scalar>
Scalar product_range_mass(const StepFunction<Scalar>& row, const StepFunction<Scalar>& col,
                          const Position& width, const Position& s, const Position& e);

/// Piecewise constant plain values on {0, ..., size-1}; starts[0] = 0.
template <class Scalar>
struct Breakpoints {
  std::vector<Position> starts;
  std::vector<Scalar> values;
};

/// sum_p f(p) integrand(log f(p), g(p)), walking the common refinement.
template <class Scalar, class Integrand>
Scalar overlap_sum(const StepFunction<Scalar>& f, const Breakpoints<Scalar>& g,
                   Integrand&& integrand) {
  CompensatedSum<Scalar> acc;
  std::size_t j = 0;
  const std::size_t gj = g.starts.size();
  for (std::size_t r = 0; r < f.run_count(); ++r) {
    const Position& lo = f.start(r);
    const Position& hi = f.end(r);
    while (j + 1 < gj && !(lo < g.starts[j + 1])) ++j;
    Position cursor = lo;
    for (std::size_t k = j; k < gj && cursor < hi; ++k) {
      const Position seg_end = (k + 1 < gj) ? min(hi, g.starts[k + 1]) : hi;
      if (cursor < seg_end) {
        const Scalar log_mass = f.log_value(r) + (seg_end - cursor).template log<Scalar>();
        const Scalar value = integrand(f.log_value(r), g.values[k]);
        if (log_mass != -infinity<Scalar>()) acc += sx::exp(log_mass) * value;
        cursor = seg_end;
      }
    }
  }
  return acc.value();
}

}  // namespace fbe

#endif  // FBE_STEP_FUNCTION_HPP

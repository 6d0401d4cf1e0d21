#include "fbe/step_function.hpp"

#include <algorithm>

#include "fbe/error.hpp"

namespace fbe {

template <class Scalar>
StepFunction<Scalar>::StepFunction(Position size, std::vector<Position> starts,
                                   std::vector<Scalar> log_values)
    : bounds_(std::move(starts)), log_values_(std::move(log_values)) {
  if (bounds_.empty() || bounds_.size() != log_values_.size() || !bounds_.front().is_zero()) {
    throw ValidationError("step function needs matching runs starting at 0");
  }
  bounds_.push_back(std::move(size));
  const std::size_t runs = log_values_.size();
  log_lengths_.resize(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    if (!(bounds_[r] < bounds_[r + 1])) throw ValidationError("step function runs must be nonempty");
    log_lengths_[r] = (bounds_[r + 1] - bounds_[r]).template log<Scalar>();
  }
  prefix_.assign(runs + 1, Scalar(0));
  suffix_.assign(runs + 1, Scalar(0));
  CompensatedSum<Scalar> up;
  for (std::size_t r = 0; r < runs; ++r) {
    up += run_mass(r);
    prefix_[r + 1] = up.value();
  }
  CompensatedSum<Scalar> down;
  for (std::size_t r = runs; r-- > 0;) {
    down += run_mass(r);
    suffix_[r] = down.value();
  }
}

template <class Scalar>
std::size_t StepFunction<Scalar>::run_at(const Position& p) const {
  // Last bound <= p among run starts.
  auto it = std::upper_bound(bounds_.begin(), bounds_.end() - 1, p,
                             [](const Position& x, const Position& b) { return x < b; });
  if (it == bounds_.begin()) throw ValidationError("index below step function domain");
  const std::size_t r = static_cast<std::size_t>(it - bounds_.begin()) - 1;
  // p == size is accepted since size - 1 may round up to size.
  if (bounds_.back() < p) throw ValidationError("index beyond step function domain");
  return r;
}

template <class Scalar>
Scalar StepFunction<Scalar>::runs_mass(std::size_t r0, std::size_t r1) const {
  if (r1 <= r0) return Scalar(0);
  if (prefix_[r1] <= suffix_[r0]) return prefix_[r1] - prefix_[r0];
  return suffix_[r0] - suffix_[r1];
}

template <class Scalar>
Scalar StepFunction<Scalar>::mass(const Position& lo, const Position& hi) const {
  // Clipped to the domain, which absorbs rounding at capped precision.
  const Position a = max(lo, bounds_.front());
  const Position b = min(hi, bounds_.back());
  if (!(a < b)) return Scalar(0);
  const std::size_t ra = run_at(a);
  // Run holding the last index below b: the last start < b (b - 1 may round to b).
  const auto it = std::lower_bound(bounds_.begin(), bounds_.end() - 1, b,
                                   [](const Position& x, const Position& v) { return x < v; });
  const std::size_t rb = static_cast<std::size_t>(it - bounds_.begin()) - 1;
  if (ra == rb) return sx::exp(log_values_[ra] + (b - a).template log<Scalar>());
  const Scalar head = sx::exp(log_values_[ra] + (bounds_[ra + 1] - a).template log<Scalar>());
  const Scalar tail = sx::exp(log_values_[rb] + (b - bounds_[rb]).template log<Scalar>());
  return head + runs_mass(ra + 1, rb) + tail;
}

template <class Scalar>
Scalar StepFunction<Scalar>::entropy() const {
  CompensatedSum<Scalar> acc;
  for (std::size_t r = 0; r < run_count(); ++r) {
    if (log_values_[r] == -infinity<Scalar>()) continue;
    acc += -run_mass(r) * log_values_[r];
  }
  return acc.value();
}

template <class Scalar>
StepFunction<Scalar> group_sums(const StepFunction<Scalar>& f, const Position& width) {
  const Position out_size = f.size().floor_div(width);
  const Scalar log_width = width.template log<Scalar>();
  std::vector<Position> starts;
  std::vector<Scalar> values;
  Scalar partial = -infinity<Scalar>();
  for (std::size_t r = 0; r < f.run_count(); ++r) {
    const Position& e = f.end(r);
    const Scalar lv = f.log_value(r);
    Position p = f.start(r);
    while (p < e) {
      const Position k = p.floor_div(width);
      const Position group_start = k * width;
      const Position group_end = group_start + width;
      if (p == group_start && !(e < group_end)) {
        starts.push_back(k);
        values.push_back(lv + log_width);
        p = e.floor_div(width) * width;
      } else {
        const Position stop = min(e, group_end);
        partial = log_add_exp(partial, lv + (stop - p).template log<Scalar>());
        p = stop;
        if (p == group_end) {
          starts.push_back(k);
          values.push_back(partial);
          partial = -infinity<Scalar>();
        }
      }
    }
  }
  return StepFunction<Scalar>(out_size, std::move(starts), std::move(values));
}

template <class Scalar>
StepFunction<Scalar> residue_sums(const StepFunction<Scalar>& f, const Position& modulus) {
  // With run values v_b on [c_b, c_{b+1}) and v_R = 0,
  //   f = sum_b (v_b - v_{b+1}) [p < c_{b+1}],
  // and #{k : k M + l < c} = q + [l < r] for c = q M + r. Every term is
  // nonnegative because f is nonincreasing.
  const std::size_t runs = f.run_count();
  // Per-state values can underflow, so everything stays in log space.
  struct Jump {
    Position residue;
    Scalar log_delta;
  };
  std::vector<Jump> jumps;
  Scalar log_base = -infinity<Scalar>();
  for (std::size_t b = 0; b < runs; ++b) {
    const Scalar lv = f.log_value(b);
    const Scalar next = b + 1 < runs ? f.log_value(b + 1) : -infinity<Scalar>();
    if (next > lv) throw ValidationError("residue sums need a nonincreasing function");
    if (lv == -infinity<Scalar>()) continue;
    const Scalar log_delta = next == -infinity<Scalar>() ? lv : lv + log1m_exp(next - lv);
    if (log_delta == -infinity<Scalar>()) continue;
    const Position& c = f.end(b);
    const Position q = c.floor_div(modulus);
    Position r = c - q * modulus;
    if (q.is_positive()) log_base = log_add_exp(log_base, log_delta + q.template log<Scalar>());
    if (r.is_positive()) jumps.push_back({std::move(r), log_delta});
  }
  std::sort(jumps.begin(), jumps.end(),
            [](const Jump& a, const Jump& b) { return a.residue < b.residue; });
  // value on [r_(i-1), r_(i)) is base + sum of deltas with residue >= r_(i)
  std::vector<Scalar> above(jumps.size() + 1, -infinity<Scalar>());
  for (std::size_t i = jumps.size(); i-- > 0;) above[i] = log_add_exp(above[i + 1], jumps[i].log_delta);
  std::vector<Position> starts;
  std::vector<Scalar> values;
  Position cursor(modulus.bits());
  std::size_t i = 0;
  while (i <= jumps.size()) {
    const Position stop = i < jumps.size() ? jumps[i].residue : modulus;
    if (cursor < stop) {
      starts.push_back(cursor);
      values.push_back(log_add_exp(log_base, above[i]));
      cursor = stop;
    }
    ++i;
  }
  return StepFunction<Scalar>(modulus, std::move(starts), std::move(values));
}

template <class Scalar>
Scalar product_range_mass(const StepFunction<Scalar>& row, const StepFunction<Scalar>& col,
                          const Position& width, const Position& s, const Position& e) {
  if (!(s < e)) return Scalar(0);
  // Rounded positions may land just outside their ranges; clamp them back.
  const Position zero(0UL, width.bits());
  const Position last_row = row.size().minus(1);
  const Position t0 = min(s.floor_div(width), last_row);
  const Position t1 = max(min(e.minus(1).floor_div(width), last_row), t0);
  const Position k0 = min(max(s - t0 * width, zero), width.minus(1));
  const Position k1 = max(min(e - t1 * width, width), zero.plus(1));
  // Row values can underflow on their own; combine with the column mass in logs.
  auto part = [&](const Position& t, const Position& a, const Position& b) {
    const Scalar m = col.mass(a, b);
    if (!(m > Scalar(0))) return Scalar(0);
    return sx::exp(row.log_value_at(t) + sx::log(m));
  };
  if (t0 == t1) return part(t0, k0, k1);
  const Scalar middle = row.mass(t0.plus(1), t1) * col.total();
  return part(t0, k0, width) + middle + part(t1, zero, k1);
}

#define FBE_INSTANTIATE(S)                                                                    \
  template class StepFunction<S>;                                                             \
  template StepFunction<S> group_sums(const StepFunction<S>&, const Position&);               \
  template StepFunction<S> residue_sums(const StepFunction<S>&, const Position&);             \
  template S product_range_mass(const StepFunction<S>&, const StepFunction<S>&, const Position&, \
                                const Position&, const Position&);
FBE_INSTANTIATE(double)
FBE_INSTANTIATE(Extended)
#undef FBE_INSTANTIATE

}  // namespace fbe

#include "fbe/lift.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "expanded.hpp"
#include "fbe/error.hpp"
#include "protocol_common.hpp"

namespace fbe {

namespace {

constexpr double kPruneMass = 1e-40;

// (value, mass) pairs merged by value within a tolerance.
template <class Scalar>
class Histogram {
 public:
  explicit Histogram(double tol) : tol_(tol) {}

  void add(double value, const Scalar& mass) {
    if (mass > Scalar(0)) entries_.emplace_back(value, mass);
  }

  void compact() {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<double, Scalar>> merged;
    for (const auto& e : entries_) {
      if (!merged.empty() && e.first - merged.back().first <= tol_) {
        merged.back().second += e.second;
      } else {
        merged.push_back(e);
      }
    }
    entries_ = std::move(merged);
  }

  Scalar prune(double threshold) {
    Scalar dropped(0);
    std::vector<std::pair<double, Scalar>> kept;
    for (const auto& e : entries_) {
      if (e.second < Scalar(threshold)) {
        dropped += e.second;
      } else {
        kept.push_back(e);
      }
    }
    entries_ = std::move(kept);
    return dropped;
  }

  /// Adds every pairwise sum of this and other, weighted by the product of masses.
  void convolve_into(const Histogram& other, Histogram& out) const {
    for (const auto& a : entries_) {
      for (const auto& b : other.entries_) out.add(a.first + b.first, a.second * b.second);
    }
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<double, Scalar>>& entries() const { return entries_; }

 private:
  double tol_;
  std::vector<std::pair<double, Scalar>> entries_;
};

template <class Scalar>
WorkDistribution summarize(Histogram<Scalar>& hist, bool exact, Scalar pruned) {
  hist.compact();
  CompensatedSum<Scalar> total;
  for (const auto& e : hist.entries()) total += e.second;
  const Scalar norm = total.value();
  WorkDistribution out;
  out.exact = exact;
  out.mass_deficit = to_double(Scalar(1) - norm - pruned);
  out.pruned_mass = to_double(pruned);
  CompensatedSum<Scalar> mean, entropy;
  for (const auto& [value, mass] : hist.entries()) {
    const Scalar p = mass / norm;
    out.support.push_back(value);
    out.probs.push_back(to_double(p));
    mean += p * Scalar(value);
    if (p > Scalar(0)) entropy += -p * sx::log(p);
  }
  out.mean = to_double(mean.value());
  out.entropy = to_double(entropy.value());
  return out;
}

template <class Scalar>
double value_tolerance(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold) {
  const double scale = std::max({1.0, hot.bath().site.max_abs_level(), cold.bath().site.max_abs_level()});
  return 1e-9 * scale;
}

template <class Scalar>
WorkDistribution exact_distribution(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold,
                                    unsigned m) {
  const detail::Expanded<Scalar> x(hot);
  const detail::Expanded<Scalar> y(cold);
  const std::uint64_t size = x.size();
  const std::uint64_t g = detail::ipow(static_cast<std::uint64_t>(hot.d()), m);
  const std::uint64_t w = size / g;
  const double tol = value_tolerance(hot, cold);
  Histogram<Scalar> total(tol);
  // Given the low hot digit l and the top cold digit t, the hot part depends
  // only on k and the cold part only on r, so the two parts are independent.
  for (std::uint64_t l = 0; l < g; ++l) {
    for (std::uint64_t t = 0; t < g; ++t) {
      Histogram<Scalar> hx(tol), hy(tol);
      for (std::uint64_t k = 0; k < w; ++k) {
        const std::uint64_t i = k * g + l;
        hx.add(to_double(x.energy(i) - x.energy(t * w + k)), x.prob(i));
      }
      for (std::uint64_t r = 0; r < w; ++r) {
        const std::uint64_t j = t * w + r;
        hy.add(to_double(y.energy(j) - y.energy(r * g + l)), y.prob(j));
      }
      hx.compact();
      hy.compact();
      hx.convolve_into(hy, total);
    }
    total.compact();
  }
  return summarize(total, true, Scalar(0));
}

template <class Scalar>
WorkDistribution blockwise_distribution(const SortedSpectrum<Scalar>& hot,
                                        const SortedSpectrum<Scalar>& cold, unsigned m) {
  const Position g = detail::group_size(hot, m);
  const Position w = detail::width(hot, m);
  const Scalar log_g = g.template log<Scalar>();
  const double tol = value_tolerance(hot, cold);

  // Hot part: index i moves to floor(i / G); pairs (block of i, block of floor(i / G)).
  Histogram<Scalar> hx(tol);
  {
    std::size_t a = 0;
    for (std::size_t b = 0; b < hot.block_count(); ++b) {
      const Position& lo = hot.start(b);
      const Position& hi = hot.start(b + 1);
      while (a + 1 < hot.block_count() && !(lo < hot.start(a + 1) * g)) ++a;
      for (std::size_t k = a; k < hot.block_count(); ++k) {
        const Position seg_lo = max(lo, hot.start(k) * g);
        const Position seg_hi = min(hi, hot.start(k + 1) * g);
        if (!(seg_lo < seg_hi)) break;
        const Scalar mass = sx::exp(hot.block(b).log_prob + (seg_hi - seg_lo).template log<Scalar>());
        hx.add(to_double(hot.block(b).energy - hot.block(k).energy), mass);
      }
    }
  }
  // Cold part: index j < W moves to j G + l with l uniform; pairs (block of j,
  // block of the stretched index), indices past d^n taking the last block.
  Histogram<Scalar> hy(tol);
  {
    const std::size_t last = cold.block_count() - 1;
    std::size_t a = 0;
    for (std::size_t b = 0; b < cold.block_count() && cold.start(b) < w; ++b) {
      const Position lo = cold.start(b) * g;
      const Position hi = min(cold.start(b + 1), w) * g;
      while (a < last && !(lo < cold.start(a + 1))) ++a;
      for (std::size_t k = a; k <= last; ++k) {
        const Position seg_lo = max(lo, cold.start(k));
        const Position seg_hi = k == last ? hi : min(hi, cold.start(k + 1));
        if (!(seg_lo < seg_hi)) break;
        const Scalar mass = sx::exp(cold.block(b).log_prob - log_g +
                                    (seg_hi - seg_lo).template log<Scalar>());
        hy.add(to_double(cold.block(b).energy - cold.block(k).energy), mass);
      }
    }
  }
  hx.compact();
  hy.compact();
  Scalar pruned = hx.prune(kPruneMass) + hy.prune(kPruneMass);
  Histogram<Scalar> total(tol);
  hx.convolve_into(hy, total);
  return summarize(total, false, pruned);
}

}  // namespace

template <class Scalar>
WorkDistribution work_distribution(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold,
                                   unsigned m, Mode mode) {
  if (m >= hot.n()) throw ValidationError("swap size m must be below n");
  if (m == 0) {
    WorkDistribution out;
    out.support = {0.0};
    out.probs = {1.0};
    return out;
  }
  return mode == Mode::Exact ? exact_distribution(hot, cold, m) : blockwise_distribution(hot, cold, m);
}

namespace {

template <class Scalar>
WorkDistribution run_with(const ProtocolConfig& config) {
  const unsigned m = resolve_m(config);
  const auto hot = build_sorted_spectrum<Scalar>(config.engine.hot);
  const auto cold = build_sorted_spectrum<Scalar>(config.engine.cold);
  return work_distribution(hot, cold, m, resolve_mode(config));
}

}  // namespace

WorkDistribution work_distribution(const ProtocolConfig& config) {
  return resolve_precision(config) == Precision::Extended ? run_with<Extended>(config)
                                                          : run_with<double>(config);
}

double storage_entropy_cap(unsigned n, int d) { return 4.0 * (d - 1) * std::log(n + 1.0); }

LiftReport lift_report(const ProtocolOutcome& outcome, const WorkDistribution& wd,
                       const ProtocolConfig& config) {
  if (outcome.heat_hot == 0.0) throw ValidationError("entropy-energy ratios need Q_H != 0");
  LiftReport r;
  r.s_storage = wd.entropy;
  r.storage_cap = storage_entropy_cap(outcome.n, outcome.d);
  r.a_hot = outcome.delta_s_hot / (-outcome.heat_hot);
  r.a_cold = outcome.delta_s_cold / outcome.heat_cold_released;
  r.a_storage = wd.entropy / outcome.work;
  r.conservation_residual = std::abs(wd.mean - outcome.work);
  const auto& e = config.engine;
  const double energy_scale =
      outcome.n * (e.hot.site.max_level() - e.hot.site.min_level() + e.cold.site.max_level() -
                   e.cold.site.min_level());
  if (wd.exact) {
    r.conservation_tolerance = 1e-10 * std::max(1.0, std::abs(outcome.work));
  } else {
    r.conservation_tolerance = 2.0 * outcome.l1_bound.total * energy_scale + 1e-10;
  }
  r.conservation_ok = r.conservation_residual <= r.conservation_tolerance;
  r.unital_ok = outcome.n <= 8 ? swap_is_permutation(outcome.n, outcome.d, outcome.m) : true;
  return r;
}

bool swap_is_permutation(unsigned n, int d, unsigned m) {
  const std::uint64_t size = detail::ipow(static_cast<std::uint64_t>(d), n);
  if (size > 4096) throw ResourceError("permutation check is limited to d^n <= 4096");
  std::vector<bool> hit(size * size, false);
  for (std::uint64_t i = 0; i < size; ++i) {
    for (std::uint64_t j = 0; j < size; ++j) {
      const auto [a, b] = g2_swap(BigInt(static_cast<unsigned long>(i)),
                                  BigInt(static_cast<unsigned long>(j)), m, n, d);
      const std::uint64_t key = a.get_ui() * size + b.get_ui();
      if (hit[key]) return false;
      hit[key] = true;
    }
  }
  return true;
}

template WorkDistribution work_distribution(const SortedSpectrum<double>&, const SortedSpectrum<double>&,
                                            unsigned, Mode);
template WorkDistribution work_distribution(const SortedSpectrum<Extended>&,
                                            const SortedSpectrum<Extended>&, unsigned, Mode);

}  // namespace fbe

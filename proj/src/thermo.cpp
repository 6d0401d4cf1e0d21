#include "fbe/thermo.hpp"

#include <cmath>

#include "fbe/error.hpp"

namespace fbe {

namespace {

constexpr int kMaxIterations = 400;
constexpr double kBetaMax = 1e6;

// Bisection on a decreasing function until the bracket stops shrinking.
template <class Scalar, class F>
Scalar bisect_decreasing(F&& f, Scalar lo, Scalar hi, const Scalar& target) {
  for (int it = 0; it < kMaxIterations; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (!(mid > lo && mid < hi)) return mid;
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw NumericalError("root bracketing did not converge");
}

}  // namespace

EngineConfig::EngineConfig(BathSpec hot_bath, BathSpec cold_bath, double q)
    : hot(std::move(hot_bath)), cold(std::move(cold_bath)), q_target(q) {
  if (hot.n != cold.n) throw ValidationError("both baths must have the same particle count");
  if (hot.beta > cold.beta) throw ValidationError("beta_hot must not exceed beta_cold");
  if (!std::isfinite(q) || q < 0.0) throw ValidationError("heat must be finite and >= 0");
  if (q >= capacity(hot)) throw ValidationError("heat exceeds bath capacity");
}

double capacity(const BathSpec& hot) {
  return hot.n * (mean_energy<double>(hot.site, hot.beta) - hot.site.min_level());
}

template <class Scalar>
Scalar solve_beta_prime_hot(const BathSpec& hot, Scalar q) {
  if (!(q >= Scalar(0))) throw ValidationError("heat must be >= 0");
  if (q == Scalar(0)) return Scalar(hot.beta);
  const Scalar n(hot.n);
  const Scalar cap = n * (mean_energy<Scalar>(hot.site, Scalar(hot.beta)) - Scalar(hot.site.min_level()));
  if (!(q < cap)) throw ValidationError("heat exceeds bath capacity");
  const Scalar target = mean_energy<Scalar>(hot.site, Scalar(hot.beta)) - q / n;
  auto energy = [&](const Scalar& b) { return mean_energy<Scalar>(hot.site, b); };
  const Scalar lo(hot.beta);
  Scalar hi = lo * Scalar(2) + Scalar(1);
  while (energy(hi) > target) {
    if (hi > Scalar(kBetaMax)) throw NumericalError("heat exceeds bath capacity");
    hi *= Scalar(2);
  }
  return bisect_decreasing(energy, lo, hi, target);
}

template <class Scalar>
Scalar solve_beta_prime_cold(const BathSpec& hot, const BathSpec& cold, Scalar beta_prime_hot) {
  const Scalar target = site_entropy<Scalar>(hot.site, Scalar(hot.beta)) +
                        site_entropy<Scalar>(cold.site, Scalar(cold.beta)) -
                        site_entropy<Scalar>(hot.site, beta_prime_hot);
  const Scalar s_max = site_entropy<Scalar>(cold.site, Scalar(0));
  if (!(target < s_max)) throw NumericalError("required cold-bath entropy is infeasible");
  const Scalar hi(cold.beta);
  if (!(target > site_entropy<Scalar>(cold.site, hi))) return hi;
  auto entropy = [&](const Scalar& b) { return site_entropy<Scalar>(cold.site, b); };
  return bisect_decreasing(entropy, Scalar(0), hi, target);
}

template <class Scalar>
Scalar gibbs_rel_entropy(const SiteSpectrum& site, Scalar beta_from, Scalar beta_to, unsigned n) {
  if (beta_from < Scalar(0) || beta_to < Scalar(0)) throw ValidationError("inverse temperature must be >= 0");
  if (beta_from == beta_to) return Scalar(0);
  // D = beta_to <h>_from + log Z_to - S_from, S_from = beta_from <h>_from + log Z_from
  const Scalar e = mean_energy<Scalar>(site, beta_from);
  const Scalar per_site = (beta_to - beta_from) * e + log_partition<Scalar>(site, beta_to) -
                          log_partition<Scalar>(site, beta_from);
  return Scalar(n) * (per_site > Scalar(0) ? per_site : Scalar(0));
}

template <class Scalar>
ThermoSolution<Scalar> eta_thermo(const EngineConfig& config) {
  if (!(config.q_target > 0.0)) throw ValidationError("heat must be > 0");
  if (!(config.hot.beta < config.cold.beta)) throw ValidationError("beta_hot must be below beta_cold");
  const Scalar q(config.q_target);
  const Scalar n(config.n());
  ThermoSolution<Scalar> sol{};
  sol.beta_prime_hot = solve_beta_prime_hot<Scalar>(config.hot, q);
  sol.beta_prime_cold = solve_beta_prime_cold<Scalar>(config.hot, config.cold, sol.beta_prime_hot);
  const Scalar bh(config.hot.beta);
  const Scalar bl(config.cold.beta);
  const Scalar e_cold = mean_energy<Scalar>(config.cold.site, bl);
  const Scalar e_cold_new = mean_energy<Scalar>(config.cold.site, sol.beta_prime_cold);
  sol.eta_thermo = Scalar(1) - n * (e_cold_new - e_cold) / q;
  sol.rel_entropy_total =
      gibbs_rel_entropy<Scalar>(config.hot.site, sol.beta_prime_hot, bh, config.n()) +
      gibbs_rel_entropy<Scalar>(config.cold.site, sol.beta_prime_cold, bl, config.n());
  sol.residual_energy = sx::abs(mean_energy<Scalar>(config.hot.site, sol.beta_prime_hot) -
                                mean_energy<Scalar>(config.hot.site, bh) + q / n);
  sol.residual_entropy = sx::abs(site_entropy<Scalar>(config.hot.site, sol.beta_prime_hot) +
                                 site_entropy<Scalar>(config.cold.site, sol.beta_prime_cold) -
                                 site_entropy<Scalar>(config.hot.site, bh) -
                                 site_entropy<Scalar>(config.cold.site, bl));
  return sol;
}

template <class Scalar>
Scalar eta_thermo_via_relent(const EngineConfig& config) {
  const auto sol = eta_thermo<Scalar>(config);
  const Scalar bh(config.hot.beta);
  const Scalar bl(config.cold.beta);
  return Scalar(1) - bh / bl - sol.rel_entropy_total / (bl * Scalar(config.q_target));
}

#define FBE_INSTANTIATE(S)                                                                \
  template S solve_beta_prime_hot<S>(const BathSpec&, S);                                \
  template S solve_beta_prime_cold<S>(const BathSpec&, const BathSpec&, S);              \
  template ThermoSolution<S> eta_thermo<S>(const EngineConfig&);                         \
  template S eta_thermo_via_relent<S>(const EngineConfig&);                              \
  template S gibbs_rel_entropy<S>(const SiteSpectrum&, S, S, unsigned);
FBE_INSTANTIATE(double)
FBE_INSTANTIATE(Extended)
#undef FBE_INSTANTIATE

}  // namespace fbe

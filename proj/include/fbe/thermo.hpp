#ifndef FBE_THERMO_HPP
#define FBE_THERMO_HPP

#include "fbe/bath.hpp"
#include "fbe/numeric.hpp"

namespace fbe {

/// Two baths of equal size and the heat drawn from the hot one.
struct EngineConfig {
  BathSpec hot;
  BathSpec cold;
  double q_target = 0.0;

  /// Requires beta_hot <= beta_cold (equality is kept for single
  /// temperature checks), equal n, and 0 <= q_target < capacity(hot).
  EngineConfig(BathSpec hot_bath, BathSpec cold_bath, double q);

  unsigned n() const { return hot.n; }
  double carnot() const { return 1.0 - hot.beta / cold.beta; }
};

/// Largest heat the hot bath can release: n (<h>_beta - min level).
double capacity(const BathSpec& hot);

template <class Scalar>
struct ThermoSolution {
  Scalar beta_prime_hot;
  Scalar beta_prime_cold;
  Scalar eta_thermo;
  Scalar rel_entropy_total;
  Scalar residual_energy;   // |E(beta'_H) - E(beta_H) + q/n| per site
  Scalar residual_entropy;  // entropy balance per site
};

/// The beta'_H at which the per-site mean energy has dropped by q/n.
template <class Scalar = double>
Scalar solve_beta_prime_hot(const BathSpec& hot, Scalar q);

/// The beta'_L restoring the total entropy S(beta_H) + S(beta_L).
template <class Scalar = double>
Scalar solve_beta_prime_cold(const BathSpec& hot, const BathSpec& cold, Scalar beta_prime_hot);

/// Optimal efficiency 1 - n (E_L(beta'_L) - E_L(beta_L)) / Q.
template <class Scalar = double>
ThermoSolution<Scalar> eta_thermo(const EngineConfig& config);

/// Same quantity as 1 - beta_H/beta_L - D / (beta_L Q).
template <class Scalar = double>
Scalar eta_thermo_via_relent(const EngineConfig& config);

/// n D(P_from || P_to) for Gibbs states of one spectrum.
template <class Scalar = double>
Scalar gibbs_rel_entropy(const SiteSpectrum& site, Scalar beta_from, Scalar beta_to, unsigned n);

}  // namespace fbe

#endif  // FBE_THERMO_HPP

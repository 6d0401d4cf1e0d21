#ifndef FBE_ASYMPTOTICS_HPP
#define FBE_ASYMPTOTICS_HPP

#include "fbe/bath.hpp"

namespace fbe {

struct ExpansionCoeffs {
  double c1 = 0.0;  // coefficient of Q/n
  double c2 = 0.0;  // coefficient of Q^2/n^2
  double d1 = 0.0;  // coefficient of Q/n^2
};

enum class LatticeKind { Lattice, NonLattice };

struct LatticeClass {
  LatticeKind kind = LatticeKind::NonLattice;
  double span = 0.0;          // meaningful for lattice spectra
  bool near_boundary = false;  // some ratio was integral only to a loose tolerance
};

double coeff_c1(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold);
/// c1 from the variances alone.
double coeff_c1_from_variance(const MomentSet<double>& hot, const MomentSet<double>& cold,
                              double beta_hot, double beta_cold);
double coeff_c2(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold);
double coeff_d1(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold);
ExpansionCoeffs expansion_coeffs(const MomentSet<double>& hot, const MomentSet<double>& cold,
                                 double beta_hot, double beta_cold);
ExpansionCoeffs expansion_coeffs(const SiteSpectrum& hot_site, const SiteSpectrum& cold_site,
                                 double beta_hot, double beta_cold);

/// Carnot minus the first `order` (1 or 2) terms in Q/n.
double eta_thermo_expansion(const ExpansionCoeffs& coeffs, double beta_hot, double beta_cold,
                            double q, double n, int order);

/// Non-lattice: second-order thermo expansion minus d1 Q/n^2.
/// Lattice: first order only.
double eta_protocol_expansion(const ExpansionCoeffs& coeffs, double beta_hot, double beta_cold,
                              double q, double n, const LatticeClass& lattice);

/// Real-valued swap size before flooring: (beta_H q + q^2/(2 n sigma^2)) / log d.
double block_size_real(double beta_hot, double q, double n, double sigma2_hot, int d);

/// floor of block_size_real. Throws ValidationError for q <= 0 or m >= n.
unsigned block_size_m(double beta_hot, double q, unsigned n, double sigma2_hot, int d);

LatticeClass lattice_classify(const SiteSpectrum& site, double tol = 1e-9);

/// Expansion of D_X^n(m) in (m log d)/n.
double dx_asymptotic(const MomentSet<double>& moments, unsigned m, unsigned n, int d,
                     const LatticeClass& lattice);

/// dx_asymptotic as a function of real m.
double dx_asymptotic_real(const MomentSet<double>& moments, double m, double n, int d,
                          const LatticeClass& lattice);

/// True when m log d exceeds n/10 (the expansion is no longer reliable).
bool dx_outside_regime(unsigned m, unsigned n, int d);

}  // namespace fbe

#endif  // FBE_ASYMPTOTICS_HPP

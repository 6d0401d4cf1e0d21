#include "fbe/asymptotics.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fbe/error.hpp"

namespace fbe {

double coeff_c1(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold) {
  return 0.5 * (hot.psi_prime + cold.psi_prime) * beta_hot * beta_hot / beta_cold;
}

double coeff_c1_from_variance(const MomentSet<double>& hot, const MomentSet<double>& cold,
                              double beta_hot, double beta_cold) {
  const double th = 1.0 / (2.0 * beta_hot * beta_hot * hot.variance);
  const double tl = 1.0 / (2.0 * beta_cold * beta_cold * cold.variance);
  return (th + tl) * beta_hot * beta_hot / beta_cold;
}

double coeff_c2(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold) {
  const double bracket = hot.psi_double_prime / 6.0 - cold.psi_double_prime / 6.0 +
                         0.5 * hot.psi_prime * cold.psi_prime + 0.5 * cold.psi_prime * cold.psi_prime;
  return bracket * beta_hot * beta_hot * beta_hot / beta_cold;
}

namespace {

double d1_term(const MomentSet<double>& m) {
  const double t = m.psi_double_prime / (2.0 * m.psi_prime) - m.psi_prime;
  return t * t;
}

}  // namespace

double coeff_d1(const MomentSet<double>& hot, const MomentSet<double>& cold, double beta_hot,
                double beta_cold) {
  return (d1_term(hot) + d1_term(cold)) * beta_hot * beta_hot / beta_cold;
}

ExpansionCoeffs expansion_coeffs(const MomentSet<double>& hot, const MomentSet<double>& cold,
                                 double beta_hot, double beta_cold) {
  return {coeff_c1(hot, cold, beta_hot, beta_cold), coeff_c2(hot, cold, beta_hot, beta_cold),
          coeff_d1(hot, cold, beta_hot, beta_cold)};
}

ExpansionCoeffs expansion_coeffs(const SiteSpectrum& hot_site, const SiteSpectrum& cold_site,
                                 double beta_hot, double beta_cold) {
  return expansion_coeffs(moments<double>(hot_site, beta_hot), moments<double>(cold_site, beta_cold),
                          beta_hot, beta_cold);
}

double eta_thermo_expansion(const ExpansionCoeffs& coeffs, double beta_hot, double beta_cold,
                            double q, double n, int order) {
  if (order != 1 && order != 2) throw ValidationError("expansion order must be 1 or 2");
  const double x = q / n;
  double eta = 1.0 - beta_hot / beta_cold - coeffs.c1 * x;
  if (order == 2) eta -= coeffs.c2 * x * x;
  return eta;
}

double eta_protocol_expansion(const ExpansionCoeffs& coeffs, double beta_hot, double beta_cold,
                              double q, double n, const LatticeClass& lattice) {
  if (lattice.kind == LatticeKind::Lattice) {
    return eta_thermo_expansion(coeffs, beta_hot, beta_cold, q, n, 1);
  }
  return eta_thermo_expansion(coeffs, beta_hot, beta_cold, q, n, 2) - coeffs.d1 * q / (n * n);
}

double block_size_real(double beta_hot, double q, double n, double sigma2_hot, int d) {
  return (beta_hot * q + q * q / (2.0 * n * sigma2_hot)) / std::log(static_cast<double>(d));
}

unsigned block_size_m(double beta_hot, double q, unsigned n, double sigma2_hot, int d) {
  if (!(q > 0.0)) throw ValidationError("heat must be > 0");
  const double m = std::floor(block_size_real(beta_hot, q, n, sigma2_hot, d));
  if (m >= static_cast<double>(n)) throw ValidationError("swap size m must be below n");
  return static_cast<unsigned>(m);
}

namespace {

struct Fraction {
  std::int64_t p = 0;
  std::int64_t q = 1;
  double error = 0.0;
};

// Best continued-fraction convergent of x with denominator <= max_q.
Fraction rational_approx(double x, std::int64_t max_q) {
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  Fraction best{static_cast<std::int64_t>(std::llround(x)), 1, std::abs(x - std::round(x))};
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (q2 > max_q) break;
    const double err = std::abs(x - static_cast<double>(p2) / static_cast<double>(q2));
    if (err < best.error || it == 0) best = {p2, q2, err};
    if (err == 0.0) break;
    const double frac = r - a;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return best;
}

}  // namespace

LatticeClass lattice_classify(const SiteSpectrum& site, double tol) {
  constexpr std::int64_t kMaxDenominator = 10000;
  constexpr double kLooseTol = 1e-6;
  std::vector<double> diffs;
  for (int i = 1; i < site.d(); ++i) {
    const double diff = site.level(i) - site.level(0);
    if (diff != 0.0) diffs.push_back(diff);
  }
  const double base = diffs.front();
  LatticeClass out;
  std::vector<Fraction> ratios;
  for (double diff : diffs) {
    const double x = diff / base;
    const Fraction f = rational_approx(x, kMaxDenominator);
    const double rel = f.error / std::max(1.0, std::abs(x));
    if (rel > tol) {
      if (rel <= kLooseTol) out.near_boundary = true;
      out.kind = LatticeKind::NonLattice;
      return out;
    }
    ratios.push_back(f);
  }
  std::int64_t common = 1;
  for (const auto& f : ratios) common = std::lcm(common, f.q);
  std::int64_t g = 0;
  for (const auto& f : ratios) g = std::gcd(g, std::abs(f.p * (common / f.q)));
  out.kind = LatticeKind::Lattice;
  out.span = std::abs(base) / static_cast<double>(common) * static_cast<double>(g);
  return out;
}

double dx_asymptotic_real(const MomentSet<double>& moments, double m, double n, int d,
                          const LatticeClass& lattice) {
  const double x = m * std::log(static_cast<double>(d));
  const double pp = moments.psi_prime;
  const double ppp = moments.psi_double_prime;
  double out = x * x / n * pp / 2.0;
  if (lattice.kind == LatticeKind::NonLattice) {
    const double t = ppp / (2.0 * pp) - pp;
    out += x * x * x / (n * n) * (ppp / 6.0 - pp * pp / 2.0) + x * x / (n * n) * t * t;
  }
  return out;
}

double dx_asymptotic(const MomentSet<double>& moments, unsigned m, unsigned n, int d,
                     const LatticeClass& lattice) {
  if (m == 0) return 0.0;
  return dx_asymptotic_real(moments, m, n, d, lattice);
}

bool dx_outside_regime(unsigned m, unsigned n, int d) {
  return m * std::log(static_cast<double>(d)) > n / 10.0;
}

}  // namespace fbe

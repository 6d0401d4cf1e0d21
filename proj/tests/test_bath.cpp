#include <gtest/gtest.h>

#include <cmath>

#include "fbe/bath.hpp"
#include "fbe/error.hpp"
#include "oracle.hpp"

using namespace fbe;

TEST(SiteSpectrum, RejectsBadLevels) {
  EXPECT_THROW(SiteSpectrum(std::vector<double>{1.0}), ValidationError);
  EXPECT_THROW(SiteSpectrum(std::vector<double>{1.0, 1.0}), ValidationError);
  EXPECT_THROW(SiteSpectrum(std::vector<double>{0.0, NAN}), ValidationError);
  EXPECT_THROW(BathSpec(SiteSpectrum::qubit(), -1.0, 3), ValidationError);
  EXPECT_THROW(BathSpec(SiteSpectrum::qubit(), 1.0, 0), ValidationError);
}

TEST(Gibbs, ProbabilitiesNormalizeAndOrder) {
  const SiteSpectrum site(std::vector<double>{0.0, 0.7, 2.1});
  const auto p = gibbs_site_probs(site, 1.3);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
  EXPECT_GT(p[0], p[1]);
  EXPECT_GT(p[1], p[2]);
  const auto uniform = gibbs_site_probs(site, 0.0);
  for (double x : uniform) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(Gibbs, TwoLevelClosedForms) {
  const auto site = SiteSpectrum::qubit();
  for (double beta : {0.01, 1.0 / 30.0, 0.5, 2.0}) {
    const auto mo = moments<double>(site, beta);
    EXPECT_NEAR(mo.log_partition, std::log(2.0 * std::cosh(beta)), 1e-14);
    EXPECT_NEAR(mo.mean_energy, -std::tanh(beta), 1e-14);
    EXPECT_NEAR(mo.variance, 1.0 - std::tanh(beta) * std::tanh(beta), 1e-14);
    EXPECT_NEAR(mo.skewness, 2.0 * std::sinh(beta), 1e-12);
    EXPECT_NEAR(mo.site_entropy, mo.log_partition + beta * mo.mean_energy, 1e-14);
  }
}

namespace {

// phi(s) = log sum_x p(x)^(1+s); its derivative at 0 is -S.
double phi_prime(const SiteSpectrum& site, double beta, double s) {
  const double h = 1e-6;
  auto phi = [&](double t) {
    return log_partition<double>(site, (1.0 + t) * beta) - (1.0 + t) * log_partition<double>(site, beta);
  };
  return (phi(s + h) - phi(s - h)) / (2.0 * h);
}

// Inverse of phi' by bisection (phi' is increasing).
double psi(const SiteSpectrum& site, double beta, double y) {
  double lo = -0.5;
  double hi = 0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (phi_prime(site, beta, mid) < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Gibbs, PsiDerivativesMatchNumericInverse) {
  const SiteSpectrum site(std::vector<double>{-1.0, 0.3, 1.4});
  const double beta = 0.8;
  const auto mo = moments<double>(site, beta);
  const double y0 = -mo.site_entropy;
  const double h = 2e-3;
  const double p1 = psi(site, beta, y0 + h);
  const double p0 = psi(site, beta, y0);
  const double m1 = psi(site, beta, y0 - h);
  EXPECT_NEAR(p0, 0.0, 1e-6);
  EXPECT_NEAR((p1 - m1) / (2.0 * h), mo.psi_prime, 1e-4 * mo.psi_prime);
  EXPECT_NEAR((p1 - 2.0 * p0 + m1) / (h * h), mo.psi_double_prime, 2e-2 * std::abs(mo.psi_double_prime));
  EXPECT_NEAR(mo.psi_prime, 1.0 / (beta * beta * mo.variance), 1e-12);
}

TEST(TypeClasses, MultiplicitiesCoverAllStates) {
  const BathSpec bath(SiteSpectrum(std::vector<double>{0.0, 1.0, 2.5}), 0.4, 7);
  const auto classes = enumerate_type_classes(bath);
  EXPECT_EQ(classes.size(), 36u);  // C(9, 2)
  BigInt total = 0;
  double mass = 0.0;
  for (const auto& tc : classes) {
    total += tc.multiplicity;
    mass += tc.multiplicity.get_d() * std::exp(tc.log_prob_per_state);
  }
  EXPECT_EQ(total, BigInt(2187));
  EXPECT_EQ(total_multiplicity(bath), BigInt(2187));
  EXPECT_NEAR(mass, 1.0, 1e-13);
  EXPECT_NEAR(composition_count(7, 3), 36.0, 1e-9);
}

TEST(TypeClasses, CapIsEnforced) {
  const BathSpec bath(SiteSpectrum(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7}), 0.1, 200);
  EXPECT_THROW(build_sorted_spectrum<double>(bath), ResourceError);
}

class SortedAgainstEnumeration
    : public ::testing::TestWithParam<std::tuple<std::vector<double>, double, unsigned>> {};

TEST_P(SortedAgainstEnumeration, PointwiseEqual) {
  const auto& [levels, beta, n] = GetParam();
  const BathSpec bath(SiteSpectrum(levels), beta, n);
  const auto spec = build_sorted_spectrum<double>(bath);
  const auto ref = oracle::sorted_gibbs(levels, beta, n);
  ASSERT_EQ(spec.size().to_bigint(), BigInt(static_cast<unsigned long>(ref.prob.size())));
  for (std::size_t i = 0; i < ref.prob.size(); ++i) {
    const Position at(BigInt(static_cast<unsigned long>(i)), spec.bits());
    ASSERT_NEAR(std::exp(spec.log_prob_at(at)), static_cast<double>(ref.prob[i]),
                1e-13 * static_cast<double>(ref.prob[i]))
        << "index " << i;
    // At beta = 0 all states tie and the energy order is arbitrary.
    if (beta > 0) ASSERT_NEAR(spec.block(spec.block_index_at(at)).energy, static_cast<double>(ref.energy[i]), 1e-12);
  }
  EXPECT_NEAR(spec.density().total(), 1.0, 1e-13);
  EXPECT_NEAR(spec.entropy(), static_cast<double>(oracle::entropy(ref.prob)), 1e-12);
  EXPECT_NEAR(spec.mean_energy(), static_cast<double>(oracle::mean(ref.prob, ref.energy)), 1e-12);
  const auto mo = moments<double>(bath.site, beta);
  EXPECT_NEAR(spec.entropy(), n * mo.site_entropy, 1e-11);
  EXPECT_NEAR(entropy_of(bath), n * mo.site_entropy, 1e-11);
}

INSTANTIATE_TEST_SUITE_P(
    Spectra, SortedAgainstEnumeration,
    ::testing::Values(std::make_tuple(std::vector<double>{1.0, -1.0}, 1.0 / 30.0, 10u),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 0.7, 12u),
                      std::make_tuple(std::vector<double>{0.0, 1.0, 2.0}, 0.5, 7u),
                      std::make_tuple(std::vector<double>{0.0, 1.0, std::sqrt(2.0)}, 0.9, 6u),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 0.0, 5u)));

TEST(SortedSpectrum, ExtendedMatchesDouble) {
  const BathSpec bath(SiteSpectrum::qubit(), 0.2, 40);
  const auto a = build_sorted_spectrum<double>(bath);
  const auto b = build_sorted_spectrum<Extended>(bath);
  ASSERT_EQ(a.block_count(), b.block_count());
  EXPECT_NEAR(to_double(b.entropy()), a.entropy(), 1e-12);
  EXPECT_NEAR(to_double(b.mean_energy()), a.mean_energy(), 1e-12);
}

TEST(SortedSpectrum, TailMass) {
  const std::vector<double> levels{1.0, -1.0};
  const auto spec = build_sorted_spectrum<double>(BathSpec(SiteSpectrum(levels), 0.3, 9));
  const auto ref = oracle::sorted_gibbs(levels, 0.3, 9);
  for (unsigned from : {0u, 1u, 100u, 300u, 511u, 512u}) {
    oracle::Real tail = 0;
    for (std::size_t i = from; i < ref.prob.size(); ++i) tail += ref.prob[i];
    EXPECT_NEAR(spec.tail_mass_from(Position(BigInt(from), spec.bits())), static_cast<double>(tail), 1e-14);
  }
}

TEST(SortedSpectrum, LargeBathBuildsAndNormalizes) {
  const auto spec = build_sorted_spectrum<Extended>(BathSpec(SiteSpectrum::qubit(), 1.0 / 30.0, 20000));
  EXPECT_NEAR(to_double(spec.density().total()), 1.0, 1e-12);
  EXPECT_NEAR(to_double(spec.entropy()), 20000 * moments<double>(SiteSpectrum::qubit(), 1.0 / 30.0).site_entropy,
              1e-8);
}

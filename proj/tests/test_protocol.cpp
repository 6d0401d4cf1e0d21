#include <gtest/gtest.h>

#include <cmath>

#include "fbe/error.hpp"
#include "fbe/protocol.hpp"
#include "oracle.hpp"

using namespace fbe;

namespace {

const double kBh = 1.0 / 30.0;
const double kBl = 1.0 / 15.0;

ProtocolConfig config_for(const std::vector<double>& levels, double bh, double bl, unsigned n, unsigned m,
                          Mode mode, double q = 1.0) {
  const SiteSpectrum site(levels);
  ProtocolConfig c{EngineConfig(BathSpec(site, bh, n), BathSpec(site, bl, n), q)};
  c.m = m;
  c.mode = mode;
  return c;
}

double rel_or_abs(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-3); }

}  // namespace

TEST(Swap, MatchesDigitOracleExhaustively) {
  for (unsigned d : {2u, 3u}) {
    for (unsigned n = 1; n <= (d == 2 ? 6u : 4u); ++n) {
      const std::uint64_t size = oracle::power(d, n);
      for (unsigned m = 0; m < n; ++m) {
        for (std::uint64_t i = 0; i < size; ++i) {
          for (std::uint64_t j = 0; j < size; ++j) {
            const auto [a, b] = g2_swap(BigInt(static_cast<unsigned long>(i)), BigInt(static_cast<unsigned long>(j)), m,
                                        n, static_cast<int>(d));
            const auto [ra, rb] = oracle::swap_digits(i, j, m, n, d);
            ASSERT_EQ(a.get_ui(), ra);
            ASSERT_EQ(b.get_ui(), rb);
          }
        }
      }
    }
  }
}

TEST(Swap, SmallExample) {
  // d=2, n=2, m=1: i = (1, 0) in digits, j = 0 -> i' = 0, j' = 1.
  const auto [a, b] = g2_swap(BigInt(2), BigInt(0), 1, 2, 2);
  EXPECT_EQ(a, BigInt(1));
  EXPECT_EQ(b, BigInt(0));
  const auto [c, e] = g2_swap(BigInt(1), BigInt(0), 1, 2, 2);
  EXPECT_EQ(c, BigInt(0));
  EXPECT_EQ(e, BigInt(1));
  EXPECT_THROW(g2_swap(BigInt(4), BigInt(0), 1, 2, 2), ValidationError);
}

class DirectSums : public ::testing::TestWithParam<std::tuple<std::vector<double>, double, unsigned>> {};

TEST_P(DirectSums, DxDyMatchEnumeration) {
  const auto& [levels, beta, n] = GetParam();
  const auto spec = build_sorted_spectrum<double>(BathSpec(SiteSpectrum(levels), beta, n));
  const auto ref = oracle::sorted_gibbs(levels, beta, n);
  const unsigned d = static_cast<unsigned>(levels.size());
  for (unsigned m = 0; m <= std::min(n, 3u); ++m) {
    const double ceil_ref = static_cast<double>(oracle::d_x(ref, m, d, true));
    const double floor_ref = static_cast<double>(oracle::d_x(ref, m, d, false));
    const double dy_ref = static_cast<double>(oracle::d_y(ref, m, d));
    EXPECT_LE(std::abs(d_x_n(spec, m, DxVariant::Ceil) - ceil_ref), 1e-12 * std::abs(ceil_ref) + 1e-14) << m;
    EXPECT_LE(std::abs(d_x_n(spec, m, DxVariant::Floor) - floor_ref), 1e-12 * std::abs(floor_ref) + 1e-14) << m;
    EXPECT_LE(std::abs(d_y_n(spec, m) - dy_ref), 1e-12 * std::abs(dy_ref) + 1e-14) << m;
  }
}

INSTANTIATE_TEST_SUITE_P(Spectra, DirectSums,
                         ::testing::Values(std::make_tuple(std::vector<double>{1.0, -1.0}, 1.0 / 30.0, 9u),
                                           std::make_tuple(std::vector<double>{1.0, -1.0}, 0.9, 13u),
                                           std::make_tuple(std::vector<double>{0.0, 1.0, 2.0}, 0.4, 6u),
                                           std::make_tuple(std::vector<double>{0.0, 0.5, 1.7}, 1.2, 7u)));

class AgainstJointEnumeration
    : public ::testing::TestWithParam<std::tuple<std::vector<double>, unsigned, unsigned, Mode>> {};

TEST_P(AgainstJointEnumeration, OutcomeMatches) {
  const auto& [levels, n, m, mode] = GetParam();
  const double bh = 0.3;
  const double bl = 0.8;
  const auto config = config_for(levels, bh, bl, n, m, mode);
  const auto o = apply_protocol(config);
  const auto x = oracle::sorted_gibbs(levels, bh, n);
  const auto y = oracle::sorted_gibbs(levels, bl, n);
  const auto run = oracle::run_swap(x, y, m, n, static_cast<unsigned>(levels.size()));
  const double tol = 1e-11;
  EXPECT_EQ(o.m, m);
  EXPECT_NEAR(o.heat_hot, static_cast<double>(-run.delta_e_hot), tol);
  EXPECT_NEAR(o.heat_cold_released, static_cast<double>(run.delta_e_cold), tol);
  EXPECT_NEAR(o.work, static_cast<double>(-run.delta_e_hot - run.delta_e_cold), tol);
  EXPECT_NEAR(o.kl_total, static_cast<double>(run.kl), tol);
  EXPECT_NEAR(o.delta_s_hot, static_cast<double>(oracle::entropy(run.final_hot) - oracle::entropy(x.prob)), tol);
  EXPECT_NEAR(o.delta_s_cold, static_cast<double>(oracle::entropy(run.final_cold) - oracle::entropy(y.prob)), tol);
  EXPECT_NEAR(o.final_mass_hot, 1.0, tol);
  EXPECT_NEAR(o.final_mass_cold, 1.0, tol);
  if (m > 0 && o.heat_hot != 0.0) {
    ASSERT_TRUE(o.eta.has_value());
    EXPECT_NEAR(*o.eta, o.work / o.heat_hot, 1e-12);
  }
  EXPECT_LE(o.l1_residual, o.l1_bound.total + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(
    Cases, AgainstJointEnumeration,
    ::testing::Values(std::make_tuple(std::vector<double>{1.0, -1.0}, 6u, 0u, Mode::Exact),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 6u, 1u, Mode::Exact),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 7u, 2u, Mode::Exact),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 7u, 3u, Mode::Blockwise),
                      std::make_tuple(std::vector<double>{1.0, -1.0}, 8u, 2u, Mode::Blockwise),
                      std::make_tuple(std::vector<double>{0.0, 1.0, 2.0}, 4u, 1u, Mode::Exact),
                      std::make_tuple(std::vector<double>{0.0, 1.0, 2.0}, 4u, 2u, Mode::Blockwise),
                      std::make_tuple(std::vector<double>{0.0, 0.6, 1.5}, 4u, 1u, Mode::Blockwise)));

TEST(Protocol, BlockwiseAgreesWithExact) {
  for (unsigned n : {12u, 16u}) {
    for (unsigned m : {1u, 2u, 4u}) {
      const auto a = apply_protocol(config_for({1.0, -1.0}, kBh, kBl, n, m, Mode::Exact));
      const auto b = apply_protocol(config_for({1.0, -1.0}, kBh, kBl, n, m, Mode::Blockwise));
      EXPECT_NEAR(a.work, b.work, 1e-11);
      EXPECT_NEAR(a.heat_hot, b.heat_hot, 1e-11);
      EXPECT_NEAR(a.kl_total, b.kl_total, 1e-11);
      EXPECT_NEAR(a.delta_s_hot, b.delta_s_hot, 1e-11);
      EXPECT_NEAR(a.delta_s_cold, b.delta_s_cold, 1e-11);
      EXPECT_NEAR(a.l1_residual, b.l1_residual, 1e-11);
      EXPECT_NEAR(a.d_x, b.d_x, 1e-11);
      EXPECT_NEAR(a.d_y, b.d_y, 1e-11);
      EXPECT_NEAR(a.ds_hot_bound, b.ds_hot_bound, 1e-11);
      EXPECT_NEAR(a.ds_cold_bound, b.ds_cold_bound, 1e-11);
    }
  }
}

TEST(Protocol, ExtendedAgreesWithDouble) {
  auto config = config_for({1.0, -1.0}, kBh, kBl, 3000, 4, Mode::Blockwise, 60.0);
  config.precision = Precision::Double;
  const auto a = apply_protocol(config);
  config.precision = Precision::Extended;
  const auto b = apply_protocol(config);
  EXPECT_EQ(b.precision_used, Precision::Extended);
  EXPECT_NEAR(a.work, b.work, 1e-9 * std::abs(b.work));
  EXPECT_NEAR(a.heat_hot, b.heat_hot, 1e-9 * std::abs(b.heat_hot));
  EXPECT_NEAR(rel_or_abs(a.kl_total, b.kl_total), 0.0, 1e-9);
}

TEST(Protocol, ResolveDefaults) {
  ProtocolConfig c = config_for({1.0, -1.0}, kBh, kBl, 1000, 0, Mode::Auto, 30.0);
  c.m.reset();
  EXPECT_EQ(resolve_m(c), 2u);
  EXPECT_EQ(resolve_mode(c), Mode::Blockwise);
  EXPECT_EQ(resolve_precision(c), Precision::Double);
  ProtocolConfig small = config_for({1.0, -1.0}, kBh, kBl, 12, 1, Mode::Auto);
  EXPECT_EQ(resolve_mode(small), Mode::Exact);
  ProtocolConfig big = config_for({1.0, -1.0}, kBh, kBl, 20000, 1, Mode::Auto, 100.0);
  EXPECT_EQ(resolve_precision(big), Precision::Extended);
  EXPECT_THROW(apply_protocol(config_for({1.0, -1.0}, kBh, kBl, 30, 1, Mode::Exact)), ResourceError);
  EXPECT_THROW(apply_protocol(config_for({1.0, -1.0}, kBh, kBl, 6, 6, Mode::Exact)), ValidationError);
}

TEST(Protocol, ZeroSwapDoesNothing) {
  const auto o = apply_protocol(config_for({1.0, -1.0}, kBh, kBl, 10, 0, Mode::Exact));
  EXPECT_EQ(o.work, 0.0);
  EXPECT_EQ(o.heat_hot, 0.0);
  EXPECT_FALSE(o.eta.has_value());
  EXPECT_NEAR(o.kl_total, 0.0, 1e-15);
}

TEST(Invariants, EfficiencyIdentityAndOrder) {
  const SiteSpectrum site = SiteSpectrum::qubit();
  for (unsigned n : {10u, 12u, 14u}) {
    for (unsigned m = 1; m <= 4; ++m) {
      const auto o = apply_protocol(config_for({1.0, -1.0}, kBh, kBl, n, m, Mode::Exact));
      EXPECT_LE(std::abs(kBl * o.work - (kBl - kBh) * o.heat_hot + o.kl_total), 1e-10);
      EXPECT_GE(o.kl_total, -1e-14);
      EXPECT_LE(std::abs(o.kl_total - o.d_x - o.d_y), o.kl_decomposition_bound);
      if (o.heat_hot > 0.0 && o.eta) {
        try {
          const EngineConfig e(BathSpec(site, kBh, n), BathSpec(site, kBl, n), o.heat_hot);
          EXPECT_LE(*o.eta, eta_thermo<double>(e).eta_thermo + 1e-12);
        } catch (const NumericalError&) {
          // infeasible thermodynamic optimum at this heat
        }
      }
    }
  }
}

TEST(Invariants, EntropyBoundsAndTheoremOneRefinement) {
  for (unsigned m : {1u, 2u, 3u}) {
    const auto o = apply_protocol(config_for({1.0, -1.0}, kBh, kBl, 14, m, Mode::Exact));
    EXPECT_LE(std::abs(o.delta_s_hot + m * std::log(2.0)), o.ds_hot_bound);
    EXPECT_LE(std::abs(o.delta_s_cold - m * std::log(2.0)), o.ds_cold_bound);
    // Unitality: total entropy does not decrease.
    EXPECT_GE(o.delta_s_hot + o.delta_s_cold, -1e-12);
    const EngineConfig& e = config_for({1.0, -1.0}, kBh, kBl, 14, m, Mode::Exact).engine;
    for (double bph : {0.02, 0.05}) {
      for (double bpl : {0.04, 0.09}) EXPECT_GE(divergence_to_gibbs(o, e, bph, bpl), -1e-12);
    }
  }
}

TEST(Invariants, SingleTemperatureYieldsNoWork) {
  for (unsigned n = 2; n <= 14; n += 3) {
    for (unsigned m = 1; m <= n / 2; ++m) {
      const auto o = apply_protocol(config_for({1.0, -1.0}, 0.5, 0.5, n, m, Mode::Exact));
      EXPECT_LE(o.work, 1e-12) << n << ' ' << m;
    }
  }
}

TEST(Invariants, SizeConditionAndResidualBound) {
  // Near-uniform baths fail the condition for any m; colder ones pass for small m.
  const EngineConfig warm(BathSpec(SiteSpectrum::qubit(), kBh, 10000), BathSpec(SiteSpectrum::qubit(), kBl, 10000),
                          100.0);
  EXPECT_FALSE(size_condition(warm, 1).ok);
  const EngineConfig e(BathSpec(SiteSpectrum::qubit(), 1.0, 10000), BathSpec(SiteSpectrum::qubit(), 2.0, 10000),
                       100.0);
  const auto ok = size_condition(e, 8);
  EXPECT_TRUE(ok.ok);
  EXPECT_FALSE(size_condition(e, 100000).ok);
  const auto hot = build_sorted_spectrum<double>(e.hot);
  const auto cold = build_sorted_spectrum<double>(e.cold);
  const auto r = l1_residual_bound(hot, cold, 8);
  EXPECT_NEAR(r.total, r.tail + r.block_term, 1e-15);
  EXPECT_GE(r.tail, 0.0);
}

TEST(Marginals, ProductApproximationIsNormalizedApproximately) {
  const auto hot = build_sorted_spectrum<double>(BathSpec(SiteSpectrum::qubit(), kBh, 2000));
  const auto cold = build_sorted_spectrum<double>(BathSpec(SiteSpectrum::qubit(), kBl, 2000));
  const auto pa = product_approx_marginals(hot, cold, 3);
  EXPECT_NEAR(pa.hot.total(), 1.0 + pa.hot_excess, 1e-12);
  EXPECT_NEAR(pa.cold.total(), 1.0 - pa.cold_deficit, 1e-12);
  const auto fm = final_marginals(hot, cold, 3);
  EXPECT_NEAR(fm.hot_row.total() * fm.hot_col.total(), 1.0, 1e-12);
  EXPECT_NEAR(fm.cold_row.total() * fm.cold_col.total(), 1.0, 1e-12);
}

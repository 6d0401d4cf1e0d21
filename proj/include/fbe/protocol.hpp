#ifndef FBE_PROTOCOL_HPP
#define FBE_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

#include "fbe/bath.hpp"
#include "fbe/step_function.hpp"
#include "fbe/thermo.hpp"

namespace fbe {

enum class Mode { Exact, Blockwise, Auto };
/// Rounding of i / d^m inside D_X.
enum class DxVariant { Ceil, Floor };

std::string_view to_string(Mode mode);
std::string_view to_string(DxVariant variant);

/// Largest d^n handled by exact (fully expanded) mode.
inline constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 24;
/// Particle count from which extended precision is the default.
inline constexpr unsigned kExtendedFrom = 10000;

struct ProtocolConfig {
  EngineConfig engine;
  std::optional<unsigned> m;  // default: block_size_m from the target heat
  Mode mode = Mode::Auto;
  std::optional<Precision> precision;
  DxVariant dx_variant = DxVariant::Ceil;
  /// Report the D_X variant closest to kl_total - D_Y instead of dx_variant.
  bool select_dx_variant = true;
};

unsigned resolve_m(const ProtocolConfig& config);
Mode resolve_mode(const ProtocolConfig& config);
Precision resolve_precision(const ProtocolConfig& config);

/// Swap-size condition m < n (min{1 - S_Y/log d, -log max_x P_X(x)/log d} - eps).
struct SizeCondition {
  bool ok = false;
  double limit = 0.0;
};
SizeCondition size_condition(const EngineConfig& engine, unsigned m, double eps = 0.01);

/// Terms of the L1 bound between the final joint distribution and the
/// product approximation.
struct ResidualBound {
  double tail = 0.0;        // cold mass at sorted indices >= d^{n-m}
  double block_term = 0.0;  // d^m (n+1)^{d-1} (max_x P_X(x))^n
  double total = 0.0;
};

struct ProtocolOutcome {
  unsigned n = 0;
  int d = 0;
  unsigned m = 0;
  Mode mode_used = Mode::Exact;
  Precision precision_used = Precision::Double;
  DxVariant dx_variant_used = DxVariant::Ceil;

  double work = 0.0;
  double heat_hot = 0.0;
  double heat_cold_released = 0.0;
  std::optional<double> eta;  // empty when heat_hot == 0
  double energy_initial_hot = 0.0;
  double energy_initial_cold = 0.0;
  double energy_change_hot = 0.0;
  double energy_change_cold = 0.0;

  double d_x = 0.0;
  double d_x_other = 0.0;  // the other rounding variant
  double d_y = 0.0;
  double kl_total = 0.0;
  double kl_decomposition_bound = 0.0;  // bound on |kl_total - d_x - d_y|

  double entropy_hot = 0.0;  // initial
  double entropy_cold = 0.0;
  double delta_s_hot = 0.0;
  double delta_s_cold = 0.0;
  double ds_hot_bound = 0.0;   // bound on |delta_s_hot + m log d|
  double ds_cold_bound = 0.0;  // bound on |delta_s_cold - m log d|
  double final_mass_hot = 0.0;
  double final_mass_cold = 0.0;

  double l1_residual = 0.0;  // exact L1 distance to the product approximation
  ResidualBound l1_bound;
  double tail_mass = 0.0;

  double q_hot_lemma = 0.0;  // (m log d - D_X) / beta_H
  std::optional<double> eta_lemma;
  SizeCondition size_condition;
};

/// Digit swap on Z_{d^n} x Z_{d^n}: with i = i_hi d^m + i_lo and
/// j = j_top d^{n-m} + j_rest it returns (j_top d^{n-m} + i_hi, j_rest d^m + i_lo).
std::pair<BigInt, BigInt> g2_swap(const BigInt& i, const BigInt& j, unsigned m, unsigned n, int d);

/// sum_i P(i) log(d^m P(i) / P(r(i / d^m))) with r = ceil or floor.
template <class Scalar>
Scalar d_x_n(const SortedSpectrum<Scalar>& spec, unsigned m, DxVariant variant = DxVariant::Ceil);

/// sum_j P(j) log(P(j) / (d^m P(d^m j))), P(index >= d^n) := smallest block value.
template <class Scalar>
Scalar d_y_n(const SortedSpectrum<Scalar>& spec, unsigned m);

template <class Scalar>
ResidualBound l1_residual_bound(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold,
                                unsigned m);

// The hot factor can also be written with k ranging over Z_{d^m} and the
// support at k + 0 * d^m; that labeling does not reach every group of Z_{d^n}.
// The labeling below is the one that matches full enumeration.
template <class Scalar>
struct ProductApprox {
  StepFunction<Scalar> hot;   // on Z_{d^{n-m}}: d^m P_X(k d^m)
  StepFunction<Scalar> cold;  // on Z_{d^n}: P_Y(floor(j / d^m)) / d^m
  Scalar hot_excess;          // total mass - 1
  Scalar cold_deficit;        // 1 - total mass
};

template <class Scalar>
ProductApprox<Scalar> product_approx_marginals(const SortedSpectrum<Scalar>& hot,
                                               const SortedSpectrum<Scalar>& cold, unsigned m);

/// Final marginals in sorted coordinates as products of digit marginals:
/// P'_X(t W + k) = row(t) col(k) with W = d^{n-m}, P'_Y(r G + l) likewise with G = d^m.
template <class Scalar>
struct FinalMarginals {
  StepFunction<Scalar> hot_row;   // on Z_G
  StepFunction<Scalar> hot_col;   // on Z_W
  StepFunction<Scalar> cold_row;  // on Z_W
  StepFunction<Scalar> cold_col;  // on Z_G
};

template <class Scalar>
FinalMarginals<Scalar> final_marginals(const SortedSpectrum<Scalar>& hot,
                                       const SortedSpectrum<Scalar>& cold, unsigned m);

template <class Scalar>
ProtocolOutcome apply_protocol_exact(const SortedSpectrum<Scalar>& hot,
                                     const SortedSpectrum<Scalar>& cold, const ProtocolConfig& config,
                                     unsigned m);
template <class Scalar>
ProtocolOutcome apply_protocol_blockwise(const SortedSpectrum<Scalar>& hot,
                                         const SortedSpectrum<Scalar>& cold,
                                         const ProtocolConfig& config, unsigned m);

ProtocolOutcome apply_protocol_exact(const ProtocolConfig& config);
ProtocolOutcome apply_protocol_blockwise(const ProtocolConfig& config);
/// Dispatches on resolve_mode and resolve_precision.
ProtocolOutcome apply_protocol(const ProtocolConfig& config);

/// D(P' || P_{beta'_H} x P_{beta'_L}) for the final state of a run.
double divergence_to_gibbs(const ProtocolOutcome& outcome, const EngineConfig& engine,
                           double beta_prime_hot, double beta_prime_cold);

}  // namespace fbe

#endif  // FBE_PROTOCOL_HPP

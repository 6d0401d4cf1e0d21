#ifndef FBE_SRC_PROTOCOL_COMMON_HPP
#define FBE_SRC_PROTOCOL_COMMON_HPP

#include <cmath>
#include <optional>

#include "fbe/protocol.hpp"

namespace fbe::detail {

template <class Scalar>
Position group_size(const SortedSpectrum<Scalar>& spec, unsigned m) {
  return Position::power(static_cast<unsigned long>(spec.d()), m, spec.bits());
}

template <class Scalar>
Position width(const SortedSpectrum<Scalar>& spec, unsigned m) {
  return Position::power(static_cast<unsigned long>(spec.d()), spec.n() - m, spec.bits());
}

/// Scalar-valued quantities shared by both engines before conversion.
template <class Scalar>
struct RawOutcome {
  Mode mode = Mode::Exact;
  unsigned m = 0;
  Scalar entropy_hot{0}, entropy_cold{0};
  Scalar energy_hot{0}, energy_cold{0};
  Scalar energy_change_hot{0}, energy_change_cold{0};
  std::optional<Scalar> kl;  // from cross entropies; else from energy changes
  Scalar d_x_ceil{0}, d_x_floor{0}, d_y{0};
  Scalar tail{0};
  Scalar final_mass_hot{1}, final_mass_cold{1};
  std::optional<Scalar> final_entropy_hot, final_entropy_cold;
  Scalar group_excess{0};        // sum_k sum_l (P(kG) - P(kG + l))
  Scalar hot_straddle{0};        // sum over cut groups A(k) log(P(kG) / P(kG + G - 1))
  Scalar cold_col_log_ratio{0};  // log(C(0) / C(G - 1))
};

inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

template <class Scalar>
ProtocolOutcome finish(const RawOutcome<Scalar>& raw, const SortedSpectrum<Scalar>& hot,
                       const SortedSpectrum<Scalar>& cold, const ProtocolConfig& config) {
  const auto& engine = config.engine;
  const double beta_h = engine.hot.beta;
  const double beta_l = engine.cold.beta;
  const int d = hot.d();
  const double log_d = std::log(static_cast<double>(d));
  const unsigned m = raw.m;

  ProtocolOutcome out;
  out.n = hot.n();
  out.d = d;
  out.m = m;
  out.mode_used = raw.mode;
  out.precision_used = precision_of<Scalar>;
  out.entropy_hot = to_double(raw.entropy_hot);
  out.entropy_cold = to_double(raw.entropy_cold);
  out.energy_initial_hot = to_double(raw.energy_hot);
  out.energy_initial_cold = to_double(raw.energy_cold);
  out.size_condition = size_condition(engine, m);
  out.l1_bound = l1_residual_bound(hot, cold, m);
  out.tail_mass = to_double(raw.tail);
  out.final_mass_hot = to_double(raw.final_mass_hot);
  out.final_mass_cold = to_double(raw.final_mass_cold);

  const Scalar kl = raw.kl ? *raw.kl
                           : Scalar(beta_h) * raw.energy_change_hot + Scalar(beta_l) * raw.energy_change_cold;
  const Scalar heat = -raw.energy_change_hot;
  const Scalar work = -raw.energy_change_hot - raw.energy_change_cold;
  out.kl_total = to_double(kl);
  out.energy_change_hot = to_double(raw.energy_change_hot);
  out.energy_change_cold = to_double(raw.energy_change_cold);
  out.heat_hot = to_double(heat);
  out.work = to_double(work);
  out.heat_cold_released = to_double(raw.energy_change_cold);
  if (m > 0 && heat != Scalar(0)) out.eta = to_double(work / heat);

  const Scalar gap_ceil = sx::abs(kl - raw.d_x_ceil - raw.d_y);
  const Scalar gap_floor = sx::abs(kl - raw.d_x_floor - raw.d_y);
  bool use_floor = config.dx_variant == DxVariant::Floor;
  if (config.select_dx_variant) use_floor = gap_floor < gap_ceil;
  out.dx_variant_used = use_floor ? DxVariant::Floor : DxVariant::Ceil;
  out.d_x = to_double(use_floor ? raw.d_x_floor : raw.d_x_ceil);
  out.d_x_other = to_double(use_floor ? raw.d_x_ceil : raw.d_x_floor);
  out.d_y = to_double(raw.d_y);

  const double tau = to_double(raw.tail);
  out.l1_residual = (1.0 - tau) * to_double(raw.group_excess) + tau;
  const double log_range = -to_double(hot.min_log_prob()) - to_double(cold.min_log_prob());
  out.kl_decomposition_bound =
      out.l1_bound.total * (log_range + m * log_d) + std::abs(out.d_x - out.d_x_other);

  const double log_g_minus_1 = m > 0 ? std::log(std::expm1(m * log_d)) : 0.0;
  const double top_digit = binary_entropy(tau) + (tau > 0.0 && m > 0 ? tau * log_g_minus_1 : 0.0);
  if (m == 0) {
    out.delta_s_hot = 0.0;
    out.delta_s_cold = 0.0;
  } else {
    out.delta_s_hot = to_double(*raw.final_entropy_hot - raw.entropy_hot);
    out.delta_s_cold = to_double(*raw.final_entropy_cold - raw.entropy_cold);
  }
  out.ds_hot_bound = top_digit + to_double(raw.hot_straddle);
  out.ds_cold_bound = top_digit + std::max(0.0, to_double(raw.cold_col_log_ratio));

  if (beta_h > 0.0) {
    out.q_hot_lemma = (m * log_d - out.d_x) / beta_h;
    if (out.q_hot_lemma > 0.0) {
      out.eta_lemma = 1.0 - beta_h / beta_l - (out.d_x + out.d_y) / (beta_l * out.q_hot_lemma);
    }
  }
  return out;
}

}  // namespace fbe::detail

#endif  // FBE_SRC_PROTOCOL_COMMON_HPP

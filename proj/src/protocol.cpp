#include "fbe/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "fbe/asymptotics.hpp"
#include "fbe/error.hpp"
#include "protocol_common.hpp"

namespace fbe {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Exact:
      return "exact";
    case Mode::Blockwise:
      return "blockwise";
    case Mode::Auto:
      return "auto";
  }
  return "auto";
}

std::string_view to_string(DxVariant variant) {
  return variant == DxVariant::Ceil ? "ceil" : "floor";
}

unsigned resolve_m(const ProtocolConfig& config) {
  const auto& e = config.engine;
  unsigned m = 0;
  if (config.m) {
    m = *config.m;
  } else {
    const auto mom = moments<double>(e.hot.site, e.hot.beta);
    m = block_size_m(e.hot.beta, e.q_target, e.n(), mom.variance, e.hot.site.d());
  }
  if (m >= e.n()) throw ValidationError("swap size m must be below n");
  return m;
}

Mode resolve_mode(const ProtocolConfig& config) {
  if (config.mode != Mode::Auto) return config.mode;
  const double states = std::pow(static_cast<double>(config.engine.hot.site.d()), config.engine.n());
  return states <= static_cast<double>(kExactLimit) ? Mode::Exact : Mode::Blockwise;
}

Precision resolve_precision(const ProtocolConfig& config) {
  if (config.precision) return *config.precision;
  return config.engine.n() >= kExtendedFrom ? Precision::Extended : Precision::Double;
}

SizeCondition size_condition(const EngineConfig& engine, unsigned m, double eps) {
  const double log_d = std::log(static_cast<double>(engine.hot.site.d()));
  const double s_cold = site_entropy<double>(engine.cold.site, engine.cold.beta);
  const auto lp = gibbs_site_log_probs<double>(engine.hot.site, engine.hot.beta);
  const double max_lp = *std::max_element(lp.begin(), lp.end());
  const double a = 1.0 - s_cold / log_d;
  const double b = -max_lp / log_d;
  SizeCondition out;
  out.limit = engine.n() * (std::min(a, b) - eps);
  out.ok = static_cast<double>(m) < out.limit;
  return out;
}

std::pair<BigInt, BigInt> g2_swap(const BigInt& i, const BigInt& j, unsigned m, unsigned n, int d) {
  if (m >= n && n > 0 && m != 0) throw ValidationError("swap size m must be below n");
  BigInt size, g, w;
  mpz_ui_pow_ui(size.get_mpz_t(), static_cast<unsigned long>(d), n);
  mpz_ui_pow_ui(g.get_mpz_t(), static_cast<unsigned long>(d), m);
  mpz_ui_pow_ui(w.get_mpz_t(), static_cast<unsigned long>(d), n - m);
  if (i < 0 || j < 0 || i >= size || j >= size) throw ValidationError("index outside Z_{d^n}");
  const BigInt i_hi = i / g;
  const BigInt i_lo = i % g;
  const BigInt j_top = j / w;
  const BigInt j_rest = j % w;
  return {j_top * w + i_hi, j_rest * g + i_lo};
}

template <class Scalar>
Scalar d_x_n(const SortedSpectrum<Scalar>& spec, unsigned m, DxVariant variant) {
  if (m >= spec.n()) throw ValidationError("swap size m must be below n");
  if (m == 0) return Scalar(0);
  const auto g = detail::group_size(spec, m);
  const Position& size = spec.size();
  Breakpoints<Scalar> target;
  for (std::size_t a = 0; a < spec.block_count(); ++a) {
    // indices i whose rounded i / G falls into block a start here
    Position s(spec.bits());
    if (variant == DxVariant::Floor) {
      s = spec.start(a) * g;
    } else if (a > 0) {
      s = (spec.start(a).minus(1) * g).plus(1);
    }
    if (!(s < size)) break;
    target.starts.push_back(std::move(s));
    target.values.push_back(spec.block(a).log_prob);
  }
  const Scalar shift = Scalar(m) * sx::log(Scalar(spec.d()));
  return overlap_sum(spec.density(), target,
                     [&](const Scalar& lf, const Scalar& lg) { return shift + lf - lg; });
}

template <class Scalar>
Scalar d_y_n(const SortedSpectrum<Scalar>& spec, unsigned m) {
  if (m >= spec.n()) throw ValidationError("swap size m must be below n");
  if (m == 0) return Scalar(0);
  const auto g = detail::group_size(spec, m);
  Breakpoints<Scalar> target;
  for (std::size_t a = 0; a < spec.block_count(); ++a) {
    Position s = spec.start(a).ceil_div(g);
    if (!target.starts.empty() && s == target.starts.back()) {
      target.values.back() = spec.block(a).log_prob;
      continue;
    }
    target.starts.push_back(std::move(s));
    target.values.push_back(spec.block(a).log_prob);
  }
  const Scalar shift = Scalar(m) * sx::log(Scalar(spec.d()));
  return overlap_sum(spec.density(), target,
                     [&](const Scalar& lf, const Scalar& lg) { return lf - shift - lg; });
}

template <class Scalar>
ResidualBound l1_residual_bound(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold,
                                unsigned m) {
  const unsigned n = hot.n();
  const int d = hot.d();
  ResidualBound out;
  out.tail = to_double(cold.tail_mass_from(detail::width(cold, m)));
  const Scalar log_term = Scalar(m) * sx::log(Scalar(d)) +
                          Scalar(d - 1) * sx::log(Scalar(n) + Scalar(1)) + hot.max_log_prob();
  out.block_term = to_double(sx::exp(log_term));
  out.total = out.tail + out.block_term;
  return out;
}

template <class Scalar>
ProductApprox<Scalar> product_approx_marginals(const SortedSpectrum<Scalar>& hot,
                                               const SortedSpectrum<Scalar>& cold, unsigned m) {
  const auto g = detail::group_size(hot, m);
  const auto w = detail::width(hot, m);
  const Scalar log_g = g.template log<Scalar>();
  std::vector<Position> hs;
  std::vector<Scalar> hv;
  for (std::size_t b = 0; b < hot.block_count(); ++b) {
    Position s = hot.start(b).ceil_div(g);
    const Position e = hot.start(b + 1).ceil_div(g);
    if (!(s < e)) continue;
    hs.push_back(std::move(s));
    hv.push_back(log_g + hot.block(b).log_prob);
  }
  std::vector<Position> cs;
  std::vector<Scalar> cv;
  for (std::size_t b = 0; b < cold.block_count() && cold.start(b) < w; ++b) {
    cs.push_back(cold.start(b) * g);
    cv.push_back(cold.block(b).log_prob - log_g);
  }
  const Position n_size = cold.size();
  ProductApprox<Scalar> out{StepFunction<Scalar>(w, std::move(hs), std::move(hv)),
                            StepFunction<Scalar>(n_size, std::move(cs), std::move(cv)), Scalar(0),
                            Scalar(0)};
  out.hot_excess = out.hot.total() - Scalar(1);
  out.cold_deficit = cold.tail_mass_from(w);
  return out;
}

template <class Scalar>
FinalMarginals<Scalar> final_marginals(const SortedSpectrum<Scalar>& hot,
                                       const SortedSpectrum<Scalar>& cold, unsigned m) {
  const auto g = detail::group_size(hot, m);
  const auto w = detail::width(hot, m);
  return {group_sums(cold.density(), w), group_sums(hot.density(), g),
          residue_sums(cold.density(), w), residue_sums(hot.density(), g)};
}

template <class Scalar>
ProtocolOutcome apply_protocol_blockwise(const SortedSpectrum<Scalar>& hot,
                                         const SortedSpectrum<Scalar>& cold,
                                         const ProtocolConfig& config, unsigned m) {
  if (!(config.engine.hot.beta > 0.0)) {
    throw ValidationError("blockwise mode needs beta_hot > 0");
  }
  const unsigned n = hot.n();
  if (m >= n) throw ValidationError("swap size m must be below n");
  detail::RawOutcome<Scalar> raw;
  raw.mode = Mode::Blockwise;
  raw.m = m;
  raw.entropy_hot = hot.entropy();
  raw.entropy_cold = cold.entropy();
  raw.energy_hot = hot.mean_energy();
  raw.energy_cold = cold.mean_energy();
  raw.d_x_ceil = d_x_n(hot, m, DxVariant::Ceil);
  raw.d_x_floor = d_x_n(hot, m, DxVariant::Floor);
  raw.d_y = d_y_n(cold, m);
  raw.tail = cold.tail_mass_from(detail::width(cold, m));
  if (m == 0) return detail::finish(raw, hot, cold, config);

  const auto g = detail::group_size(hot, m);
  const auto w = detail::width(hot, m);
  const auto fm = final_marginals(hot, cold, m);

  auto energy_change = [](const SortedSpectrum<Scalar>& spec, const StepFunction<Scalar>& row,
                          const StepFunction<Scalar>& col, const Position& width, Scalar& mass) {
    CompensatedSum<Scalar> de, total;
    const Scalar h0 = spec.block(0).energy;
    for (std::size_t b = 0; b < spec.block_count(); ++b) {
      const Scalar moved = product_range_mass(row, col, width, spec.start(b), spec.start(b + 1));
      total += moved;
      de += (spec.block(b).energy - h0) * (moved - spec.density().run_mass(b));
    }
    mass = total.value();
    return de.value();
  };
  raw.energy_change_hot = energy_change(hot, fm.hot_row, fm.hot_col, w, raw.final_mass_hot);
  raw.energy_change_cold = energy_change(cold, fm.cold_row, fm.cold_col, g, raw.final_mass_cold);
  raw.final_entropy_hot = fm.hot_row.entropy() + fm.hot_col.entropy();
  raw.final_entropy_cold = fm.cold_row.entropy() + fm.cold_col.entropy();

  // sum_k sum_l (P(kG) - P(kG + l)) = sum_b (G #{multiples of G in block b} - |b|) P_b
  CompensatedSum<Scalar> plus, minus;
  for (std::size_t b = 0; b < hot.block_count(); ++b) {
    const Position count = hot.start(b + 1).ceil_div(g) - hot.start(b).ceil_div(g);
    const Position diff = g * count - (hot.start(b + 1) - hot.start(b));
    if (diff.is_positive()) {
      plus += sx::exp(hot.block(b).log_prob + diff.template log<Scalar>());
    } else if (!diff.is_zero()) {
      minus += sx::exp(hot.block(b).log_prob + (Position(0UL, diff.bits()) - diff).template log<Scalar>());
    }
  }
  raw.group_excess = plus.value() - minus.value();

  // Groups cut by a block boundary: A(k) (log P(kG) - log P(kG + G - 1)).
  CompensatedSum<Scalar> straddle;
  Position last_group(hot.bits());
  bool have_last = false;
  for (std::size_t b = 1; b < hot.block_count(); ++b) {
    const Position k = hot.start(b).floor_div(g);
    if (k * g == hot.start(b)) continue;
    if (have_last && k == last_group) continue;
    last_group = k;
    have_last = true;
    const Position first = k * g;
    const Position last = (first + g).minus(1);
    straddle += sx::exp(fm.hot_col.log_value_at(k)) * (hot.log_prob_at(first) - hot.log_prob_at(last));
  }
  raw.hot_straddle = straddle.value();
  raw.cold_col_log_ratio =
      fm.cold_col.log_value(0) - fm.cold_col.log_value(fm.cold_col.run_count() - 1);
  return detail::finish(raw, hot, cold, config);
}

namespace {

template <class Scalar>
ProtocolOutcome run_with(const ProtocolConfig& config, Mode mode) {
  const unsigned m = resolve_m(config);
  const auto hot = build_sorted_spectrum<Scalar>(config.engine.hot);
  const auto cold = build_sorted_spectrum<Scalar>(config.engine.cold);
  return mode == Mode::Exact ? apply_protocol_exact(hot, cold, config, m)
                             : apply_protocol_blockwise(hot, cold, config, m);
}

ProtocolOutcome run(const ProtocolConfig& config, Mode mode) {
  return resolve_precision(config) == Precision::Extended ? run_with<Extended>(config, mode)
                                                          : run_with<double>(config, mode);
}

}  // namespace

ProtocolOutcome apply_protocol_exact(const ProtocolConfig& config) { return run(config, Mode::Exact); }

ProtocolOutcome apply_protocol_blockwise(const ProtocolConfig& config) {
  return run(config, Mode::Blockwise);
}

ProtocolOutcome apply_protocol(const ProtocolConfig& config) { return run(config, resolve_mode(config)); }

double divergence_to_gibbs(const ProtocolOutcome& outcome, const EngineConfig& engine,
                           double beta_prime_hot, double beta_prime_cold) {
  // D(P' || R) = D(P' || P) + sum P' (log P - log R) for product Gibbs P, R.
  const double n = engine.n();
  const double e_hot = (outcome.energy_initial_hot + outcome.energy_change_hot) / n;
  const double e_cold = (outcome.energy_initial_cold + outcome.energy_change_cold) / n;
  const double hot_term = (beta_prime_hot - engine.hot.beta) * e_hot +
                          log_partition<double>(engine.hot.site, beta_prime_hot) -
                          log_partition<double>(engine.hot.site, engine.hot.beta);
  const double cold_term = (beta_prime_cold - engine.cold.beta) * e_cold +
                           log_partition<double>(engine.cold.site, beta_prime_cold) -
                           log_partition<double>(engine.cold.site, engine.cold.beta);
  return outcome.kl_total + n * (hot_term + cold_term);
}

#define FBE_INSTANTIATE(S)                                                                     \
  template S d_x_n(const SortedSpectrum<S>&, unsigned, DxVariant);                            \
  template S d_y_n(const SortedSpectrum<S>&, unsigned);                                       \
  template ResidualBound l1_residual_bound(const SortedSpectrum<S>&, const SortedSpectrum<S>&, \
                                           unsigned);                                         \
  template ProductApprox<S> product_approx_marginals(const SortedSpectrum<S>&,                \
                                                     const SortedSpectrum<S>&, unsigned);     \
  template FinalMarginals<S> final_marginals(const SortedSpectrum<S>&, const SortedSpectrum<S>&, \
                                             unsigned);                                       \
  template ProtocolOutcome apply_protocol_blockwise(const SortedSpectrum<S>&,                 \
                                                    const SortedSpectrum<S>&,                 \
                                                    const ProtocolConfig&, unsigned);
FBE_INSTANTIATE(double)
FBE_INSTANTIATE(Extended)
#undef FBE_INSTANTIATE

}  // namespace fbe

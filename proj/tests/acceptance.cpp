// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fbe/asymptotics.hpp"
#include "fbe/error.hpp"
#include "fbe/lift.hpp"
#include "fbe/protocol.hpp"
#include "fbe/thermo.hpp"
#include "oracle.hpp"

using namespace fbe;

namespace {

constexpr double kBh = 1.0 / 30.0;
constexpr double kBl = 1.0 / 15.0;

const SiteSpectrum& qubit() {
  static const SiteSpectrum site = SiteSpectrum::qubit();
  return site;
}

EngineConfig engine(unsigned n, double q, double bh = kBh, double bl = kBl) {
  return EngineConfig(BathSpec(qubit(), bh, n), BathSpec(qubit(), bl, n), q);
}

ProtocolConfig protocol_config(unsigned n, std::optional<unsigned> m, Mode mode, double q = 1.0, double bh = kBh,
                               double bl = kBl) {
  ProtocolConfig c{engine(n, q, bh, bl)};
  c.m = m;
  c.mode = mode;
  return c;
}

double q_rule(unsigned n) { return 0.3 * std::pow(static_cast<double>(n), 2.0 / 3.0); }

std::optional<double> eta_thermo_or_null(unsigned n, double q) {
  try {
    return to_double(eta_thermo<Extended>(engine(n, q)).eta_thermo);
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

std::vector<unsigned> geometric_grid(double lo, double hi, unsigned count) {
  std::vector<unsigned> out;
  for (unsigned i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    const auto n = static_cast<unsigned>(std::lround(lo * std::pow(hi / lo, t)));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

template <class T, class F>
std::vector<T> parallel_map(const std::vector<unsigned>& items, F f) {
  std::vector<T> out(items.size());
  std::atomic<std::size_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), items.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < items.size(); k = next++) out[k] = f(items[k]);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

struct SweepPoint {
  unsigned n = 0;
  unsigned m = 0;
  double q_target = 0.0;
  double q_hot = 0.0;
  std::optional<double> eta_protocol;
  std::optional<double> eta_thermo;         // at Q_H
  std::optional<double> eta_thermo_target;  // at Q_n
  std::optional<double> s_storage;
  std::optional<double> a_storage;
};

SweepPoint sweep_point(unsigned n, bool with_lift) {
  SweepPoint p;
  p.n = n;
  p.q_target = q_rule(n);
  auto config = protocol_config(n, std::nullopt, Mode::Auto, p.q_target);
  const auto o = apply_protocol(config);
  p.m = o.m;
  p.q_hot = o.heat_hot;
  p.eta_protocol = o.eta;
  p.eta_thermo_target = eta_thermo_or_null(n, p.q_target);
  if (o.m > 0 && o.heat_hot > 0.0) {
    p.eta_thermo = eta_thermo_or_null(n, o.heat_hot);
    if (with_lift && o.work != 0.0) {
      const auto wd = work_distribution(config);
      const auto lift = lift_report(o, wd, config);
      p.s_storage = lift.s_storage;
      p.a_storage = lift.a_storage;
    }
  }
  return p;
}

const std::vector<SweepPoint>& fig1_sweep() {
  static const std::vector<SweepPoint> points = parallel_map<SweepPoint>(
      geometric_grid(100, 100000, 25), [](unsigned n) { return sweep_point(n, true); });
  return points;
}

const std::vector<SweepPoint>& fig2_sweep() {
  static const std::vector<SweepPoint> points = parallel_map<SweepPoint>(
      geometric_grid(1000, 100000, 21), [](unsigned n) { return sweep_point(n, false); });
  return points;
}

// 100-point (n, m) grid: exact mode for n <= 20, blockwise above.
struct GridPoint {
  unsigned n;
  unsigned m;
  Mode mode;
};

std::vector<GridPoint> order_grid() {
  std::vector<GridPoint> out;
  for (unsigned n : {6u, 8u, 10u, 12u, 14u, 16u, 18u, 20u}) {
    for (unsigned m = 1; m <= 5; ++m) out.push_back({n, m, Mode::Exact});
  }
  for (unsigned n : {30u, 60u, 100u, 200u, 400u, 700u, 1000u, 2000u, 4000u, 8000u, 16000u, 32000u}) {
    for (unsigned m = 1; m <= 5; ++m) out.push_back({n, m, Mode::Blockwise});
  }
  return out;
}

const std::vector<ProtocolOutcome>& order_outcomes() {
  static const std::vector<ProtocolOutcome> outcomes = [] {
    const auto grid = order_grid();
    std::vector<unsigned> idx(grid.size());
    for (unsigned k = 0; k < idx.size(); ++k) idx[k] = k;
    return parallel_map<ProtocolOutcome>(idx, [&](unsigned k) {
      return apply_protocol(protocol_config(grid[k].n, grid[k].m, grid[k].mode));
    });
  }();
  return outcomes;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

using Criterion = std::function<bool(std::ostream&)>;

bool c1_d1(std::ostream& msg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto c = expansion_coeffs(qubit(), qubit(), kBh, kBl);
  const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  const double rel = std::abs(c.d1 - 14343.0) / 14343.0;
  msg << "d1=" << fmt(c.d1) << " rel.dev=" << fmt(rel) << " time=" << fmt(us) << "us";
  return rel <= 0.01 && us < 1000.0;
}

bool c2_carnot(std::ostream& msg) {
  const unsigned n = 10000;
  const double eta = eta_thermo<double>(engine(n, 1e-9 * n)).eta_thermo;
  msg << "eta_T=" << fmt(eta);
  return std::abs(eta - 0.5) <= 1e-6;
}

bool c3_oracle_sums(std::ostream& msg) {
  double worst = 0.0;
  for (unsigned n : {4u, 8u, 12u, 16u, 20u}) {
    const auto hot_ref = oracle::sorted_gibbs({1.0, -1.0}, kBh, n);
    const auto cold_ref = oracle::sorted_gibbs({1.0, -1.0}, kBl, n);
    const auto hot = build_sorted_spectrum<double>(BathSpec(qubit(), kBh, n));
    const auto cold = build_sorted_spectrum<double>(BathSpec(qubit(), kBl, n));
    for (unsigned m = 0; m <= 3 && m < n; ++m) {
      const double dx_ref = static_cast<double>(oracle::d_x(hot_ref, m, 2, true));
      const double dy_ref = static_cast<double>(oracle::d_y(cold_ref, m, 2));
      const double ex = std::abs(d_x_n(hot, m) - dx_ref) / std::max(std::abs(dx_ref), 1e-300);
      const double ey = std::abs(d_y_n(cold, m) - dy_ref) / std::max(std::abs(dy_ref), 1e-300);
      // m = 0 gives exact zeros on both sides.
      worst = std::max({worst, dx_ref == 0.0 ? std::abs(d_x_n(hot, m)) : ex,
                        dy_ref == 0.0 ? std::abs(d_y_n(cold, m)) : ey});
    }
  }
  msg << "max rel.err=" << fmt(worst);
  return worst <= 1e-12;
}

bool c4_kl_decomposition(std::ostream& msg) {
  bool ok = true;
  double worst_ratio = 0.0;
  for (unsigned n : {10u, 12u, 14u}) {
    for (unsigned m : {1u, 2u}) {
      const auto o = apply_protocol(protocol_config(n, m, Mode::Exact));
      const double gap = std::abs(o.kl_total - o.d_x - o.d_y);
      worst_ratio = std::max(worst_ratio, gap / o.kl_decomposition_bound);
      ok = ok && gap <= o.kl_decomposition_bound;
    }
  }
  msg << "max gap/bound=" << fmt(worst_ratio);
  return ok;
}

bool c5_total_order(std::ostream& msg) {
  const auto grid = order_grid();
  const auto& outcomes = order_outcomes();
  int checked = 0;
  int violations = 0;
  int no_heat = 0;
  int infeasible = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& o = outcomes[k];
    if (!o.eta || !(o.heat_hot > 0.0)) {
      ++no_heat;
      continue;
    }
    const auto eta_t = eta_thermo_or_null(grid[k].n, o.heat_hot);
    if (!eta_t) {
      ++infeasible;
      continue;
    }
    ++checked;
    if (*o.eta > *eta_t + 1e-12) ++violations;
  }
  msg << grid.size() << " grid points, " << checked << " compared, " << no_heat << " with Q_H <= 0, " << infeasible
      << " without a thermodynamic optimum, " << violations << " violations";
  return violations == 0 && infeasible == 0 && checked > 0;
}

bool c6_identity(std::ostream& msg) {
  const auto grid = order_grid();
  const auto& outcomes = order_outcomes();
  double worst = 0.0;
  int points = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k].mode != Mode::Exact) continue;
    const auto& o = outcomes[k];
    worst = std::max(worst, std::abs(kBl * o.work - (kBl - kBh) * o.heat_hot + o.kl_total));
    ++points;
  }
  msg << points << " exact points, max residual=" << fmt(worst);
  return worst <= 1e-10;
}

bool increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] > v[k - 1])) return false;
  }
  return true;
}

bool c7_figure1(std::ostream& msg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& sweep = fig1_sweep();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<double> ep;
  std::vector<double> et;
  int order_violations = 0;
  for (const auto& p : sweep) {
    if (!p.eta_protocol || !p.eta_thermo) continue;
    ep.push_back(*p.eta_protocol);
    et.push_back(*p.eta_thermo);
    if (*p.eta_protocol > *p.eta_thermo + 1e-12) ++order_violations;
  }
  const auto& last = sweep.back();
  const double gap_p = 0.5 - last.eta_protocol.value_or(0.0);
  const double gap_t = 0.5 - last.eta_thermo.value_or(0.0);
  const bool mono_p = increasing(ep);
  const bool mono_t = increasing(et);
  msg << ep.size() << "/" << sweep.size() << " points with m>0; eta_P increasing=" << (mono_p ? "yes" : "no")
      << " eta_T increasing=" << (mono_t ? "yes" : "no") << " order violations=" << order_violations
      << "; at n=1e5 eta_P=" << fmt(0.5 - gap_p) << " eta_T=" << fmt(0.5 - gap_t) << " time=" << fmt(secs) << "s";
  return mono_p && mono_t && order_violations == 0 && gap_p <= 2e-3 && gap_t <= 2e-3 && secs < 600.0;
}

bool c8_figure2(std::ostream& msg) {
  const auto c = expansion_coeffs(qubit(), qubit(), kBh, kBl);
  std::vector<double> values;
  for (const auto& p : fig2_sweep()) {
    if (p.n < 10000 || !p.eta_protocol || !p.eta_thermo) continue;
    const double q = p.q_hot;
    const double n = p.n;
    values.push_back((*p.eta_thermo - *p.eta_protocol - c.d1 * q / (n * n)) * std::pow(n / q, 3));
  }
  if (values.empty()) return false;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const bool negative = *hi < 0.0;
  const double ratio = negative ? *lo / *hi : INFINITY;
  msg << values.size() << " points in [1e4, 1e5], range [" << fmt(*lo) << ", " << fmt(*hi) << "] max/min=" << fmt(ratio);
  return negative && ratio <= 2.0 && std::abs(*hi) >= 100.0 && std::abs(*lo) <= 10000.0;
}

bool c9_heat_targeting(std::ostream& msg) {
  const double var = moments<double>(qubit(), kBh).variance;
  std::vector<double> residual;
  for (unsigned n : {1000u, 10000u, 100000u}) {
    const double qn = q_rule(n);
    const auto o = apply_protocol(protocol_config(n, std::nullopt, Mode::Auto, qn));
    // Heat that the floored m would target: beta_H q + q^2/(2 n var) = m log 2.
    const double a = 1.0 / (2.0 * n * var);
    const double q_m = (-kBh + std::sqrt(kBh * kBh + 4.0 * a * o.m * std::log(2.0))) / (2.0 * a);
    const double total = std::abs(o.heat_hot - qn) / qn;
    const double quant = std::abs(q_m - qn) / qn;
    residual.push_back(std::abs(o.heat_hot - q_m) / q_m);
    msg << "n=" << n << " m=" << o.m << " total=" << fmt(total) << " floor=" << fmt(quant)
        << " residual=" << fmt(residual.back()) << "; ";
  }
  return residual[1] < residual[0] && residual[2] < residual[1];
}

bool c10_entropy_deltas(std::ostream& msg) {
  const unsigned n = 400;
  bool ok = true;
  const unsigned m_n = resolve_m(protocol_config(n, std::nullopt, Mode::Auto, q_rule(n)));
  msg << "m_n=" << m_n << "; ";
  for (unsigned m : {1u, 2u, 3u}) {
    const auto o = apply_protocol(protocol_config(n, m, Mode::Auto));
    const double hot = std::abs(o.delta_s_hot + m * std::log(2.0));
    const double cold = std::abs(o.delta_s_cold - m * std::log(2.0));
    msg << "m=" << m << " hot " << fmt(hot) << "<=" << fmt(o.ds_hot_bound) << " cold " << fmt(cold)
        << "<=" << fmt(o.ds_cold_bound) << "; ";
    ok = ok && hot <= o.ds_hot_bound + 1e-12 && cold <= o.ds_cold_bound + 1e-12;
  }
  return ok;
}

bool c11_storage(std::ostream& msg) {
  bool cap_ok = true;
  int tested = 0;
  for (unsigned n : {6u, 10u, 14u}) {
    for (unsigned m = 1; m <= 3; ++m) {
      const auto wd = work_distribution(protocol_config(n, m, Mode::Exact));
      cap_ok = cap_ok && wd.entropy <= storage_entropy_cap(n, 2);
      ++tested;
    }
  }
  std::vector<std::pair<unsigned, double>> scaled;
  for (const auto& p : fig1_sweep()) {
    if (!p.s_storage) continue;
    cap_ok = cap_ok && *p.s_storage <= storage_entropy_cap(p.n, 2);
    ++tested;
    if (p.a_storage) scaled.emplace_back(p.n, *p.a_storage * p.q_target / std::log(static_cast<double>(p.n)));
  }
  double at_start = NAN;
  double upper_max = 0.0;
  double overall = 0.0;
  for (const auto& [n, v] : scaled) {
    overall = std::max(overall, v);
    if (n >= 10000) {
      if (std::isnan(at_start)) at_start = v;
      upper_max = std::max(upper_max, v);
    }
  }
  msg << tested << " storage entropies within cap=" << (cap_ok ? "yes" : "no") << "; A_EX Q_n/log n max="
      << fmt(overall) << ", over [1e4, 1e5] max=" << fmt(upper_max) << " (start " << fmt(at_start) << ")";
  return cap_ok && !scaled.empty() && std::isfinite(overall) && upper_max <= 2.0 * at_start;
}

bool c12_second_law(std::ostream& msg) {
  double worst = -INFINITY;
  int runs = 0;
  for (unsigned n = 2; n <= 14; ++n) {
    for (unsigned m = 1; m <= n / 2; ++m) {
      worst = std::max(worst, apply_protocol(protocol_config(n, m, Mode::Exact, 1.0, 0.3, 0.3)).work);
      ++runs;
    }
  }
  msg << runs << " runs, max W=" << fmt(worst);
  return worst <= 1e-12;
}

bool c13_expansions(std::ostream& msg) {
  const auto c = expansion_coeffs(qubit(), qubit(), kBh, kBl);
  std::vector<double> scaled;
  for (unsigned n : geometric_grid(10000, 100000, 5)) {
    const double q = q_rule(n);
    const double exact = *eta_thermo_or_null(n, q);
    scaled.push_back(std::abs(exact - eta_thermo_expansion(c, kBh, kBl, q, n, 2)) * std::pow(n / q, 3));
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  const bool thermo_ok = *hi / *lo <= 1.5;
  msg << "thermo remainder*n^3/Q^3 in [" << fmt(*lo) << ", " << fmt(*hi) << "]; ";

  const auto mo = moments<double>(qubit(), kBh);
  const auto lattice = lattice_classify(qubit());
  const std::vector<unsigned> ns{100, 300, 900, 2700};
  std::vector<SortedSpectrum<double>> specs;
  for (unsigned n : ns) specs.push_back(build_sorted_spectrum<double>(BathSpec(qubit(), kBh, n)));
  bool dx_ok = true;
  for (unsigned m = 1; m <= 4; ++m) {
    msg << "m=" << m << " rel.err";
    double prev = NAN;
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const double exact = d_x_n(specs[k], m);
      const double rel = std::abs(dx_asymptotic(mo, m, ns[k], 2, lattice) - exact) / exact;
      msg << ' ' << fmt(rel);
      if (!std::isnan(prev) && rel > 0.5 * prev) dx_ok = false;
      prev = rel;
    }
    msg << "; ";
  }
  return thermo_ok && dx_ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria = {
      {"1 d1 value", c1_d1},
      {"2 Carnot limit", c2_carnot},
      {"3 D_X/D_Y oracle equivalence", c3_oracle_sums},
      {"4 KL decomposition", c4_kl_decomposition},
      {"5 total order", c5_total_order},
      {"6 efficiency identity", c6_identity},
      {"7 figure 1 sweep", c7_figure1},
      {"8 figure 2 scaling", c8_figure2},
      {"9 heat targeting", c9_heat_targeting},
      {"10 entropy deltas", c10_entropy_deltas},
      {"11 work storage entropy", c11_storage},
      {"12 single-temperature second law", c12_second_law},
      {"13 expansion consistency", c13_expansions},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    std::ostringstream msg;
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = run(msg);
    } catch (const std::exception& e) {
      msg << "error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.2fs): %s\n", ok ? "PASS" : "FAIL", name.c_str(), secs, msg.str().c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

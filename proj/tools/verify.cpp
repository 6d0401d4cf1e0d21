#include <cmath>
#include <functional>
#include <sstream>

#include "cli.hpp"
#include "fbe/asymptotics.hpp"
#include "fbe/lift.hpp"

namespace fbe::cli {

namespace {

constexpr double kBetaHot = 1.0 / 30.0;
constexpr double kBetaCold = 1.0 / 15.0;

ProtocolConfig make_config(unsigned n, unsigned m, Mode mode, double beta_hot = kBetaHot,
                           double beta_cold = kBetaCold, double q = 1.0) {
  const auto site = SiteSpectrum::qubit();
  ProtocolConfig c{EngineConfig(BathSpec(site, beta_hot, n), BathSpec(site, beta_cold, n), q)};
  c.m = m;
  c.mode = mode;
  return c;
}

struct Check {
  std::string name;
  std::function<bool(std::ostream&)> run;
};

std::vector<Check> checks() {
  std::vector<Check> out;
  out.push_back({"carnot_limit", [](std::ostream& msg) {
    const auto site = SiteSpectrum::qubit();
    const unsigned n = 10000;
    const EngineConfig e(BathSpec(site, kBetaHot, n), BathSpec(site, kBetaCold, n), 1e-9 * n);
    const double eta = eta_thermo<double>(e).eta_thermo;
    msg << "eta_T=" << eta;
    return std::abs(eta - 0.5) <= 1e-6;
  }});
  out.push_back({"thermo_relent_identity", [](std::ostream& msg) {
    const auto site = SiteSpectrum::qubit();
    double worst = 0.0;
    for (unsigned n : {1000u, 10000u, 100000u}) {
      const EngineConfig e(BathSpec(site, kBetaHot, n), BathSpec(site, kBetaCold, n),
                           0.3 * std::pow(n, 2.0 / 3.0));
      worst = std::max(worst, std::abs(eta_thermo<double>(e).eta_thermo - eta_thermo_via_relent<double>(e)));
    }
    msg << "max diff=" << worst;
    return worst <= 1e-10;
  }});
  out.push_back({"exact_matches_blockwise", [](std::ostream& msg) {
    double worst = 0.0;
    for (unsigned m : {1u, 2u, 3u}) {
      const auto a = apply_protocol(make_config(12, m, Mode::Exact));
      const auto b = apply_protocol(make_config(12, m, Mode::Blockwise));
      for (auto [x, y] : {std::pair{a.work, b.work}, {a.heat_hot, b.heat_hot}, {a.kl_total, b.kl_total},
                          {a.delta_s_hot, b.delta_s_hot}, {a.delta_s_cold, b.delta_s_cold}}) {
        worst = std::max(worst, std::abs(x - y));
      }
    }
    msg << "max diff=" << worst;
    return worst <= 1e-10;
  }});
  out.push_back({"efficiency_identity", [](std::ostream& msg) {
    double worst = 0.0;
    for (unsigned n : {10u, 12u, 14u}) {
      for (unsigned m = 1; m <= 3; ++m) {
        const auto o = apply_protocol(make_config(n, m, Mode::Exact));
        worst = std::max(worst, std::abs(kBetaCold * o.work - (kBetaCold - kBetaHot) * o.heat_hot + o.kl_total));
      }
    }
    msg << "max residual=" << worst;
    return worst <= 1e-10;
  }});
  out.push_back({"kl_decomposition", [](std::ostream& msg) {
    bool ok = true;
    for (unsigned n : {10u, 12u, 14u}) {
      for (unsigned m : {1u, 2u}) {
        const auto o = apply_protocol(make_config(n, m, Mode::Exact));
        const double gap = std::abs(o.kl_total - o.d_x - o.d_y);
        if (gap > o.kl_decomposition_bound) {
          ok = false;
          msg << "n=" << n << " m=" << m << " gap=" << gap << " > " << o.kl_decomposition_bound << ' ';
        }
      }
    }
    return ok;
  }});
  out.push_back({"residual_bounds", [](std::ostream& msg) {
    bool ok = true;
    for (unsigned m : {1u, 2u, 3u}) {
      const auto o = apply_protocol(make_config(14, m, Mode::Exact));
      const double log2 = std::log(2.0);
      const bool pass = o.l1_residual <= o.l1_bound.total + 1e-12 &&
                        std::abs(o.delta_s_hot + m * log2) <= o.ds_hot_bound + 1e-12 &&
                        std::abs(o.delta_s_cold - m * log2) <= o.ds_cold_bound + 1e-12;
      if (!pass) {
        ok = false;
        msg << "m=" << m << " fails ";
      }
    }
    return ok;
  }});
  out.push_back({"total_order", [](std::ostream& msg) {
    const auto site = SiteSpectrum::qubit();
    int violations = 0;
    int checked = 0;
    for (unsigned n : {12u, 14u, 200u, 1000u, 3000u}) {
      for (unsigned m = 1; m <= 4; ++m) {
        const auto o = apply_protocol(make_config(n, m, Mode::Auto));
        if (!o.eta || !(o.heat_hot > 0.0)) continue;
        const EngineConfig e(BathSpec(site, kBetaHot, n), BathSpec(site, kBetaCold, n), o.heat_hot);
        double eta_t = 0.0;
        try {
          eta_t = eta_thermo<double>(e).eta_thermo;
        } catch (const std::exception&) {
          continue;
        }
        ++checked;
        if (*o.eta > eta_t + 1e-12) ++violations;
      }
    }
    msg << checked << " points, " << violations << " violations";
    return violations == 0 && checked > 0;
  }});
  out.push_back({"second_law_single_temperature", [](std::ostream& msg) {
    double worst = -INFINITY;
    for (unsigned n = 4; n <= 12; n += 2) {
      for (unsigned m = 1; m <= n / 2; ++m) {
        worst = std::max(worst, apply_protocol(make_config(n, m, Mode::Exact, 0.4, 0.4)).work);
      }
    }
    msg << "max W=" << worst;
    return worst <= 1e-12;
  }});
  out.push_back({"swap_is_permutation", [](std::ostream& msg) {
    for (unsigned n = 1; n <= 5; ++n) {
      for (unsigned m = 0; m < n; ++m) {
        if (!swap_is_permutation(n, 2, m)) {
          msg << "n=" << n << " m=" << m;
          return false;
        }
      }
    }
    return swap_is_permutation(3, 3, 1);
  }});
  out.push_back({"work_storage", [](std::ostream& msg) {
    bool ok = true;
    for (unsigned m : {1u, 2u}) {
      const auto config = make_config(12, m, Mode::Exact);
      const auto o = apply_protocol(config);
      const auto wd = work_distribution(config);
      const auto lift = lift_report(o, wd, config);
      msg << "m=" << m << " S=" << lift.s_storage << " cap=" << lift.storage_cap << ' ';
      ok = ok && lift.conservation_ok && lift.s_storage <= lift.storage_cap;
    }
    return ok;
  }});
  out.push_back({"final_states_normalized", [](std::ostream& msg) {
    double worst = 0.0;
    for (Mode mode : {Mode::Exact, Mode::Blockwise}) {
      const auto o = apply_protocol(make_config(14, 2, mode));
      worst = std::max({worst, std::abs(o.final_mass_hot - 1.0), std::abs(o.final_mass_cold - 1.0)});
    }
    msg << "max mass error=" << worst;
    return worst <= 1e-12;
  }});
  return out;
}

}  // namespace

bool run_verify(std::ostream& out) {
  bool all = true;
  for (const auto& check : checks()) {
    std::ostringstream msg;
    bool ok = false;
    try {
      ok = check.run(msg);
    } catch (const std::exception& e) {
      msg << "error: " << e.what();
    }
    all = all && ok;
    out << (ok ? "PASS " : "FAIL ") << check.name << ": " << msg.str() << '\n';
  }
  return all;
}

}  // namespace fbe::cli

#include <charconv>
#include <cmath>

#include "cli.hpp"
#include "fbe/asymptotics.hpp"
#include "fbe/error.hpp"
#include "fbe/lift.hpp"

namespace fbe::cli {

const std::vector<std::string> kCsvHeader = {
    "n",          "d",        "beta_hot",    "beta_cold",  "q_target",    "m",         "q_hot",
    "work",       "eta_protocol", "eta_thermo", "eta_carnot", "eta_exp1",  "eta_exp2",  "d_x",
    "d_y",        "kl_total", "l1_residual", "ds_hot",     "ds_cold",     "s_storage", "a_hot",
    "a_cold",     "a_storage", "mode",       "precision"};

const std::vector<std::string> kScalingHeader = {"gap", "d1_term", "cubic_constant", "cubic_constant_fit"};

std::vector<unsigned> n_values(const Request& req) {
  if (req.n) return {*req.n};
  const double lo = req.n_grid[0];
  const double hi = req.n_grid[1];
  const auto count = static_cast<unsigned>(req.n_grid[2]);
  std::vector<unsigned> out;
  for (unsigned i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    const auto n = static_cast<unsigned>(std::lround(lo * std::pow(hi / lo, t)));
    if (out.empty() || out.back() != n) out.push_back(n);
  }
  return out;
}

double q_for(const Request& req, unsigned n) {
  if (req.q) return *req.q;
  return req.q_rule[0] * std::pow(static_cast<double>(n), req.q_rule[1]);
}

SiteSpectrum site_of(const Request& req) {
  return req.levels.empty() ? SiteSpectrum::qubit() : SiteSpectrum(req.levels);
}

namespace {

Record nullable(const std::optional<double>& v) { return v ? Record(*v) : Record(nullptr); }

Precision precision_for(const Request& req, unsigned n) {
  if (req.precision) return *req.precision;
  return n >= kExtendedFrom ? Precision::Extended : Precision::Double;
}

/// eta_T and friends at heat q; empty when q is not positive or infeasible.
struct ThermoPoint {
  std::optional<double> eta, beta_prime_hot, beta_prime_cold, rel_entropy, via_relent;
  std::string error;
};

ThermoPoint thermo_at(const BathSpec& hot, const BathSpec& cold, double q, Precision precision) {
  ThermoPoint out;
  if (!(q > 0.0)) {
    out.error = "heat is not positive";
    return out;
  }
  try {
    const EngineConfig engine(hot, cold, q);
    auto fill = [&](const auto& sol, auto via) {
      out.eta = to_double(sol.eta_thermo);
      out.beta_prime_hot = to_double(sol.beta_prime_hot);
      out.beta_prime_cold = to_double(sol.beta_prime_cold);
      out.rel_entropy = to_double(sol.rel_entropy_total);
      out.via_relent = to_double(via);
    };
    if (precision == Precision::Extended) {
      fill(eta_thermo<Extended>(engine), eta_thermo_via_relent<Extended>(engine));
    } else {
      fill(eta_thermo<double>(engine), eta_thermo_via_relent<double>(engine));
    }
  } catch (const NumericalError& e) {
    out.error = e.what();
  } catch (const ValidationError& e) {
    out.error = e.what();
  }
  return out;
}

Record base_record(const Request& req, unsigned n, const SiteSpectrum& site, double q) {
  Record r;
  r["n"] = n;
  r["d"] = site.d();
  r["beta_hot"] = req.beta_hot;
  r["beta_cold"] = req.beta_cold;
  r["q_target"] = q;
  return r;
}

std::optional<double> expansion_at(const ExpansionCoeffs& c, const Request& req, double q, unsigned n,
                                   int order) {
  if (!(q > 0.0)) return std::nullopt;
  return eta_thermo_expansion(c, req.beta_hot, req.beta_cold, q, n, order);
}

}  // namespace

Record thermo_record(const Request& req, unsigned n) {
  const SiteSpectrum site = site_of(req);
  const double q = q_for(req, n);
  const BathSpec hot(site, req.beta_hot, n);
  const BathSpec cold(site, req.beta_cold, n);
  const EngineConfig engine(hot, cold, q);
  const Precision precision = precision_for(req, n);
  const auto t = thermo_at(hot, cold, q, precision);
  const auto coeffs = expansion_coeffs(site, site, req.beta_hot, req.beta_cold);
  Record r = base_record(req, n, site, q);
  r["eta_thermo"] = nullable(t.eta);
  r["eta_carnot"] = engine.carnot();
  r["eta_exp1"] = nullable(expansion_at(coeffs, req, q, n, 1));
  r["eta_exp2"] = nullable(expansion_at(coeffs, req, q, n, 2));
  r["precision"] = std::string(to_string(precision));
  r["beta_prime_hot"] = nullable(t.beta_prime_hot);
  r["beta_prime_cold"] = nullable(t.beta_prime_cold);
  r["rel_entropy_total"] = nullable(t.rel_entropy);
  r["eta_thermo_via_relent"] = nullable(t.via_relent);
  if (!t.error.empty()) r["thermo_error"] = t.error;
  return r;
}

Record expansion_record(const Request& req, unsigned n) {
  const SiteSpectrum site = site_of(req);
  const double q = q_for(req, n);
  const auto hot_m = moments<double>(site, req.beta_hot);
  const auto cold_m = moments<double>(site, req.beta_cold);
  const auto coeffs = expansion_coeffs(hot_m, cold_m, req.beta_hot, req.beta_cold);
  const auto lattice = lattice_classify(site);
  Record r = base_record(req, n, site, q);
  r["eta_carnot"] = 1.0 - req.beta_hot / req.beta_cold;
  r["eta_exp1"] = nullable(expansion_at(coeffs, req, q, n, 1));
  r["eta_exp2"] = nullable(expansion_at(coeffs, req, q, n, 2));
  r["c1"] = coeffs.c1;
  r["c2"] = coeffs.c2;
  r["d1"] = coeffs.d1;
  r["lattice"] = lattice.kind == LatticeKind::Lattice;
  if (lattice.kind == LatticeKind::Lattice) r["lattice_span"] = lattice.span;
  if (q > 0.0) {
    r["eta_protocol_exp"] = eta_protocol_expansion(coeffs, req.beta_hot, req.beta_cold, q, n, lattice);
    r["m_real"] = block_size_real(req.beta_hot, q, n, hot_m.variance, site.d());
    try {
      const unsigned m = block_size_m(req.beta_hot, q, n, hot_m.variance, site.d());
      r["m"] = m;
      r["d_x_asymptotic"] = dx_asymptotic(hot_m, m, n, site.d(), lattice);
      r["d_x_outside_regime"] = dx_outside_regime(m, n, site.d());
    } catch (const ValidationError&) {
      r["m"] = nullptr;
    }
  }
  return r;
}

Record protocol_record(const Request& req, unsigned n) {
  const SiteSpectrum site = site_of(req);
  const double q = q_for(req, n);
  const BathSpec hot(site, req.beta_hot, n);
  const BathSpec cold(site, req.beta_cold, n);
  ProtocolConfig config{EngineConfig(hot, cold, q)};
  config.m = req.m;
  config.mode = req.mode;
  config.precision = precision_for(req, n);
  const ProtocolOutcome o = apply_protocol(config);
  const Precision precision = o.precision_used;
  const auto coeffs = expansion_coeffs(site, site, req.beta_hot, req.beta_cold);

  // Thermodynamic columns refer to the heat the protocol actually drew.
  const auto at_heat = thermo_at(hot, cold, o.heat_hot, precision);
  const auto at_target = thermo_at(hot, cold, q, precision);

  Record r = base_record(req, n, site, q);
  r["m"] = o.m;
  r["q_hot"] = o.heat_hot;
  r["work"] = o.work;
  r["eta_protocol"] = nullable(o.eta);
  r["eta_thermo"] = nullable(at_heat.eta);
  r["eta_carnot"] = config.engine.carnot();
  r["eta_exp1"] = nullable(expansion_at(coeffs, req, o.heat_hot, n, 1));
  r["eta_exp2"] = nullable(expansion_at(coeffs, req, o.heat_hot, n, 2));
  r["d_x"] = o.d_x;
  r["d_y"] = o.d_y;
  r["kl_total"] = o.kl_total;
  r["l1_residual"] = o.l1_residual;
  r["ds_hot"] = o.delta_s_hot;
  r["ds_cold"] = o.delta_s_cold;
  r["s_storage"] = nullptr;
  r["a_hot"] = nullptr;
  r["a_cold"] = nullptr;
  r["a_storage"] = nullptr;
  if (o.m > 0 && o.heat_hot != 0.0 && o.work != 0.0) {
    const auto wd = work_distribution(config);
    const auto lift = lift_report(o, wd, config);
    r["s_storage"] = lift.s_storage;
    r["a_hot"] = lift.a_hot;
    r["a_cold"] = lift.a_cold;
    r["a_storage"] = lift.a_storage;
    r["storage_cap"] = lift.storage_cap;
    r["work_mean_residual"] = lift.conservation_residual;
    r["work_dist_exact"] = wd.exact;
  }
  r["mode"] = std::string(to_string(o.mode_used));
  r["precision"] = std::string(to_string(precision));

  r["eta_thermo_target"] = nullable(at_target.eta);
  r["heat_cold_released"] = o.heat_cold_released;
  r["d_x_variant"] = std::string(to_string(o.dx_variant_used));
  r["d_x_other"] = o.d_x_other;
  r["kl_decomposition_bound"] = o.kl_decomposition_bound;
  r["l1_bound"] = o.l1_bound.total;
  r["tail_mass"] = o.tail_mass;
  r["ds_hot_bound"] = o.ds_hot_bound;
  r["ds_cold_bound"] = o.ds_cold_bound;
  r["identity_residual"] =
      req.beta_cold * o.work - (req.beta_cold - req.beta_hot) * o.heat_hot + o.kl_total;
  r["q_hot_lemma"] = o.q_hot_lemma;
  r["eta_lemma"] = nullable(o.eta_lemma);
  r["size_condition_ok"] = o.size_condition.ok;
  r["size_condition_limit"] = o.size_condition.limit;
  r["c1"] = coeffs.c1;
  r["c2"] = coeffs.c2;
  r["d1"] = coeffs.d1;
  if (at_heat.beta_prime_hot) {
    r["beta_prime_hot"] = *at_heat.beta_prime_hot;
    r["beta_prime_cold"] = *at_heat.beta_prime_cold;
    r["divergence_to_gibbs"] =
        divergence_to_gibbs(o, config.engine, *at_heat.beta_prime_hot, *at_heat.beta_prime_cold);
  }
  if (!at_heat.error.empty()) r["thermo_error"] = at_heat.error;
  return r;
}

void add_scaling_columns(std::vector<Record>& records) {
  double num = 0.0;
  double den = 0.0;
  for (auto& r : records) {
    r["gap"] = nullptr;
    r["d1_term"] = nullptr;
    r["cubic_constant"] = nullptr;
    if (r["eta_thermo"].is_null() || r["eta_protocol"].is_null()) continue;
    const double n = r["n"].get<double>();
    const double q = r["q_hot"].get<double>();
    const double gap = r["eta_thermo"].get<double>() - r["eta_protocol"].get<double>();
    const double d1_term = r["d1"].get<double>() * q / (n * n);
    const double x = std::pow(q / n, 3);
    r["gap"] = gap;
    r["d1_term"] = d1_term;
    r["cubic_constant"] = (gap - d1_term) / x;
    num += (gap - d1_term) * x;
    den += x * x;
  }
  for (auto& r : records) r["cubic_constant_fit"] = den > 0.0 ? Record(num / den) : Record(nullptr);
}

namespace {

std::string format_field(const Record& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
  return std::string(buf, res.ptr);
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<Record>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      out << (i ? "," : "");
      if (row.contains(header[i])) out << format_field(row[header[i]]);
    }
    out << '\n';
  }
}

void write_json_lines(std::ostream& out, const std::vector<Record>& rows) {
  for (const auto& row : rows) out << row.dump() << '\n';
}

}  // namespace fbe::cli

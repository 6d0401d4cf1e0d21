#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <CLI11.hpp>

#include "cli.hpp"
#include "fbe/error.hpp"
#include "fbe/lift.hpp"

using namespace fbe;
using namespace fbe::cli;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

/// Evaluates one record per n on a small pool; output order follows the input.
std::vector<Record> evaluate(const std::vector<unsigned>& ns, unsigned threads,
                             const std::function<Record(unsigned)>& point) {
  std::vector<Record> out(ns.size());
  std::vector<std::exception_ptr> errors(ns.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ns.size(); i = next++) {
      try {
        out[i] = point(ns[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ns.size())));
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void apply_preset(Request& req) {
  if (req.preset.empty()) return;
  req.levels.clear();
  req.beta_hot = 1.0 / 30.0;
  req.beta_cold = 1.0 / 15.0;
  if (!req.n && req.n_grid.empty()) req.n_grid = {100.0, 100000.0, 25.0};
  if (!req.q && req.q_rule.empty()) req.q_rule = {0.3, 2.0 / 3.0};
}

void validate(Request& req) {
  if (req.n && !req.n_grid.empty()) throw ValidationError("--n and --n-grid are mutually exclusive");
  if (req.q && !req.q_rule.empty()) throw ValidationError("--q and --q-rule are mutually exclusive");
  if (req.command == "verify") return;
  if (!req.n && req.n_grid.empty()) throw ValidationError("one of --n or --n-grid is required");
  if (!req.q && req.q_rule.empty()) req.q_rule = {0.3, 2.0 / 3.0};
  if (!req.n_grid.empty()) {
    if (req.n_grid.size() != 3) throw ValidationError("--n-grid takes lo,hi,count");
    if (!(req.n_grid[0] >= 1.0 && req.n_grid[1] >= req.n_grid[0] && req.n_grid[2] >= 1.0)) {
      throw ValidationError("--n-grid needs 1 <= lo <= hi and count >= 1");
    }
  }
  if (!req.q_rule.empty() && req.q_rule.size() != 2) throw ValidationError("--q-rule takes a,b");
  if (req.output != "csv" && req.output != "json") throw ValidationError("--output is csv or json");
  if (!req.preset.empty() && req.command != "sweep") throw ValidationError("--preset applies to sweep");
  if (req.preset == "fig2" && !req.n && req.n_grid.size() == 3 && req.n_grid[0] == 100.0) {
    req.n_grid = {1000.0, 100000.0, 21.0};
  }
}

void emit(const Request& req, const std::vector<std::string>& header, const std::vector<Record>& rows) {
  std::ofstream file;
  if (!req.out_path.empty()) {
    file.open(req.out_path);
    if (!file) throw ValidationError("cannot open " + req.out_path);
  }
  std::ostream& out = req.out_path.empty() ? std::cout : file;
  if (req.output == "json") {
    write_json_lines(out, rows);
  } else {
    write_csv(out, header, rows);
  }
}

void emit_work_distribution(const Request& req, unsigned n) {
  const SiteSpectrum site = site_of(req);
  const double q = q_for(req, n);
  ProtocolConfig config{EngineConfig(BathSpec(site, req.beta_hot, n), BathSpec(site, req.beta_cold, n), q)};
  config.m = req.m;
  config.mode = req.mode;
  config.precision = req.precision;
  const auto wd = work_distribution(config);
  std::vector<Record> rows;
  if (req.output == "json") {
    Record r;
    r["n"] = n;
    r["m"] = resolve_m(config);
    r["q_target"] = q;
    r["exact"] = wd.exact;
    r["mean"] = wd.mean;
    r["entropy"] = wd.entropy;
    r["mass_deficit"] = wd.mass_deficit;
    r["pruned_mass"] = wd.pruned_mass;
    r["values"] = wd.support;
    r["probabilities"] = wd.probs;
    rows.push_back(std::move(r));
  } else {
    for (std::size_t i = 0; i < wd.support.size(); ++i) {
      Record r;
      r["value"] = wd.support[i];
      r["probability"] = wd.probs[i];
      rows.push_back(std::move(r));
    }
  }
  emit(req, {"value", "probability"}, rows);
}

int run(Request& req) {
  apply_preset(req);
  validate(req);
  if (req.command == "verify") return run_verify(std::cout) ? 0 : 1;
  const auto ns = n_values(req);
  if (req.command == "work-dist") {
    if (ns.size() != 1) throw ValidationError("work-dist takes a single --n");
    emit_work_distribution(req, ns.front());
    return 0;
  }
  static const std::map<std::string, Record (*)(const Request&, unsigned)> kPoint = {
      {"thermo", thermo_record}, {"expansion", expansion_record},
      {"protocol", protocol_record}, {"sweep", protocol_record}};
  const auto point = kPoint.at(req.command);
  auto rows = evaluate(ns, req.threads, [&](unsigned n) { return point(req, n); });
  auto header = kCsvHeader;
  if (req.preset == "fig2") {
    add_scaling_columns(rows);
    header.insert(header.end(), kScalingHeader.begin(), kScalingHeader.end());
  }
  emit(req, header, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-bath heat engine efficiencies"};
  app.require_subcommand(1);
  Request req;
  std::string mode = "auto";
  std::string precision;
  std::string spectrum = "qubit";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--levels", req.levels, "site energy levels")->delimiter(',');
    sub->add_option("--spectrum", spectrum, "named spectrum")->check(CLI::IsMember({"qubit", "qubit±1"}));
    sub->add_option("--beta-hot", req.beta_hot, "hot inverse temperature");
    sub->add_option("--beta-cold", req.beta_cold, "cold inverse temperature");
    sub->add_option("--n", req.n, "particles per bath");
    sub->add_option("--n-grid", req.n_grid, "geometric grid lo,hi,count")->delimiter(',');
    sub->add_option("--q", req.q, "heat drawn from the hot bath");
    sub->add_option("--q-rule", req.q_rule, "Q = a n^b as a,b")->delimiter(',');
    sub->add_option("--m", req.m, "swap size (default from the heat)");
    sub->add_option("--mode", mode, "exact, blockwise or auto")
        ->check(CLI::IsMember({"exact", "blockwise", "auto"}));
    sub->add_option("--precision", precision, "double or extended")
        ->check(CLI::IsMember({"double", "extended"}));
    sub->add_option("--output", req.output, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", req.out_path, "output file (default stdout)");
    sub->add_option("--threads", req.threads, "worker threads")->check(CLI::PositiveNumber);
  };
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"thermo", "thermodynamic optimum"},
           {"protocol", "optimal sort/swap/unsort protocol"},
           {"expansion", "asymptotic coefficients and expansions"},
           {"work-dist", "distribution of the extracted work"},
           {"sweep", "grid of protocol points"}}) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (name == "sweep") {
      sub->add_option("--preset", req.preset, "fig1 or fig2")->check(CLI::IsMember({"fig1", "fig2"}));
    }
  }
  app.add_subcommand("verify", "run the invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  req.command = app.get_subcommands().front()->get_name();
  req.mode = mode == "exact" ? Mode::Exact : mode == "blockwise" ? Mode::Blockwise : Mode::Auto;
  if (!precision.empty()) req.precision = precision == "extended" ? Precision::Extended : Precision::Double;
  if (const char* env = std::getenv("FBE_THREADS")) {
    try {
      req.threads = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      std::cerr << "error: FBE_THREADS must be a positive integer\n";
      return kExitValidation;
    }
  }

  try {
    return run(req);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource error: out of memory\n";
    return kExitNumerical;
  }
}

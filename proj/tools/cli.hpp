#ifndef FBE_TOOLS_CLI_HPP
#define FBE_TOOLS_CLI_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbe/protocol.hpp"

namespace fbe::cli {

using Record = nlohmann::ordered_json;

struct Request {
  std::string command;
  std::string preset;
  std::vector<double> levels;  // empty: qubit
  double beta_hot = 1.0 / 30.0;
  double beta_cold = 1.0 / 15.0;
  std::optional<unsigned> n;
  std::vector<double> n_grid;  // lo, hi, count
  std::optional<double> q;
  std::vector<double> q_rule;  // a, b with Q = a n^b
  std::optional<unsigned> m;
  Mode mode = Mode::Auto;
  std::optional<Precision> precision;
  std::string output = "csv";
  std::string out_path;
  unsigned threads = 1;
};

/// Particle counts of the request in ascending order.
std::vector<unsigned> n_values(const Request& req);
double q_for(const Request& req, unsigned n);
SiteSpectrum site_of(const Request& req);

Record thermo_record(const Request& req, unsigned n);
Record expansion_record(const Request& req, unsigned n);
Record protocol_record(const Request& req, unsigned n);

/// Adds the gap columns of the scaling plot, with the least-squares constant
/// C in gap - d1 Q/n^2 = C Q^3/n^3 over all points.
void add_scaling_columns(std::vector<Record>& records);

extern const std::vector<std::string> kCsvHeader;
extern const std::vector<std::string> kScalingHeader;

void write_csv(std::ostream& out, const std::vector<std::string>& header, const std::vector<Record>& rows);
void write_json_lines(std::ostream& out, const std::vector<Record>& rows);

/// Runs every invariant check, one line per check; true iff all pass.
bool run_verify(std::ostream& out);

}  // namespace fbe::cli

#endif  // FBE_TOOLS_CLI_HPP

#ifndef FBE_LIFT_HPP
#define FBE_LIFT_HPP

#include <vector>

#include "fbe/protocol.hpp"

namespace fbe {

/// Distribution of the energy w handed to the work storage per trajectory.
struct WorkDistribution {
  std::vector<double> support;  // ascending, distinct
  std::vector<double> probs;
  double mean = 0.0;
  double entropy = 0.0;
  bool exact = true;          // false: hot and cold parts are convolved as independent
  double mass_deficit = 0.0;  // mass missing before normalization
  double pruned_mass = 0.0;   // mass dropped as negligible
};

struct LiftReport {
  double a_hot = 0.0;      // delta S_H / (-Q_H)
  double a_cold = 0.0;     // delta S_L / ((1 - eta) Q_H)
  double a_storage = 0.0;  // S(storage) / (eta Q_H)
  double s_storage = 0.0;
  double storage_cap = 0.0;  // 4 (d - 1) log(n + 1)
  double conservation_residual = 0.0;
  double conservation_tolerance = 0.0;
  bool conservation_ok = false;
  bool unital_ok = false;
};

template <class Scalar>
WorkDistribution work_distribution(const SortedSpectrum<Scalar>& hot, const SortedSpectrum<Scalar>& cold,
                                   unsigned m, Mode mode);

/// Builds both spectra and dispatches like apply_protocol.
WorkDistribution work_distribution(const ProtocolConfig& config);

double storage_entropy_cap(unsigned n, int d);

/// Throws ValidationError when Q_H = 0.
LiftReport lift_report(const ProtocolOutcome& outcome, const WorkDistribution& wd,
                       const ProtocolConfig& config);

/// Whether the digit swap permutes Z_{d^n} x Z_{d^n} (every image hit once).
bool swap_is_permutation(unsigned n, int d, unsigned m);

}  // namespace fbe

#endif  // FBE_LIFT_HPP

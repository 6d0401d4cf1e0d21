#ifndef FBE_BATH_HPP
#define FBE_BATH_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "fbe/numeric.hpp"
#include "fbe/position.hpp"
#include "fbe/step_function.hpp"

namespace fbe {

/// Single-particle energy levels of one bath species.
class SiteSpectrum {
 public:
  explicit SiteSpectrum(std::vector<double> levels);
  explicit SiteSpectrum(Eigen::VectorXd levels);

  /// Levels {+1, -1}.
  static SiteSpectrum qubit();

  int d() const { return static_cast<int>(levels_.size()); }
  const Eigen::VectorXd& levels() const { return levels_; }
  double level(int i) const { return levels_(i); }
  double min_level() const { return levels_.minCoeff(); }
  double max_level() const { return levels_.maxCoeff(); }
  double max_abs_level() const { return levels_.cwiseAbs().maxCoeff(); }

 private:
  void validate() const;
  Eigen::VectorXd levels_;
};

struct BathSpec {
  SiteSpectrum site;
  double beta = 0.0;  // beta = 0 means the uniform distribution
  unsigned n = 1;

  BathSpec(SiteSpectrum s, double b, unsigned count);
};

/// Per-site thermodynamic moments of a Gibbs distribution.
template <class Scalar>
struct MomentSet {
  Scalar log_partition;
  Scalar mean_energy;
  Scalar variance;
  Scalar skewness;  // third standardized central moment
  Scalar site_entropy;
  Scalar psi_prime;         // 1 / (beta^2 sigma^2)
  Scalar psi_double_prime;  // gamma / (beta^3 sigma^3)
};

/// Gibbs probabilities e^{-beta h} / Z.
template <class Scalar = double>
std::vector<Scalar> gibbs_site_probs(const SiteSpectrum& site, double beta);

/// Log-probabilities of the Gibbs distribution.
template <class Scalar = double>
std::vector<Scalar> gibbs_site_log_probs(const SiteSpectrum& site, double beta);

template <class Scalar = double>
Scalar log_partition(const SiteSpectrum& site, Scalar beta);

template <class Scalar = double>
Scalar mean_energy(const SiteSpectrum& site, Scalar beta);

template <class Scalar = double>
Scalar site_entropy(const SiteSpectrum& site, Scalar beta);

/// Throws ValidationError for a degenerate spectrum or beta < 0. The psi
/// entries are infinite at beta = 0.
template <class Scalar = double>
MomentSet<Scalar> moments(const SiteSpectrum& site, double beta);

/// n times the per-site Shannon entropy.
double entropy_of(const BathSpec& bath);

/// One occupation vector (k_1..k_d).
struct TypeClass {
  std::vector<unsigned> counts;
  BigInt multiplicity;
  double log_prob_per_state;
  double total_energy;
};

/// All type classes in enumeration order (small n only).
std::vector<TypeClass> enumerate_type_classes(const BathSpec& bath);

/// Number of compositions of n into d parts, as a double.
double composition_count(unsigned n, int d);

inline constexpr double kMaxCompositions = 1e7;

/// Type classes merged by equal probability.
template <class Scalar>
struct Block {
  Scalar log_prob;  // per state
  Scalar energy;    // total energy of each state (mean over members at beta = 0)
  Scalar log_mult;
};

/// The descending rearrangement of the n-particle Gibbs distribution.
template <class Scalar>
class SortedSpectrum {
 public:
  const BathSpec& bath() const { return bath_; }
  int d() const { return bath_.site.d(); }
  unsigned n() const { return bath_.n; }
  Scalar beta() const { return beta_; }
  Scalar log_partition_site() const { return log_z_; }
  mpfr_prec_t bits() const { return bits_; }

  std::size_t block_count() const { return blocks_.size(); }
  const Block<Scalar>& block(std::size_t b) const { return blocks_[b]; }
  const std::vector<Block<Scalar>>& blocks() const { return blocks_; }

  /// Exclusive start of block b; start(block_count()) = d^n.
  const Position& start(std::size_t b) const { return density_.start_or_size(b); }
  const Position& size() const { return density_.size(); }

  /// Exact cumulative counts (block_count()+1 entries) when d^n is small
  /// enough to keep them; empty otherwise.
  const std::vector<BigInt>& cum_counts() const { return cum_counts_; }

  /// The probability as a step function over the sorted index.
  const StepFunction<Scalar>& density() const { return density_; }

  std::size_t block_index_at(const Position& index) const { return density_.run_at(index); }
  Scalar log_prob_at(const Position& index) const;

  /// Mass of all indices >= index.
  Scalar tail_mass_from(const Position& index) const;

  Scalar entropy() const { return density_.entropy(); }
  Scalar mean_energy() const;
  Scalar max_log_prob() const { return blocks_.front().log_prob; }
  Scalar min_log_prob() const { return blocks_.back().log_prob; }

  template <class S>
  friend SortedSpectrum<S> build_sorted_spectrum(const BathSpec& bath);

 private:
  SortedSpectrum(BathSpec bath) : bath_(std::move(bath)) {}

  BathSpec bath_;
  Scalar beta_{0};
  Scalar log_z_{0};
  mpfr_prec_t bits_ = 64;
  std::vector<Block<Scalar>> blocks_;
  std::vector<BigInt> cum_counts_;
  StepFunction<Scalar> density_;
};

/// Throws ResourceError beyond kMaxCompositions type classes.
template <class Scalar>
SortedSpectrum<Scalar> build_sorted_spectrum(const BathSpec& bath);

/// log P^(index) for 0 <= index < d^n.
template <class Scalar>
Scalar sorted_value_at(const SortedSpectrum<Scalar>& spec, const BigInt& index);

/// Sum of all multiplicities, recomputed in exact arithmetic.
BigInt total_multiplicity(const BathSpec& bath);

}  // namespace fbe

#endif  // FBE_BATH_HPP

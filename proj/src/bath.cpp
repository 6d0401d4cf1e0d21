#include "fbe/bath.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "fbe/error.hpp"

namespace fbe {

SiteSpectrum::SiteSpectrum(std::vector<double> levels)
    : levels_(Eigen::Map<Eigen::VectorXd>(levels.data(), static_cast<Eigen::Index>(levels.size()))) {
  validate();
}

SiteSpectrum::SiteSpectrum(Eigen::VectorXd levels) : levels_(std::move(levels)) { validate(); }

SiteSpectrum SiteSpectrum::qubit() { return SiteSpectrum(std::vector<double>{1.0, -1.0}); }

void SiteSpectrum::validate() const {
  if (levels_.size() < 2) throw ValidationError("a site spectrum needs at least two levels");
  if (!levels_.allFinite()) throw ValidationError("site energy levels must be finite");
  if (levels_.maxCoeff() == levels_.minCoeff()) throw ValidationError("degenerate spectrum");
}

BathSpec::BathSpec(SiteSpectrum s, double b, unsigned count) : site(std::move(s)), beta(b), n(count) {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("inverse temperature must be >= 0");
  if (n < 1) throw ValidationError("particle count must be >= 1");
}

template <class Scalar>
Scalar log_partition(const SiteSpectrum& site, Scalar beta) {
  std::vector<Scalar> w(site.d());
  for (int i = 0; i < site.d(); ++i) w[i] = -beta * Scalar(site.level(i));
  return log_sum_exp<Scalar>(w);
}

template <class Scalar>
std::vector<Scalar> gibbs_site_log_probs(const SiteSpectrum& site, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("inverse temperature must be >= 0");
  const Scalar b(beta);
  const Scalar lz = log_partition<Scalar>(site, b);
  std::vector<Scalar> out(site.d());
  for (int i = 0; i < site.d(); ++i) out[i] = -b * Scalar(site.level(i)) - lz;
  return out;
}

template <class Scalar>
std::vector<Scalar> gibbs_site_probs(const SiteSpectrum& site, double beta) {
  std::vector<Scalar> out = gibbs_site_log_probs<Scalar>(site, beta);
  for (auto& x : out) x = sx::exp(x);
  return out;
}

namespace {

template <class Scalar>
std::vector<Scalar> probs_at(const SiteSpectrum& site, const Scalar& beta) {
  const Scalar lz = log_partition<Scalar>(site, beta);
  std::vector<Scalar> p(site.d());
  for (int i = 0; i < site.d(); ++i) p[i] = sx::exp(-beta * Scalar(site.level(i)) - lz);
  return p;
}

}  // namespace

template <class Scalar>
Scalar mean_energy(const SiteSpectrum& site, Scalar beta) {
  const auto p = probs_at(site, beta);
  CompensatedSum<Scalar> acc;
  for (int i = 0; i < site.d(); ++i) acc += p[i] * Scalar(site.level(i));
  return acc.value();
}

template <class Scalar>
Scalar site_entropy(const SiteSpectrum& site, Scalar beta) {
  // S = beta <h> + log Z
  const Scalar lz = log_partition<Scalar>(site, beta);
  CompensatedSum<Scalar> acc;
  for (int i = 0; i < site.d(); ++i) {
    const Scalar lp = -beta * Scalar(site.level(i)) - lz;
    acc += -sx::exp(lp) * lp;
  }
  return acc.value();
}

template <class Scalar>
MomentSet<Scalar> moments(const SiteSpectrum& site, double beta) {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("inverse temperature must be >= 0");
  const Scalar b(beta);
  const auto p = probs_at(site, b);
  MomentSet<Scalar> m{};
  m.log_partition = log_partition<Scalar>(site, b);
  m.mean_energy = mean_energy<Scalar>(site, b);
  CompensatedSum<Scalar> v2, v3;
  for (int i = 0; i < site.d(); ++i) {
    const Scalar dev = Scalar(site.level(i)) - m.mean_energy;
    v2 += p[i] * dev * dev;
    v3 += p[i] * dev * dev * dev;
  }
  m.variance = v2.value();
  if (!(m.variance > Scalar(0))) throw ValidationError("degenerate spectrum: zero energy variance");
  const Scalar sigma = sx::sqrt(m.variance);
  m.skewness = v3.value() / (m.variance * sigma);
  m.site_entropy = site_entropy<Scalar>(site, b);
  if (beta == 0.0) {
    m.psi_prime = infinity<Scalar>();
    m.psi_double_prime = quiet_nan<Scalar>();
  } else {
    m.psi_prime = Scalar(1) / (b * b * m.variance);
    m.psi_double_prime = m.skewness / (b * b * b * m.variance * sigma);
  }
  return m;
}

double entropy_of(const BathSpec& bath) {
  return static_cast<double>(bath.n) * site_entropy<double>(bath.site, bath.beta);
}

double composition_count(unsigned n, int d) {
  const double k = static_cast<double>(d - 1);
  return std::exp(std::lgamma(n + k + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n + 1.0));
}

namespace {

// Calls visit(counts) for every composition of n into d parts, in
// lexicographic order of (k_1, ..., k_d) descending in k_1.
template <class Visit>
void for_each_composition(unsigned n, int d, Visit&& visit) {
  std::vector<unsigned> k(d, 0);
  k[0] = n;
  while (true) {
    visit(k);
    // Move to the next composition: find the rightmost movable unit.
    int i = d - 2;
    while (i >= 0 && k[i] == 0) --i;
    if (i < 0) return;
    const unsigned tail = k[d - 1];
    k[d - 1] = 0;
    --k[i];
    k[i + 1] = tail + 1;
  }
}

void check_composition_cap(unsigned n, int d) {
  const double count = composition_count(n, d);
  if (count > kMaxCompositions) {
    throw ResourceError("type class count " + std::to_string(count) + " exceeds the cap of " +
                        std::to_string(kMaxCompositions));
  }
}

BigInt multinomial(const unsigned* k, int d, unsigned n) {
  BigInt out = 1;
  BigInt b;
  unsigned left = n;
  for (int i = 0; i < d - 1; ++i) {
    mpz_bin_uiui(b.get_mpz_t(), left, k[i]);
    out *= b;
    left -= k[i];
  }
  return out;
}

// Updates mult in place when next differs from prev by moving one particle;
// returns false otherwise.
bool step_multinomial(BigInt& mult, const unsigned* prev, const unsigned* next, int d) {
  int from = -1;
  int to = -1;
  for (int i = 0; i < d; ++i) {
    if (prev[i] == next[i]) continue;
    if (prev[i] == next[i] + 1 && from < 0) {
      from = i;
    } else if (prev[i] + 1 == next[i] && to < 0) {
      to = i;
    } else {
      return false;
    }
  }
  if (from < 0 || to < 0) return false;
  mpz_mul_ui(mult.get_mpz_t(), mult.get_mpz_t(), prev[from]);
  mpz_divexact_ui(mult.get_mpz_t(), mult.get_mpz_t(), next[to]);
  return true;
}

}  // namespace

std::vector<TypeClass> enumerate_type_classes(const BathSpec& bath) {
  const int d = bath.site.d();
  check_composition_cap(bath.n, d);
  const auto lp = gibbs_site_log_probs<double>(bath.site, bath.beta);
  std::vector<TypeClass> out;
  for_each_composition(bath.n, d, [&](const std::vector<unsigned>& k) {
    TypeClass tc;
    tc.counts = k;
    tc.multiplicity = multinomial(k.data(), d, bath.n);
    double logp = 0.0;
    double energy = 0.0;
    for (int i = 0; i < d; ++i) {
      logp += k[i] * lp[i];
      energy += k[i] * bath.site.level(i);
    }
    tc.log_prob_per_state = logp;
    tc.total_energy = energy;
    out.push_back(std::move(tc));
  });
  return out;
}

BigInt total_multiplicity(const BathSpec& bath) {
  const int d = bath.site.d();
  check_composition_cap(bath.n, d);
  BigInt total = 0;
  for_each_composition(bath.n, d, [&](const std::vector<unsigned>& k) {
    total += multinomial(k.data(), d, bath.n);
  });
  return total;
}

namespace {

constexpr double kExactCountBits = 4096.0;

}  // namespace

template <class Scalar>
SortedSpectrum<Scalar> build_sorted_spectrum(const BathSpec& bath) {
  const int d = bath.site.d();
  const unsigned n = bath.n;
  check_composition_cap(n, d);

  SortedSpectrum<Scalar> out(bath);
  out.beta_ = Scalar(bath.beta);
  out.log_z_ = log_partition<Scalar>(bath.site, out.beta_);
  out.bits_ = Position::bits_for(static_cast<unsigned long>(d), n);
  const Position size = Position::power(static_cast<unsigned long>(d), n, out.bits_);
  const bool keep_counts = n * std::log2(static_cast<double>(d)) <= kExactCountBits;
  const Scalar log_d = sx::log(Scalar(d));

  if (bath.beta == 0.0) {
    Scalar mean_level(0);
    for (int i = 0; i < d; ++i) mean_level += Scalar(bath.site.level(i));
    mean_level /= Scalar(d);
    const Scalar log_states = Scalar(n) * log_d;
    out.blocks_.push_back({-log_states, Scalar(n) * mean_level, log_states});
    if (keep_counts) {
      BigInt total;
      mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(d), n);
      out.cum_counts_ = {BigInt(0), total};
    }
    out.density_ = StepFunction<Scalar>(size, {Position(0UL, out.bits_)}, {-log_states});
    return out;
  }

  // Compositions with their energies, sorted by ascending energy (descending
  // probability since beta > 0).
  std::vector<unsigned> comps;
  std::vector<Scalar> energies;
  for_each_composition(n, d, [&](const std::vector<unsigned>& k) {
    Scalar e(0);
    for (int i = 0; i < d; ++i) e += Scalar(k[i]) * Scalar(bath.site.level(i));
    comps.insert(comps.end(), k.begin(), k.end());
    energies.push_back(e);
  });
  std::vector<std::size_t> order(energies.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });

  const Scalar tol = Scalar(64.0 * DBL_EPSILON * n * bath.site.max_abs_level());
  std::vector<Position> starts;
  std::vector<Scalar> log_values;
  BigInt cum = 0;
  BigInt mult = 0;
  BigInt block_mult = 0;
  const unsigned* prev = nullptr;
  std::size_t i = 0;
  while (i < order.size()) {
    const Scalar first_energy = energies[order[i]];
    block_mult = 0;
    std::size_t j = i;
    while (j < order.size() && energies[order[j]] - first_energy <= tol) {
      const unsigned* k = comps.data() + order[j] * d;
      if (prev == nullptr || !step_multinomial(mult, prev, k, d)) mult = multinomial(k, d, n);
      prev = k;
      block_mult += mult;
      ++j;
    }
    const Scalar energy = first_energy;
    const Scalar log_prob = -out.beta_ * energy - Scalar(n) * out.log_z_;
    const Scalar log_mult = Position(block_mult, 128).template log<Scalar>();
    Position start(cum, out.bits_);
    cum += block_mult;
    i = j;
    // Far in the improbable tail, starts can round together at capped
    // precision; such blocks join the previous run.
    if (!starts.empty() && (!(starts.back() < start) || !(start < size))) {
      out.blocks_.back().log_mult = log_add_exp(out.blocks_.back().log_mult, log_mult);
      continue;
    }
    if (keep_counts) out.cum_counts_.push_back(cum - block_mult);
    starts.push_back(std::move(start));
    log_values.push_back(log_prob);
    out.blocks_.push_back({log_prob, energy, log_mult});
  }
  if (keep_counts) out.cum_counts_.push_back(cum);
  out.density_ = StepFunction<Scalar>(size, std::move(starts), std::move(log_values));
  return out;
}

template <class Scalar>
Scalar SortedSpectrum<Scalar>::log_prob_at(const Position& index) const {
  return blocks_[density_.run_at(index)].log_prob;
}

template <class Scalar>
Scalar SortedSpectrum<Scalar>::tail_mass_from(const Position& index) const {
  if (!(index < size())) return Scalar(0);
  if (!index.is_positive()) return density_.total();
  const std::size_t b = density_.run_at(index);
  const Scalar head = sx::exp(blocks_[b].log_prob + (start(b + 1) - index).template log<Scalar>());
  return head + density_.runs_mass(b + 1, block_count());
}

template <class Scalar>
Scalar SortedSpectrum<Scalar>::mean_energy() const {
  CompensatedSum<Scalar> acc;
  for (std::size_t b = 0; b < block_count(); ++b) acc += density_.run_mass(b) * blocks_[b].energy;
  return acc.value();
}

template <class Scalar>
Scalar sorted_value_at(const SortedSpectrum<Scalar>& spec, const BigInt& index) {
  if (index < 0) throw ValidationError("sorted index must be >= 0");
  const Position p(index, spec.bits());
  if (!(p < spec.size())) throw ValidationError("sorted index must be < d^n");
  return spec.log_prob_at(p);
}

#define FBE_INSTANTIATE(S)                                                              \
  template std::vector<S> gibbs_site_probs<S>(const SiteSpectrum&, double);            \
  template std::vector<S> gibbs_site_log_probs<S>(const SiteSpectrum&, double);        \
  template S log_partition<S>(const SiteSpectrum&, S);                                 \
  template S mean_energy<S>(const SiteSpectrum&, S);                                   \
  template S site_entropy<S>(const SiteSpectrum&, S);                                  \
  template MomentSet<S> moments<S>(const SiteSpectrum&, double);                       \
  template class SortedSpectrum<S>;                                                    \
  template SortedSpectrum<S> build_sorted_spectrum<S>(const BathSpec&);                \
  template S sorted_value_at<S>(const SortedSpectrum<S>&, const BigInt&);
FBE_INSTANTIATE(double)
FBE_INSTANTIATE(Extended)
#undef FBE_INSTANTIATE

}  // namespace fbe

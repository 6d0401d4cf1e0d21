#ifndef FBE_SRC_EXPANDED_HPP
#define FBE_SRC_EXPANDED_HPP

#include <cstdint>
#include <vector>

#include "fbe/bath.hpp"
#include "fbe/error.hpp"
#include "fbe/protocol.hpp"

namespace fbe::detail {

inline std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t out = 1;
  for (unsigned i = 0; i < exp; ++i) out *= base;
  return out;
}

/// A sorted spectrum laid out index by index (d^n <= kExactLimit).
template <class Scalar>
class Expanded {
 public:
  explicit Expanded(const SortedSpectrum<Scalar>& spec) {
    const auto& counts = spec.cum_counts();
    if (counts.empty() || counts.back() > kExactLimit) {
      throw ResourceError("exact mode is limited to d^n <= 2^24 states per bath");
    }
    block_of_.resize(counts.back().get_ui());
    for (std::size_t b = 0; b < spec.block_count(); ++b) {
      const auto lo = counts[b].get_ui();
      const auto hi = counts[b + 1].get_ui();
      for (auto i = lo; i < hi; ++i) block_of_[i] = static_cast<std::uint32_t>(b);
      log_prob_.push_back(spec.block(b).log_prob);
      prob_.push_back(sx::exp(spec.block(b).log_prob));
      energy_.push_back(spec.block(b).energy);
    }
  }

  std::uint64_t size() const { return block_of_.size(); }
  std::uint32_t block(std::uint64_t i) const { return block_of_[i]; }
  const Scalar& log_prob(std::uint64_t i) const { return log_prob_[block_of_[i]]; }
  const Scalar& prob(std::uint64_t i) const { return prob_[block_of_[i]]; }
  const Scalar& energy(std::uint64_t i) const { return energy_[block_of_[i]]; }

 private:
  std::vector<std::uint32_t> block_of_;
  std::vector<Scalar> log_prob_;
  std::vector<Scalar> prob_;
  std::vector<Scalar> energy_;
};

}  // namespace fbe::detail

#endif  // FBE_SRC_EXPANDED_HPP

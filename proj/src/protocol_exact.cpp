#include <cstdint>
#include <vector>

#include "expanded.hpp"
#include "fbe/error.hpp"
#include "fbe/protocol.hpp"
#include "protocol_common.hpp"

namespace fbe {

template <class Scalar>
ProtocolOutcome apply_protocol_exact(const SortedSpectrum<Scalar>& hot,
                                     const SortedSpectrum<Scalar>& cold, const ProtocolConfig& config,
                                     unsigned m) {
  const unsigned n = hot.n();
  if (m >= n) throw ValidationError("swap size m must be below n");
  const detail::Expanded<Scalar> x(hot);
  const detail::Expanded<Scalar> y(cold);
  const std::uint64_t size = x.size();
  const std::uint64_t g = detail::ipow(static_cast<std::uint64_t>(hot.d()), m);
  const std::uint64_t w = size / g;
  const Scalar shift = Scalar(m) * sx::log(Scalar(hot.d()));

  detail::RawOutcome<Scalar> raw;
  raw.mode = Mode::Exact;
  raw.m = m;

  CompensatedSum<Scalar> s_x, s_y, e_x, e_y, dxc, dxf, dy, tail;
  for (std::uint64_t i = 0; i < size; ++i) {
    const Scalar px = x.prob(i);
    const Scalar py = y.prob(i);
    s_x += -px * x.log_prob(i);
    s_y += -py * y.log_prob(i);
    e_x += px * x.energy(i);
    e_y += py * y.energy(i);
    dxc += px * (shift + x.log_prob(i) - x.log_prob((i + g - 1) / g));
    dxf += px * (shift + x.log_prob(i) - x.log_prob(i / g));
    const std::uint64_t target = i < w ? i * g : size - 1;
    dy += py * (y.log_prob(i) - shift - y.log_prob(target));
    if (i >= w) tail += py;
  }
  raw.entropy_hot = s_x.value();
  raw.entropy_cold = s_y.value();
  raw.energy_hot = e_x.value();
  raw.energy_cold = e_y.value();
  raw.d_x_ceil = dxc.value();
  raw.d_x_floor = dxf.value();
  raw.d_y = dy.value();
  raw.tail = tail.value();
  if (m == 0) return detail::finish(raw, hot, cold, config);

  // Digit marginals: A over groups of G, B over groups of W, C and E over residues.
  std::vector<CompensatedSum<Scalar>> as(w), bs(g), cs(g), es(w);
  for (std::uint64_t i = 0; i < size; ++i) {
    as[i / g] += x.prob(i);
    cs[i % g] += x.prob(i);
    bs[i / w] += y.prob(i);
    es[i % w] += y.prob(i);
  }
  auto values = [](const std::vector<CompensatedSum<Scalar>>& sums) {
    std::vector<Scalar> out;
    out.reserve(sums.size());
    for (const auto& s : sums) out.push_back(s.value());
    return out;
  };
  const auto av = values(as);
  const auto bv = values(bs);
  const auto cv = values(cs);
  const auto ev = values(es);

  CompensatedSum<Scalar> de_x, de_y, mass_x, mass_y, fs_x, fs_y, cross_x, cross_y;
  const Scalar hx0 = x.energy(0);
  const Scalar hy0 = y.energy(0);
  for (std::uint64_t i = 0; i < size; ++i) {
    const Scalar fx = bv[i / w] * av[i % w];  // i = t W + k
    const Scalar fy = ev[i / g] * cv[i % g];  // i = r G + l
    mass_x += fx;
    mass_y += fy;
    de_x += (fx - x.prob(i)) * (x.energy(i) - hx0);
    de_y += (fy - y.prob(i)) * (y.energy(i) - hy0);
    cross_x += -(fx - x.prob(i)) * x.log_prob(i);
    cross_y += -(fy - y.prob(i)) * y.log_prob(i);
    if (fx > Scalar(0)) fs_x += -fx * sx::log(fx);
    if (fy > Scalar(0)) fs_y += -fy * sx::log(fy);
  }
  raw.energy_change_hot = de_x.value();
  raw.energy_change_cold = de_y.value();
  raw.kl = cross_x.value() + cross_y.value();
  raw.final_mass_hot = mass_x.value();
  raw.final_mass_cold = mass_y.value();
  raw.final_entropy_hot = fs_x.value();
  raw.final_entropy_cold = fs_y.value();

  CompensatedSum<Scalar> excess, straddle;
  for (std::uint64_t k = 0; k < w; ++k) {
    const Scalar top = x.prob(k * g);
    for (std::uint64_t l = 0; l < g; ++l) excess += top - x.prob(k * g + l);
    const Scalar lo = x.log_prob(k * g + g - 1);
    if (lo != x.log_prob(k * g)) straddle += av[k] * (x.log_prob(k * g) - lo);
  }
  raw.group_excess = excess.value();
  raw.hot_straddle = straddle.value();
  raw.cold_col_log_ratio = sx::log(cv.front()) - sx::log(cv.back());
  return detail::finish(raw, hot, cold, config);
}

template ProtocolOutcome apply_protocol_exact(const SortedSpectrum<double>&,
                                              const SortedSpectrum<double>&, const ProtocolConfig&,
                                              unsigned);
template ProtocolOutcome apply_protocol_exact(const SortedSpectrum<Extended>&,
                                              const SortedSpectrum<Extended>&,
                                              const ProtocolConfig&, unsigned);

}  // namespace fbe

#include "lcgf/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcgf {

BridgePath sample_bridge(std::int64_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_bridge: n must be >= 1");
  BridgePath p;
  p.w.resize(n + 1);
  double s = 0;
  p.w[0] = 0;
  for (std::int64_t j = 1; j <= n; ++j) {
    s += rng.next_gaussian();
    p.w[j] = s;
  }
  const double sn = p.w[n];
  for (std::int64_t j = 0; j <= n; ++j)
    p.w[j] -= (static_cast<double>(j) / static_cast<double>(n)) * sn;
  p.w[n] = 0;  // exact endpoint
  return p;
}

double BarrierSpec::at(std::int64_t j, std::int64_t n) const {
  switch (kind) {
    case Kind::LogCurve: {
      const std::int64_t m = std::max<std::int64_t>(std::min(j, n - j), 1);
      return gamma * std::log(static_cast<double>(m));
    }
    case Kind::Line:
      return (x1 * static_cast<double>(j) + x2 * static_cast<double>(n - j)) /
             static_cast<double>(n);
  }
  return 0;
}

McReport barrier_probability(std::int64_t n, const BarrierSpec& barrier, double offset,
                             std::int64_t replicas, RngStream& rng) {
  if (replicas < 1000) throw std::invalid_argument("barrier_probability: replicas must be >= 1e3");
  // Endpoints are deterministic: W_0 = W_n = 0.
  if (barrier.at(0, n) + offset < 0 || barrier.at(n, n) + offset < 0) {
    McReport rep;
    rep.estimate = 0;
    rep.standard_error = 0;
    rep.replicas = replicas;
    rep.seed = rng.seed();
    return rep;
  }
  std::vector<double> bar(n + 1);
  for (std::int64_t j = 0; j <= n; ++j) bar[j] = barrier.at(j, n) + offset;
  std::int64_t hits = 0;
  for (std::int64_t r = 0; r < replicas; ++r) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(r));
    const BridgePath p = sample_bridge(n, sub);
    bool below = true;
    for (std::int64_t j = 1; j < n && below; ++j) below = p.w[j] <= bar[j];
    if (below) ++hits;
  }
  const double R = static_cast<double>(replicas);
  const double phat = static_cast<double>(hits) / R;
  McReport rep;
  rep.estimate = phat;
  rep.standard_error = std::sqrt(std::max(0.0, phat * (1.0 - phat) / R));
  rep.replicas = replicas;
  rep.seed = rng.seed();
  return rep;
}

}  // namespace lcgf

#pragma once

#include <cstdint>
#include <vector>

#include "lcgf/mc_report.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

// Gaussian random-walk bridge of length n: W_0 = W_n = 0.
struct BridgePath {
  std::vector<double> w;  // size n+1
  std::int64_t length() const { return static_cast<std::int64_t>(w.size()) - 1; }
};

// W_j = S_j - (j/n) S_n for a standard Gaussian walk S.
BridgePath sample_bridge(std::int64_t n, RngStream& rng);

struct BarrierSpec {
  enum class Kind { LogCurve, Line };
  Kind kind = Kind::LogCurve;
  double gamma = 0;          // LogCurve: gamma * log((j ^ (n-j)) v 1)
  double x1 = 0, x2 = 0;     // Line: x1*j/n + x2*(n-j)/n

  double at(std::int64_t j, std::int64_t n) const;
};

// Monte Carlo estimate of P(W_j <= barrier(j) + offset for all j = 0..n).
McReport barrier_probability(std::int64_t n, const BarrierSpec& barrier, double offset,
                             std::int64_t replicas, RngStream& rng);

}  // namespace lcgf

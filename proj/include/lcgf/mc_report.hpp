#pragma once

#include <cstdint>

namespace lcgf {

// Every Monte Carlo answer carries its uncertainty: SE = sample stdev / sqrt(R).
struct McReport {
  double estimate = 0;
  double standard_error = 0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0;
};

}  // namespace lcgf

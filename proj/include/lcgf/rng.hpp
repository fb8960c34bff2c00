#pragma once

#include <cstdint>

namespace lcgf {

// Counter-based stream: identical (seed, stream, counter) gives identical
// output on every platform, and distinct stream indices give independent
// streams. Replica i of an experiment uses stream index i; sub-purposes
// within a replica derive their own stream via substream().
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  double next_uniform();   // (0,1), 53-bit resolution
  double next_gaussian();  // standard normal via inverse CDF, one counter tick
  double next_exponential();

  // Independent stream keyed by (stream, tag); counter starts at 0.
  RngStream substream(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

// Wichura AS241 inverse of the standard normal CDF, |error| < 1e-15.
double inverse_normal_cdf(double p);
double normal_cdf(double x);

}  // namespace lcgf

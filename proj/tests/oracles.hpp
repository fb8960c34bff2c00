#pragma once

// Independent reference implementations used only by tests. These deliberately
// avoid the library's fast paths: brute-force enumeration, textbook samplers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "lcgf/lattice.hpp"
#include "lcgf/rng.hpp"

namespace oracle {

// BRW covariance by direct enumeration of aligned ancestor boxes.
inline double brute_cov_brw(const lcgf::Lattice& lat, const lcgf::Vertex& u,
                            const lcgf::Vertex& v) {
  const auto au = lcgf::dyadic_ancestors(lat, u, true);
  const auto av = lcgf::dyadic_ancestors(lat, v, true);
  double c = 0;
  for (std::size_t j = 0; j < au.size(); ++j)
    if (au[j].corner == av[j].corner) c += std::log(2.0);
  return c;
}

// MBRW covariance by enumerating every box of every level and reducing
// corners mod N into equivalence classes.
inline double brute_cov_mbrw(const lcgf::Lattice& lat, const lcgf::Vertex& u,
                             const lcgf::Vertex& v) {
  const std::int64_t N = lat.side();
  const int d = lat.dim();
  const auto bu = lcgf::dyadic_ancestors(lat, u, false);
  const auto bv = lcgf::dyadic_ancestors(lat, v, false);
  double c = 0;
  for (const auto& B : bu) {
    for (const auto& Bp : bv) {
      if (B.level != Bp.level) continue;
      bool same = true;
      for (int a = 0; a < d; ++a) {
        const std::int64_t x = ((B.corner[a] % N) + N) % N;
        const std::int64_t y = ((Bp.corner[a] % N) + N) % N;
        if (x != y) same = false;
      }
      if (same) c += std::pow(2.0, -d * B.level) * std::log(2.0);
    }
  }
  return c;
}

// Quadratic-time r-local maxima (closed Euclidean ball, ties kept).
inline std::vector<std::int64_t> brute_local_extrema(const lcgf::Lattice& lat,
                                                     const std::vector<double>& values, double r) {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; i < lat.volume(); ++i) {
    const auto v = lat.vertex_at(i);
    bool is_max = true;
    for (const auto& u : lcgf::ball(lat, v, r))
      if (values[lat.index_of(u)] > values[i]) is_max = false;
    if (is_max) out.push_back(i);
  }
  return out;
}

// Marsaglia-Tsang gamma sampler; the shape < 1 case boosts through shape + 1.
inline double sample_gamma(double shape, lcgf::RngStream& rng) {
  if (shape < 1.0) {
    const double u = rng.next_uniform();
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.next_gaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

inline double sample_beta(double a, double b, lcgf::RngStream& rng) {
  const double x = sample_gamma(a, rng);
  const double y = sample_gamma(b, rng);
  return x / (x + y);
}

// One stick-breaking draw of sum p_i^2 under PD(s): sticks W_i ~ Beta(1-s, i s),
// truncated at k sticks. The residual sequence after k sticks is GEM(s, k s),
// whose expected sum-of-squares is (1-s)/(1+k s); adding R_k^2 times that value
// makes the estimator unbiased for E sum p_i^2.
inline double stick_breaking_p2(double s, int sticks, lcgf::RngStream& rng) {
  double remainder = 1.0;
  double p2 = 0.0;
  for (int i = 1; i <= sticks; ++i) {
    const double w = sample_beta(1.0 - s, i * s, rng);
    const double p = remainder * w;
    p2 += p * p;
    remainder *= 1.0 - w;
  }
  return p2 + remainder * remainder * (1.0 - s) / (1.0 + sticks * s);
}

struct MeanSe {
  double mean = 0;
  double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= n;
  double v = 0;
  for (double x : xs) v += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(v / (n - 1) / n);
  return r;
}

// Two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double dmax = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    dmax = std::max(dmax, std::fabs(fa - fb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * dmax;
  double p = 0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace oracle

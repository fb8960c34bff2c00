#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "lcgf/samplers.hpp"

namespace lcgf {

// m_N = sqrt(2d) log N - (3/(2 sqrt(2d))) log log N. Requires N >= 3 so that
// log log N is positive.
double m_n(std::int64_t N, int d);

// Argmax (lowest linear index on ties) and value.
std::pair<std::int64_t, double> field_max(const FieldSample& f);

struct LevelSet {
  double threshold = 0;  // t, membership is phi_v >= m_N - t
  std::vector<std::int64_t> members;
  std::int64_t cardinality() const { return static_cast<std::int64_t>(members.size()); }
};

LevelSet level_set(const FieldSample& f, double t);

// Sum of the ell largest values; -inf sentinel when ell exceeds the domain.
constexpr double kTopSumUndefined = -std::numeric_limits<double>::infinity();
double top_sum(const FieldSample& f, std::int64_t ell);
double top_sum(std::vector<double> values, std::int64_t ell);

struct ExtremaSet {
  double radius = 0;
  std::vector<std::int64_t> vertices;  // r-local maxima, increasing linear index
};

// All v with phi_v = max over B(v,r); ties keep every attaining vertex.
ExtremaSet local_extrema(const FieldSample& f, double r);

// Unordered pairs in Gamma_N(lambda) with Euclidean distance in [r, N/r].
std::vector<std::pair<std::int64_t, std::int64_t>> mesoscopic_pairs(const FieldSample& f,
                                                                    double lambda, double r);

}  // namespace lcgf

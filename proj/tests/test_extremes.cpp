#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lcgf/extremes.hpp"
#include "oracles.hpp"

using namespace lcgf;

namespace {
FieldSample make_field(const Lattice& lat, std::vector<double> vals) {
  return FieldSample{lat, std::move(vals), "test", 0, 0};
}
}  // namespace

TEST_CASE("m_n closed form and monotonicity") {
  // high-precision evaluations of the closed form
  CHECK(m_n(1024, 2) == doctest::Approx(12.4108890).epsilon(1e-7));
  CHECK(m_n(16, 2) == doctest::Approx(4.7803414).epsilon(1e-7));
  CHECK_THROWS(m_n(2, 2));
  for (std::int64_t N = 4; N <= 512; N *= 2)
    CHECK(m_n(2 * N, 2) - m_n(N, 2) <= 2.0 * std::log(2.0) + 1e-12);
}

TEST_CASE("field_max tie and spike rules") {
  Lattice lat(4, 1);
  const auto c = make_field(lat, {1.0, 1.0, 1.0, 1.0});
  CHECK(field_max(c) == std::pair<std::int64_t, double>{0, 1.0});
  const auto s = make_field(lat, {0.0, 0.0, 9.0, 0.0});
  CHECK(field_max(s) == std::pair<std::int64_t, double>{2, 9.0});
}

TEST_CASE("level_set membership") {
  Lattice lat(4, 1);  // m_4 refers to N=4 >= 3
  const double m = m_n(4, 1);
  const auto low = make_field(lat, {m - 9, m - 9, m - 9, m - 9});
  CHECK(level_set(low, 2.0).cardinality() == 0);
  const auto at = make_field(lat, {m, m, m, m});
  CHECK(level_set(at, 0.0).cardinality() == 4);
  // monotone in t
  const auto f = make_field(lat, {m - 1, m - 3, m - 5, m + 1});
  std::int64_t prev = -1;
  for (double t : {0.0, 1.5, 3.5, 5.5}) {
    const auto g = level_set(f, t);
    CHECK(g.cardinality() >= prev);
    prev = g.cardinality();
  }
  CHECK(level_set(f, 5.5).cardinality() == 4);
}

TEST_CASE("top_sum") {
  Lattice lat(3, 1);
  const auto f = make_field(lat, {3.0, 1.0, 2.0});
  CHECK(top_sum(f, 2) == 5.0);
  CHECK(top_sum(f, 1) == field_max(f).second);
  CHECK(top_sum(f, 4) == kTopSumUndefined);
  // increments are the order statistics; concavity; shift covariance
  const double d1 = top_sum(f, 2) - top_sum(f, 1);
  const double d2 = top_sum(f, 3) - top_sum(f, 2);
  CHECK(d1 == 2.0);
  CHECK(d2 == 1.0);
  CHECK(d2 <= d1);
  const auto g = make_field(lat, {3.0 + 7.0, 1.0 + 7.0, 2.0 + 7.0});
  CHECK(top_sum(g, 2) == doctest::Approx(top_sum(f, 2) + 2 * 7.0).epsilon(1e-13));
}

TEST_CASE("local_extrema basics") {
  Lattice lat(8, 1);
  const auto dec = make_field(lat, {8, 7, 6, 5, 4, 3, 2, 1});
  for (double r : {1.0, 3.0}) {
    const auto e = local_extrema(dec, r);
    CHECK(e.vertices == std::vector<std::int64_t>{0});
  }
  const auto c = make_field(lat, std::vector<double>(8, 1.0));
  CHECK(local_extrema(c, 2.0).vertices.size() == 8);
  std::vector<double> spikes(8, 0.0);
  spikes[1] = 5.0;
  spikes[6] = 5.0;
  const auto e = local_extrema(make_field(lat, spikes), 2.0).vertices;
  CHECK(e == std::vector<std::int64_t>{1, 6});
}

TEST_CASE("local_extrema fast path vs brute force") {
  Lattice lat(64, 2);  // volume 4096 engages the window prefilter
  std::vector<double> vals(lat.volume());
  RngStream rng(55, 0);
  for (auto& v : vals) v = rng.next_gaussian();
  const auto f = make_field(lat, vals);
  for (double r : {4.0, 7.5, 12.0}) {
    CHECK(local_extrema(f, r).vertices == oracle::brute_local_extrema(lat, vals, r));
  }
  // nesting in r
  const auto big = local_extrema(f, 12.0).vertices;
  const auto small = local_extrema(f, 4.0).vertices;
  for (auto v : big) CHECK(std::binary_search(small.begin(), small.end(), v));
}

TEST_CASE("mesoscopic_pairs") {
  Lattice lat(64, 2);
  const double m = m_n(64, 2);
  std::vector<double> vals(lat.volume(), m - 50.0);
  const auto set_at = [&](int x, int y, double v) { vals[lat.index_of({x, y})] = v; };
  set_at(10, 10, m);
  set_at(42, 10, m);  // distance 32 = N/2, outside [4, 16]
  auto f = make_field(lat, vals);
  CHECK(mesoscopic_pairs(f, 3.0, 4.0).empty());
  set_at(18, 10, m);  // distance 8 from the first spike: inside the window
  f = make_field(lat, vals);
  const auto pairs = mesoscopic_pairs(f, 3.0, 4.0);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first == lat.index_of({10, 10}));
  CHECK(pairs[0].second == lat.index_of({18, 10}));
  // empty window when r^2 > N
  CHECK(mesoscopic_pairs(f, 3.0, 9.0).empty());
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "lcgf/extremes.hpp"
#include "lcgf/samplers.hpp"
#include "oracles.hpp"

using namespace lcgf;

TEST_CASE("samplers are deterministic") {
  RngStream a(3, 1), b(3, 1);
  const auto fa = sample_mbrw(4, 2, a);
  const auto fb = sample_mbrw(4, 2, b);
  CHECK(fa.values == fb.values);
  RngStream c(3, 1), d2(3, 1);
  CHECK(sample_brw(3, 2, c).values == sample_brw(3, 2, d2).values);
}

TEST_CASE("brw degenerate and draw accounting") {
  RngStream rng(1, 0);
  const auto f = sample_brw(0, 2, rng);
  REQUIRE(f.values.size() == 1);
  CHECK(f.values[0] == 0.0);
  CHECK(rng.counter() == 0);

  // total draws = sum over levels of (N/2^j)^d
  RngStream rng2(1, 0);
  (void)sample_brw(3, 2, rng2);
  CHECK(rng2.counter() == 64 + 16 + 4);
}

TEST_CASE("brw empirical covariance matches cov_brw (n=4, d=1)") {
  const int n = 4, d = 1;
  const std::int64_t R = 100000;
  Lattice lat(16, 1);
  const std::int64_t V = lat.volume();
  std::vector<double> acc(V * V, 0.0);
  for (std::int64_t rep = 0; rep < R; ++rep) {
    RngStream rng(77, static_cast<std::uint64_t>(rep));
    const auto f = sample_brw(n, d, rng);
    for (std::int64_t i = 0; i < V; ++i)
      for (std::int64_t j = 0; j <= i; ++j) acc[i * V + j] += f.values[i] * f.values[j];
  }
  for (std::int64_t i = 0; i < V; ++i)
    for (std::int64_t j = 0; j <= i; ++j) {
      const double emp = acc[i * V + j] / R;
      const double exact = cov_brw(lat.vertex_at(i), lat.vertex_at(j), n, d);
      const double vi = cov_brw(lat.vertex_at(i), lat.vertex_at(i), n, d);
      const double vj = cov_brw(lat.vertex_at(j), lat.vertex_at(j), n, d);
      const double se = std::sqrt((exact * exact + vi * vj) / R);
      CHECK(std::fabs(emp - exact) <= 4.0 * se);
    }
}

TEST_CASE("mbrw empirical covariance matches cov_mbrw (n=3, d=2)") {
  const int n = 3, d = 2;
  const std::int64_t R = 20000;
  Lattice lat(8, 2);
  const std::int64_t V = lat.volume();
  // 100 deterministic pairs
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  RngStream pick(123, 0);
  for (int k = 0; k < 100; ++k)
    pairs.emplace_back(static_cast<std::int64_t>(pick.next_u64() % V),
                       static_cast<std::int64_t>(pick.next_u64() % V));
  std::vector<double> acc(pairs.size(), 0.0);
  for (std::int64_t rep = 0; rep < R; ++rep) {
    RngStream rng(78, static_cast<std::uint64_t>(rep));
    const auto f = sample_mbrw(n, d, rng);
    for (std::size_t k = 0; k < pairs.size(); ++k)
      acc[k] += f.values[pairs[k].first] * f.values[pairs[k].second];
  }
  const double logN = n * std::log(2.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double exact =
        cov_mbrw(lat.vertex_at(pairs[k].first), lat.vertex_at(pairs[k].second), n, d);
    const double se = std::sqrt((exact * exact + logN * logN) / R);
    CHECK(std::fabs(acc[k] / R - exact) <= 4.0 * se);
  }
}

TEST_CASE("sample_mvn basic laws") {
  {
    Lattice lat(1, 1);
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = 2.5;
    const auto k = CovarianceKernel::explicit_matrix(lat, m);
    std::vector<double> xs(100000);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      RngStream rng(9, i);
      xs[i] = sample_mvn(k, rng).values[0];
    }
    double var = 0;
    for (double x : xs) var += x * x;
    var /= xs.size();
    CHECK(std::fabs(var - 2.5) <= 4.0 * 2.5 * std::sqrt(2.0 / xs.size()));
  }
  {
    // identity kernel: empirical correlations are null
    Lattice lat(4, 1);
    const auto k = CovarianceKernel::explicit_matrix(lat, Eigen::MatrixXd::Identity(4, 4));
    const std::int64_t R = 100000;
    double c01 = 0, c23 = 0;
    for (std::int64_t i = 0; i < R; ++i) {
      RngStream rng(10, static_cast<std::uint64_t>(i));
      const auto f = sample_mvn(k, rng);
      c01 += f.values[0] * f.values[1];
      c23 += f.values[2] * f.values[3];
    }
    CHECK(std::fabs(c01 / R) <= 4.0 / std::sqrt(static_cast<double>(R)));
    CHECK(std::fabs(c23 / R) <= 4.0 / std::sqrt(static_cast<double>(R)));
  }
}

TEST_CASE("mvn over the exact mbrw kernel agrees with the hierarchical sampler in law") {
  Lattice lat(4, 2);
  const auto k = CovarianceKernel::mbrw(lat);
  const std::int64_t R = 20000;
  double mvn_c = 0, fast_c = 0;
  const std::int64_t a = 0, b = 5;
  for (std::int64_t i = 0; i < R; ++i) {
    RngStream r1(21, static_cast<std::uint64_t>(i));
    RngStream r2(22, static_cast<std::uint64_t>(i));
    const auto f1 = sample_mvn(k, r1);
    const auto f2 = sample_mbrw(2, 2, r2);
    mvn_c += f1.values[a] * f1.values[b];
    fast_c += f2.values[a] * f2.values[b];
  }
  const double exact = cov_mbrw(lat.vertex_at(a), lat.vertex_at(b), 2, 2);
  const double se = std::sqrt((exact * exact + std::pow(std::log(4.0), 2)) / R);
  CHECK(std::fabs(mvn_c / R - exact) <= 4.0 * se);
  CHECK(std::fabs(fast_c / R - exact) <= 4.0 * se);
}

TEST_CASE("dgff sampler") {
  Lattice lat(8, 2);
  const auto k = CovarianceKernel::dgff(lat);
  const std::int64_t center = lat.index_of({4, 4});
  const double target = k.variance(center);
  const std::int64_t R = 3000;
  double var = 0;
  for (std::int64_t i = 0; i < R; ++i) {
    RngStream rng(30, static_cast<std::uint64_t>(i));
    const auto f = sample_dgff(k, rng);
    var += f.values[center] * f.values[center];
  }
  var /= R;
  CHECK(std::fabs(var - target) <= 4.0 * target * std::sqrt(2.0 / R));
}

TEST_CASE("ou_pair") {
  Lattice lat(16, 2);
  {
    RngStream rng(40, 0);
    const auto p = ou_pair(ModelTag::Mbrw, lat, 0.0, rng);
    CHECK(p.combined.values == p.prime.values);
  }
  {
    RngStream rng(41, 0);
    const auto p = ou_pair(ModelTag::Mbrw, lat, 1.0, rng);
    const double c1 = std::sqrt(1.0 - 1.0 / std::log(16.0));
    const double c2 = std::sqrt(1.0 / std::log(16.0));
    for (std::int64_t i = 0; i < lat.volume(); ++i)
      CHECK(p.combined.values[i] ==
            doctest::Approx(c1 * p.prime.values[i] + c2 * p.dprime.values[i]).epsilon(1e-12));
  }
  {
    RngStream rng(42, 0);
    CHECK_THROWS(ou_pair(ModelTag::Mbrw, lat, std::log(16.0), rng));
  }
  {
    // equality in law of max(combined) and max(fresh field)
    const std::int64_t R = 2000;
    std::vector<double> mixed(R), fresh(R);
    for (std::int64_t i = 0; i < R; ++i) {
      RngStream r1(43, static_cast<std::uint64_t>(i));
      mixed[i] = field_max(ou_pair(ModelTag::Mbrw, lat, 1.0, r1).combined).second;
      RngStream r2(44, static_cast<std::uint64_t>(i));
      fresh[i] = field_max(sample_mbrw(4, 2, r2)).second;
    }
    CHECK(oracle::ks_two_sample_p(mixed, fresh) > 0.01);
  }
}

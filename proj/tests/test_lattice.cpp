#include <doctest.h>

#include <cmath>
#include <set>

#include "lcgf/lattice.hpp"

using namespace lcgf;

TEST_CASE("euclidean distance") {
  CHECK(euclidean_distance({3, 4}, {3, 4}) == 0.0);
  CHECK(euclidean_distance({0, 0}, {3, 4}) == 5.0);
  CHECK(euclidean_distance({0}, {7}) == 7.0);  // no wrap
}

TEST_CASE("torus distance") {
  CHECK(torus_distance({5}, {5}, 8) == 0.0);
  CHECK(torus_distance({0}, {7}, 8) == 1.0);
  CHECK(torus_distance({0, 0}, {7, 7}, 8) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("torus distance vs brute force over all shifts, N <= 16") {
  for (const std::int64_t N : {5, 8, 16}) {
    Lattice lat(N, 2);
    for (std::int64_t i = 0; i < lat.volume(); i += 7) {
      for (std::int64_t j = 0; j < lat.volume(); j += 5) {
        const Vertex u = lat.vertex_at(i), v = lat.vertex_at(j);
        double best = 1e300;
        for (int sx = -1; sx <= 1; ++sx)
          for (int sy = -1; sy <= 1; ++sy) {
            const double dx = u.c[0] - (v.c[0] + sx * N);
            const double dy = u.c[1] - (v.c[1] + sy * N);
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
          }
        CHECK(torus_distance(u, v, N) == doctest::Approx(best).epsilon(1e-12));
        CHECK(torus_distance(u, v, N) <= euclidean_distance(u, v) + 1e-12);
      }
    }
  }
}

TEST_CASE("norm sandwich between l-inf and l2") {
  Lattice lat(9, 3);
  for (std::int64_t i = 0; i < lat.volume(); i += 11) {
    for (std::int64_t j = 0; j < lat.volume(); j += 13) {
      const Vertex u = lat.vertex_at(i), v = lat.vertex_at(j);
      const double linf = linf_distance(u, v), l2 = euclidean_distance(u, v);
      CHECK(linf <= l2 + 1e-12);
      CHECK(l2 <= std::sqrt(3.0) * linf + 1e-12);
    }
  }
}

TEST_CASE("ball") {
  Lattice l1(10, 1);
  CHECK(ball(l1, {5}, 0.0) == std::vector<Vertex>{{5}});
  const auto b = ball(l1, {5}, 1.0);
  CHECK(b.size() == 3);  // {4,5,6}

  Lattice l2(8, 2);
  CHECK(ball(l2, {4, 4}, 1.0).size() == 5);  // center + 4 axis neighbors

  // monotone in r; radius N*sqrt(d) covers everything
  CHECK(ball(l2, {4, 4}, 2.0).size() >= ball(l2, {4, 4}, 1.0).size());
  CHECK(ball(l2, {3, 3}, 8 * std::sqrt(2.0)).size() == static_cast<std::size_t>(l2.volume()));
}

TEST_CASE("interior") {
  Lattice l1(10, 1);
  CHECK(interior(l1, 0.0).size() == 10);
  const auto in = interior(l1, 0.2);
  CHECK(in.size() == 8);
  CHECK(in.front() == Vertex{1});
  CHECK(in.back() == Vertex{8});

  // distance is to the complement of V_N, matching the 1D case above:
  // at N=4, delta=1/2 the four center vertices have distance exactly 2
  Lattice l2(4, 2);
  CHECK(interior(l2, 0.5).size() == 4);
  CHECK(interior(l2, 0.9).empty());
}

TEST_CASE("dyadic ancestors") {
  Lattice lat(4, 1);
  const auto aligned = dyadic_ancestors(lat, {1}, true);
  REQUIRE(aligned.size() == 2);
  CHECK(aligned[0].level == 0);
  CHECK(aligned[0].corner[0] == 1);
  CHECK(aligned[1].level == 1);
  CHECK(aligned[1].corner[0] == 0);

  // nesting: every box contains v and its predecessor's corner range
  Lattice big(64, 2);
  const auto chain = dyadic_ancestors(big, {37, 11}, true);
  REQUIRE(chain.size() == 6);
  for (const auto& box : chain) CHECK(box.contains({37, 11}));
  for (std::size_t j = 1; j < chain.size(); ++j) {
    CHECK(chain[j].contains(Vertex{chain[j - 1].corner[0], chain[j - 1].corner[1]}));
  }

  // unaligned level-1 boxes at v=1: corners 0 and 1
  const auto all = dyadic_ancestors(lat, {1}, false);
  std::set<std::int64_t> corners_l1;
  for (const auto& box : all)
    if (box.level == 1) corners_l1.insert(box.corner[0]);
  CHECK(corners_l1 == std::set<std::int64_t>{0, 1});
  // 2^{dj} boxes per level
  std::size_t l0 = 0, l1c = 0;
  for (const auto& box : all) (box.level == 0 ? l0 : l1c)++;
  CHECK(l0 == 1);
  CHECK(l1c == 2);
}

TEST_CASE("lattice indexing and construction") {
  Lattice lat(6, 3);
  CHECK(lat.volume() == 216);
  for (std::int64_t i = 0; i < lat.volume(); ++i) CHECK(lat.index_of(lat.vertex_at(i)) == i);
  CHECK_THROWS(Lattice(0, 2));
  CHECK_THROWS(Lattice(4, 5));
  CHECK_THROWS(Lattice(3000000, 4));  // N^d overflows the index range
  CHECK_THROWS(Lattice(6, 3).levels());
  CHECK(Lattice(8, 2).levels() == 3);
}

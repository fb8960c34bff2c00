#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lcgf {

// Vertex of V_N = {0,...,N-1}^d. Coordinates beyond the lattice dimension
// are zero so that flat comparisons work for any d ≤ 4.
struct Vertex {
  std::array<std::int32_t, 4> c{0, 0, 0, 0};
  int d = 1;

  Vertex() = default;
  Vertex(std::initializer_list<std::int32_t> xs) {
    d = static_cast<int>(xs.size());
    int i = 0;
    for (auto x : xs) c[i++] = x;
  }

  bool operator==(const Vertex&) const = default;
};

// Axis-aligned box of side 2^level with lower-left corner `corner`.
struct DyadicBox {
  int level = 0;
  std::array<std::int32_t, 4> corner{0, 0, 0, 0};
  int d = 1;

  std::int64_t size() const { return std::int64_t{1} << level; }
  bool contains(const Vertex& v) const;
};

class Lattice {
 public:
  Lattice() : N_(1), d_(1), volume_(1) {}
  Lattice(std::int64_t N, int d);

  std::int64_t side() const { return N_; }
  int dim() const { return d_; }
  std::int64_t volume() const { return volume_; }

  // log2(N) when N is a power of two; throws otherwise.
  int levels() const;
  bool is_power_of_two() const;

  // Row-major linearization shared by the whole library: index = ((c0*N + c1)*N + c2)...
  std::int64_t index_of(const Vertex& v) const;
  Vertex vertex_at(std::int64_t index) const;

  bool contains(const Vertex& v) const;

 private:
  std::int64_t N_;
  int d_;
  std::int64_t volume_;
};

std::int64_t squared_distance(const Vertex& u, const Vertex& v);
double euclidean_distance(const Vertex& u, const Vertex& v);
double linf_distance(const Vertex& u, const Vertex& v);

// min_{v' ~_N v} |u - v'|, scanning the 3^d shifts by {-N,0,N} per axis.
double torus_distance(const Vertex& u, const Vertex& v, std::int64_t N);
std::int64_t torus_squared_distance(const Vertex& u, const Vertex& v, std::int64_t N);

// Closed Euclidean ball B(v,r) clipped to the lattice (no wrap).
std::vector<Vertex> ball(const Lattice& lat, const Vertex& v, double r);

// All offsets o with |o| ≤ r, |o|_inf ≤ floor(r); origin included.
std::vector<std::array<std::int32_t, 4>> ball_offsets(int d, double r);

// V_N^δ: vertices whose l-inf distance to the complement of V_N is ≥ δN.
std::vector<Vertex> interior(const Lattice& lat, double delta);
double boundary_linf_distance(const Lattice& lat, const Vertex& v);

// Aligned ancestors B*_j(v), one box per level j = 0..n-1 (corners on 2^j Z^d),
// or the full collections B_j(v) (corners on Z^d, 2^{dj} boxes per level).
std::vector<DyadicBox> dyadic_ancestors(const Lattice& lat, const Vertex& v, bool aligned);

}  // namespace lcgf

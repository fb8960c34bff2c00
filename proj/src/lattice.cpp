#include "lcgf/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lcgf {

bool DyadicBox::contains(const Vertex& v) const {
  if (v.d != d) return false;
  const std::int64_t s = size();
  for (int i = 0; i < d; ++i) {
    if (v.c[i] < corner[i] || v.c[i] >= corner[i] + s) return false;
  }
  return true;
}

Lattice::Lattice(std::int64_t N, int d) : N_(N), d_(d) {
  if (N < 1) throw std::invalid_argument("Lattice: N must be >= 1");
  if (d < 1 || d > 4) throw std::invalid_argument("Lattice: d must be in [1,4]");
  volume_ = 1;
  for (int i = 0; i < d; ++i) {
    if (volume_ > std::numeric_limits<std::int64_t>::max() / N)
      throw std::invalid_argument("Lattice: N^d overflows index range");
    volume_ *= N;
  }
}

bool Lattice::is_power_of_two() const { return (N_ & (N_ - 1)) == 0; }

int Lattice::levels() const {
  if (!is_power_of_two()) throw std::invalid_argument("Lattice: N is not a power of two");
  int n = 0;
  while ((std::int64_t{1} << n) < N_) ++n;
  return n;
}

std::int64_t Lattice::index_of(const Vertex& v) const {
  if (v.d != d_) throw std::invalid_argument("index_of: dimension mismatch");
  std::int64_t idx = 0;
  for (int i = 0; i < d_; ++i) {
    if (v.c[i] < 0 || v.c[i] >= N_) throw std::out_of_range("index_of: coordinate out of range");
    idx = idx * N_ + v.c[i];
  }
  return idx;
}

Vertex Lattice::vertex_at(std::int64_t index) const {
  if (index < 0 || index >= volume_) throw std::out_of_range("vertex_at: index out of range");
  Vertex v;
  v.d = d_;
  for (int i = d_ - 1; i >= 0; --i) {
    v.c[i] = static_cast<std::int32_t>(index % N_);
    index /= N_;
  }
  return v;
}

bool Lattice::contains(const Vertex& v) const {
  if (v.d != d_) return false;
  for (int i = 0; i < d_; ++i)
    if (v.c[i] < 0 || v.c[i] >= N_) return false;
  return true;
}

std::int64_t squared_distance(const Vertex& u, const Vertex& v) {
  if (u.d != v.d) throw std::invalid_argument("squared_distance: dimension mismatch");
  std::int64_t s = 0;
  for (int i = 0; i < u.d; ++i) {
    const std::int64_t dx = std::int64_t{u.c[i]} - v.c[i];
    s += dx * dx;
  }
  return s;
}

double euclidean_distance(const Vertex& u, const Vertex& v) {
  return std::sqrt(static_cast<double>(squared_distance(u, v)));
}

double linf_distance(const Vertex& u, const Vertex& v) {
  if (u.d != v.d) throw std::invalid_argument("linf_distance: dimension mismatch");
  std::int64_t m = 0;
  for (int i = 0; i < u.d; ++i) m = std::max<std::int64_t>(m, std::abs(std::int64_t{u.c[i]} - v.c[i]));
  return static_cast<double>(m);
}

std::int64_t torus_squared_distance(const Vertex& u, const Vertex& v, std::int64_t N) {
  if (u.d != v.d) throw std::invalid_argument("torus_distance: dimension mismatch");
  // Per-axis minimum over shifts in {-N, 0, N} is attained independently.
  std::int64_t s = 0;
  for (int i = 0; i < u.d; ++i) {
    const std::int64_t dx = std::int64_t{u.c[i]} - v.c[i];
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t shift : {-N, std::int64_t{0}, N}) {
      const std::int64_t t = dx + shift;
      best = std::min(best, t * t);
    }
    s += best;
  }
  return s;
}

double torus_distance(const Vertex& u, const Vertex& v, std::int64_t N) {
  return std::sqrt(static_cast<double>(torus_squared_distance(u, v, N)));
}

std::vector<std::array<std::int32_t, 4>> ball_offsets(int d, double r) {
  if (r < 0) throw std::invalid_argument("ball_offsets: r must be >= 0");
  const std::int32_t R = static_cast<std::int32_t>(std::floor(r));
  const double r2 = r * r;
  std::vector<std::array<std::int32_t, 4>> out;
  std::array<std::int32_t, 4> o{0, 0, 0, 0};
  // Nested scan over the cube [-R, R]^d.
  std::array<std::int32_t, 4> cur{};
  auto rec = [&](auto&& self, int axis) -> void {
    if (axis == d) {
      std::int64_t s = 0;
      for (int i = 0; i < d; ++i) s += std::int64_t{cur[i]} * cur[i];
      if (static_cast<double>(s) <= r2) {
        o = {0, 0, 0, 0};
        for (int i = 0; i < d; ++i) o[i] = cur[i];
        out.push_back(o);
      }
      return;
    }
    for (std::int32_t x = -R; x <= R; ++x) {
      cur[axis] = x;
      self(self, axis + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Vertex> ball(const Lattice& lat, const Vertex& v, double r) {
  if (v.d != lat.dim()) throw std::invalid_argument("ball: dimension mismatch");
  std::vector<Vertex> out;
  for (const auto& o : ball_offsets(lat.dim(), r)) {
    Vertex u = v;
    bool ok = true;
    for (int i = 0; i < lat.dim(); ++i) {
      u.c[i] = v.c[i] + o[i];
      if (u.c[i] < 0 || u.c[i] >= lat.side()) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(u);
  }
  return out;
}

double boundary_linf_distance(const Lattice& lat, const Vertex& v) {
  std::int64_t m = std::numeric_limits<std::int64_t>::max();
  for (int i = 0; i < lat.dim(); ++i) {
    m = std::min(m, std::int64_t{v.c[i]} + 1);
    m = std::min(m, lat.side() - v.c[i]);
  }
  return static_cast<double>(m);
}

std::vector<Vertex> interior(const Lattice& lat, double delta) {
  if (delta < 0 || delta >= 1) throw std::invalid_argument("interior: delta must be in [0,1)");
  const double need = delta * static_cast<double>(lat.side());
  std::vector<Vertex> out;
  for (std::int64_t i = 0; i < lat.volume(); ++i) {
    Vertex v = lat.vertex_at(i);
    if (boundary_linf_distance(lat, v) >= need) out.push_back(v);
  }
  return out;
}

std::vector<DyadicBox> dyadic_ancestors(const Lattice& lat, const Vertex& v, bool aligned) {
  const int n = lat.levels();  // throws when N is not a power of two
  if (!lat.contains(v)) throw std::invalid_argument("dyadic_ancestors: vertex outside lattice");
  std::vector<DyadicBox> out;
  for (int j = 0; j < n; ++j) {
    const std::int64_t s = std::int64_t{1} << j;
    if (aligned) {
      DyadicBox b;
      b.level = j;
      b.d = lat.dim();
      for (int i = 0; i < lat.dim(); ++i)
        b.corner[i] = static_cast<std::int32_t>((v.c[i] / s) * s);
      out.push_back(b);
    } else {
      // Corners in (v - 2^j, v] per axis.
      std::array<std::int32_t, 4> cur{};
      auto rec = [&](auto&& self, int axis) -> void {
        if (axis == lat.dim()) {
          DyadicBox b;
          b.level = j;
          b.d = lat.dim();
          b.corner = cur;
          out.push_back(b);
          return;
        }
        for (std::int64_t c = v.c[axis] - s + 1; c <= v.c[axis]; ++c) {
          cur[axis] = static_cast<std::int32_t>(c);
          self(self, axis + 1);
        }
      };
      rec(rec, 0);
    }
  }
  return out;
}

}  // namespace lcgf

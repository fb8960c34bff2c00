#include "lcgf/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lcgf {

double m_n(std::int64_t N, int d) {
  if (N < 3) throw std::domain_error("m_n: requires N >= 3 (log log N must be positive)");
  const double logN = std::log(static_cast<double>(N));
  const double s = std::sqrt(2.0 * d);
  return s * logN - 1.5 / s * std::log(logN);
}

std::pair<std::int64_t, double> field_max(const FieldSample& f) {
  if (f.values.empty()) throw std::invalid_argument("field_max: empty field");
  std::int64_t arg = 0;
  double best = f.values[0];
  for (std::int64_t i = 1; i < static_cast<std::int64_t>(f.values.size()); ++i) {
    if (f.values[i] > best) {
      best = f.values[i];
      arg = i;
    }
  }
  return {arg, best};
}

LevelSet level_set(const FieldSample& f, double t) {
  const double cut = m_n(f.lattice.side(), f.lattice.dim()) - t;
  LevelSet ls;
  ls.threshold = t;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(f.values.size()); ++i)
    if (f.values[i] >= cut) ls.members.push_back(i);
  return ls;
}

double top_sum(std::vector<double> values, std::int64_t ell) {
  if (ell < 1) throw std::invalid_argument("top_sum: ell must be >= 1");
  if (ell > static_cast<std::int64_t>(values.size())) return kTopSumUndefined;
  std::nth_element(values.begin(), values.begin() + (ell - 1), values.end(),
                   std::greater<double>());
  double s = 0;
  for (std::int64_t i = 0; i < ell; ++i) s += values[i];
  return s;
}

double top_sum(const FieldSample& f, std::int64_t ell) { return top_sum(f.values, ell); }

namespace {

// Separable sliding l-inf window maximum with half-width h, edges clipped.
void window_max_axis(std::vector<double>& data, std::int64_t N, int d, int axis, std::int64_t h) {
  std::int64_t stride = 1;
  for (int a = d - 1; a > axis; --a) stride *= N;
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= N;
  std::vector<double> line(N), out(N);
  for (std::int64_t base = 0; base < total; ++base) {
    if ((base / stride) % N != 0) continue;
    for (std::int64_t c = 0; c < N; ++c) line[c] = data[base + c * stride];
    // Monotonic deque over the window [c-h, c+h].
    std::vector<std::int64_t> dq(N + 1);
    std::int64_t head = 0, tail = 0;
    std::int64_t added = -1;
    for (std::int64_t c = 0; c < N; ++c) {
      for (std::int64_t k = added + 1; k <= std::min<std::int64_t>(c + h, N - 1); ++k) {
        while (tail > head && line[dq[tail - 1]] <= line[k]) --tail;
        dq[tail++] = k;
        added = k;
      }
      while (dq[head] < c - h) ++head;
      out[c] = line[dq[head]];
    }
    for (std::int64_t c = 0; c < N; ++c) data[base + c * stride] = out[c];
  }
}

}  // namespace

ExtremaSet local_extrema(const FieldSample& f, double r) {
  if (!(r > 0)) throw std::invalid_argument("local_extrema: r must be > 0");
  const Lattice& lat = f.lattice;
  const int d = lat.dim();
  const std::int64_t N = lat.side();
  ExtremaSet es;
  es.radius = r;
  const auto offsets = ball_offsets(d, r);

  auto exact_check = [&](std::int64_t i) {
    const Vertex v = lat.vertex_at(i);
    const double x = f.values[i];
    for (const auto& o : offsets) {
      Vertex u = v;
      bool in = true;
      for (int a = 0; a < d; ++a) {
        u.c[a] = v.c[a] + o[a];
        if (u.c[a] < 0 || u.c[a] >= N) {
          in = false;
          break;
        }
      }
      if (in && f.values[lat.index_of(u)] > x) return false;
    }
    return true;
  };

  const std::int64_t h = static_cast<std::int64_t>(std::floor(r / std::sqrt(double(d))));
  if (h >= 2 && lat.volume() >= 4096) {
    // Prefilter: the inscribed l-inf window of half-width h sits inside the
    // Euclidean ball, so any r-local maximum also attains the window maximum.
    std::vector<double> wmax = f.values;
    for (int axis = 0; axis < d; ++axis) window_max_axis(wmax, N, d, axis, h);
    for (std::int64_t i = 0; i < lat.volume(); ++i)
      if (f.values[i] == wmax[i] && exact_check(i)) es.vertices.push_back(i);
  } else {
    for (std::int64_t i = 0; i < lat.volume(); ++i)
      if (exact_check(i)) es.vertices.push_back(i);
  }
  return es;
}

std::vector<std::pair<std::int64_t, std::int64_t>> mesoscopic_pairs(const FieldSample& f,
                                                                    double lambda, double r) {
  if (r < 1) throw std::invalid_argument("mesoscopic_pairs: r must be >= 1");
  const double N = static_cast<double>(f.lattice.side());
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (r * r > N) return out;  // empty window
  const LevelSet ls = level_set(f, lambda);
  const double lo = r, hi = N / r;
  for (std::size_t a = 0; a < ls.members.size(); ++a) {
    const Vertex u = f.lattice.vertex_at(ls.members[a]);
    for (std::size_t b = a + 1; b < ls.members.size(); ++b) {
      const Vertex v = f.lattice.vertex_at(ls.members[b]);
      const double dist = euclidean_distance(u, v);
      if (dist >= lo && dist <= hi) out.emplace_back(ls.members[a], ls.members[b]);
    }
  }
  return out;
}

}  // namespace lcgf

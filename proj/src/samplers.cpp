#include "lcgf/samplers.hpp"

#include <cmath>
#include <stdexcept>

namespace lcgf {

namespace {
const double kLog2 = std::log(2.0);
}

FieldSample sample_mvn(const CovarianceKernel& kernel, RngStream& rng) {
  const Eigen::MatrixXd& L = kernel.cholesky();
  const std::int64_t m = kernel.dimension();
  Eigen::VectorXd z(m);
  for (std::int64_t i = 0; i < m; ++i) z[i] = rng.next_gaussian();
  Eigen::VectorXd x = L.template triangularView<Eigen::Lower>() * z;
  FieldSample f{kernel.lattice(), std::vector<double>(x.data(), x.data() + m), "mvn", rng.seed(),
                rng.stream()};
  return f;
}

FieldSample sample_brw(int n, int d, RngStream& rng) {
  const std::int64_t N = std::int64_t{1} << n;
  Lattice lat(N, d);
  FieldSample f{lat, std::vector<double>(lat.volume(), 0.0), "brw", rng.seed(), rng.stream()};
  const double sigma = std::sqrt(kLog2);
  for (int j = 0; j < n; ++j) {
    const std::int64_t boxes_per_axis = N >> j;
    Lattice boxgrid(boxes_per_axis, d);
    std::vector<double> g(boxgrid.volume());
    for (std::int64_t b = 0; b < boxgrid.volume(); ++b) g[b] = sigma * rng.next_gaussian();
    for (std::int64_t i = 0; i < lat.volume(); ++i) {
      const Vertex v = lat.vertex_at(i);
      Vertex box;
      box.d = d;
      for (int a = 0; a < d; ++a) box.c[a] = v.c[a] >> j;
      f.values[i] += g[boxgrid.index_of(box)];
    }
  }
  return f;
}

namespace {

// In-place circular backward-window sum of length `window` along `axis`:
// out[v] = sum_{k=0}^{window-1} in[v with axis coord (c-k) mod N].
void circular_window_sum(std::vector<double>& data, std::int64_t N, int d, int axis,
                         std::int64_t window) {
  std::int64_t stride = 1;
  for (int a = d - 1; a > axis; --a) stride *= N;
  const std::int64_t axis_span = stride * N;
  const std::int64_t total = [&] {
    std::int64_t t = 1;
    for (int a = 0; a < d; ++a) t *= N;
    return t;
  }();
  std::vector<double> line(N), out(N);
  for (std::int64_t base = 0; base < total; ++base) {
    // Visit each 1D line once: base must have axis coordinate 0.
    if ((base / stride) % N != 0) continue;
    for (std::int64_t c = 0; c < N; ++c) line[c] = data[base + c * stride];
    double s = 0;
    for (std::int64_t k = 0; k < window; ++k) s += line[(N - k) % N];
    out[0] = s;
    for (std::int64_t c = 1; c < N; ++c) {
      s += line[c] - line[(c - window % N + N) % N];
      out[c] = s;
    }
    for (std::int64_t c = 0; c < N; ++c) data[base + c * stride] = out[c];
  }
  (void)axis_span;
}

}  // namespace

FieldSample sample_mbrw(int n, int d, RngStream& rng) {
  const std::int64_t N = std::int64_t{1} << n;
  Lattice lat(N, d);
  FieldSample f{lat, std::vector<double>(lat.volume(), 0.0), "mbrw", rng.seed(), rng.stream()};
  std::vector<double> level(lat.volume());
  for (int j = 0; j < n; ++j) {
    const double sigma = std::sqrt(std::ldexp(kLog2, -d * j));
    for (std::int64_t i = 0; i < lat.volume(); ++i) level[i] = sigma * rng.next_gaussian();
    // Each vertex sums the class values of the 2^{dj} boxes containing it:
    // corners (v - 2^j, v] per axis, reduced mod N. Window length 2^j <= N/2,
    // so every class appears at most once per window.
    for (int axis = 0; axis < d; ++axis)
      circular_window_sum(level, N, d, axis, std::int64_t{1} << j);
    for (std::int64_t i = 0; i < lat.volume(); ++i) f.values[i] += level[i];
  }
  return f;
}

FieldSample sample_dgff(const CovarianceKernel& dgff_kernel, RngStream& rng) {
  FieldSample f = sample_mvn(dgff_kernel, rng);
  f.model = "dgff";
  return f;
}

ModelTag model_from_string(const std::string& s) {
  if (s == "brw") return ModelTag::Brw;
  if (s == "mbrw") return ModelTag::Mbrw;
  if (s == "dgff") return ModelTag::Dgff;
  throw std::invalid_argument("unknown model: " + s);
}

std::string model_to_string(ModelTag m) {
  switch (m) {
    case ModelTag::Brw: return "brw";
    case ModelTag::Mbrw: return "mbrw";
    case ModelTag::Dgff: return "dgff";
  }
  return "?";
}

namespace {
FieldSample sample_model(ModelTag model, const Lattice& lat, RngStream& rng,
                         const CovarianceKernel* explicit_kernel) {
  switch (model) {
    case ModelTag::Brw: return sample_brw(lat.levels(), lat.dim(), rng);
    case ModelTag::Mbrw: return sample_mbrw(lat.levels(), lat.dim(), rng);
    case ModelTag::Dgff: {
      if (!explicit_kernel) throw std::invalid_argument("ou_pair: DGFF needs its kernel");
      return sample_dgff(*explicit_kernel, rng);
    }
  }
  throw std::invalid_argument("sample_model: bad model");
}
}  // namespace

OuPair ou_pair(ModelTag model, const Lattice& lat, double t, RngStream& rng,
               const CovarianceKernel* explicit_kernel) {
  const double logN = std::log(static_cast<double>(lat.side()));
  if (t < 0 || t >= logN) throw std::invalid_argument("ou_pair: requires 0 <= t < log N");
  RngStream r1 = rng.substream(1), r2 = rng.substream(2);
  OuPair p;
  p.t = t;
  p.prime = sample_model(model, lat, r1, explicit_kernel);
  p.dprime = sample_model(model, lat, r2, explicit_kernel);
  const double c1 = std::sqrt(1.0 - t / logN), c2 = std::sqrt(t / logN);
  p.combined = p.prime;
  for (std::size_t i = 0; i < p.combined.values.size(); ++i)
    p.combined.values[i] = c1 * p.prime.values[i] + c2 * p.dprime.values[i];
  return p;
}

}  // namespace lcgf

#include "lcgf/covariance.hpp"

#include <cmath>
#include <sstream>

namespace lcgf {

namespace {
const double kLog2 = std::log(2.0);

void require_pow2(const Lattice& lat, const char* who) {
  if (!lat.is_power_of_two())
    throw std::invalid_argument(std::string(who) + ": N must be a power of two");
}
}  // namespace

double cov_brw(const Vertex& u, const Vertex& v, int n, int d) {
  if (u.d != d || v.d != d) throw std::invalid_argument("cov_brw: dimension mismatch");
  int shared = 0;
  for (int j = 0; j < n; ++j) {
    bool same = true;
    for (int i = 0; i < d; ++i) {
      if ((u.c[i] >> j) != (v.c[i] >> j)) {
        same = false;
        break;
      }
    }
    if (same) ++shared;
  }
  return kLog2 * shared;
}

double cov_mbrw(const Vertex& u, const Vertex& v, int n, int d) {
  if (u.d != d || v.d != d) throw std::invalid_argument("cov_mbrw: dimension mismatch");
  const std::int64_t N = std::int64_t{1} << n;
  double total = 0;
  for (int j = 0; j < n; ++j) {
    const std::int64_t s = std::int64_t{1} << j;
    // Per axis, the number of corner pairs (a,b) with a-b in {-N,0,N} is
    // sum over those shifts of max(0, s - |shift - (u_i - v_i)|).
    double pairs = 1;
    for (int i = 0; i < d; ++i) {
      const std::int64_t di = std::int64_t{u.c[i]} - v.c[i];
      std::int64_t cnt = 0;
      for (std::int64_t shift : {-N, std::int64_t{0}, N})
        cnt += std::max<std::int64_t>(0, s - std::llabs(shift - di));
      pairs *= static_cast<double>(cnt);
    }
    total += std::ldexp(kLog2, -d * j) * pairs;
  }
  return total;
}

Eigen::MatrixXd dgff_precision(const Lattice& lat) {
  if (lat.dim() != 2) throw std::invalid_argument("dgff_precision: d must be 2");
  if (lat.side() > 64) throw std::invalid_argument("dgff_precision: N capped at 64 for dense inversion");
  const std::int64_t N = lat.side();
  const std::int64_t V = lat.volume();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(V, V);
  for (std::int64_t i = 0; i < V; ++i) {
    const Vertex v = lat.vertex_at(i);
    Q(i, i) = 1.0;  // (1/4) * degree 4, neighbors outside V pinned to 0
    static const int dx[4] = {1, -1, 0, 0};
    static const int dy[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      Vertex u = v;
      u.c[0] += dx[k];
      u.c[1] += dy[k];
      if (u.c[0] >= 0 && u.c[0] < N && u.c[1] >= 0 && u.c[1] < N)
        Q(i, lat.index_of(u)) = -0.25;
    }
  }
  return Q;
}

CovarianceKernel::CovarianceKernel(Model m, const Lattice& lat) : model_(m), lat_(lat) {
  support_.resize(lat.volume());
  for (std::int64_t i = 0; i < lat.volume(); ++i) support_[i] = i;
}

CovarianceKernel CovarianceKernel::brw(const Lattice& lat) {
  require_pow2(lat, "CovarianceKernel::brw");
  CovarianceKernel k(Model::Brw, lat);
  k.n_ = lat.levels();
  return k;
}

CovarianceKernel CovarianceKernel::mbrw(const Lattice& lat) {
  require_pow2(lat, "CovarianceKernel::mbrw");
  CovarianceKernel k(Model::Mbrw, lat);
  k.n_ = lat.levels();
  return k;
}

CovarianceKernel CovarianceKernel::dgff(const Lattice& lat) {
  Eigen::MatrixXd Q = dgff_precision(lat);
  Eigen::MatrixXd cov = Q.llt().solve(Eigen::MatrixXd::Identity(Q.rows(), Q.cols()));
  cov = 0.5 * (cov + cov.transpose()).eval();  // symmetrize roundoff
  CovarianceKernel k(Model::Dgff, lat);
  k.cache_->dense = std::move(cov);
  return k;
}

CovarianceKernel CovarianceKernel::explicit_matrix(const Lattice& lat, Eigen::MatrixXd cov,
                                                   std::vector<std::int64_t> support,
                                                   bool verify_psd) {
  CovarianceKernel k(Model::Explicit, lat);
  if (!support.empty()) k.support_ = std::move(support);
  const auto m = static_cast<std::int64_t>(k.support_.size());
  if (cov.rows() != m || cov.cols() != m)
    throw std::invalid_argument("explicit_matrix: matrix size does not match support");
  if (!cov.isApprox(cov.transpose(), 0.0))
    throw std::invalid_argument("explicit_matrix: matrix is not exactly symmetric");
  for (std::int64_t i = 0; i < m; ++i)
    if (!(cov(i, i) > 0)) throw std::invalid_argument("explicit_matrix: diagonal must be positive");
  if (verify_psd && m <= 2048) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    const double floor = -1e-8 * cov.trace() / static_cast<double>(m);
    if (es.eigenvalues().minCoeff() < floor)
      throw std::invalid_argument("explicit_matrix: matrix fails positive-semidefiniteness check");
  }
  k.cache_->dense = std::move(cov);
  return k;
}

double CovarianceKernel::operator()(std::int64_t i, std::int64_t j) const {
  switch (model_) {
    case Model::Brw:
      return cov_brw(lat_.vertex_at(support_[i]), lat_.vertex_at(support_[j]), n_, lat_.dim());
    case Model::Mbrw:
      return cov_mbrw(lat_.vertex_at(support_[i]), lat_.vertex_at(support_[j]), n_, lat_.dim());
    case Model::Dgff:
    case Model::Explicit:
      return (*cache_->dense)(i, j);
  }
  return 0;
}

double CovarianceKernel::cov_vertices(const Vertex& u, const Vertex& v) const {
  switch (model_) {
    case Model::Brw:
      return cov_brw(u, v, n_, lat_.dim());
    case Model::Mbrw:
      return cov_mbrw(u, v, n_, lat_.dim());
    default: {
      // Support must be the full lattice for direct vertex addressing.
      const std::int64_t iu = lat_.index_of(u), iv = lat_.index_of(v);
      if (dimension() != lat_.volume())
        throw std::logic_error("cov_vertices: kernel is not defined on the full lattice");
      return (*cache_->dense)(iu, iv);
    }
  }
}

const Eigen::MatrixXd& CovarianceKernel::dense() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->dense) {
    const std::int64_t m = dimension();
    if (m > 4096) throw std::invalid_argument("CovarianceKernel: dense cap is 4096 vertices");
    Eigen::MatrixXd M(m, m);
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = i; j < m; ++j) M(i, j) = M(j, i) = (*this)(i, j);
    cache_->dense = std::move(M);
  }
  return *cache_->dense;
}

const Eigen::MatrixXd& CovarianceKernel::cholesky() const {
  const Eigen::MatrixXd& M = dense();
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->chol) {
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() == Eigen::Success) {
      cache_->chol = Eigen::MatrixXd(llt.matrixL());
    } else {
      const double jitter = 1e-10 * M.trace() / static_cast<double>(M.rows());
      Eigen::MatrixXd Mj = M;
      Mj.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd> retry(Mj);
      if (retry.info() != Eigen::Success)
        throw std::runtime_error("CovarianceKernel: Cholesky failed even with diagonal jitter");
      cache_->chol = Eigen::MatrixXd(retry.matrixL());
    }
  }
  return *cache_->chol;
}

CovarianceKernel CovarianceKernel::restrict_to(const std::vector<std::int64_t>& subset) const {
  const auto m = static_cast<std::int64_t>(subset.size());
  // Map global indices to support-local positions.
  std::vector<std::int64_t> local(m);
  for (std::int64_t k = 0; k < m; ++k) {
    auto it = std::find(support_.begin(), support_.end(), subset[k]);
    if (it == support_.end())
      throw std::invalid_argument("restrict_to: vertex not in kernel support");
    local[k] = it - support_.begin();
  }
  Eigen::MatrixXd M(m, m);
  for (std::int64_t i = 0; i < m; ++i)
    for (std::int64_t j = i; j < m; ++j) M(i, j) = M(j, i) = (*this)(local[i], local[j]);
  return explicit_matrix(lat_, std::move(M), subset, false);
}

double CovarianceKernel::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

AssumptionReport check_assumptions(const CovarianceKernel& kernel, double delta) {
  const Lattice& lat = kernel.lattice();
  if (kernel.dimension() != lat.volume())
    throw std::invalid_argument("check_assumptions: kernel must cover the full lattice");
  const double logN = std::log(static_cast<double>(lat.side()));
  AssumptionReport rep;
  rep.delta = delta;
  rep.alpha0 = -std::numeric_limits<double>::infinity();
  const std::int64_t V = lat.volume();

  std::vector<double> var(V);
  for (std::int64_t i = 0; i < V; ++i) var[i] = kernel.variance(i);

  // Var phi_v <= log N + alpha_0
  for (std::int64_t i = 0; i < V; ++i) {
    const double w = var[i] - logN;
    if (w > rep.alpha0) {
      rep.alpha0 = w;
      rep.alpha0_pair = {i, i};
    }
  }
  // E(phi_u - phi_v)^2 <= 2 log_+|u-v| - |Var_u - Var_v| + 4 alpha_0
  for (std::int64_t i = 0; i < V; ++i) {
    const Vertex u = lat.vertex_at(i);
    for (std::int64_t j = i + 1; j < V; ++j) {
      const Vertex v = lat.vertex_at(j);
      const double inc = var[i] + var[j] - 2.0 * kernel(i, j);
      const double w = (inc - 2.0 * log_plus(euclidean_distance(u, v)) +
                        std::fabs(var[i] - var[j])) / 4.0;
      if (w > rep.alpha0) {
        rep.alpha0 = w;
        rep.alpha0_pair = {i, j};
      }
    }
  }

  // |Cov - (log N - log_+|u-v|)| < alpha(delta) over pairs in V_N^delta
  const double need = delta * static_cast<double>(lat.side());
  std::vector<std::int64_t> inner;
  for (std::int64_t i = 0; i < V; ++i)
    if (boundary_linf_distance(lat, lat.vertex_at(i)) >= need) inner.push_back(i);
  rep.alpha_delta = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < inner.size(); ++a) {
    const Vertex u = lat.vertex_at(inner[a]);
    for (std::size_t b = a; b < inner.size(); ++b) {
      const Vertex v = lat.vertex_at(inner[b]);
      const double target = logN - log_plus(euclidean_distance(u, v));
      const double w = std::fabs(kernel(inner[a], inner[b]) - target);
      if (w > rep.alpha_delta) {
        rep.alpha_delta = w;
        rep.alpha_delta_pair = {inner[a], inner[b]};
      }
    }
  }
  if (inner.empty()) rep.alpha_delta = 0;
  return rep;
}

LogCorrWitness mbrw_log_correlation_witness(std::int64_t N, int d) {
  Lattice lat(N, d);
  const int n = lat.levels();
  const double logN = std::log(static_cast<double>(N));
  LogCorrWitness w;
  w.value = -1;
  const std::int64_t V = lat.volume();
  // Covariance and torus distance depend only on (u - v) mod N, so one scan
  // against the origin covers all pairs.
  const Vertex origin = lat.vertex_at(0);
  for (std::int64_t j = 0; j < V; ++j) {
    const Vertex v = lat.vertex_at(j);
    const double target = logN - log_plus(torus_distance(origin, v, N));
    const double val = std::fabs(cov_mbrw(origin, v, n, d) - target);
    if (val > w.value) {
      w.value = val;
      w.pair = {0, j};
    }
  }
  return w;
}

PackingLayout build_packing(const Lattice& lat, std::int64_t inner_side, std::int64_t dilation) {
  if (inner_side < 1 || dilation < 1)
    throw std::invalid_argument("build_packing: N' and K must be >= 1");
  const std::int64_t N = lat.side();
  if (N < 6 * dilation * inner_side)
    throw std::invalid_argument("build_packing: requires N >= 6*K*N'");
  const int d = lat.dim();
  const std::int64_t K = dilation, Np = inner_side;

  // Interior bounds for V_N^{1/10}: c+1 >= N/10 and N-c >= N/10, in exact
  // integer arithmetic.
  const std::int64_t cmin = (N + 9) / 10 - 1;
  const std::int64_t cmax = (9 * N) / 10;
  const std::int64_t stride = 2 * K * Np;
  const std::int64_t extent = K * (Np - 1);
  std::int64_t per_axis = 0;
  while (cmin + stride * per_axis + extent <= cmax) ++per_axis;
  std::int64_t want = N / (3 * K * Np);
  std::int64_t count = 1, want_total = 1;
  for (int i = 0; i < d; ++i) {
    count *= per_axis;
    want_total *= want;
  }
  if (count < want_total)
    throw std::logic_error("build_packing: block count fell below floor(N/(3KN'))^d");

  PackingLayout p{Np, K, lat, Lattice(Np, d), {}, {}, {}};
  Lattice grid(per_axis == 0 ? 1 : per_axis, d);
  for (std::int64_t g = 0; g < grid.volume() && per_axis > 0; ++g) {
    const Vertex x = grid.vertex_at(g);
    Vertex origin;
    origin.d = d;
    for (int i = 0; i < d; ++i)
      origin.c[i] = static_cast<std::int32_t>(cmin + stride * x.c[i]);
    std::vector<std::int64_t> block;
    block.reserve(p.inner.volume());
    for (std::int64_t b = 0; b < p.inner.volume(); ++b) {
      const Vertex vp = p.inner.vertex_at(b);
      Vertex v = origin;
      for (int i = 0; i < d; ++i) v.c[i] = static_cast<std::int32_t>(origin.c[i] + K * vp.c[i]);
      block.push_back(lat.index_of(v));
    }
    p.origins.push_back(origin);
    p.blocks.push_back(block);
    p.all_vertices.insert(p.all_vertices.end(), block.begin(), block.end());
  }
  return p;
}

CovarianceKernel build_aux_covariance(const CovarianceKernel& base, const PackingLayout& packing,
                                      const CovarianceKernel& block, AuxMode /*mode*/) {
  if (base.lattice().side() != packing.outer.side() || base.lattice().dim() != packing.outer.dim())
    throw std::invalid_argument("build_aux_covariance: base kernel lattice mismatch");
  if (block.lattice().side() != packing.inner_side)
    throw std::invalid_argument("build_aux_covariance: block kernel must live on V_{N'}");

  const std::int64_t per_block = packing.inner.volume();
  const auto m = static_cast<std::int64_t>(packing.all_vertices.size());
  std::vector<double> a(m);
  for (std::int64_t k = 0; k < m; ++k) {
    const std::int64_t g = packing.all_vertices[k];
    const std::int64_t local = k % per_block;  // row-major position inside V_{N'}
    const double a2 = base.cov_vertices(packing.outer.vertex_at(g), packing.outer.vertex_at(g)) -
                      block(local, local);
    if (a2 < 0) {
      std::ostringstream os;
      os << "build_aux_covariance: negative a_v^2 at global vertex " << g
         << " (K too small: Var base " << a2 + block(local, local) << " <= Var block "
         << block(local, local) << ")";
      throw std::invalid_argument(os.str());
    }
    a[k] = std::sqrt(a2);
  }

  Eigen::MatrixXd M(m, m);
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = i; j < m; ++j) {
      double c = a[i] * a[j];
      if (i / per_block == j / per_block) c += block(i % per_block, j % per_block);
      M(i, j) = M(j, i) = c;
    }
  }
  // Diagonal equals the base diagonal exactly.
  for (std::int64_t i = 0; i < m; ++i) {
    const Vertex v = packing.outer.vertex_at(packing.all_vertices[i]);
    M(i, i) = base.cov_vertices(v, v);
  }
  return CovarianceKernel::explicit_matrix(base.lattice(), std::move(M), packing.all_vertices,
                                           false);
}

std::string DominationCertificate::describe() const {
  std::ostringstream os;
  os << (dominates ? "dominates" : "VIOLATED") << " (worst off-diagonal margin " << worst_margin
     << " at local pair (" << worst_pair.u << "," << worst_pair.v << "), diagonal discrepancy "
     << diag_max_discrepancy << ", tolerance " << tolerance << ")";
  return os.str();
}

DominationCertificate check_domination(const CovarianceKernel& kA, const CovarianceKernel& kB,
                                       bool require_equal_diagonal, double tolerance) {
  if (kA.dimension() != kB.dimension() || kA.support() != kB.support())
    throw std::invalid_argument("check_domination: kernels must share a vertex set");
  DominationCertificate cert;
  cert.tolerance = tolerance;
  cert.worst_margin = -std::numeric_limits<double>::infinity();
  const std::int64_t m = kA.dimension();
  for (std::int64_t i = 0; i < m; ++i) {
    cert.diag_max_discrepancy =
        std::max(cert.diag_max_discrepancy, std::fabs(kA(i, i) - kB(i, i)));
    for (std::int64_t j = i + 1; j < m; ++j) {
      const double margin = kA(i, j) - kB(i, j);
      if (margin > cert.worst_margin) {
        cert.worst_margin = margin;
        cert.worst_pair = {i, j};
      }
    }
  }
  if (m < 2) cert.worst_margin = 0;
  cert.dominates = cert.worst_margin <= tolerance &&
                   (!require_equal_diagonal || cert.diag_max_discrepancy <= tolerance);
  return cert;
}

}  // namespace lcgf

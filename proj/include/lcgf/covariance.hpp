#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lcgf/lattice.hpp"

namespace lcgf {

// log max(x, 1)
inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// Exact pairwise covariances of the hierarchical fields.
// cov_brw: (log 2) x number of levels j in 0..n-1 sharing the aligned box B*_j.
double cov_brw(const Vertex& u, const Vertex& v, int n, int d);
// cov_mbrw: sum over levels of 2^{-dj} log 2 times the number of box pairs
// (B in B_j(u), B' in B_j(v)) equal after translation by a vector in N Z^d.
double cov_mbrw(const Vertex& u, const Vertex& v, int n, int d);

// Precision of the 2D DGFF with zero boundary: Q = L/4 with L the Dirichlet
// graph Laplacian of V inside Z^2 (full degree 4 at every vertex).
Eigen::MatrixXd dgff_precision(const Lattice& lat);

class CovarianceKernel {
 public:
  enum class Model { Brw, Mbrw, Dgff, Explicit };

  static CovarianceKernel brw(const Lattice& lat);
  static CovarianceKernel mbrw(const Lattice& lat);
  static CovarianceKernel dgff(const Lattice& lat);  // d = 2, N <= 64
  // Dense kernel on the given support (global vertex indices; empty = all of
  // V_N). verify_psd runs the eigenvalue check when the matrix is small enough.
  static CovarianceKernel explicit_matrix(const Lattice& lat, Eigen::MatrixXd cov,
                                          std::vector<std::int64_t> support = {},
                                          bool verify_psd = true);

  Model model() const { return model_; }
  const Lattice& lattice() const { return lat_; }
  const std::vector<std::int64_t>& support() const { return support_; }
  std::int64_t dimension() const { return static_cast<std::int64_t>(support_.size()); }

  // Support-local indexing.
  double operator()(std::int64_t i, std::int64_t j) const;
  double variance(std::int64_t i) const { return (*this)(i, i); }
  double cov_vertices(const Vertex& u, const Vertex& v) const;

  const Eigen::MatrixXd& dense() const;
  // Lower-triangular Cholesky factor; one diagonal-jitter retry, then error.
  const Eigen::MatrixXd& cholesky() const;

  CovarianceKernel restrict_to(const std::vector<std::int64_t>& subset) const;
  double min_eigenvalue() const;

 private:
  CovarianceKernel(Model m, const Lattice& lat);

  Model model_;
  Lattice lat_;
  int n_ = 0;  // log2 N for hierarchical models
  std::vector<std::int64_t> support_;

  struct Cache {
    std::mutex mu;
    std::optional<Eigen::MatrixXd> dense;
    std::optional<Eigen::MatrixXd> chol;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct VertexPair {
  std::int64_t u = 0;  // global linear indices
  std::int64_t v = 0;
};

// Witnesses for Assumptions on the covariance: the smallest alpha_0 and
// alpha(delta) that make them hold on this lattice, with the attaining pairs.
struct AssumptionReport {
  double alpha0 = 0;
  VertexPair alpha0_pair;           // u == v when the variance bound binds
  double alpha_delta = 0;
  VertexPair alpha_delta_pair;
  double delta = 0;
};

AssumptionReport check_assumptions(const CovarianceKernel& kernel, double delta);

// max over pairs of |cov_mbrw - (log N - log_+ |u-v|^(N))|, with the pair.
struct LogCorrWitness {
  double value = 0;
  VertexPair pair;
};
LogCorrWitness mbrw_log_correlation_witness(std::int64_t N, int d);

// Packed disjoint blocks D_i = 2KN' x_i + K V_{N'} inside V_N^{1/10}.
struct PackingLayout {
  std::int64_t inner_side = 0;  // N'
  std::int64_t dilation = 0;    // K
  Lattice outer;
  Lattice inner;
  std::vector<Vertex> origins;                       // 2KN' x_i
  std::vector<std::vector<std::int64_t>> blocks;     // global indices, row-major in V_{N'}
  std::vector<std::int64_t> all_vertices;            // concatenation, block-major

  std::int64_t block_count() const { return static_cast<std::int64_t>(blocks.size()); }
};

PackingLayout build_packing(const Lattice& lat, std::int64_t inner_side, std::int64_t dilation);

enum class AuxMode { ThetaBar, Psi };

// Covariance of the packed auxiliary field: i.i.d. block fields plus a shared
// global Gaussian scaled by a_v, with a_v^2 = Var base(v) - Var block(v').
CovarianceKernel build_aux_covariance(const CovarianceKernel& base, const PackingLayout& packing,
                                      const CovarianceKernel& block, AuxMode mode);

struct DominationCertificate {
  bool dominates = false;
  double diag_max_discrepancy = 0;
  double worst_margin = 0;  // max of kA(u,v) - kB(u,v) over off-diagonal pairs
  VertexPair worst_pair;    // support-local indices
  double tolerance = 0;
  std::string describe() const;
};

// Checks kA(u,v) <= kB(u,v) for all pairs (off-diagonal), the hypothesis of
// the Gaussian comparison inequalities. Violations are data, not errors.
DominationCertificate check_domination(const CovarianceKernel& kA, const CovarianceKernel& kB,
                                       bool require_equal_diagonal, double tolerance = 1e-9);

}  // namespace lcgf

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lcgf/bridge.hpp"
#include "lcgf/covariance.hpp"
#include "lcgf/gibbs_pd.hpp"
#include "lcgf/mc_report.hpp"

namespace lcgf {

// Deterministic parallel replication over stream indices 0..R-1 with
// fixed-order reduction; results are independent of the thread count.
McReport run_replicated(const std::function<double(RngStream&)>& task, std::int64_t replicas,
                        std::uint64_t seed, int threads = 0);

// Runs fn(i, stream_i) for i = 0..R-1 across threads; caller indexes results.
void parallel_replicas(std::int64_t replicas, std::uint64_t seed, int threads,
                       const std::function<void(std::int64_t, RngStream&)>& fn);

double median(std::vector<double> xs);
double quantile(std::vector<double> xs, double q);
// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

// ----- comparison-inequality verifiers -----

struct SlepianRow {
  double t = 0;
  double cdf_a = 0;  // P(max under kA <= t)
  double cdf_b = 0;
  double joint_se = 0;
};

struct OrderingReport {
  bool ran = false;         // false when the domination precondition failed
  bool pass = false;
  DominationCertificate certificate;
  std::vector<SlepianRow> rows;       // Slepian
  double mean_a = 0, mean_b = 0;      // Kahane: E S_ell estimates
  double diff_se = 0;                 // SE of (A - B) under common random numbers
  std::int64_t ell = 0;
  std::string message;
};

// Lemma "P(max X <= t) <= P(max Y <= t)" under Cov X <= Cov Y, equal
// diagonals. Refuses (ran=false) when the certificate fails.
OrderingReport verify_slepian(const CovarianceKernel& kA, const CovarianceKernel& kB,
                              const std::vector<double>& t_grid, std::int64_t replicas,
                              std::uint64_t seed, int threads = 0);

// Expectation ordering E S_ell(X) >= E S_ell(Y), common random numbers.
OrderingReport verify_kahane_top_sum(const CovarianceKernel& kA, const CovarianceKernel& kB,
                                     std::int64_t ell, std::int64_t replicas, std::uint64_t seed,
                                     int threads = 0);

// ----- headline experiments -----

struct TopSumRow {
  std::int64_t ell = 0;
  double mean = 0;
  double se = 0;
};

struct TopSumTable {
  std::vector<TopSumRow> rows;
  double lambda_hat = 0;  // fitted coefficient in E S_ell / ell ~ m_N - lambda log ell
  double m_n_value = 0;
};

TopSumTable estimate_E_top_sum(ModelTag model, std::int64_t N, int d,
                               const std::vector<std::int64_t>& ell_grid, std::int64_t replicas,
                               std::uint64_t seed, int threads = 0);

struct LevelSetReport {
  std::vector<double> t_grid;
  std::vector<std::vector<std::int64_t>> cardinalities;  // [t][replica]
  std::vector<double> medians;
  std::vector<double> q25, q75;
  double slope = 0;  // of log(median) against t
};

LevelSetReport level_set_scaling(ModelTag model, std::int64_t N, int d,
                                 const std::vector<double>& t_grid, std::int64_t replicas,
                                 std::uint64_t seed, int threads = 0);

struct CenteredMaxRow {
  std::int64_t N = 0;
  double mean = 0;  // mean(max - m_N)
  double se = 0;
};

std::vector<CenteredMaxRow> centered_max_table(ModelTag model, const std::vector<std::int64_t>& Ns,
                                               int d, std::int64_t replicas, std::uint64_t seed,
                                               int threads = 0);

// Default cluster radius rule: r(N) = ceil((log N)^2), clamped to [2, N/4].
double default_cluster_radius(std::int64_t N);

struct PdConvergenceRow {
  std::int64_t N = 0;
  std::int64_t batch = 0;
  double mean_p2 = 0;      // mean sum p_i^2 of cluster vectors
  double mean_p1 = 0;
  double mean_p12 = 0;
  std::int64_t replicas = 0;
};

struct PdConvergenceReport {
  double beta = 0, s = 0;
  double oracle_p2 = 0, oracle_p1 = 0, oracle_p12 = 0;
  std::vector<PdConvergenceRow> rows;
  // Median over batches of |mean_p2 - oracle_p2| per N, aligned with n_grid.
  std::vector<std::int64_t> n_grid;
  std::vector<double> median_discrepancy;
};

PdConvergenceReport pd_convergence(ModelTag model, const std::vector<std::int64_t>& n_grid, int d,
                                   double beta, std::int64_t replicas_per_batch,
                                   std::int64_t batches, std::int64_t oracle_replicas,
                                   std::uint64_t seed, int threads = 0);

struct OuInvarianceRow {
  std::string name;
  double lhs = 0;   // E e^{-<eta, f>}
  double rhs = 0;   // E e^{-<eta, f_t>}
  double lhs_se = 0, rhs_se = 0;
  double joint_se = 0;
  double diff_in_se = 0;  // |lhs - rhs| / joint_se
};

struct OuInvarianceReport {
  double t = 0;
  std::int64_t N = 0;
  std::vector<OuInvarianceRow> rows;
};

// Fixed library of non-negative test functions: smooth compactly supported
// bumps in y times bounded functions of z.
std::vector<std::pair<std::string, TestFunction>> test_function_library();

OuInvarianceReport ou_invariance(ModelTag model, std::int64_t N, int d, double t_flow,
                                 std::int64_t replicas, std::uint64_t seed, int threads = 0);

struct FreezingRow {
  double lambda = 0;
  double median_tail_mass = 0;
};

std::vector<FreezingRow> freezing_decay(ModelTag model, std::int64_t N, int d, double beta,
                                        const std::vector<double>& lambda_grid,
                                        std::int64_t replicas, std::uint64_t seed,
                                        int threads = 0);

struct BridgeScalingReport {
  std::vector<std::int64_t> n_grid;
  std::vector<McReport> estimates;
  double loglog_slope = 0;
};

BridgeScalingReport bridge_scaling(const std::vector<std::int64_t>& n_grid,
                                   const BarrierSpec& barrier, double offset,
                                   std::int64_t replicas, std::uint64_t seed, int threads = 0);

}  // namespace lcgf

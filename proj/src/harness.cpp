#include "lcgf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace lcgf {

void parallel_replicas(std::int64_t replicas, std::uint64_t seed, int threads,
                       const std::function<void(std::int64_t, RngStream&)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::int64_t>(threads, replicas));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t i = w; i < replicas; i += threads) {
          RngStream rng(seed, static_cast<std::uint64_t>(i));
          fn(i, rng);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

McReport run_replicated(const std::function<double(RngStream&)>& task, std::int64_t replicas,
                        std::uint64_t seed, int threads) {
  if (replicas < 2) throw std::invalid_argument("run_replicated: R must be >= 2");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> results(replicas);
  parallel_replicas(replicas, seed, threads,
                    [&](std::int64_t i, RngStream& rng) { results[i] = task(rng); });
  double sum = 0, sumsq = 0;
  for (double v : results) {  // fixed-order reduction
    sum += v;
    sumsq += v * v;
  }
  const double R = static_cast<double>(replicas);
  McReport rep;
  rep.estimate = sum / R;
  rep.standard_error = std::sqrt(std::max(0.0, (sumsq - sum * sum / R) / (R - 1)) / R);
  rep.replicas = replicas;
  rep.seed = seed;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1 - frac) + xs[hi] * frac;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fitted_slope: bad input");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

OrderingReport verify_slepian(const CovarianceKernel& kA, const CovarianceKernel& kB,
                              const std::vector<double>& t_grid, std::int64_t replicas,
                              std::uint64_t seed, int threads) {
  OrderingReport rep;
  rep.certificate = check_domination(kA, kB, /*require_equal_diagonal=*/true);
  if (!rep.certificate.dominates) {
    rep.message = "refused: domination precondition failed: " + rep.certificate.describe();
    return rep;
  }
  rep.ran = true;
  std::vector<double> max_a(replicas), max_b(replicas);
  parallel_replicas(replicas, seed, threads, [&](std::int64_t i, RngStream& rng) {
    RngStream ra = rng.substream(11), rb = rng.substream(12);
    const FieldSample fa = sample_mvn(kA, ra);
    const FieldSample fb = sample_mvn(kB, rb);
    max_a[i] = field_max(fa).second;
    max_b[i] = field_max(fb).second;
  });
  const double R = static_cast<double>(replicas);
  rep.pass = true;
  for (double t : t_grid) {
    SlepianRow row;
    row.t = t;
    std::int64_t ca = 0, cb = 0;
    for (std::int64_t i = 0; i < replicas; ++i) {
      if (max_a[i] <= t) ++ca;
      if (max_b[i] <= t) ++cb;
    }
    row.cdf_a = static_cast<double>(ca) / R;
    row.cdf_b = static_cast<double>(cb) / R;
    row.joint_se = std::sqrt(row.cdf_a * (1 - row.cdf_a) / R + row.cdf_b * (1 - row.cdf_b) / R);
    if (row.cdf_a - row.cdf_b > 3.0 * std::max(row.joint_se, 1e-12)) rep.pass = false;
    rep.rows.push_back(row);
  }
  return rep;
}

OrderingReport verify_kahane_top_sum(const CovarianceKernel& kA, const CovarianceKernel& kB,
                                     std::int64_t ell, std::int64_t replicas, std::uint64_t seed,
                                     int threads) {
  OrderingReport rep;
  rep.ell = ell;
  rep.certificate = check_domination(kA, kB, /*require_equal_diagonal=*/true);
  if (!rep.certificate.dominates) {
    rep.message = "refused: domination precondition failed: " + rep.certificate.describe();
    return rep;
  }
  rep.ran = true;
  const bool crn = kA.dimension() == kB.dimension();
  std::vector<double> sa(replicas), sb(replicas);
  parallel_replicas(replicas, seed, threads, [&](std::int64_t i, RngStream& rng) {
    if (crn) {
      // Shared standard normals through both factors.
      const std::int64_t m = kA.dimension();
      Eigen::VectorXd z(m);
      for (std::int64_t k = 0; k < m; ++k) z[k] = rng.next_gaussian();
      Eigen::VectorXd xa = kA.cholesky().triangularView<Eigen::Lower>() * z;
      Eigen::VectorXd xb = kB.cholesky().triangularView<Eigen::Lower>() * z;
      sa[i] = top_sum(std::vector<double>(xa.data(), xa.data() + m), ell);
      sb[i] = top_sum(std::vector<double>(xb.data(), xb.data() + m), ell);
    } else {
      RngStream ra = rng.substream(21), rb = rng.substream(22);
      sa[i] = top_sum(sample_mvn(kA, ra), ell);
      sb[i] = top_sum(sample_mvn(kB, rb), ell);
    }
  });
  const double R = static_cast<double>(replicas);
  double sum_a = 0, sum_b = 0, sum_d = 0, sum_d2 = 0;
  for (std::int64_t i = 0; i < replicas; ++i) {
    sum_a += sa[i];
    sum_b += sb[i];
    const double d = sa[i] - sb[i];
    sum_d += d;
    sum_d2 += d * d;
  }
  rep.mean_a = sum_a / R;
  rep.mean_b = sum_b / R;
  rep.diff_se = std::sqrt(std::max(0.0, (sum_d2 - sum_d * sum_d / R) / (R - 1)) / R);
  rep.pass = rep.mean_a >= rep.mean_b - 3.0 * std::max(rep.diff_se, 1e-12);
  return rep;
}

namespace {

FieldSample draw_model(ModelTag model, std::int64_t N, int d, RngStream& rng,
                       const CovarianceKernel* kernel) {
  Lattice lat(N, d);
  switch (model) {
    case ModelTag::Brw: return sample_brw(lat.levels(), d, rng);
    case ModelTag::Mbrw: return sample_mbrw(lat.levels(), d, rng);
    case ModelTag::Dgff:
      if (!kernel) throw std::invalid_argument("draw_model: DGFF needs its kernel");
      return sample_dgff(*kernel, rng);
  }
  throw std::invalid_argument("draw_model: bad model");
}

}  // namespace

TopSumTable estimate_E_top_sum(ModelTag model, std::int64_t N, int d,
                               const std::vector<std::int64_t>& ell_grid, std::int64_t replicas,
                               std::uint64_t seed, int threads) {
  Lattice lat(N, d);
  for (auto ell : ell_grid)
    if (ell > lat.volume()) throw std::invalid_argument("estimate_E_top_sum: ell > N^d");
  std::vector<std::vector<double>> vals(ell_grid.size(), std::vector<double>(replicas));
  parallel_replicas(replicas, seed, threads, [&](std::int64_t i, RngStream& rng) {
    const FieldSample f = draw_model(model, N, d, rng, nullptr);
    for (std::size_t k = 0; k < ell_grid.size(); ++k) vals[k][i] = top_sum(f, ell_grid[k]);
  });
  TopSumTable table;
  table.m_n_value = m_n(N, d);
  const double R = static_cast<double>(replicas);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < ell_grid.size(); ++k) {
    double s = 0, s2 = 0;
    for (double v : vals[k]) {
      s += v;
      s2 += v * v;
    }
    TopSumRow row;
    row.ell = ell_grid[k];
    row.mean = s / R;
    row.se = std::sqrt(std::max(0.0, (s2 - s * s / R) / (R - 1)) / R);
    table.rows.push_back(row);
    xs.push_back(std::log(static_cast<double>(row.ell)));
    ys.push_back(row.mean / static_cast<double>(row.ell));
  }
  table.lambda_hat = -fitted_slope(xs, ys);
  return table;
}

LevelSetReport level_set_scaling(ModelTag model, std::int64_t N, int d,
                                 const std::vector<double>& t_grid, std::int64_t replicas,
                                 std::uint64_t seed, int threads) {
  LevelSetReport rep;
  rep.t_grid = t_grid;
  rep.cardinalities.assign(t_grid.size(), std::vector<std::int64_t>(replicas));
  const double mN = m_n(N, d);
  parallel_replicas(replicas, seed, threads, [&](std::int64_t i, RngStream& rng) {
    const FieldSample f = draw_model(model, N, d, rng, nullptr);
    // Count against each threshold in one pass.
    std::vector<std::int64_t> counts(t_grid.size(), 0);
    for (double x : f.values)
      for (std::size_t k = 0; k < t_grid.size(); ++k)
        if (x >= mN - t_grid[k]) ++counts[k];
    for (std::size_t k = 0; k < t_grid.size(); ++k) rep.cardinalities[k][i] = counts[k];
  });
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<double> card(rep.cardinalities[k].begin(), rep.cardinalities[k].end());
    rep.medians.push_back(median(card));
    rep.q25.push_back(quantile(card, 0.25));
    rep.q75.push_back(quantile(card, 0.75));
    if (rep.medians.back() > 0) {
      xs.push_back(t_grid[k]);
      ys.push_back(std::log(rep.medians.back()));
    }
  }
  rep.slope = fitted_slope(xs, ys);
  return rep;
}

std::vector<CenteredMaxRow> centered_max_table(ModelTag model, const std::vector<std::int64_t>& Ns,
                                               int d, std::int64_t replicas, std::uint64_t seed,
                                               int threads) {
  std::vector<CenteredMaxRow> rows;
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    const std::int64_t N = Ns[k];
    const double mN = m_n(N, d);
    const McReport r = run_replicated(
        [&](RngStream& rng) {
          const FieldSample f = draw_model(model, N, d, rng, nullptr);
          return field_max(f).second - mN;
        },
        replicas, seed + k, threads);
    rows.push_back({N, r.estimate, r.standard_error});
  }
  return rows;
}

double default_cluster_radius(std::int64_t N) {
  const double logN = std::log(static_cast<double>(N));
  double r = std::ceil(logN * logN);
  r = std::max(2.0, std::min(r, static_cast<double>(N) / 4.0));
  return r;
}

PdConvergenceReport pd_convergence(ModelTag model, const std::vector<std::int64_t>& n_grid, int d,
                                   double beta, std::int64_t replicas_per_batch,
                                   std::int64_t batches, std::int64_t oracle_replicas,
                                   std::uint64_t seed, int threads) {
  const double beta_c = std::sqrt(2.0 * d);
  if (beta <= beta_c)
    throw std::invalid_argument("pd_convergence: requires beta > beta_c (supercritical regime)");
  PdConvergenceReport rep;
  rep.beta = beta;
  rep.s = beta_c / beta;
  rep.n_grid = n_grid;

  // PD oracle ensemble.
  {
    const double eps = 1e-8;
    std::vector<double> p2(oracle_replicas), p1(oracle_replicas), p12(oracle_replicas);
    parallel_replicas(oracle_replicas, seed ^ 0x9d5f, threads, [&](std::int64_t i, RngStream& rng) {
      const PdSample pd = sample_pd(rep.s, eps, rng);
      p2[i] = participation_ratio(pd.weights, 2);
      p1[i] = pd.weights.p[0];
      p12[i] = pd.weights.p[0] + (pd.weights.p.size() > 1 ? pd.weights.p[1] : 0.0);
    });
    rep.oracle_p2 = std::accumulate(p2.begin(), p2.end(), 0.0) / oracle_replicas;
    rep.oracle_p1 = std::accumulate(p1.begin(), p1.end(), 0.0) / oracle_replicas;
    rep.oracle_p12 = std::accumulate(p12.begin(), p12.end(), 0.0) / oracle_replicas;
  }

  for (std::int64_t N : n_grid) {
    const double r = default_cluster_radius(N);
    std::vector<double> discrepancies;
    for (std::int64_t b = 0; b < batches; ++b) {
      std::vector<double> p2(replicas_per_batch), p1(replicas_per_batch), p12(replicas_per_batch);
      parallel_replicas(replicas_per_batch, seed + 1000 * (b + 1) + N, threads,
                        [&](std::int64_t i, RngStream& rng) {
                          const FieldSample f = draw_model(model, N, d, rng, nullptr);
                          const ClusterDecomposition cd = cluster_weights(f, beta, r);
                          p2[i] = participation_ratio(cd.ordered, 2);
                          p1[i] = cd.ordered.p[0];
                          p12[i] = cd.ordered.p[0] +
                                   (cd.ordered.p.size() > 1 ? cd.ordered.p[1] : 0.0);
                        });
      PdConvergenceRow row;
      row.N = N;
      row.batch = b;
      row.replicas = replicas_per_batch;
      const double R = static_cast<double>(replicas_per_batch);
      row.mean_p2 = std::accumulate(p2.begin(), p2.end(), 0.0) / R;
      row.mean_p1 = std::accumulate(p1.begin(), p1.end(), 0.0) / R;
      row.mean_p12 = std::accumulate(p12.begin(), p12.end(), 0.0) / R;
      rep.rows.push_back(row);
      discrepancies.push_back(std::fabs(row.mean_p2 - rep.oracle_p2));
    }
    rep.median_discrepancy.push_back(median(discrepancies));
  }
  return rep;
}

std::vector<std::pair<std::string, TestFunction>> test_function_library() {
  // Smooth bump supported on |y - c| < w, scaled by a bounded function of z.
  auto bump = [](double y, double c, double w) {
    const double u = (y - c) / w;
    if (std::fabs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  };
  std::vector<std::pair<std::string, TestFunction>> lib;
  lib.emplace_back("bump_y", [bump](double y, double) { return 2.0 * bump(y, 1.0, 2.0); });
  lib.emplace_back("bump_y_zfrac",
                   [bump](double y, double z) { return bump(y, -1.0, 2.0) * z / (1.0 + z); });
  lib.emplace_back("bump_y_zexp", [bump](double y, double z) {
    return 1.5 * bump(y, 0.0, 3.0) * (1.0 - std::exp(-z));
  });
  return lib;
}

OuInvarianceReport ou_invariance(ModelTag model, std::int64_t N, int d, double t_flow,
                                 std::int64_t replicas, std::uint64_t seed, int threads) {
  const double logN = std::log(static_cast<double>(N));
  if (!(t_flow >= 0 && t_flow < logN))
    throw std::invalid_argument("ou_invariance: t must be in [0, log N)");
  OuInvarianceReport rep;
  rep.t = t_flow;
  rep.N = N;
  const double r = default_cluster_radius(N);
  const double beta_for_weights = 2.0 * std::sqrt(2.0 * d);  // supercritical cluster weights

  auto extract = [&](std::uint64_t tag) {
    std::vector<ExtremalPointProcess> pps(replicas);
    parallel_replicas(replicas, seed ^ tag, threads, [&](std::int64_t i, RngStream& rng) {
      const FieldSample f = draw_model(model, N, d, rng, nullptr);
      pps[i] = cluster_weights(f, beta_for_weights, r).process;
    });
    return pps;
  };
  const auto pps_lhs = extract(0xA);
  const auto pps_rhs = extract(0xB);

  for (const auto& [name, f] : test_function_library()) {
    const TestFunction ft = f_t_transform(f, t_flow, d);
    const McReport lhs = laplace_functional(pps_lhs, f);
    const McReport rhs = laplace_functional(pps_rhs, ft);
    OuInvarianceRow row;
    row.name = name;
    row.lhs = lhs.estimate;
    row.rhs = rhs.estimate;
    row.lhs_se = lhs.standard_error;
    row.rhs_se = rhs.standard_error;
    row.joint_se = std::sqrt(lhs.standard_error * lhs.standard_error +
                             rhs.standard_error * rhs.standard_error);
    row.diff_in_se = std::fabs(lhs.estimate - rhs.estimate) / std::max(row.joint_se, 1e-15);
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<FreezingRow> freezing_decay(ModelTag model, std::int64_t N, int d, double beta,
                                        const std::vector<double>& lambda_grid,
                                        std::int64_t replicas, std::uint64_t seed, int threads) {
  std::vector<std::vector<double>> masses(lambda_grid.size(), std::vector<double>(replicas));
  parallel_replicas(replicas, seed, threads, [&](std::int64_t i, RngStream& rng) {
    const FieldSample f = draw_model(model, N, d, rng, nullptr);
    for (std::size_t k = 0; k < lambda_grid.size(); ++k)
      masses[k][i] = gibbs_tail_mass(f, beta, lambda_grid[k]);
  });
  std::vector<FreezingRow> rows;
  for (std::size_t k = 0; k < lambda_grid.size(); ++k)
    rows.push_back({lambda_grid[k], median(masses[k])});
  return rows;
}

BridgeScalingReport bridge_scaling(const std::vector<std::int64_t>& n_grid,
                                   const BarrierSpec& barrier, double offset,
                                   std::int64_t replicas, std::uint64_t seed, int threads) {
  (void)threads;
  BridgeScalingReport rep;
  rep.n_grid = n_grid;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    RngStream rng(seed, 1000 + k);
    const McReport r = barrier_probability(n_grid[k], barrier, offset, replicas, rng);
    rep.estimates.push_back(r);
    if (r.estimate > 0) {
      xs.push_back(std::log(static_cast<double>(n_grid[k])));
      ys.push_back(std::log(r.estimate));
    }
  }
  rep.loglog_slope = fitted_slope(xs, ys);
  return rep;
}

}  // namespace lcgf

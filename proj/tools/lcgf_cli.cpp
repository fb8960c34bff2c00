#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "lcgf/bridge.hpp"
#include "lcgf/covariance.hpp"
#include "lcgf/extremes.hpp"
#include "lcgf/gibbs_pd.hpp"
#include "lcgf/harness.hpp"
#include "lcgf/io.hpp"
#include "lcgf/samplers.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "lcgf 1.0.0";

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Seed precedence: --seed flag > LCGF_SEED env > config.
std::uint64_t resolve_seed(const lcgf::Config& cfg, bool flag_set, std::uint64_t flag_seed) {
  if (flag_set) return flag_seed;
  if (const char* env = std::getenv("LCGF_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw lcgf::ConfigError(std::string("LCGF_SEED: not an integer: ") + env);
    }
  }
  if (cfg.has("seed")) return static_cast<std::uint64_t>(cfg.get_int("seed"));
  return 1;
}

int cmd_sample(const std::string& model_s, std::int64_t N, int n, int d, std::uint64_t seed,
               const std::string& out) {
  lcgf::ModelTag model;
  try {
    model = lcgf::model_from_string(model_s);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (N == 0 && n > 0) N = std::int64_t{1} << n;
  if (N <= 0) {
    std::cerr << "error: give --N or --n\n";
    return 2;
  }
  if (model == lcgf::ModelTag::Dgff) {
    if (d != 2) {
      std::cerr << "error: dgff requires --d 2\n";
      return 2;
    }
    if (N > 64) {
      std::cerr << "error: dgff size cap is N <= 64 (dense solver)\n";
      return 2;
    }
  } else {
    if ((N & (N - 1)) != 0) {
      std::cerr << "error: " << model_s << " requires N to be a power of two\n";
      return 2;
    }
    if (N > 1024 || (d >= 3 && N > 128)) {
      std::cerr << "error: size cap exceeded for " << model_s << "\n";
      return 2;
    }
  }

  lcgf::Lattice lat(N, d);
  lcgf::RngStream rng(seed, 0);
  lcgf::FieldSample f = [&] {
    switch (model) {
      case lcgf::ModelTag::Brw:
        return lcgf::sample_brw(lat.levels(), d, rng);
      case lcgf::ModelTag::Mbrw:
        return lcgf::sample_mbrw(lat.levels(), d, rng);
      default:
        return lcgf::sample_dgff(lcgf::CovarianceKernel::dgff(lat), rng);
    }
  }();
  f.seed = seed;

  if (!out.empty()) lcgf::write_field_dump(out, f);
  const auto [argmax, maxval] = lcgf::field_max(f);
  const double mn = N >= 3 ? lcgf::m_n(N, d) : 0.0;
  const auto gamma3 = lcgf::level_set(f, 3.0);
  std::cout << "# model=" << model_s << " N=" << N << " d=" << d << " seed=" << seed << "\n";
  std::cout << "# max=" << lcgf::format_double(maxval) << " at=" << argmax
            << " m_N=" << lcgf::format_double(mn) << " |Gamma(3)|=" << gamma3.cardinality()
            << "\n";
  if (!out.empty()) std::cout << "# wrote " << out << "\n";
  return 0;
}

void write_manifest(const fs::path& dir, const lcgf::Config& cfg, std::uint64_t seed,
                    const std::string& started, const std::vector<std::string>& outputs) {
  json m;
  m["schema_version"] = 1;
  m["tool_version"] = kToolVersion;
  m["config_digest"] = cfg.digest();
  m["config"] = cfg.entries();
  m["seed"] = seed;
  m["started"] = started;
  m["finished"] = iso_now();
  m["outputs"] = outputs;
  std::ofstream os(dir / "manifest.json");
  os << m.dump(2) << "\n";
}

int cmd_experiment(const std::string& config_path, bool flag_seed_set, std::uint64_t flag_seed,
                   int threads_flag) {
  const lcgf::Config cfg = lcgf::Config::parse_file(config_path);
  const std::string name = cfg.get("experiment");
  const std::int64_t replicas = cfg.get_int("replicas");
  const std::uint64_t seed = resolve_seed(cfg, flag_seed_set, flag_seed);
  int threads = threads_flag;
  if (threads <= 0 && cfg.has("threads")) threads = static_cast<int>(cfg.get_int("threads"));
  const fs::path dir = cfg.get_or("out", ".");
  fs::create_directories(dir);
  const std::string started = iso_now();
  std::vector<std::string> outputs;
  json summary;
  summary["schema_version"] = 1;
  summary["experiment"] = name;
  summary["seed"] = seed;

  auto d_of = [&] { return static_cast<int>(cfg.get_int("d")); };
  auto model_of = [&] { return lcgf::model_from_string(cfg.get_or("model", "mbrw")); };
  auto fmt = lcgf::format_double;

  if (name == "level-set") {
    const std::int64_t N = cfg.get_int("N");
    const auto t_grid = cfg.get_double_list("t_grid");
    const auto rep =
        lcgf::level_set_scaling(model_of(), N, d_of(), t_grid, replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "level_set.csv").string());
    csv.row({"t", "replica", "cardinality"});
    for (std::size_t i = 0; i < rep.t_grid.size(); ++i)
      for (std::size_t r = 0; r < rep.cardinalities[i].size(); ++r)
        csv.row({fmt(rep.t_grid[i]), std::to_string(r), std::to_string(rep.cardinalities[i][r])});
    outputs.push_back("level_set.csv");
    summary["slope"] = rep.slope;
    summary["medians"] = rep.medians;
    summary["q25"] = rep.q25;
    summary["q75"] = rep.q75;
  } else if (name == "pd-convergence") {
    const auto n_grid = cfg.get_int_list("N_grid");
    const double beta = cfg.get_double("beta");
    const int d = d_of();
    const auto model = model_of();
    const double s = std::sqrt(2.0 * d) / beta;
    lcgf::CsvWriter csv((dir / "pd_weights.csv").string());
    csv.row({"N", "replica", "rank", "weight"});
    std::vector<double> mean_p2_per_N;
    for (const std::int64_t N : n_grid) {
      std::vector<lcgf::OrderedWeightVector> vecs(replicas);
      lcgf::parallel_replicas(
          replicas, seed ^ (0x515eull * static_cast<std::uint64_t>(N)), threads,
          [&](std::int64_t i, lcgf::RngStream& rng) {
            lcgf::Lattice lat(N, d);
            lcgf::FieldSample f = model == lcgf::ModelTag::Brw
                                      ? lcgf::sample_brw(lat.levels(), d, rng)
                                      : lcgf::sample_mbrw(lat.levels(), d, rng);
            const double r = lcgf::default_cluster_radius(N);
            vecs[i] = lcgf::cluster_weights(f, beta, r).ordered;
          });
      double p2 = 0;
      for (std::int64_t r = 0; r < replicas; ++r) {
        const auto& p = vecs[r].p;
        for (std::size_t k = 0; k < p.size(); ++k) {
          csv.row({std::to_string(N), std::to_string(r), std::to_string(k), fmt(p[k])});
          p2 += p[k] * p[k];
        }
      }
      mean_p2_per_N.push_back(p2 / static_cast<double>(replicas));
    }
    // PD oracle ensemble at the matching s.
    double oracle_p2 = 0;
    {
      const std::int64_t R = std::max<std::int64_t>(replicas, 1000);
      std::vector<double> vals(R);
      lcgf::parallel_replicas(R, seed ^ 0x9d5full, threads,
                              [&](std::int64_t i, lcgf::RngStream& rng) {
                                const auto pd = lcgf::sample_pd(s, 1e-8, rng);
                                double a = 0;
                                for (double p : pd.weights.p) a += p * p;
                                vals[i] = a;
                              });
      for (double v : vals) oracle_p2 += v;
      oracle_p2 /= static_cast<double>(R);
    }
    outputs.push_back("pd_weights.csv");
    summary["beta"] = beta;
    summary["s"] = s;
    summary["N_grid"] = n_grid;
    summary["mean_p2"] = mean_p2_per_N;
    summary["oracle_p2"] = oracle_p2;
    summary["oracle_p2_exact"] = 1.0 - s;
  } else if (name == "top-sum") {
    const std::int64_t N = cfg.get_int("N");
    const auto ell_grid = cfg.get_int_list("ell_grid");
    const auto rep =
        lcgf::estimate_E_top_sum(model_of(), N, d_of(), ell_grid, replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "top_sum.csv").string());
    csv.row({"ell", "mean", "se"});
    for (const auto& row : rep.rows)
      csv.row({std::to_string(row.ell), fmt(row.mean), fmt(row.se)});
    outputs.push_back("top_sum.csv");
    summary["lambda_hat"] = rep.lambda_hat;
    summary["m_N"] = rep.m_n_value;
  } else if (name == "centered-max") {
    const auto Ns = cfg.get_int_list("N_grid");
    const auto rows = lcgf::centered_max_table(model_of(), Ns, d_of(), replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "centered_max.csv").string());
    csv.row({"N", "mean", "se"});
    for (const auto& row : rows) csv.row({std::to_string(row.N), fmt(row.mean), fmt(row.se)});
    outputs.push_back("centered_max.csv");
  } else if (name == "ou-invariance") {
    const std::int64_t N = cfg.get_int("N");
    const double t = cfg.get_double("t");
    const auto rep = lcgf::ou_invariance(model_of(), N, d_of(), t, replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "ou_invariance.csv").string());
    csv.row({"function", "lhs", "rhs", "lhs_se", "rhs_se", "joint_se", "diff_in_se"});
    for (const auto& row : rep.rows)
      csv.row({row.name, fmt(row.lhs), fmt(row.rhs), fmt(row.lhs_se), fmt(row.rhs_se),
               fmt(row.joint_se), fmt(row.diff_in_se)});
    outputs.push_back("ou_invariance.csv");
    summary["t"] = t;
    summary["N"] = N;
  } else if (name == "freezing") {
    const std::int64_t N = cfg.get_int("N");
    const double beta = cfg.get_double("beta");
    const auto lambda_grid = cfg.get_double_list("lambda_grid");
    const auto rows =
        lcgf::freezing_decay(model_of(), N, d_of(), beta, lambda_grid, replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "freezing.csv").string());
    csv.row({"lambda", "median_tail_mass"});
    for (const auto& row : rows) csv.row({fmt(row.lambda), fmt(row.median_tail_mass)});
    outputs.push_back("freezing.csv");
    summary["beta"] = beta;
  } else if (name == "bridge-scaling") {
    const auto n_grid = cfg.get_int_list("n_grid");
    lcgf::BarrierSpec barrier;
    const std::string kind = cfg.get_or("barrier", "log-curve");
    if (kind == "log-curve") {
      barrier.kind = lcgf::BarrierSpec::Kind::LogCurve;
      barrier.gamma = cfg.get_double("gamma");
    } else if (kind == "line") {
      barrier.kind = lcgf::BarrierSpec::Kind::Line;
      barrier.x1 = cfg.get_double("x1");
      barrier.x2 = cfg.get_double("x2");
    } else {
      throw lcgf::ConfigError("barrier: unknown kind: " + kind);
    }
    const double offset = cfg.get_double("offset");
    const auto rep = lcgf::bridge_scaling(n_grid, barrier, offset, replicas, seed, threads);
    lcgf::CsvWriter csv((dir / "bridge_scaling.csv").string());
    csv.row({"n", "probability", "se"});
    for (std::size_t i = 0; i < rep.n_grid.size(); ++i)
      csv.row({std::to_string(rep.n_grid[i]), fmt(rep.estimates[i].estimate),
               fmt(rep.estimates[i].standard_error)});
    outputs.push_back("bridge_scaling.csv");
    summary["loglog_slope"] = rep.loglog_slope;
  } else {
    throw lcgf::ConfigError("experiment: unknown experiment: " + name);
  }

  {
    std::ofstream os(dir / "summary.json");
    os << summary.dump(2) << "\n";
    outputs.push_back("summary.json");
  }
  write_manifest(dir, cfg, seed, started, outputs);
  std::cout << "# experiment " << name << " done, outputs in " << dir.string() << "\n";
  return 0;
}

struct CheckList {
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

int verify_covariance(std::uint64_t seed) {
  CheckList cl;
  (void)seed;
  bool var_ok = true;
  for (int n = 2; n <= 6; ++n) {
    const std::int64_t N = std::int64_t{1} << n;
    lcgf::Lattice lat(N, 2);
    lcgf::RngStream probe(7, 0);
    for (int k = 0; k < 16; ++k) {
      const auto v = lat.vertex_at(static_cast<std::int64_t>(probe.next_u64() % lat.volume()));
      const double target = n * std::log(2.0);
      if (std::abs(lcgf::cov_brw(v, v, n, 2) - target) > 1e-12) var_ok = false;
      if (std::abs(lcgf::cov_mbrw(v, v, n, 2) - target) > 1e-12) var_ok = false;
    }
  }
  cl.check("variance log N (brw, mbrw)", var_ok);

  const auto w32 = lcgf::mbrw_log_correlation_witness(32, 2);
  const auto w64 = lcgf::mbrw_log_correlation_witness(64, 2);
  cl.check("mbrw log-correlation witness bounded",
           w32.value <= 4.0 && w64.value <= 4.0 && std::abs(w64.value - w32.value) <= 0.1,
           "w32=" + lcgf::format_double(w32.value) + " w64=" + lcgf::format_double(w64.value));

  lcgf::Lattice lat(32, 2);
  const auto rep = lcgf::check_assumptions(lcgf::CovarianceKernel::mbrw(lat), 0.1);
  cl.check("mbrw assumption constants finite", rep.alpha0 < 10.0 && rep.alpha_delta < 10.0,
           "alpha0=" + lcgf::format_double(rep.alpha0) +
               " alpha(0.1)=" + lcgf::format_double(rep.alpha_delta));
  return cl.failures ? 1 : 0;
}

int verify_comparison(std::uint64_t seed, int threads) {
  CheckList cl;
  // iid pair vs fully correlated pair: P(max <= t) is Phi(t)^2 vs Phi(t).
  Eigen::MatrixXd iid = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd corr = Eigen::MatrixXd::Ones(2, 2);
  lcgf::Lattice pairlat(2, 1);
  const auto kA = lcgf::CovarianceKernel::explicit_matrix(pairlat, iid);
  const auto kB = lcgf::CovarianceKernel::explicit_matrix(pairlat, corr);
  const auto slep = lcgf::verify_slepian(kA, kB, {-1.0, 0.0, 1.0, 2.0}, 200000, seed, threads);
  cl.check("slepian iid vs correlated pair", slep.ran && slep.pass, slep.message);

  const auto kah = lcgf::verify_kahane_top_sum(kA, kB, 1, 200000, seed + 1, threads);
  const bool emax_ok =
      kah.ran && kah.pass &&
      std::abs(kah.mean_a - 1.0 / std::sqrt(M_PI)) < 4.0 * kah.diff_se + 0.01;
  cl.check("kahane E max ordering (E max(Z,W) ~ 0.5642)", emax_ok,
           "E max iid=" + lcgf::format_double(kah.mean_a));

  // Counterexample: S_2 under the same domination is NOT stochastically
  // ordered. S_2(iid) ~ N(0,2), S_2(corr) ~ N(0,4); the upper tail at 2 goes
  // the wrong way, so a sample-wise comparison must fail. Expected.
  {
    const std::int64_t R = 200000;
    std::int64_t above_a = 0, above_b = 0;
    lcgf::RngStream rng(seed + 2, 0);
    for (std::int64_t i = 0; i < R; ++i) {
      const double z1 = rng.next_gaussian(), z2 = rng.next_gaussian();
      if (z1 + z2 > 2.0) ++above_a;       // iid pair
      const double w = rng.next_gaussian();
      if (2.0 * w > 2.0) ++above_b;       // fully correlated pair
    }
    const double pa = static_cast<double>(above_a) / R;
    const double pb = static_cast<double>(above_b) / R;
    const double se = std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / R);
    const bool tail_flipped = pa < pb - 3.0 * se;
    std::cout << "NOTE EXPECTED-FAIL-OF-RV-ORDERING: P(S_2 iid > 2)="
              << lcgf::format_double(pa) << " < P(S_2 corr > 2)=" << lcgf::format_double(pb)
              << "; the top sum is comparable in expectation only\n";
    cl.check("top-sum tail counterexample reproduced", tail_flipped);
  }
  return cl.failures ? 1 : 0;
}

int verify_bridge(std::uint64_t seed) {
  CheckList cl;
  const std::int64_t n = 16, R = 100000;
  std::vector<double> var(n + 1, 0.0);
  lcgf::RngStream rng(seed, 0);
  bool ends_zero = true;
  for (std::int64_t i = 0; i < R; ++i) {
    auto sub = rng.substream(static_cast<std::uint64_t>(i));
    const auto b = lcgf::sample_bridge(n, sub);
    if (b.w.front() != 0.0 || b.w.back() != 0.0) ends_zero = false;
    for (std::int64_t j = 0; j <= n; ++j) var[j] += b.w[j] * b.w[j];
  }
  cl.check("bridge endpoints exactly zero", ends_zero);
  bool var_ok = true;
  for (std::int64_t j = 0; j <= n; ++j) {
    const double target = static_cast<double>(j) * (n - j) / n;
    const double est = var[j] / R;
    // Var of the sample variance of a Gaussian: 2 sigma^4 / R.
    const double se = target > 0 ? std::sqrt(2.0 * target * target / R) : 1e-3;
    if (std::abs(est - target) > 4.0 * se) var_ok = false;
  }
  cl.check("Var W_j = j(n-j)/n within 4 SE", var_ok);

  lcgf::BarrierSpec line;
  line.kind = lcgf::BarrierSpec::Kind::Line;
  line.x1 = line.x2 = -1.0;
  lcgf::RngStream rng2(seed + 1, 0);
  const auto neg = lcgf::barrier_probability(8, line, 0.0, 1000, rng2);
  cl.check("negative endpoint barrier gives probability 0", neg.estimate == 0.0);
  return cl.failures ? 1 : 0;
}

int verify_pd(std::uint64_t seed, int threads) {
  CheckList cl;
  for (const double s : {0.25, 0.5, 0.75}) {
    const std::int64_t R = 2000;
    std::vector<double> vals(R);
    lcgf::parallel_replicas(R, seed + static_cast<std::uint64_t>(s * 100), threads,
                            [&](std::int64_t i, lcgf::RngStream& rng) {
                              const auto pd = lcgf::sample_pd(s, 1e-8, rng);
                              double a = 0;
                              for (double p : pd.weights.p) a += p * p;
                              vals[i] = a;
                            });
    double mean = 0;
    for (double v : vals) mean += v;
    mean /= R;
    double sd = 0;
    for (double v : vals) sd += (v - mean) * (v - mean);
    sd = std::sqrt(sd / (R - 1)) / std::sqrt(static_cast<double>(R));
    const bool ok = std::abs(mean - (1.0 - s)) < std::max(3.0 * sd, 0.02);
    cl.check("E sum p^2 = 1-s at s=" + lcgf::format_double(s), ok,
             "mean=" + lcgf::format_double(mean));
  }
  return cl.failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lcgf: Monte Carlo laboratory for log-correlated Gaussian fields"};
  app.require_subcommand(1);

  std::string model = "mbrw", out_path, config_path, suite;
  std::int64_t N = 0;
  int n = 0, d = 2, threads = 0;
  std::uint64_t seed = 1;

  auto* sample = app.add_subcommand("sample", "draw one field and dump it");
  sample->add_option("--model", model, "brw | mbrw | dgff");
  sample->add_option("--N", N, "side length");
  sample->add_option("--n", n, "levels (N = 2^n)");
  sample->add_option("--d", d, "dimension");
  auto* seed_opt_s = sample->add_option("--seed", seed, "rng seed");
  sample->add_option("--out", out_path, "dump path");

  auto* experiment = app.add_subcommand("experiment", "run a configured experiment");
  experiment->add_option("config", config_path, "config file")->required();
  auto* seed_opt_e = experiment->add_option("--seed", seed, "rng seed (overrides env and config)");
  experiment->add_option("--threads", threads, "replica parallelism cap");

  auto* verify = app.add_subcommand("verify", "run a module check suite");
  verify->add_option("suite", suite, "covariance | comparison | bridge | pd")->required();
  auto* seed_opt_v = verify->add_option("--seed", seed, "rng seed");
  verify->add_option("--threads", threads, "replica parallelism cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      if (!*seed_opt_s) {
        if (const char* env = std::getenv("LCGF_SEED")) seed = std::stoull(env);
      }
      return cmd_sample(model, N, n, d, seed, out_path);
    }
    if (experiment->parsed())
      return cmd_experiment(config_path, static_cast<bool>(*seed_opt_e), seed, threads);
    if (verify->parsed()) {
      if (!*seed_opt_v) {
        if (const char* env = std::getenv("LCGF_SEED")) seed = std::stoull(env);
      }
      if (suite == "covariance") return verify_covariance(seed);
      if (suite == "comparison") return verify_comparison(seed, threads);
      if (suite == "bridge") return verify_bridge(seed);
      if (suite == "pd") return verify_pd(seed, threads);
      std::cerr << "error: unknown suite: " << suite
                << " (expected covariance | comparison | bridge | pd)\n";
      return 2;
    }
  } catch (const lcgf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "lcgf/gibbs_pd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lcgf {

GibbsMeasure gibbs(const FieldSample& f, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("gibbs: beta must be > 0");
  GibbsMeasure g;
  g.beta = beta;
  const auto [argmax, vmax] = field_max(f);
  (void)argmax;
  const double shift = f.lattice.side() >= 3 ? m_n(f.lattice.side(), f.lattice.dim()) : 0.0;
  g.weights.resize(f.values.size());
  g.probabilities.resize(f.values.size());
  double z = 0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    g.probabilities[i] = std::exp(beta * (f.values[i] - vmax));
    z += g.probabilities[i];
    g.weights[i] = std::exp(beta * (f.values[i] - shift));
  }
  g.partition = std::exp(beta * (vmax - shift)) * z;
  for (auto& p : g.probabilities) p /= z;
  return g;
}

OrderedWeightVector make_ordered(std::vector<double> masses) {
  double s = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (!(s > 0)) throw std::invalid_argument("make_ordered: total mass must be positive");
  for (auto& m : masses) {
    if (!(m >= 0)) throw std::invalid_argument("make_ordered: masses must be non-negative");
    m /= s;
  }
  std::sort(masses.begin(), masses.end(), std::greater<double>());
  return OrderedWeightVector{std::move(masses)};
}

double ordered_distance(const OrderedWeightVector& a, const OrderedWeightVector& b) {
  const std::size_t n = std::max(a.p.size(), b.p.size());
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i < a.p.size() ? a.p[i] : 0.0;
    const double y = i < b.p.size() ? b.p[i] : 0.0;
    s += std::fabs(x - y);
  }
  return s;
}

double participation_ratio(const OrderedWeightVector& p, int k) {
  if (k < 2) throw std::invalid_argument("participation_ratio: k must be >= 2");
  double s = 0;
  for (double x : p.p) s += std::pow(x, k);
  return s;
}

ClusterDecomposition cluster_weights(const FieldSample& f, double beta, double r) {
  if (r < 2) throw std::invalid_argument("cluster_weights: r must be >= 2");
  const Lattice& lat = f.lattice;
  const ExtremaSet extrema = local_extrema(f, r);
  const double mN = m_n(lat.side(), lat.dim());
  ClusterDecomposition out;
  out.process.radius = r;

  std::vector<char> claimed(lat.volume(), 0);
  const auto offsets = ball_offsets(lat.dim(), r / 2.0);
  for (std::int64_t v_idx : extrema.vertices) {
    if (claimed[v_idx]) continue;  // merged into an earlier tied cluster
    const Vertex v = lat.vertex_at(v_idx);
    const double phi_v = f.values[v_idx];
    double z = 0;
    for (const auto& o : offsets) {
      Vertex u = v;
      bool in = true;
      for (int a = 0; a < lat.dim(); ++a) {
        u.c[a] = v.c[a] + o[a];
        if (u.c[a] < 0 || u.c[a] >= lat.side()) {
          in = false;
          break;
        }
      }
      if (!in) continue;
      const std::int64_t u_idx = lat.index_of(u);
      if (claimed[u_idx]) continue;
      claimed[u_idx] = 1;
      z += std::exp(beta * (f.values[u_idx] - phi_v));
    }
    const double y = phi_v - mN;
    out.process.points.push_back({v_idx, y, z});
    out.masses.push_back(std::exp(beta * y) * z);
  }
  out.ordered = make_ordered(out.masses);
  return out;
}

double gibbs_tail_mass(const FieldSample& f, double beta, double lambda) {
  const double mN = m_n(f.lattice.side(), f.lattice.dim());
  const double cut = mN - lambda;
  double s = 0;
  for (double x : f.values)
    if (x < cut) s += std::exp(beta * (x - mN));
  return s;
}

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(k / 2.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(order);
  weights.resize(order);
  const double mu0 = std::sqrt(M_PI);  // integral of e^{-x^2}
  for (int k = 0; k < order; ++k) {
    nodes[k] = es.eigenvalues()[k];
    const double v = es.eigenvectors()(0, k);
    weights[k] = mu0 * v * v;
  }
}

TestFunction f_t_transform(TestFunction f, double t, int d, int quadrature_order) {
  if (t < 0) throw std::invalid_argument("f_t_transform: t must be >= 0");
  if (quadrature_order < 8) throw std::invalid_argument("f_t_transform: quadrature order >= 8");
  if (t == 0) return f;
  std::vector<double> x, w;
  gauss_hermite(quadrature_order, x, w);
  const double scale = std::sqrt(2.0 * t);
  const double drift = std::sqrt(d / 2.0) * t;
  const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
  return [f = std::move(f), x = std::move(x), w = std::move(w), scale, drift,
          inv_sqrt_pi](double y, double z) {
    double e = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
      e += w[k] * std::exp(-f(y + scale * x[k] - drift, z));
    return -std::log(e * inv_sqrt_pi);
  };
}

McReport laplace_functional(const std::vector<ExtremalPointProcess>& replicas,
                            const TestFunction& f) {
  if (replicas.empty()) throw std::invalid_argument("laplace_functional: no replicas");
  double sum = 0, sumsq = 0;
  for (const auto& pp : replicas) {
    double s = 0;
    for (const auto& pt : pp.points) s += f(pt.y, pt.z);
    const double v = std::exp(-s);
    sum += v;
    sumsq += v * v;
  }
  const double R = static_cast<double>(replicas.size());
  McReport rep;
  rep.replicas = static_cast<std::int64_t>(replicas.size());
  rep.estimate = sum / R;
  const double var = std::max(0.0, (sumsq - sum * sum / R) / std::max(1.0, R - 1));
  rep.standard_error = std::sqrt(var / R);
  return rep;
}

PdSample sample_pd(double s, double epsilon, RngStream& rng) {
  if (!(s > 0 && s < 1)) throw std::invalid_argument("sample_pd: s must be in (0,1)");
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("sample_pd: epsilon in (0,1)");
  const double budget = std::pow(epsilon, -s) / s;  // expected atom count
  if (budget > 1e7) throw std::invalid_argument("sample_pd: expected atom count exceeds 1e7");
  PdSample out;
  out.s = s;
  out.epsilon = epsilon;
  // T(x) = x^{-s}/s maps the process to a unit-rate Poisson process on
  // (0, budget]; arrival times come out in increasing order, atoms decreasing.
  double gamma = 0;
  std::vector<double> atoms;
  for (;;) {
    gamma += rng.next_exponential();
    if (gamma > budget) break;
    atoms.push_back(std::pow(s * gamma, -1.0 / s));
  }
  if (atoms.empty()) atoms.push_back(epsilon);  // measure-zero guard at tiny budgets
  out.atoms = atoms;
  out.weights = make_ordered(std::move(atoms));
  return out;
}

}  // namespace lcgf

#pragma once

#include <functional>
#include <vector>

#include "lcgf/extremes.hpp"
#include "lcgf/mc_report.hpp"

namespace lcgf {

struct GibbsMeasure {
  double beta = 0;
  std::vector<double> weights;        // e^{beta (phi_v - m_N)}
  double partition = 0;               // S = sum of weights
  std::vector<double> probabilities;  // sum to 1
};

// Probabilities proportional to e^{beta phi_v}, computed with the max-shift
// trick. The m_N normalization of the stored weights uses shift 0 when N < 3.
GibbsMeasure gibbs(const FieldSample& f, double beta);

// Non-increasing positive reals summing to 1.
struct OrderedWeightVector {
  std::vector<double> p;
};

// Normalizes by the sum and sorts non-increasing.
OrderedWeightVector make_ordered(std::vector<double> masses);

double ordered_distance(const OrderedWeightVector& a, const OrderedWeightVector& b);
double participation_ratio(const OrderedWeightVector& p, int k);

struct ExtremalPoint {
  std::int64_t vertex = 0;
  double y = 0;  // phi_v - m_N
  double z = 0;  // cluster weight S-bar_{v,r/2}, always >= 1
};

struct ExtremalPointProcess {
  double radius = 0;  // the r of C_{N,r}
  std::vector<ExtremalPoint> points;
};

struct ClusterDecomposition {
  ExtremalPointProcess process;
  std::vector<double> masses;  // per-cluster Gibbs mass e^{beta y_v} z_v
  OrderedWeightVector ordered;
};

// For each r-local extremum v: z_v = sum over its B(v, r/2) cluster of
// e^{beta(phi_u - phi_v)}. Vertices in overlapping balls go to the extremum
// with the smallest linear index.
ClusterDecomposition cluster_weights(const FieldSample& f, double beta, double r);

// Sum over v outside Gamma_N(lambda) of e^{beta(phi_v - m_N)}.
double gibbs_tail_mass(const FieldSample& f, double beta, double lambda);

using TestFunction = std::function<double(double, double)>;

// f_t(y,z) = -log E e^{-f(y + B_t - sqrt(d/2) t, z)} with B_t ~ N(0,t),
// evaluated by Gauss-Hermite quadrature of the given order.
TestFunction f_t_transform(TestFunction f, double t, int d, int quadrature_order = 64);

// Gauss-Hermite nodes/weights for weight e^{-x^2} (Golub-Welsch).
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);

// Mean and SE of exp(-sum_points f(y,z)) across replicas.
McReport laplace_functional(const std::vector<ExtremalPointProcess>& replicas,
                            const TestFunction& f);

struct PdSample {
  double s = 0;
  double epsilon = 0;
  std::vector<double> atoms;  // strictly above epsilon, decreasing
  OrderedWeightVector weights;
};

// Atoms of the Poisson process with intensity x^{-1-s} dx on [epsilon, inf),
// generated largest-first from unit-exponential arrival times, then
// normalized. Atom count is Poisson(epsilon^{-s}/s).
PdSample sample_pd(double s, double epsilon, RngStream& rng);

}  // namespace lcgf

#pragma once

#include <string>
#include <vector>

#include "lcgf/covariance.hpp"
#include "lcgf/lattice.hpp"
#include "lcgf/rng.hpp"

namespace lcgf {

struct FieldSample {
  Lattice lattice;
  std::vector<double> values;  // row-major, size N^d (or support size)
  std::string model;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  double operator[](std::int64_t i) const { return values[i]; }
  double at(const Vertex& v) const { return values[lattice.index_of(v)]; }
};

// Centered Gaussian vector with the kernel's covariance, via the kernel's
// cached Cholesky factor.
FieldSample sample_mvn(const CovarianceKernel& kernel, RngStream& rng);

// phi_{N,v} = sum over levels of the Gaussian attached to the aligned box
// B*_j(v); one draw per box, Var log 2.
FieldSample sample_brw(int n, int d, RngStream& rng);

// theta_{N,v} = sum over levels j and boxes B in B_j(v) of the class Gaussian
// g^N_{j,B}; one draw per ~_N-class (box corner mod N), Var 2^{-dj} log 2.
FieldSample sample_mbrw(int n, int d, RngStream& rng);

FieldSample sample_dgff(const CovarianceKernel& dgff_kernel, RngStream& rng);

enum class ModelTag { Brw, Mbrw, Dgff };
ModelTag model_from_string(const std::string& s);
std::string model_to_string(ModelTag m);

struct OuPair {
  double t = 0;
  FieldSample prime;     // phi'
  FieldSample dprime;    // phi''
  FieldSample combined;  // sqrt(1 - t/log N) phi' + sqrt(t/log N) phi''
};

// Two independent copies of the model mixed along the OU flow; the combined
// field has exactly the model's law. Requires 0 <= t < log N.
OuPair ou_pair(ModelTag model, const Lattice& lat, double t, RngStream& rng,
               const CovarianceKernel* explicit_kernel = nullptr);

}  // namespace lcgf

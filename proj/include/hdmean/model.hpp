#pragma once

#include <string>
#include <variant>

#include "hdmean/rng.hpp"
#include "hdmean/types.hpp"

namespace hdmean {

// Innovation distribution: standard normal, or a t variate rescaled to unit
// variance. delta is the excess kurtosis E(eps^4) - 3.
struct ErrorDist {
  enum class Kind { Normal, ScaledT };

  static ErrorDist normal();
  // Requires dof > 4 (finite fourth moment); delta = 6 / (dof - 4).
  static ErrorDist scaled_t(double dof);

  Kind kind = Kind::Normal;
  double dof = 0.0;
  double delta = 0.0;

  std::string describe() const;
};

// Covariance specs. sigma1 is diagonal with the first 20% of entries 1, the
// next 40% equal to 3 and the last 40% equal to 10 (p must be divisible by
// 5). sigma2/sigma3 rescale an AR(1) / equicorrelation matrix by sigma1^{1/2}
// on both sides; rho must lie in [0, 1).
struct Sigma1Spec {};
struct Sigma2Spec {
  double rho = 0.0;
};
struct Sigma3Spec {
  double rho = 0.0;
};
struct CustomSigmaSpec {
  Matrix matrix;
};
using CovarianceSpec =
    std::variant<Sigma1Spec, Sigma2Spec, Sigma3Spec, CustomSigmaSpec>;

// Mean specs. mu1 draws p i.i.d. N(0, tau^2) entries from the generator;
// mu2 is +tau on the first p/2 coordinates and -tau on the rest (p even).
struct Mu1Spec {
  double tau = 0.0;
};
struct Mu2Spec {
  double tau = 0.0;
};
struct ConstantMuSpec {
  double value = 0.0;
};
struct CustomMuSpec {
  Vector vector;
};
using MeanSpec = std::variant<Mu1Spec, Mu2Spec, ConstantMuSpec, CustomMuSpec>;

Matrix build_covariance(const CovarianceSpec& spec, Index p);
Vector build_mean(const MeanSpec& spec, Index p, rng::Engine& gen);

std::string describe(const CovarianceSpec& spec);
std::string describe(const MeanSpec& spec);

// Unique symmetric PSD square root via spectral decomposition. Eigenvalues
// below -1e-10 * ||S|| are errors; small negatives above that are clipped
// to zero.
Matrix psd_sqrt(const Matrix& s);

// Ground truth for data generation: mean, covariance with its cached
// symmetric square root, sample size and innovation law. Immutable in use.
struct ProblemInstance {
  Vector mu;
  Matrix sigma;
  Matrix sigma_half;
  Index n = 0;
  Index p = 0;
  ErrorDist errors;
  // Off-diagonal of sigma is exactly zero; enables O(np) sampling.
  bool sigma_is_diagonal = false;
};

// Validates sigma (symmetric, strictly positive definite), computes the
// square root and checks its reconstruction to 1e-8 relative Frobenius.
ProblemInstance make_instance(Vector mu, Matrix sigma, Index n,
                              ErrorDist errors);

// One n x p sample, row i = (sigma^{1/2} eps_i + mu)'. Draws are consumed
// row by row (observation major), so the output is a pure function of the
// generator state.
DataMatrix generate_sample(const ProblemInstance& inst, rng::Engine& gen);

// Innovation matrix only (n x p i.i.d. draws), used by the sampler and by
// variance tests.
Matrix draw_innovations(Index n, Index p, const ErrorDist& errors,
                        rng::Engine& gen);

}  // namespace hdmean

#include "hdmean/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

namespace hdmean {

namespace {

bool is_symmetric(const Matrix& s, double rtol) {
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= rtol * scale;
}

bool is_diagonal(const Matrix& s) {
  for (Index j = 0; j < s.cols(); ++j) {
    for (Index i = 0; i < s.rows(); ++i) {
      if (i != j && s(i, j) != 0.0) return false;
    }
  }
  return true;
}

// Diagonal of sigma1: first 20% of entries 1, next 40% equal to 3, last 40%
// equal to 10. p must be divisible by 5 so the splits are integral.
Vector sigma1_diagonal(Index p) {
  if (p < 1 || p % 5 != 0) {
    throw std::invalid_argument(
        "build_covariance: sigma1 family requires p divisible by 5");
  }
  Vector d(p);
  const Index n1 = p / 5;
  const Index n3 = 2 * p / 5;
  d.head(n1).setConstant(1.0);
  d.segment(n1, n3).setConstant(3.0);
  d.tail(n3).setConstant(10.0);
  return d;
}

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    std::ostringstream msg;
    msg << "build_covariance: rho = " << rho << " outside [0, 1)";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

ErrorDist ErrorDist::normal() { return ErrorDist{Kind::Normal, 0.0, 0.0}; }

ErrorDist ErrorDist::scaled_t(double dof) {
  if (!(dof > 4.0)) {
    throw std::invalid_argument(
        "ErrorDist: scaled-t needs dof > 4 for a finite fourth moment");
  }
  return ErrorDist{Kind::ScaledT, dof, 6.0 / (dof - 4.0)};
}

std::string ErrorDist::describe() const {
  if (kind == Kind::Normal) return "normal";
  std::ostringstream out;
  out << "scaled_t(dof=" << dof << ")";
  return out.str();
}

Matrix build_covariance(const CovarianceSpec& spec, Index p) {
  if (p < 1) throw std::invalid_argument("build_covariance: p must be >= 1");
  if (std::holds_alternative<Sigma1Spec>(spec)) {
    return Matrix(sigma1_diagonal(p).asDiagonal());
  }
  if (const auto* s2 = std::get_if<Sigma2Spec>(&spec)) {
    check_rho(s2->rho);
    const Vector d = sigma1_diagonal(p);
    const Vector root = d.cwiseSqrt();
    Matrix out(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < p; ++i) {
        out(i, j) = root[i] * root[j] * std::pow(s2->rho, std::abs(double(i - j)));
      }
    }
    return out;
  }
  if (const auto* s3 = std::get_if<Sigma3Spec>(&spec)) {
    check_rho(s3->rho);
    const Vector d = sigma1_diagonal(p);
    const Vector root = d.cwiseSqrt();
    Matrix out(p, p);
    for (Index j = 0; j < p; ++j) {
      for (Index i = 0; i < p; ++i) {
        out(i, j) = (i == j) ? d[i] : root[i] * root[j] * s3->rho;
      }
    }
    return out;
  }
  const auto& custom = std::get<CustomSigmaSpec>(spec);
  const Matrix& m = custom.matrix;
  if (m.rows() != p || m.cols() != p) {
    throw std::invalid_argument("build_covariance: custom matrix is not p x p");
  }
  if (!is_symmetric(m, 1e-10)) {
    throw std::invalid_argument("build_covariance: custom matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(
        "build_covariance: custom matrix is not positive definite");
  }
  return m;
}

Vector build_mean(const MeanSpec& spec, Index p, rng::Engine& gen) {
  if (p < 1) throw std::invalid_argument("build_mean: p must be >= 1");
  if (const auto* m1 = std::get_if<Mu1Spec>(&spec)) {
    if (!(m1->tau >= 0.0)) throw std::invalid_argument("build_mean: tau must be >= 0");
    Vector mu(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < p; ++i) mu[i] = m1->tau * normal(gen);
    return mu;
  }
  if (const auto* m2 = std::get_if<Mu2Spec>(&spec)) {
    if (!(m2->tau >= 0.0)) throw std::invalid_argument("build_mean: tau must be >= 0");
    if (p % 2 != 0) {
      throw std::invalid_argument("build_mean: mu2 requires even p");
    }
    Vector mu(p);
    mu.head(p / 2).setConstant(m2->tau);
    mu.tail(p / 2).setConstant(-m2->tau);
    return mu;
  }
  if (const auto* c = std::get_if<ConstantMuSpec>(&spec)) {
    return Vector::Constant(p, c->value);
  }
  const auto& custom = std::get<CustomMuSpec>(spec);
  if (custom.vector.size() != p) {
    throw std::invalid_argument("build_mean: custom vector length does not match p");
  }
  return custom.vector;
}

std::string describe(const CovarianceSpec& spec) {
  std::ostringstream out;
  if (std::holds_alternative<Sigma1Spec>(spec)) {
    out << "sigma1";
  } else if (const auto* s2 = std::get_if<Sigma2Spec>(&spec)) {
    out << "sigma2(rho=" << s2->rho << ")";
  } else if (const auto* s3 = std::get_if<Sigma3Spec>(&spec)) {
    out << "sigma3(rho=" << s3->rho << ")";
  } else {
    out << "custom";
  }
  return out.str();
}

std::string describe(const MeanSpec& spec) {
  std::ostringstream out;
  if (const auto* m1 = std::get_if<Mu1Spec>(&spec)) {
    out << "mu1(tau=" << m1->tau << ")";
  } else if (const auto* m2 = std::get_if<Mu2Spec>(&spec)) {
    out << "mu2(tau=" << m2->tau << ")";
  } else if (const auto* c = std::get_if<ConstantMuSpec>(&spec)) {
    out << "constant(" << c->value << ")";
  } else {
    out << "custom";
  }
  return out.str();
}

Matrix psd_sqrt(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() < 1) {
    throw std::invalid_argument("psd_sqrt: input must be square");
  }
  if (!is_symmetric(s, 1e-10)) {
    throw std::invalid_argument("psd_sqrt: input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  }
  const double norm = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  Vector lambda = eig.eigenvalues();
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -1e-10 * std::max(norm, 1e-300)) {
      std::ostringstream msg;
      msg << "psd_sqrt: eigenvalue " << lambda[i] << " below tolerance floor";
      throw std::invalid_argument(msg.str());
    }
    lambda[i] = std::sqrt(std::max(lambda[i], 0.0));
  }
  Matrix root = eig.eigenvectors() * lambda.asDiagonal() *
                eig.eigenvectors().transpose();
  return (root + root.transpose()) / 2.0;
}

ProblemInstance make_instance(Vector mu, Matrix sigma, Index n,
                              ErrorDist errors) {
  const Index p = mu.size();
  if (p < 1) throw std::invalid_argument("make_instance: p must be >= 1");
  if (n < 1) throw std::invalid_argument("make_instance: n must be >= 1");
  if (sigma.rows() != p || sigma.cols() != p) {
    throw std::invalid_argument("make_instance: sigma must be p x p");
  }
  if (!is_symmetric(sigma, 1e-10)) {
    throw std::invalid_argument("make_instance: sigma is not symmetric");
  }

  ProblemInstance inst;
  inst.sigma_is_diagonal = is_diagonal(sigma);
  if (inst.sigma_is_diagonal) {
    Vector d = sigma.diagonal();
    for (Index i = 0; i < p; ++i) {
      if (!(d[i] > 0.0)) {
        throw std::invalid_argument("make_instance: sigma is not positive definite");
      }
    }
    inst.sigma_half = Matrix(d.cwiseSqrt().asDiagonal());
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("make_instance: eigendecomposition failed");
    }
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      throw std::invalid_argument("make_instance: sigma is not positive definite");
    }
    inst.sigma_half = psd_sqrt(sigma);
    const double recon =
        (inst.sigma_half * inst.sigma_half - sigma).norm() / sigma.norm();
    if (!(recon <= 1e-8)) {
      throw std::runtime_error("make_instance: square-root reconstruction failed");
    }
  }
  inst.mu = std::move(mu);
  inst.sigma = std::move(sigma);
  inst.n = n;
  inst.p = p;
  inst.errors = errors;
  return inst;
}

Matrix draw_innovations(Index n, Index p, const ErrorDist& errors,
                        rng::Engine& gen) {
  Matrix eps(n, p);
  if (errors.kind == ErrorDist::Kind::Normal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < p; ++j) eps(i, j) = normal(gen);
    }
  } else {
    std::student_t_distribution<double> student(errors.dof);
    const double scale = std::sqrt((errors.dof - 2.0) / errors.dof);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < p; ++j) eps(i, j) = scale * student(gen);
    }
  }
  return eps;
}

DataMatrix generate_sample(const ProblemInstance& inst, rng::Engine& gen) {
  Matrix eps = draw_innovations(inst.n, inst.p, inst.errors, gen);
  DataMatrix data;
  if (inst.sigma_is_diagonal) {
    data = eps.array().rowwise() *
           inst.sigma_half.diagonal().transpose().array();
  } else {
    data.noalias() = eps * inst.sigma_half;
  }
  data.rowwise() += inst.mu.transpose();
  return data;
}

}  // namespace hdmean

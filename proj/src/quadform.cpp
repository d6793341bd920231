#include "hdmean/quadform.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace hdmean {

namespace {

void check_dim(Index got, Index want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << ": dimension " << got << " does not match p = " << want;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

QuadraticForm::QuadraticForm(Kind kind, Index p, Vector d, Matrix m)
    : kind_(kind), p_(p), d_(std::move(d)), m_(std::move(m)) {
  switch (kind_) {
    case Kind::Identity:
      qe_ = Vector::Ones(p_);
      eqe_ = static_cast<double>(p_);
      break;
    case Kind::Diagonal:
      qe_ = d_;
      eqe_ = d_.sum();
      break;
    case Kind::Dense:
      qe_ = m_.rowwise().sum();
      eqe_ = qe_.sum();
      break;
  }
}

QuadraticForm QuadraticForm::identity(Index p) {
  if (p < 1) throw std::invalid_argument("QuadraticForm: p must be >= 1");
  return QuadraticForm(Kind::Identity, p, Vector(), Matrix());
}

QuadraticForm QuadraticForm::diagonal(Vector d) {
  if (d.size() < 1) throw std::invalid_argument("QuadraticForm: p must be >= 1");
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      std::ostringstream msg;
      msg << "QuadraticForm: diagonal entry " << i + 1 << " is " << d[i]
          << ", must be strictly positive";
      throw std::invalid_argument(msg.str());
    }
  }
  const Index p = d.size();
  return QuadraticForm(Kind::Diagonal, p, std::move(d), Matrix());
}

QuadraticForm QuadraticForm::dense(Matrix m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw std::invalid_argument("QuadraticForm: dense input must be square, p >= 1");
  }
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(scale, 1e-300)) {
    throw std::invalid_argument("QuadraticForm: dense input is not symmetric");
  }
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("QuadraticForm: dense input is not positive definite");
  }
  const Index p = m.rows();
  return QuadraticForm(Kind::Dense, p, Vector(), std::move(m));
}

double QuadraticForm::quad(const Vector& x, const Vector& y) const {
  check_dim(x.size(), p_, "quad");
  check_dim(y.size(), p_, "quad");
  switch (kind_) {
    case Kind::Identity:
      return x.dot(y);
    case Kind::Diagonal:
      return (x.array() * d_.array() * y.array()).sum();
    case Kind::Dense:
      return x.dot(m_ * y);
  }
  return 0.0;
}

double QuadraticForm::trace_product(const Matrix& s) const {
  if (s.rows() != p_ || s.cols() != p_) {
    throw std::invalid_argument("trace_product: S must be p x p");
  }
  switch (kind_) {
    case Kind::Identity:
      return s.trace();
    case Kind::Diagonal:
      return d_.dot(s.diagonal());
    case Kind::Dense:
      // sum_{ij} Q_ij S_ji
      return m_.cwiseProduct(s.transpose()).sum();
  }
  return 0.0;
}

Vector QuadraticForm::row_quads(const DataMatrix& data) const {
  check_dim(data.cols(), p_, "row_quads");
  switch (kind_) {
    case Kind::Identity:
      return data.rowwise().squaredNorm();
    case Kind::Diagonal:
      return data.array().square().matrix() * d_;
    case Kind::Dense:
      return (data * m_).cwiseProduct(data).rowwise().sum();
  }
  return Vector();
}

Vector QuadraticForm::apply(const Vector& x) const {
  check_dim(x.size(), p_, "apply");
  switch (kind_) {
    case Kind::Identity:
      return x;
    case Kind::Diagonal:
      return d_.cwiseProduct(x);
    case Kind::Dense:
      return m_ * x;
  }
  return Vector();
}

Vector QuadraticForm::diagonal_entries() const {
  switch (kind_) {
    case Kind::Identity:
      return Vector::Ones(p_);
    case Kind::Diagonal:
      return d_;
    case Kind::Dense:
      return m_.diagonal();
  }
  return Vector();
}

Matrix QuadraticForm::to_dense() const {
  switch (kind_) {
    case Kind::Identity:
      return Matrix::Identity(p_, p_);
    case Kind::Diagonal:
      return d_.asDiagonal();
    case Kind::Dense:
      return m_;
  }
  return Matrix();
}

std::string QuadraticForm::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::Identity:
      out << "identity";
      break;
    case Kind::Diagonal:
      out << "diagonal";
      break;
    case Kind::Dense:
      out << "dense";
      break;
  }
  out << "(p=" << p_ << ")";
  return out.str();
}

QuadraticForm estimate_q_from_sample(const DataMatrix& data) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 2) {
    throw std::invalid_argument("estimate_q_from_sample: need n >= 2");
  }
  Vector mean = data.colwise().mean();
  Vector d(p);
  for (Index j = 0; j < p; ++j) {
    const double var =
        (data.col(j).array() - mean[j]).square().sum() / static_cast<double>(n - 1);
    if (!(var > 1e-20 * (1.0 + mean[j] * mean[j]))) {
      std::ostringstream msg;
      msg << "estimate_q_from_sample: coordinate " << j + 1
          << " has zero sample variance";
      throw std::invalid_argument(msg.str());
    }
    d[j] = 1.0 / var;
  }
  return QuadraticForm::diagonal(std::move(d));
}

}  // namespace hdmean

#pragma once

#include <string>

#include "hdmean/types.hpp"

namespace hdmean {

// Known positive definite weighting matrix Q with O(p) kernels for the
// identity and diagonal cases and cached all-ones contractions (Qe, e'Qe).
// The all-ones vector e itself is never used in O(p^2) products.
// Immutable after construction; safe to share across threads.
class QuadraticForm {
 public:
  enum class Kind { Identity, Diagonal, Dense };

  static QuadraticForm identity(Index p);
  // d must have strictly positive entries.
  static QuadraticForm diagonal(Vector d);
  // m must be symmetric to 1e-10 relative tolerance and positive definite
  // (checked by a Cholesky factorization attempt). Inputs are never repaired.
  static QuadraticForm dense(Matrix m);

  Kind kind() const noexcept { return kind_; }
  Index dim() const noexcept { return p_; }

  // e'Qe
  double eqe() const noexcept { return eqe_; }
  // Qe as a vector (row sums).
  const Vector& row_sums() const noexcept { return qe_; }

  // x'Qy; symmetric in (x, y).
  double quad(const Vector& x, const Vector& y) const;
  // tr(QS) for a p x p symmetric S.
  double trace_product(const Matrix& s) const;
  // Per-row kernels x_k'Qx_k for the rows of data (n-vector).
  Vector row_quads(const DataMatrix& data) const;
  // Qx
  Vector apply(const Vector& x) const;
  // Diagonal of Q.
  Vector diagonal_entries() const;
  // Materialized p x p matrix (tests and reference paths only).
  Matrix to_dense() const;

  std::string describe() const;

 private:
  QuadraticForm(Kind kind, Index p, Vector d, Matrix m);

  Kind kind_;
  Index p_ = 0;
  Vector d_;  // Diagonal kind
  Matrix m_;  // Dense kind
  Vector qe_;
  double eqe_ = 0.0;
};

// Q-hat = [diag(S_n)]^{-1}, S_n the unbiased sample covariance (divisor n-1).
// Requires n >= 2 and strictly positive sample variance in every coordinate.
QuadraticForm estimate_q_from_sample(const DataMatrix& data);

}  // namespace hdmean

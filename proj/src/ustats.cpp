#include "hdmean/ustats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hdmean {

YStats compute_y(const DataMatrix& data, const QuadraticForm& q) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 2) throw std::invalid_argument("compute_y: need n >= 2");
  if (p != q.dim()) {
    throw std::invalid_argument("compute_y: data and Q dimensions differ");
  }

  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);

  // sum_{i != j} x_i'Q x_j = s'Qs - sum_k x_k'Q x_k,  s = sum of rows
  const Vector row_kernels = q.row_quads(data);
  const double sum_self = row_kernels.sum();
  const Vector col_sums = data.colwise().sum();
  const double cross = q.quad(col_sums, col_sums) - sum_self;

  // a_k = e'Q x_k via the cached Qe vector; sum_{i != j} a_i a_j by the same
  // identity.
  const Vector a = data * q.row_sums();
  const double sum_a = a.sum();
  const double cross_a = sum_a * sum_a - a.squaredNorm();

  YStats y;
  y.n = n;
  y.p = p;
  y.y1 = cross / (pd * (nd - 1.0));
  y.y2 = (sum_self - cross / (nd - 1.0)) / (nd * pd);
  y.y3 = cross_a / (pd * (nd - 1.0) * q.eqe());
  y.y4 = sum_a / (nd * q.eqe());

  // y2 is (n-1)/n times an average of nonnegative Q-deviations; anything
  // materially negative means a corrupted input or kernel bug.
  const double slack =
      1e-9 * ((std::abs(sum_self) + std::abs(cross) / (nd - 1.0)) / (nd * pd) + 1.0);
  if (y.y2 < -slack) {
    throw std::logic_error("compute_y: y2 fell below its rounding floor");
  }
  return y;
}

double default_denominator_tol(const YStats& y) {
  return 1e-12 *
         std::max({std::abs(y.y1), std::abs(y.y2), std::abs(y.y3), 1.0});
}

ShrinkageCoefficients shrinkage_coefficients(const YStats& y,
                                             CoefficientPolicy policy,
                                             std::optional<double> tol) {
  if (!(std::isfinite(y.y1) && std::isfinite(y.y2) && std::isfinite(y.y3) &&
        std::isfinite(y.y4))) {
    throw std::invalid_argument("shrinkage_coefficients: non-finite statistics");
  }
  const double floor = tol.value_or(default_denominator_tol(y));
  const double denom = y.y1 + y.y2 - y.y3;

  ShrinkageCoefficients out;
  out.policy = policy;
  if (std::abs(denom) <= floor) {
    // Zero sample dispersion: the limit of the rule is the constant vector
    // matched to the Q-weighted grand mean.
    out.alpha = 0.0;
    out.beta = y.y4;
    out.degenerate = true;
    return out;
  }
  out.alpha = (y.y1 - y.y3) / denom;
  out.beta = y.y2 / denom * y.y4;
  if (policy == CoefficientPolicy::Clamped) {
    out.alpha = std::clamp(out.alpha, 0.0, 1.0);
    out.beta = (1.0 - out.alpha) * y.y4;
  }
  return out;
}

}  // namespace hdmean

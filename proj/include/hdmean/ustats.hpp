#pragma once

#include <optional>

#include "hdmean/quadform.hpp"
#include "hdmean/types.hpp"

namespace hdmean {

enum class CoefficientPolicy { Raw, Clamped };

// The four pairwise statistics of the plug-in rule. y1 and y3 average a
// kernel over ordered pairs i != j; y2 and y4 are centered/averaged
// single-observation kernels.
struct YStats {
  double y1 = 0.0;
  double y2 = 0.0;
  double y3 = 0.0;
  double y4 = 0.0;
  Index n = 0;
  Index p = 0;
};

struct ShrinkageCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  CoefficientPolicy policy = CoefficientPolicy::Raw;
  // Set when |y1 + y2 - y3| fell below the tolerance floor; the estimator
  // falls back to the constant vector y4 * e.
  bool degenerate = false;
};

// Computes
//   y1 = sum_{i!=j} x_i'Q x_j / (p (n-1))
//   y2 = (sum_k x_k'Q x_k - sum_{i!=j} x_i'Q x_j / (n-1)) / (n p)
//   y3 = sum_{i!=j} (e'Q x_i)(e'Q x_j) / (p (n-1) e'Qe)
//   y4 = sum_k e'Q x_k / (n e'Qe)
// via the sum-and-subtract identities, O(np) for identity/diagonal Q — the
// literal double loops exist only as a test oracle. Requires n >= 2.
YStats compute_y(const DataMatrix& data, const QuadraticForm& q);

// 1e-12 * max(|y1|, |y2|, |y3|, 1): floor below which the denominator
// y1 + y2 - y3 is treated as zero.
double default_denominator_tol(const YStats& y);

// alpha = (y1 - y3) / (y1 + y2 - y3), beta = y2 / (y1 + y2 - y3) * y4.
// Raw coefficients may leave [0, 1]; Clamped projects alpha to [0, 1] and
// recomputes beta = (1 - alpha) * y4.
ShrinkageCoefficients shrinkage_coefficients(
    const YStats& y, CoefficientPolicy policy = CoefficientPolicy::Raw,
    std::optional<double> tol = std::nullopt);

}  // namespace hdmean

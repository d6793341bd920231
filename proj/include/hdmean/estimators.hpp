#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdmean/model.hpp"
#include "hdmean/quadform.hpp"
#include "hdmean/ustats.hpp"

namespace hdmean {

struct EstimatorOptions {
  CoefficientPolicy policy = CoefficientPolicy::Raw;
  // Test hooks. variance_override replaces the pooled variance of the
  // James-Stein rule; identity_shrinkage forces every estimator into its
  // no-shrinkage configuration (output = sample mean).
  std::optional<double> variance_override;
  bool identity_shrinkage = false;
};

struct EstimatorOutput {
  Vector estimate;
  std::optional<ShrinkageCoefficients> coefficients;
  std::vector<std::pair<std::string, double>> diagnostics;

  double diagnostic(const std::string& name) const;
  bool has_diagnostic(const std::string& name) const;
};

// Coordinatewise average of the rows. Requires n >= 1.
EstimatorOutput sample_mean(const DataMatrix& data);

// alpha-hat * xbar + beta-hat * e with plug-in coefficients from compute_y.
// Requires n >= 2 and q.dim() == p.
EstimatorOutput proposed(const DataMatrix& data, const QuadraticForm& q,
                         const EstimatorOptions& opts = {});

// James-Stein with pooled variance (unknown common variance):
//   delta = (1 - (p-2)/n * s2 / (xbar'xbar)) * xbar,
//   s2 = sum_k ||x_k - xbar||^2 / (p(n-1) + 2).
// Requires n >= 2, p >= 3. Near-zero xbar'xbar falls back to the zero
// vector with diagnostics["degenerate"] = 1.
EstimatorOutput james_stein(const DataMatrix& data,
                            const EstimatorOptions& opts = {});

// Diagonal-variance shrinkage rule
//   delta = (1 - (p-2)(n-1) / (n(n-3) xbar'D^-1 xbar)) * xbar,
// D = diag(S_n). Requires n >= 4, p >= 3 and positive sample variances.
EstimatorOutput tong(const DataMatrix& data, const EstimatorOptions& opts = {});

// Berger-Bock-style coordinatewise shrinkage with per-coordinate variances:
//   delta_i = (1 - (p-2)(n-1)/(n(n+1)) * s_i^2 / (xbar'xbar)) * xbar_i,
// s_i^2 the i-th diagonal of S_n ((n-1)/(n+1) is the unknown-variance
// correction of s_i^2). Under equal variances s_i^2 == s^2 this reduces to
// the James-Stein-type factor (1 - (p-2)(n-1)/(n(n+1)) s^2/(xbar'xbar)).
// Requires n >= 2, p >= 3 and positive sample variances.
EstimatorOutput berger_bock(const DataMatrix& data,
                            const EstimatorOptions& opts = {});

// Loss-minimizing non-random weights for alpha * xbar + beta * e and the
// value of the minimized normalized risk.
struct OracleCoefficients {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double risk_star = 0.0;  // pi2 / (pi1 + pi2), in [0, 1)
  double pi1 = 0.0;        // tr(Q Sigma) / n
  double pi2 = 0.0;        // (mu - gbar e)' Q (mu - gbar e), gbar = e'Q mu / e'Qe
};

OracleCoefficients oracle_coefficients(const ProblemInstance& inst,
                                       const QuadraticForm& q);
// Engine path: mu varies per replication while tr(Q Sigma) is fixed.
OracleCoefficients oracle_coefficients(const Vector& mu, double trace_q_sigma,
                                       Index n, const QuadraticForm& q);

// alpha* xbar + beta* e using the true (mu, Sigma) of inst and the Q of the
// loss being scored. Simulation-only.
EstimatorOutput oracle_estimate(const DataMatrix& data,
                                const ProblemInstance& inst,
                                const QuadraticForm& loss_q);

// ---- Registry ----------------------------------------------------------

struct EstimatorContext {
  const DataMatrix& data;
  const QuadraticForm& q;  // estimator-input Q
  EstimatorOptions options;
  // Simulation-only fields; null when estimating from real data.
  const ProblemInstance* truth = nullptr;
  const QuadraticForm* loss_q = nullptr;
};

struct EstimatorInfo {
  std::string name;
  Index min_n = 1;
  Index min_p = 1;
  bool needs_ground_truth = false;
  bool uses_input_q = false;
  std::function<EstimatorOutput(const EstimatorContext&)> run;
};

// Name-keyed registry with uniform signature so further estimators can be
// added without touching the Monte Carlo engine.
class EstimatorRegistry {
 public:
  EstimatorRegistry();  // starts with the six built-ins

  // Immutable shared instance with the built-ins.
  static const EstimatorRegistry& built_in();

  bool contains(const std::string& name) const;
  // Throws ConfigError naming the estimator when unknown.
  const EstimatorInfo& at(const std::string& name) const;
  std::vector<std::string> names() const;
  void add(EstimatorInfo info);

 private:
  std::map<std::string, EstimatorInfo> entries_;
};

}  // namespace hdmean

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hdmean/estimators.hpp"
#include "hdmean/model.hpp"
#include "hdmean/quadform.hpp"
#include "hdmean/types.hpp"

namespace hdmean {

// ---- Losses and metrics --------------------------------------------------

// n (delta - mu)' Q (delta - mu) / tr(Q Sigma); the sample mean has
// expected loss exactly 1 under this normalization.
double loss_general(const Vector& delta, const ProblemInstance& inst,
                    const QuadraticForm& q);
double loss_general(const Vector& delta, const Vector& mu,
                    const QuadraticForm& q, double trace_q_sigma, Index n);

// (n/p) (delta - mu)' [diag(Sigma)]^{-1} (delta - mu). Equals loss_general
// with Q = diag(Sigma)^{-1} whenever Sigma is diagonal (tr(Q Sigma) = p).
double loss_diag(const Vector& delta, const ProblemInstance& inst);
double loss_diag(const Vector& delta, const Vector& mu,
                 const Vector& sigma_diag, Index n);

// (baseline - candidate) / baseline; relative improvement in average loss
// over the sample mean. Requires baseline > 0.
double prial(double mean_loss_baseline, double mean_loss_candidate);

// 1 - ||test_mean - delta||^2 / ||test_mean - train_mean||^2. Positive
// when delta predicts the held-out mean better than the training mean.
double epr(const Vector& train_mean, const Vector& test_mean,
           const Vector& delta);

// ---- Simulation designs ---------------------------------------------------

// Q handed to Q-consuming estimators inside a replication. The loss is
// always evaluated with the true Q of the design.
enum class QInputRule { Identity, TrueDiag, EstimatedDiag };

// Q spec loadable from configs.
struct QSpec {
  enum class Kind { Identity, Diagonal, Dense };
  Kind kind = Kind::Identity;
  Vector diag;   // Diagonal
  Matrix dense;  // Dense

  QuadraticForm build(Index p) const;
  std::string describe() const;
};

struct LossSpec {
  enum class Kind { General, Diag };
  Kind kind = Kind::Diag;
  QSpec q;  // used when kind == General

  std::string describe() const;
};

struct SimulationDesign {
  Index p = 0;
  Index n = 0;
  CovarianceSpec sigma = Sigma1Spec{};
  MeanSpec mu = ConstantMuSpec{0.0};
  // mu1 only: redraw mu on every replication (default) or fix one draw.
  bool redraw_mu = true;
  ErrorDist errors = ErrorDist::normal();
  QInputRule q_input = QInputRule::EstimatedDiag;
  LossSpec loss;
  CoefficientPolicy policy = CoefficientPolicy::Raw;

  std::string describe() const;
};

// ---- Reports ---------------------------------------------------------------

struct EstimatorRisk {
  std::string name;
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  double prial_vs_mean = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";  // "ok", "skipped: ...", "error: ..."
  // Per-replication losses (kept for distributional checks; not part of the
  // summary serialization). Empty when the estimator was skipped.
  std::vector<double> losses;
};

struct RiskReport {
  std::string design_description;
  // (field, value) pairs for table-format design columns.
  std::vector<std::pair<std::string, std::string>> design_fields;
  std::uint64_t seed = 0;
  int replications = 0;
  std::vector<EstimatorRisk> estimators;

  const EstimatorRisk& row(const std::string& name) const;
};

enum class SigmaFamily { Sigma2, Sigma3 };

struct SweepPoint {
  double rho = 0.0;
  std::vector<EstimatorRisk> estimators;
};

struct SweepReport {
  SigmaFamily family = SigmaFamily::Sigma2;
  std::string design_description;
  std::vector<std::pair<std::string, std::string>> design_fields;
  std::uint64_t seed = 0;
  int replications = 0;
  std::vector<SweepPoint> points;
};

struct EprRow {
  Index n_train = 0;
  std::string name;
  double mean_epr = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  std::vector<double> values;  // per-replication EPR
};

struct EprReport {
  std::string source;
  std::uint64_t seed = 0;
  int replications = 0;
  std::vector<EprRow> rows;

  const EprRow& row(Index n_train, const std::string& name) const;
};

// Oracle-side regime summary: s_n = (n/p) * pi2 decides whether shrinkage
// keeps helping as p grows. Thresholds are reporting conventions:
// s_n < 0.1 -> "~I", s_n > 10 -> "~III", else "II".
struct RiskSummary {
  double pi1 = 0.0;
  double pi2 = 0.0;
  double s_n = 0.0;
  std::string regime;
};

RiskSummary classify_regime(const ProblemInstance& inst,
                            const QuadraticForm& q);

// ---- Engines ---------------------------------------------------------------

// Runs R replications of `design`: per replication r the stream
// (seed, Replication, r) drives the mu draw (if redrawn), the data draw and
// nothing else; every requested estimator is scored with the design's loss.
// The report is a pure function of (design, estimators, R, seed) — worker
// count only changes scheduling. Estimators incompatible with the design are
// reported as skipped, never fatal.
RiskReport run_monte_carlo(const SimulationDesign& design,
                           const std::vector<std::string>& estimators,
                           int replications, std::uint64_t seed,
                           int workers = 0,
                           const EstimatorRegistry& registry =
                               EstimatorRegistry::built_in());

// One run_monte_carlo per grid point with the point's covariance substituted
// into `base`; point i runs under substream_seed(seed, Sweep, i). The grid
// must be strictly increasing within [0, 0.9] (Sigma2) or [0, 0.5] (Sigma3).
SweepReport rho_sweep(const SimulationDesign& base, SigmaFamily family,
                      const std::vector<double>& rho_grid,
                      const std::vector<std::string>& estimators,
                      int replications, std::uint64_t seed, int workers = 0,
                      const EstimatorRegistry& registry =
                          EstimatorRegistry::built_in());

// Train/test resampling on a fixed (already standardized) matrix: per
// replication r the stream (seed, Replication, r) draws the split; each
// estimator is fit on the train rows with Q = identity and scored by epr()
// against the test-row mean. Estimators whose minimum n exceeds a grid point
// are skipped at that point.
EprReport epr_experiment(const DataMatrix& data,
                         const std::vector<Index>& train_sizes,
                         const std::vector<std::string>& estimators,
                         int replications, std::uint64_t seed, int workers = 0,
                         CoefficientPolicy policy = CoefficientPolicy::Raw,
                         const EstimatorRegistry& registry =
                             EstimatorRegistry::built_in());

}  // namespace hdmean

#include "hdmean/estimators.hpp"

#include <cmath>
#include <sstream>

namespace hdmean {

namespace {

Vector column_variances(const DataMatrix& data) {
  const Index n = data.rows();
  const Index p = data.cols();
  const Vector mean = data.colwise().mean();
  Vector d(p);
  for (Index j = 0; j < p; ++j) {
    const double var = (data.col(j).array() - mean[j]).square().sum() /
                       static_cast<double>(n - 1);
    if (!(var > 1e-20 * (1.0 + mean[j] * mean[j]))) {
      std::ostringstream msg;
      msg << "coordinate " << j + 1 << " has zero sample variance";
      throw std::invalid_argument(msg.str());
    }
    d[j] = var;
  }
  return d;
}

void check_finite(const Vector& estimate, const char* who) {
  if (!estimate.allFinite()) {
    throw std::logic_error(std::string(who) + ": non-finite estimate");
  }
}

EstimatorOutput degenerate_zero(Index p, const char* factor_name) {
  EstimatorOutput out;
  out.estimate = Vector::Zero(p);
  out.diagnostics.emplace_back(factor_name, 0.0);
  out.diagnostics.emplace_back("degenerate", 1.0);
  return out;
}

}  // namespace

double EstimatorOutput::diagnostic(const std::string& name) const {
  for (const auto& [key, value] : diagnostics) {
    if (key == name) return value;
  }
  throw std::out_of_range("EstimatorOutput: no diagnostic named " + name);
}

bool EstimatorOutput::has_diagnostic(const std::string& name) const {
  for (const auto& [key, value] : diagnostics) {
    if (key == name) return true;
  }
  return false;
}

EstimatorOutput sample_mean(const DataMatrix& data) {
  if (data.rows() < 1 || data.cols() < 1) {
    throw std::invalid_argument("sample_mean: empty data");
  }
  EstimatorOutput out;
  out.estimate = data.colwise().mean();
  check_finite(out.estimate, "sample_mean");
  return out;
}

EstimatorOutput proposed(const DataMatrix& data, const QuadraticForm& q,
                         const EstimatorOptions& opts) {
  const Index p = data.cols();
  const Vector xbar = data.colwise().mean();

  EstimatorOutput out;
  if (opts.identity_shrinkage) {
    out.coefficients = ShrinkageCoefficients{1.0, 0.0, opts.policy, false};
    out.estimate = xbar;
  } else {
    const YStats y = compute_y(data, q);
    const ShrinkageCoefficients coef = shrinkage_coefficients(y, opts.policy);
    out.coefficients = coef;
    out.estimate = coef.alpha * xbar;
    out.estimate.array() += coef.beta;
    out.diagnostics.emplace_back("y1", y.y1);
    out.diagnostics.emplace_back("y2", y.y2);
    out.diagnostics.emplace_back("y3", y.y3);
    out.diagnostics.emplace_back("y4", y.y4);
  }
  out.diagnostics.emplace_back("alpha", out.coefficients->alpha);
  out.diagnostics.emplace_back("beta", out.coefficients->beta);
  out.diagnostics.emplace_back("degenerate",
                               out.coefficients->degenerate ? 1.0 : 0.0);
  check_finite(out.estimate, "proposed");
  (void)p;
  return out;
}

EstimatorOutput james_stein(const DataMatrix& data,
                            const EstimatorOptions& opts) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 2) throw std::invalid_argument("james_stein: need n >= 2");
  if (p < 3) throw std::invalid_argument("james_stein: need p >= 3");

  const Vector xbar = data.colwise().mean();
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);

  double s2;
  if (opts.variance_override) {
    s2 = *opts.variance_override;
  } else {
    const double rss = (data.rowwise() - xbar.transpose()).squaredNorm();
    s2 = rss / (pd * (nd - 1.0) + 2.0);
  }

  const double xx = xbar.squaredNorm();
  if (!opts.identity_shrinkage && xx <= 1e-14 * pd * s2 / nd + 1e-300) {
    return degenerate_zero(p, "shrinkage_factor");
  }
  const double factor =
      opts.identity_shrinkage ? 1.0 : 1.0 - (pd - 2.0) / nd * s2 / xx;

  EstimatorOutput out;
  out.estimate = factor * xbar;
  out.diagnostics.emplace_back("shrinkage_factor", factor);
  out.diagnostics.emplace_back("pooled_variance", s2);
  out.diagnostics.emplace_back("degenerate", 0.0);
  check_finite(out.estimate, "james_stein");
  return out;
}

EstimatorOutput tong(const DataMatrix& data, const EstimatorOptions& opts) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 4) throw std::invalid_argument("tong: need n >= 4");
  if (p < 3) throw std::invalid_argument("tong: need p >= 3");

  const Vector xbar = data.colwise().mean();
  const Vector d = column_variances(data);
  const double t = (xbar.array().square() / d.array()).sum();
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);

  if (!opts.identity_shrinkage && t <= 1e-12 * pd) {
    return degenerate_zero(p, "shrinkage_factor");
  }
  const double factor = opts.identity_shrinkage
                            ? 1.0
                            : 1.0 - (pd - 2.0) * (nd - 1.0) / (nd * (nd - 3.0) * t);

  EstimatorOutput out;
  out.estimate = factor * xbar;
  out.diagnostics.emplace_back("shrinkage_factor", factor);
  out.diagnostics.emplace_back("degenerate", 0.0);
  check_finite(out.estimate, "tong");
  return out;
}

EstimatorOutput berger_bock(const DataMatrix& data,
                            const EstimatorOptions& opts) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (n < 2) throw std::invalid_argument("berger_bock: need n >= 2");
  if (p < 3) throw std::invalid_argument("berger_bock: need p >= 3");

  const Vector xbar = data.colwise().mean();
  const Vector d = column_variances(data);
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double xx = xbar.squaredNorm();

  if (!opts.identity_shrinkage &&
      xx <= 1e-14 * pd * d.mean() / nd + 1e-300) {
    return degenerate_zero(p, "factor_min");
  }
  // Coordinatewise factors 1 - c * s_i^2 / (xbar'xbar), c the James-Stein
  // constant (p-2)/n with the unknown-variance correction (n-1)/(n+1); under
  // equal sample variances all factors coincide with one scalar.
  const double c = opts.identity_shrinkage
                       ? 0.0
                       : (pd - 2.0) * (nd - 1.0) / (nd * (nd + 1.0));
  const Vector factors = 1.0 - (c / xx) * d.array();

  EstimatorOutput out;
  out.estimate = factors.cwiseProduct(xbar);
  out.diagnostics.emplace_back("factor_min", factors.minCoeff());
  out.diagnostics.emplace_back("factor_max", factors.maxCoeff());
  out.diagnostics.emplace_back("degenerate", 0.0);
  check_finite(out.estimate, "berger_bock");
  return out;
}

OracleCoefficients oracle_coefficients(const Vector& mu, double trace_q_sigma,
                                       Index n, const QuadraticForm& q) {
  if (mu.size() != q.dim()) {
    throw std::invalid_argument("oracle_coefficients: mu and Q dimensions differ");
  }
  if (!(trace_q_sigma > 0.0)) {
    throw std::invalid_argument("oracle_coefficients: tr(Q Sigma) must be positive");
  }
  const double mu_q_mu = q.quad(mu, mu);
  const double e_q_mu = q.row_sums().dot(mu);

  OracleCoefficients out;
  out.pi1 = trace_q_sigma / static_cast<double>(n);
  out.pi2 = std::max(0.0, mu_q_mu - e_q_mu * e_q_mu / q.eqe());
  const double denom = out.pi1 + out.pi2;
  out.alpha_star = out.pi2 / denom;
  out.beta_star = (1.0 - out.alpha_star) * e_q_mu / q.eqe();
  out.risk_star = out.pi2 / denom;
  return out;
}

OracleCoefficients oracle_coefficients(const ProblemInstance& inst,
                                       const QuadraticForm& q) {
  return oracle_coefficients(inst.mu, q.trace_product(inst.sigma), inst.n, q);
}

EstimatorOutput oracle_estimate(const DataMatrix& data,
                                const ProblemInstance& inst,
                                const QuadraticForm& loss_q) {
  if (data.cols() != inst.p) {
    throw std::invalid_argument("oracle_estimate: data and instance dimensions differ");
  }
  const OracleCoefficients coef = oracle_coefficients(inst, loss_q);
  const Vector xbar = data.colwise().mean();

  EstimatorOutput out;
  out.estimate = coef.alpha_star * xbar;
  out.estimate.array() += coef.beta_star;
  out.diagnostics.emplace_back("alpha_star", coef.alpha_star);
  out.diagnostics.emplace_back("beta_star", coef.beta_star);
  out.diagnostics.emplace_back("risk_star", coef.risk_star);
  check_finite(out.estimate, "oracle_estimate");
  return out;
}

EstimatorRegistry::EstimatorRegistry() {
  add({"mean", 1, 1, false, false,
       [](const EstimatorContext& ctx) { return sample_mean(ctx.data); }});
  add({"js", 2, 3, false, false, [](const EstimatorContext& ctx) {
         return james_stein(ctx.data, ctx.options);
       }});
  add({"bb", 2, 3, false, false, [](const EstimatorContext& ctx) {
         return berger_bock(ctx.data, ctx.options);
       }});
  add({"tong", 4, 3, false, false, [](const EstimatorContext& ctx) {
         return tong(ctx.data, ctx.options);
       }});
  add({"proposed", 2, 1, false, true, [](const EstimatorContext& ctx) {
         return proposed(ctx.data, ctx.q, ctx.options);
       }});
  add({"oracle", 1, 1, true, false, [](const EstimatorContext& ctx) {
         if (ctx.truth == nullptr || ctx.loss_q == nullptr) {
           throw std::invalid_argument(
               "oracle estimator requires simulation ground truth");
         }
         return oracle_estimate(ctx.data, *ctx.truth, *ctx.loss_q);
       }});
}

const EstimatorRegistry& EstimatorRegistry::built_in() {
  static const EstimatorRegistry registry;
  return registry;
}

bool EstimatorRegistry::contains(const std::string& name) const {
  return entries_.count(name) > 0;
}

const EstimatorInfo& EstimatorRegistry::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) {
    throw ConfigError("unknown estimator \"" + name + "\"");
  }
  return it->second;
}

std::vector<std::string> EstimatorRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, info] : entries_) out.push_back(name);
  return out;
}

void EstimatorRegistry::add(EstimatorInfo info) {
  entries_[info.name] = std::move(info);
}

}  // namespace hdmean

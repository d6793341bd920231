#include "hdmean/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace hdmean {

// ---- Losses and metrics ----------------------------------------------------

double loss_general(const Vector& delta, const Vector& mu,
                    const QuadraticForm& q, double trace_q_sigma, Index n) {
  if (delta.size() != mu.size() || delta.size() != q.dim()) {
    throw std::invalid_argument("loss_general: dimension mismatch");
  }
  if (!(trace_q_sigma > 0.0)) {
    throw std::invalid_argument("loss_general: tr(Q Sigma) must be positive");
  }
  const Vector diff = delta - mu;
  return static_cast<double>(n) * q.quad(diff, diff) / trace_q_sigma;
}

double loss_general(const Vector& delta, const ProblemInstance& inst,
                    const QuadraticForm& q) {
  return loss_general(delta, inst.mu, q, q.trace_product(inst.sigma), inst.n);
}

double loss_diag(const Vector& delta, const Vector& mu,
                 const Vector& sigma_diag, Index n) {
  if (delta.size() != mu.size() || delta.size() != sigma_diag.size()) {
    throw std::invalid_argument("loss_diag: dimension mismatch");
  }
  for (Index i = 0; i < sigma_diag.size(); ++i) {
    if (!(sigma_diag[i] > 0.0)) {
      throw std::invalid_argument("loss_diag: zero diagonal entry in Sigma");
    }
  }
  const double quad =
      ((delta - mu).array().square() / sigma_diag.array()).sum();
  return static_cast<double>(n) / static_cast<double>(delta.size()) * quad;
}

double loss_diag(const Vector& delta, const ProblemInstance& inst) {
  return loss_diag(delta, inst.mu, inst.sigma.diagonal(), inst.n);
}

double prial(double mean_loss_baseline, double mean_loss_candidate) {
  if (!(mean_loss_baseline > 0.0)) {
    throw std::invalid_argument("prial: baseline must be positive");
  }
  return (mean_loss_baseline - mean_loss_candidate) / mean_loss_baseline;
}

double epr(const Vector& train_mean, const Vector& test_mean,
           const Vector& delta) {
  if (train_mean.size() != test_mean.size() ||
      train_mean.size() != delta.size()) {
    throw std::invalid_argument("epr: dimension mismatch");
  }
  const double denom = (test_mean - train_mean).squaredNorm();
  if (!(denom > 0.0)) {
    throw std::invalid_argument("epr: train and test means are identical");
  }
  return 1.0 - (test_mean - delta).squaredNorm() / denom;
}

// ---- Spec descriptions -------------------------------------------------------

QuadraticForm QSpec::build(Index p) const {
  switch (kind) {
    case Kind::Identity:
      return QuadraticForm::identity(p);
    case Kind::Diagonal:
      if (diag.size() != p) {
        throw std::invalid_argument("QSpec: diagonal length does not match p");
      }
      return QuadraticForm::diagonal(diag);
    case Kind::Dense:
      if (dense.rows() != p || dense.cols() != p) {
        throw std::invalid_argument("QSpec: dense matrix is not p x p");
      }
      return QuadraticForm::dense(dense);
  }
  throw std::logic_error("QSpec: unreachable");
}

std::string QSpec::describe() const {
  switch (kind) {
    case Kind::Identity:
      return "identity";
    case Kind::Diagonal:
      return "diagonal";
    case Kind::Dense:
      return "dense";
  }
  return "?";
}

std::string LossSpec::describe() const {
  if (kind == Kind::Diag) return "diag";
  return "general(q=" + q.describe() + ")";
}

namespace {

const char* q_input_name(QInputRule rule) {
  switch (rule) {
    case QInputRule::Identity:
      return "identity";
    case QInputRule::TrueDiag:
      return "true_diag";
    case QInputRule::EstimatedDiag:
      return "estimated_diag";
  }
  return "?";
}

const char* policy_name(CoefficientPolicy policy) {
  return policy == CoefficientPolicy::Raw ? "raw" : "clamped";
}

}  // namespace

std::string SimulationDesign::describe() const {
  std::ostringstream out;
  out << "p=" << p << " n=" << n << " sigma=" << hdmean::describe(sigma)
      << " mu=" << hdmean::describe(mu);
  if (std::holds_alternative<Mu1Spec>(mu)) {
    out << (redraw_mu ? " redraw=true" : " redraw=false");
  }
  out << " errors=" << errors.describe() << " q_input=" << q_input_name(q_input)
      << " loss=" << loss.describe() << " policy=" << policy_name(policy);
  return out.str();
}

namespace {

std::vector<std::pair<std::string, std::string>> design_fields_of(
    const SimulationDesign& d) {
  std::string mu_desc = describe(d.mu);
  if (std::holds_alternative<Mu1Spec>(d.mu) && !d.redraw_mu) {
    mu_desc += " fixed";
  }
  return {{"p", std::to_string(d.p)},
          {"n", std::to_string(d.n)},
          {"sigma", describe(d.sigma)},
          {"mu", mu_desc},
          {"errors", d.errors.describe()}};
}

}  // namespace

const EstimatorRisk& RiskReport::row(const std::string& name) const {
  for (const auto& row : estimators) {
    if (row.name == name) return row;
  }
  throw std::out_of_range("RiskReport: no estimator named " + name);
}

const EprRow& EprReport::row(Index n_train, const std::string& name) const {
  for (const auto& row : rows) {
    if (row.n_train == n_train && row.name == name) return row;
  }
  std::ostringstream msg;
  msg << "EprReport: no row for n_train=" << n_train << ", estimator " << name;
  throw std::out_of_range(msg.str());
}

RiskSummary classify_regime(const ProblemInstance& inst,
                            const QuadraticForm& q) {
  const OracleCoefficients coef = oracle_coefficients(inst, q);
  RiskSummary out;
  out.pi1 = coef.pi1;
  out.pi2 = coef.pi2;
  out.s_n = static_cast<double>(inst.n) / static_cast<double>(inst.p) * coef.pi2;
  if (out.s_n < 0.1) {
    out.regime = "~I";
  } else if (out.s_n > 10.0) {
    out.regime = "~III";
  } else {
    out.regime = "II";
  }
  return out;
}

// ---- Monte Carlo engine ------------------------------------------------------

namespace {

struct SummaryStats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
};

// Mean and standard error accumulated in fixed replication order.
SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats out;
  const std::size_t r = values.size();
  if (r == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(r);
  if (r > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(r - 1)) /
             std::sqrt(static_cast<double>(r));
  }
  return out;
}

int resolve_workers(int workers, int replications) {
  int w = workers;
  if (w <= 0) {
    w = static_cast<int>(std::thread::hardware_concurrency());
    if (w < 1) w = 1;
  }
  return std::max(1, std::min(w, replications));
}

struct FailureLog {
  int first_rep = -1;
  std::string message;

  void record(int rep, const std::string& msg) {
    if (first_rep < 0 || rep < first_rep) {
      first_rep = rep;
      message = msg;
    }
  }
  void merge(const FailureLog& other) {
    if (other.first_rep >= 0) record(other.first_rep, other.message);
  }
};

struct EstimatorSlot {
  const EstimatorInfo* info = nullptr;
  std::string skip_reason;  // empty when runnable
};

std::vector<EstimatorSlot> resolve_estimators(
    const std::vector<std::string>& names, const EstimatorRegistry& registry,
    Index n, Index p) {
  if (names.empty()) {
    throw ConfigError("estimator list is empty");
  }
  std::vector<EstimatorSlot> slots;
  slots.reserve(names.size());
  for (const auto& name : names) {
    EstimatorSlot slot;
    slot.info = &registry.at(name);
    if (n < slot.info->min_n) {
      std::ostringstream msg;
      msg << "skipped: requires n >= " << slot.info->min_n;
      slot.skip_reason = msg.str();
    } else if (p < slot.info->min_p) {
      std::ostringstream msg;
      msg << "skipped: requires p >= " << slot.info->min_p;
      slot.skip_reason = msg.str();
    }
    slots.push_back(std::move(slot));
  }
  return slots;
}

}  // namespace

RiskReport run_monte_carlo(const SimulationDesign& design,
                           const std::vector<std::string>& estimators,
                           int replications, std::uint64_t seed, int workers,
                           const EstimatorRegistry& registry) {
  if (replications < 1) {
    throw ConfigError("replications must be >= 1");
  }
  const Index n = design.n;
  const Index p = design.p;

  // Shared, immutable setup.
  Matrix sigma = build_covariance(design.sigma, p);
  const bool mu_random = std::holds_alternative<Mu1Spec>(design.mu);
  const bool redraw = mu_random && design.redraw_mu;
  Vector fixed_mu;
  {
    auto gen = rng::make_stream(seed, rng::Stream::MeanDraw, 0);
    fixed_mu = build_mean(design.mu, p, gen);
  }
  const ProblemInstance shared_inst =
      make_instance(fixed_mu, sigma, n, design.errors);

  // Loss: always the true Q of the design. Diag loss is the general loss
  // with Q = [diag(Sigma)]^{-1}, for which tr(Q Sigma) = p exactly.
  QuadraticForm loss_q = design.loss.kind == LossSpec::Kind::Diag
                             ? QuadraticForm::diagonal(
                                   sigma.diagonal().cwiseInverse())
                             : design.loss.q.build(p);
  const double trace_q_sigma = design.loss.kind == LossSpec::Kind::Diag
                                   ? static_cast<double>(p)
                                   : loss_q.trace_product(sigma);
  if (!(trace_q_sigma > 0.0)) {
    throw std::invalid_argument("run_monte_carlo: tr(Q Sigma) must be positive");
  }

  const QuadraticForm identity_q = QuadraticForm::identity(p);
  const QuadraticForm true_diag_q =
      QuadraticForm::diagonal(sigma.diagonal().cwiseInverse());

  const std::vector<EstimatorSlot> slots =
      resolve_estimators(estimators, registry, n, p);
  const std::size_t n_est = slots.size();

  EstimatorOptions options;
  options.policy = design.policy;

  const int R = replications;
  std::vector<std::vector<double>> losses(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    if (slots[e].skip_reason.empty()) {
      losses[e].assign(static_cast<std::size_t>(R), 0.0);
    }
  }
  std::vector<double> baseline(static_cast<std::size_t>(R), 0.0);

  const int n_workers = resolve_workers(workers, R);
  std::vector<std::vector<FailureLog>> failures(
      static_cast<std::size_t>(n_workers), std::vector<FailureLog>(n_est));

  auto worker_body = [&](int w, int r_begin, int r_end) {
    ProblemInstance inst = shared_inst;  // private copy; mu swaps per rep
    std::vector<FailureLog>& fail = failures[static_cast<std::size_t>(w)];
    for (int r = r_begin; r < r_end; ++r) {
      auto gen = rng::make_stream(seed, rng::Stream::Replication,
                                  static_cast<std::uint64_t>(r));
      if (redraw) {
        inst.mu = build_mean(design.mu, p, gen);
      }
      const DataMatrix data = generate_sample(inst, gen);

      auto score = [&](const Vector& delta) {
        return loss_general(delta, inst.mu, loss_q, trace_q_sigma, n);
      };
      baseline[static_cast<std::size_t>(r)] = score(data.colwise().mean());

      // Estimator-input Q per the design rule; a failed estimate (possible
      // only on degenerate draws) disables Q-consuming estimators for this
      // replication without aborting the run.
      const QuadraticForm* q_input = &identity_q;
      std::optional<QuadraticForm> estimated;
      std::string q_error;
      if (design.q_input == QInputRule::TrueDiag) {
        q_input = &true_diag_q;
      } else if (design.q_input == QInputRule::EstimatedDiag) {
        try {
          estimated = estimate_q_from_sample(data);
          q_input = &*estimated;
        } catch (const std::exception& ex) {
          q_error = ex.what();
        }
      }

      for (std::size_t e = 0; e < n_est; ++e) {
        if (!slots[e].skip_reason.empty()) continue;
        const EstimatorInfo& info = *slots[e].info;
        try {
          if (info.uses_input_q && !q_error.empty()) {
            throw std::runtime_error(q_error);
          }
          EstimatorContext ctx{data, *q_input, options, &inst, &loss_q};
          const EstimatorOutput out = info.run(ctx);
          losses[e][static_cast<std::size_t>(r)] = score(out.estimate);
        } catch (const std::exception& ex) {
          losses[e][static_cast<std::size_t>(r)] =
              std::numeric_limits<double>::quiet_NaN();
          fail[e].record(r, ex.what());
        }
      }
    }
  };

  if (n_workers == 1) {
    worker_body(0, 0, R);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      const int r_begin = static_cast<int>(
          static_cast<std::int64_t>(R) * w / n_workers);
      const int r_end = static_cast<int>(
          static_cast<std::int64_t>(R) * (w + 1) / n_workers);
      pool.emplace_back(worker_body, w, r_begin, r_end);
    }
    for (auto& t : pool) t.join();
  }

  const SummaryStats baseline_stats = summarize(baseline);

  RiskReport report;
  report.design_description = design.describe();
  report.design_fields = design_fields_of(design);
  report.seed = seed;
  report.replications = R;
  for (std::size_t e = 0; e < n_est; ++e) {
    EstimatorRisk row;
    row.name = slots[e].info->name;
    if (!slots[e].skip_reason.empty()) {
      row.status = slots[e].skip_reason;
      report.estimators.push_back(std::move(row));
      continue;
    }
    FailureLog merged;
    for (int w = 0; w < n_workers; ++w) {
      merged.merge(failures[static_cast<std::size_t>(w)][e]);
    }
    if (merged.first_rep >= 0) {
      std::ostringstream msg;
      msg << "error at replication " << merged.first_rep << ": "
          << merged.message;
      row.status = msg.str();
      row.losses = std::move(losses[e]);
      report.estimators.push_back(std::move(row));
      continue;
    }
    // The sample mean costs nothing to re-score, so its row always matches
    // the internal PRIAL baseline bit for bit.
    const bool is_mean = row.name == "mean";
    const SummaryStats stats = is_mean ? baseline_stats : summarize(losses[e]);
    row.mean_loss = stats.mean;
    row.std_error = stats.se;
    row.prial_vs_mean = baseline_stats.mean > 0.0
                            ? prial(baseline_stats.mean, stats.mean)
                            : std::numeric_limits<double>::quiet_NaN();
    row.losses = is_mean ? baseline : std::move(losses[e]);
    report.estimators.push_back(std::move(row));
  }
  return report;
}

SweepReport rho_sweep(const SimulationDesign& base, SigmaFamily family,
                      const std::vector<double>& rho_grid,
                      const std::vector<std::string>& estimators,
                      int replications, std::uint64_t seed, int workers,
                      const EstimatorRegistry& registry) {
  if (rho_grid.empty()) {
    throw ConfigError("sweep grid is empty");
  }
  const double rho_max = family == SigmaFamily::Sigma2 ? 0.9 : 0.5;
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    if (!(rho_grid[i] >= 0.0 && rho_grid[i] <= rho_max)) {
      std::ostringstream msg;
      msg << "sweep grid value " << rho_grid[i] << " outside [0, " << rho_max
          << "] for " << (family == SigmaFamily::Sigma2 ? "sigma2" : "sigma3");
      throw ConfigError(msg.str());
    }
    if (i > 0 && !(rho_grid[i] > rho_grid[i - 1])) {
      throw ConfigError("sweep grid must be strictly increasing");
    }
  }

  SweepReport report;
  report.family = family;
  report.seed = seed;
  report.replications = replications;
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    SimulationDesign design = base;
    if (family == SigmaFamily::Sigma2) {
      design.sigma = Sigma2Spec{rho_grid[i]};
    } else {
      design.sigma = Sigma3Spec{rho_grid[i]};
    }
    const std::uint64_t point_seed =
        rng::substream_seed(seed, rng::Stream::Sweep, i);
    RiskReport point = run_monte_carlo(design, estimators, replications,
                                       point_seed, workers, registry);
    if (i == 0) {
      report.design_description = point.design_description;
      report.design_fields = point.design_fields;
      // sigma varies along the grid; the rho column carries it
      std::erase_if(report.design_fields,
                    [](const auto& f) { return f.first == "sigma"; });
    }
    SweepPoint sp;
    sp.rho = rho_grid[i];
    sp.estimators = std::move(point.estimators);
    for (auto& row : sp.estimators) row.losses.clear();
    report.points.push_back(std::move(sp));
  }
  return report;
}

EprReport epr_experiment(const DataMatrix& data,
                         const std::vector<Index>& train_sizes,
                         const std::vector<std::string>& estimators,
                         int replications, std::uint64_t seed, int workers,
                         CoefficientPolicy policy,
                         const EstimatorRegistry& registry) {
  const Index n = data.rows();
  const Index p = data.cols();
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (n < 2) throw ConfigError("EPR needs at least two rows");
  if (train_sizes.empty()) throw ConfigError("train-size grid is empty");
  for (Index size : train_sizes) {
    if (size < 1 || size >= n) {
      std::ostringstream msg;
      msg << "train size " << size << " outside [1, " << n - 1 << "]";
      throw ConfigError(msg.str());
    }
  }
  if (estimators.empty()) throw ConfigError("estimator list is empty");
  for (const auto& name : estimators) {
    if (registry.at(name).needs_ground_truth) {
      throw ConfigError("estimator \"" + name +
                        "\" requires simulation ground truth");
    }
  }

  const QuadraticForm identity_q = QuadraticForm::identity(p);
  EstimatorOptions options;
  options.policy = policy;

  const std::size_t n_sizes = train_sizes.size();
  const std::size_t n_est = estimators.size();
  std::vector<const EstimatorInfo*> infos;
  infos.reserve(n_est);
  for (const auto& name : estimators) infos.push_back(&registry.at(name));

  const int R = replications;
  // values[(g * n_est + e)][r]
  std::vector<std::vector<double>> values(n_sizes * n_est);
  std::vector<bool> runnable(n_sizes * n_est, false);
  for (std::size_t g = 0; g < n_sizes; ++g) {
    for (std::size_t e = 0; e < n_est; ++e) {
      if (train_sizes[g] >= infos[e]->min_n && p >= infos[e]->min_p) {
        runnable[g * n_est + e] = true;
        values[g * n_est + e].assign(static_cast<std::size_t>(R), 0.0);
      }
    }
  }

  const int n_workers = resolve_workers(workers, R);
  std::vector<std::vector<FailureLog>> failures(
      static_cast<std::size_t>(n_workers),
      std::vector<FailureLog>(n_sizes * n_est));

  auto worker_body = [&](int w, int r_begin, int r_end) {
    std::vector<FailureLog>& fail = failures[static_cast<std::size_t>(w)];
    for (int r = r_begin; r < r_end; ++r) {
      auto gen = rng::make_stream(seed, rng::Stream::Replication,
                                  static_cast<std::uint64_t>(r));
      for (std::size_t g = 0; g < n_sizes; ++g) {
        const Index n_train = train_sizes[g];
        const std::vector<std::int64_t> train_idx =
            rng::sample_without_replacement(n, n_train, gen);
        DataMatrix train(n_train, p);
        DataMatrix test(n - n_train, p);
        {
          Index ti = 0, si = 0;
          std::size_t next = 0;
          for (Index i = 0; i < n; ++i) {
            if (next < train_idx.size() && train_idx[next] == i) {
              train.row(ti++) = data.row(i);
              ++next;
            } else {
              test.row(si++) = data.row(i);
            }
          }
        }
        const Vector train_mean = train.colwise().mean();
        const Vector test_mean = test.colwise().mean();

        for (std::size_t e = 0; e < n_est; ++e) {
          const std::size_t slot = g * n_est + e;
          if (!runnable[slot]) continue;
          try {
            EstimatorContext ctx{train, identity_q, options, nullptr, nullptr};
            const EstimatorOutput out = infos[e]->run(ctx);
            values[slot][static_cast<std::size_t>(r)] =
                epr(train_mean, test_mean, out.estimate);
          } catch (const std::exception& ex) {
            values[slot][static_cast<std::size_t>(r)] =
                std::numeric_limits<double>::quiet_NaN();
            fail[slot].record(r, ex.what());
          }
        }
      }
    }
  };

  if (n_workers == 1) {
    worker_body(0, 0, R);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w) {
      const int r_begin = static_cast<int>(
          static_cast<std::int64_t>(R) * w / n_workers);
      const int r_end = static_cast<int>(
          static_cast<std::int64_t>(R) * (w + 1) / n_workers);
      pool.emplace_back(worker_body, w, r_begin, r_end);
    }
    for (auto& t : pool) t.join();
  }

  EprReport report;
  report.seed = seed;
  report.replications = R;
  for (std::size_t g = 0; g < n_sizes; ++g) {
    for (std::size_t e = 0; e < n_est; ++e) {
      const std::size_t slot = g * n_est + e;
      EprRow row;
      row.n_train = train_sizes[g];
      row.name = estimators[e];
      if (!runnable[slot]) {
        std::ostringstream msg;
        msg << "skipped: requires n >= " << infos[e]->min_n;
        row.status = msg.str();
        report.rows.push_back(std::move(row));
        continue;
      }
      FailureLog merged;
      for (int w = 0; w < n_workers; ++w) {
        merged.merge(failures[static_cast<std::size_t>(w)][slot]);
      }
      if (merged.first_rep >= 0) {
        std::ostringstream msg;
        msg << "error at replication " << merged.first_rep << ": "
            << merged.message;
        row.status = msg.str();
      } else {
        const SummaryStats stats = summarize(values[slot]);
        row.mean_epr = stats.mean;
        row.std_error = stats.se;
      }
      row.values = std::move(values[slot]);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace hdmean

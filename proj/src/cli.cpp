#include "hdmean/cli.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "hdmean/estimators.hpp"

namespace hdmean::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& ex) {
    throw ConfigError("config parse error in " + path + ": " + ex.what());
  }
}

void check_keys(const json& j, const std::string& context,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) {
    throw ConfigError(context + " must be an object");
  }
  for (const auto& [key, value] : j.items()) {
    if (allowed.count(key) == 0) {
      throw ConfigError("unknown field \"" + key + "\" in " + context);
    }
  }
}

const json& require(const json& j, const std::string& context,
                    const std::string& key) {
  if (!j.contains(key)) {
    throw ConfigError("missing field \"" + key + "\" in " + context);
  }
  return j.at(key);
}

double require_number(const json& j, const std::string& context,
                      const std::string& key) {
  const json& v = require(j, context, key);
  if (!v.is_number()) {
    throw ConfigError("field \"" + key + "\" in " + context +
                      " must be a number");
  }
  return v.get<double>();
}

std::int64_t require_integer(const json& j, const std::string& context,
                             const std::string& key) {
  const json& v = require(j, context, key);
  if (!v.is_number_integer()) {
    throw ConfigError("field \"" + key + "\" in " + context +
                      " must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const json& j, const std::string& context,
                           const std::string& key) {
  const json& v = require(j, context, key);
  if (!v.is_string()) {
    throw ConfigError("field \"" + key + "\" in " + context +
                      " must be a string");
  }
  return v.get<std::string>();
}

// Relative paths inside a config resolve against the config's directory.
std::string resolve_path(const std::string& raw, const fs::path& base_dir) {
  fs::path p(raw);
  if (p.is_absolute()) return p.string();
  return (base_dir / p).string();
}

CovarianceSpec sigma_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "design.sigma", {"kind", "rho", "path"});
  const std::string kind = require_string(j, "design.sigma", "kind");
  if (kind == "sigma1") return Sigma1Spec{};
  if (kind == "sigma2") {
    return Sigma2Spec{require_number(j, "design.sigma", "rho")};
  }
  if (kind == "sigma3") {
    return Sigma3Spec{require_number(j, "design.sigma", "rho")};
  }
  if (kind == "identity") return CustomSigmaSpec{};  // built once p is known
  if (kind == "custom") {
    const std::string path =
        resolve_path(require_string(j, "design.sigma", "path"), base_dir);
    io::Dataset ds = io::read_matrix_csv(path);
    return CustomSigmaSpec{std::move(ds.values)};
  }
  throw ConfigError("design.sigma.kind must be one of sigma1, sigma2, sigma3, "
                    "identity, custom");
}

MeanSpec mu_from_json(const json& j, const fs::path& base_dir, bool& redraw) {
  check_keys(j, "design.mu", {"kind", "tau", "value", "path", "redraw"});
  const std::string kind = require_string(j, "design.mu", "kind");
  redraw = true;
  if (j.contains("redraw")) {
    if (!j.at("redraw").is_boolean()) {
      throw ConfigError("field \"redraw\" in design.mu must be a boolean");
    }
    redraw = j.at("redraw").get<bool>();
  }
  if (kind == "mu1") return Mu1Spec{require_number(j, "design.mu", "tau")};
  if (kind == "mu2") return Mu2Spec{require_number(j, "design.mu", "tau")};
  if (kind == "constant") {
    return ConstantMuSpec{require_number(j, "design.mu", "value")};
  }
  if (kind == "custom") {
    const std::string path =
        resolve_path(require_string(j, "design.mu", "path"), base_dir);
    return CustomMuSpec{io::read_vector_csv(path)};
  }
  throw ConfigError("design.mu.kind must be one of mu1, mu2, constant, custom");
}

ErrorDist errors_from_json(const json& j) {
  check_keys(j, "design.errors", {"kind", "dof"});
  const std::string kind = require_string(j, "design.errors", "kind");
  if (kind == "normal") return ErrorDist::normal();
  if (kind == "scaled_t") {
    try {
      return ErrorDist::scaled_t(require_number(j, "design.errors", "dof"));
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("design.errors: ") + ex.what());
    }
  }
  throw ConfigError("design.errors.kind must be normal or scaled_t");
}

QSpec q_spec_from_json(const json& j, const std::string& context,
                       const fs::path& base_dir) {
  check_keys(j, context, {"kind", "path"});
  const std::string kind = require_string(j, context, "kind");
  QSpec spec;
  if (kind == "identity") {
    spec.kind = QSpec::Kind::Identity;
    return spec;
  }
  if (kind == "diagonal") {
    spec.kind = QSpec::Kind::Diagonal;
    spec.diag = io::read_vector_csv(
        resolve_path(require_string(j, context, "path"), base_dir));
    return spec;
  }
  if (kind == "dense") {
    spec.kind = QSpec::Kind::Dense;
    io::Dataset ds = io::read_matrix_csv(
        resolve_path(require_string(j, context, "path"), base_dir));
    spec.dense = std::move(ds.values);
    return spec;
  }
  throw ConfigError(context + ".kind must be identity, diagonal or dense");
}

QInputRule q_input_from_json(const json& j) {
  if (!j.is_string()) {
    throw ConfigError("design.q_input must be a string");
  }
  const std::string rule = j.get<std::string>();
  if (rule == "identity") return QInputRule::Identity;
  if (rule == "true_diag") return QInputRule::TrueDiag;
  if (rule == "estimated_diag") return QInputRule::EstimatedDiag;
  throw ConfigError(
      "design.q_input must be identity, true_diag or estimated_diag");
}

LossSpec loss_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "design.loss", {"kind", "q"});
  const std::string kind = require_string(j, "design.loss", "kind");
  LossSpec spec;
  if (kind == "diag") {
    spec.kind = LossSpec::Kind::Diag;
    return spec;
  }
  if (kind == "general") {
    spec.kind = LossSpec::Kind::General;
    spec.q = q_spec_from_json(require(j, "design.loss", "q"), "design.loss.q",
                              base_dir);
    return spec;
  }
  throw ConfigError("design.loss.kind must be diag or general");
}

CoefficientPolicy policy_from_string(const std::string& policy,
                                     const std::string& context) {
  if (policy == "raw") return CoefficientPolicy::Raw;
  if (policy == "clamped") return CoefficientPolicy::Clamped;
  throw ConfigError(context + " must be raw or clamped");
}

SimulationDesign design_from_json_impl(const json& j, const fs::path& base_dir,
                                       bool allow_sigma) {
  std::set<std::string> keys = {"p", "n", "mu", "errors", "q_input", "loss"};
  if (allow_sigma) keys.insert("sigma");
  check_keys(j, "design", keys);

  SimulationDesign design;
  design.p = require_integer(j, "design", "p");
  design.n = require_integer(j, "design", "n");
  if (design.p < 1) throw ConfigError("design.p must be >= 1");
  if (design.n < 1) throw ConfigError("design.n must be >= 1");

  if (allow_sigma) {
    auto spec = sigma_from_json(require(j, "design", "sigma"), base_dir);
    if (auto* custom = std::get_if<CustomSigmaSpec>(&spec)) {
      if (custom->matrix.size() == 0) {
        custom->matrix = Matrix::Identity(design.p, design.p);
      }
    }
    design.sigma = std::move(spec);
  }
  design.mu = mu_from_json(require(j, "design", "mu"), base_dir,
                           design.redraw_mu);
  design.errors = j.contains("errors") ? errors_from_json(j.at("errors"))
                                       : ErrorDist::normal();
  design.q_input = j.contains("q_input") ? q_input_from_json(j.at("q_input"))
                                         : QInputRule::EstimatedDiag;
  design.loss = loss_from_json(require(j, "design", "loss"), base_dir);
  return design;
}

// Construction doubles as validation: every spec is instantiated once so a
// bad design fails before any replication runs.
void validate_design(const SimulationDesign& design, bool check_sigma) {
  try {
    if (check_sigma) {
      const Matrix sigma = build_covariance(design.sigma, design.p);
      if (design.loss.kind == LossSpec::Kind::Diag) {
        for (Index i = 0; i < design.p; ++i) {
          if (!(sigma(i, i) > 0.0)) {
            throw std::invalid_argument("diag loss needs positive Sigma diagonal");
          }
        }
      }
    }
    auto gen = rng::make_stream(0, rng::Stream::Generic, 0);
    (void)build_mean(design.mu, design.p, gen);
    if (design.loss.kind == LossSpec::Kind::General) {
      (void)design.loss.q.build(design.p);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("design: ") + ex.what());
  }
}

std::vector<std::string> estimators_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("estimators must be a non-empty array of names");
  }
  std::vector<std::string> names;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw ConfigError("estimators entries must be strings");
    }
    names.push_back(item.get<std::string>());
    (void)EstimatorRegistry::built_in().at(names.back());
  }
  return names;
}

OutputSpec output_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, "output", {"path", "format", "losses_path"});
  OutputSpec out;
  out.path = resolve_path(require_string(j, "output", "path"), base_dir);
  if (j.contains("format")) {
    const std::string format = require_string(j, "output", "format");
    if (format == "csv") {
      out.format = io::ReportFormat::Csv;
    } else if (format == "table") {
      out.format = io::ReportFormat::Table;
    } else {
      throw ConfigError("output.format must be csv or table");
    }
  }
  if (j.contains("losses_path")) {
    out.losses_path =
        resolve_path(require_string(j, "output", "losses_path"), base_dir);
  }
  return out;
}

std::uint64_t seed_from_json(const json& j, const std::string& context) {
  const json& v = require(j, context, "seed");
  const bool ok = v.is_number_unsigned() ||
                  (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) {
    throw ConfigError("field \"seed\" in " + context +
                      " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

int workers_from_json(const json& j) {
  if (!j.contains("workers")) return 0;
  if (!j.at("workers").is_number_integer()) {
    throw ConfigError("workers must be an integer");
  }
  return j.at("workers").get<int>();
}

}  // namespace

SimulationDesign design_from_json(const json& j) {
  SimulationDesign design = design_from_json_impl(j, fs::current_path(), true);
  validate_design(design, true);
  return design;
}

SimulateConfig load_simulate_config(const std::string& path) {
  const json j = load_json(path);
  check_keys(j, "config",
             {"design", "estimators", "replications", "seed", "workers",
              "policy", "output"});
  const fs::path base_dir = fs::path(path).parent_path();

  SimulateConfig config;
  config.design = design_from_json_impl(require(j, "config", "design"),
                                        base_dir, true);
  if (j.contains("policy")) {
    config.design.policy =
        policy_from_string(require_string(j, "config", "policy"), "policy");
  }
  validate_design(config.design, true);
  config.estimators = estimators_from_json(require(j, "config", "estimators"));
  const std::int64_t reps = require_integer(j, "config", "replications");
  if (reps < 1) throw ConfigError("replications must be >= 1");
  config.replications = static_cast<int>(reps);
  config.seed = seed_from_json(j, "config");
  config.workers = workers_from_json(j);
  config.output = output_from_json(require(j, "config", "output"), base_dir);
  return config;
}

SweepConfig load_sweep_config(const std::string& path) {
  const json j = load_json(path);
  check_keys(j, "config",
             {"design", "sweep", "estimators", "replications", "seed",
              "workers", "policy", "output"});
  const fs::path base_dir = fs::path(path).parent_path();

  const json& design_json = require(j, "config", "design");
  if (design_json.contains("sigma")) {
    throw ConfigError(
        "sweep configs must not set design.sigma; the sweep block provides it");
  }

  SweepConfig config;
  config.design = design_from_json_impl(design_json, base_dir, false);
  if (j.contains("policy")) {
    config.design.policy =
        policy_from_string(require_string(j, "config", "policy"), "policy");
  }
  validate_design(config.design, false);

  const json& sweep = require(j, "config", "sweep");
  check_keys(sweep, "sweep", {"family", "grid"});
  const std::string family = require_string(sweep, "sweep", "family");
  if (family == "sigma2") {
    config.family = SigmaFamily::Sigma2;
  } else if (family == "sigma3") {
    config.family = SigmaFamily::Sigma3;
  } else {
    throw ConfigError("sweep.family must be sigma2 or sigma3");
  }
  const json& grid = require(sweep, "sweep", "grid");
  if (!grid.is_array()) throw ConfigError("sweep.grid must be an array");
  for (const auto& item : grid) {
    if (!item.is_number()) throw ConfigError("sweep.grid entries must be numbers");
    config.grid.push_back(item.get<double>());
  }
  if (config.grid.empty()) throw ConfigError("sweep.grid is empty");
  const double rho_max = config.family == SigmaFamily::Sigma2 ? 0.9 : 0.5;
  for (std::size_t i = 0; i < config.grid.size(); ++i) {
    if (!(config.grid[i] >= 0.0 && config.grid[i] <= rho_max)) {
      std::ostringstream msg;
      msg << "sweep.grid value " << config.grid[i] << " outside [0, " << rho_max
          << "] for " << family;
      throw ConfigError(msg.str());
    }
    if (i > 0 && !(config.grid[i] > config.grid[i - 1])) {
      throw ConfigError("sweep.grid must be strictly increasing");
    }
  }

  config.estimators = estimators_from_json(require(j, "config", "estimators"));
  const std::int64_t reps = require_integer(j, "config", "replications");
  if (reps < 1) throw ConfigError("replications must be >= 1");
  config.replications = static_cast<int>(reps);
  config.seed = seed_from_json(j, "config");
  config.workers = workers_from_json(j);
  config.output = output_from_json(require(j, "config", "output"), base_dir);
  return config;
}

namespace {

struct CommonOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string output_path;
};

void write_losses_csv(const RiskReport& report, const std::string& path) {
  std::ostringstream out;
  out << "# hdmean per-replication losses\n";
  out << "# seed: " << report.seed << "\n";
  out << "# design: " << report.design_description << "\n";
  out << "replication";
  std::vector<const EstimatorRisk*> rows;
  for (const auto& row : report.estimators) {
    if (!row.losses.empty()) {
      out << ',' << row.name;
      rows.push_back(&row);
    }
  }
  out << "\n";
  for (int r = 0; r < report.replications; ++r) {
    out << r;
    for (const auto* row : rows) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g",
                    row->losses[static_cast<std::size_t>(r)]);
      out << ',' << buf;
    }
    out << "\n";
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << out.str();
}

int cmd_simulate(const std::string& config_path,
                 const CommonOverrides& overrides) {
  SimulateConfig config = load_simulate_config(config_path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.workers) config.workers = *overrides.workers;
  if (!overrides.output_path.empty()) config.output.path = overrides.output_path;

  const RiskReport report =
      run_monte_carlo(config.design, config.estimators, config.replications,
                      config.seed, config.workers);
  io::write_report(report, config.output.path, config.output.format);
  if (!config.output.losses_path.empty()) {
    write_losses_csv(report, config.output.losses_path);
  }
  std::cout << "wrote " << config.output.path << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const CommonOverrides& overrides) {
  SweepConfig config = load_sweep_config(config_path);
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.workers) config.workers = *overrides.workers;
  if (!overrides.output_path.empty()) config.output.path = overrides.output_path;

  const SweepReport report =
      rho_sweep(config.design, config.family, config.grid, config.estimators,
                config.replications, config.seed, config.workers);
  io::write_report(report, config.output.path, config.output.format);
  std::cout << "wrote " << config.output.path << "\n";
  return 0;
}

struct EstimateArgs {
  std::string data_path;
  std::string q_spec = "estimate";
  std::string estimator;
  std::uint64_t seed = 0;
  std::string policy = "raw";
  std::string output = "estimate.csv";
  char delimiter = ',';
  bool header = false;
  bool labels = false;
  std::string orientation = "samples";
};

io::CsvOptions csv_options_from(const EstimateArgs& args) {
  io::CsvOptions options;
  options.delimiter = args.delimiter;
  options.header_row = args.header;
  options.label_column = args.labels;
  if (args.orientation == "samples") {
    options.orientation = io::Orientation::SamplesByGenes;
  } else if (args.orientation == "genes") {
    options.orientation = io::Orientation::GenesBySamples;
  } else {
    throw ConfigError("--orientation must be samples or genes");
  }
  return options;
}

int cmd_estimate(const EstimateArgs& args) {
  const EstimatorRegistry& registry = EstimatorRegistry::built_in();
  const EstimatorInfo& info = registry.at(args.estimator);
  if (info.needs_ground_truth) {
    throw ConfigError("estimator \"" + args.estimator +
                      "\" requires simulation ground truth");
  }
  const CoefficientPolicy policy = policy_from_string(args.policy, "--policy");
  if (args.q_spec != "identity" && args.q_spec != "estimate" &&
      args.q_spec.rfind("diag:", 0) != 0 && args.q_spec.rfind("dense:", 0) != 0) {
    throw ConfigError(
        "--q must be identity, estimate, diag:<path> or dense:<path>");
  }

  const io::Dataset ds = io::read_matrix_csv(args.data_path,
                                             csv_options_from(args));
  const Index p = ds.p();

  QuadraticForm q = QuadraticForm::identity(p);
  std::string q_desc = "identity";
  if (args.q_spec == "estimate") {
    q = estimate_q_from_sample(ds.values);
    q_desc = "estimated from sample";
  } else if (args.q_spec.rfind("diag:", 0) == 0) {
    q = QuadraticForm::diagonal(io::read_vector_csv(args.q_spec.substr(5)));
    q_desc = "diagonal from " + args.q_spec.substr(5);
  } else if (args.q_spec.rfind("dense:", 0) == 0) {
    io::Dataset qm = io::read_matrix_csv(args.q_spec.substr(6));
    q = QuadraticForm::dense(std::move(qm.values));
    q_desc = "dense from " + args.q_spec.substr(6);
  }
  if (q.dim() != p) {
    throw std::invalid_argument("Q dimension does not match the data");
  }

  EstimatorOptions options;
  options.policy = policy;
  EstimatorContext ctx{ds.values, q, options, nullptr, nullptr};
  const EstimatorOutput result = info.run(ctx);

  std::ostringstream out;
  out << "# hdmean estimate\n";
  out << "# source: " << args.data_path << "\n";
  out << "# n: " << ds.n() << "\n";
  out << "# p: " << p << "\n";
  out << "# estimator: " << args.estimator << "\n";
  out << "# q: " << q_desc << "\n";
  out << "# policy: " << args.policy << "\n";
  out << "# seed: " << args.seed << "\n";
  if (result.coefficients) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", result.coefficients->alpha);
    out << "# alpha: " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", result.coefficients->beta);
    out << "# beta: " << buf << "\n";
  }
  for (const auto& [key, value] : result.diagnostics) {
    if (key == "alpha" || key == "beta") continue;
    char buf[64];
    if (key == "degenerate") {
      out << "# degenerate: " << (value != 0.0 ? "true" : "false") << "\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << "# " << key << ": " << buf << "\n";
  }
  out << "index,label,estimate\n";
  for (Index i = 0; i < p; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", result.estimate[i]);
    out << i + 1 << ',' << ds.col_labels[static_cast<std::size_t>(i)] << ','
        << buf << "\n";
  }
  std::ofstream file(args.output, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + args.output);
  file << out.str();
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

struct EprArgs {
  std::string data_path;
  std::string train_sizes;
  Index genes = 0;  // 0 = all
  int reps = 0;
  std::uint64_t seed = 0;
  std::string estimators = "mean,js,bb,tong,proposed";
  std::string policy = "raw";
  std::string output = "epr_report.csv";
  std::string format = "csv";
  int workers = 0;
  char delimiter = ',';
  bool header = false;
  bool labels = false;
  std::string orientation = "samples";
};

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_epr(const EprArgs& args) {
  std::vector<Index> sizes;
  for (const auto& token : split_names(args.train_sizes)) {
    try {
      sizes.push_back(static_cast<Index>(std::stoll(token)));
    } catch (const std::exception&) {
      throw ConfigError("--train-sizes must be a comma list of integers");
    }
  }
  if (sizes.empty()) throw ConfigError("--train-sizes is empty");
  const std::vector<std::string> estimators = split_names(args.estimators);
  for (const auto& name : estimators) {
    (void)EstimatorRegistry::built_in().at(name);
  }
  const CoefficientPolicy policy = policy_from_string(args.policy, "--policy");
  io::ReportFormat format = io::ReportFormat::Csv;
  if (args.format == "table") {
    format = io::ReportFormat::Table;
  } else if (args.format != "csv") {
    throw ConfigError("--format must be csv or table");
  }
  if (args.reps < 1) throw ConfigError("--reps must be >= 1");

  EstimateArgs csv_args;
  csv_args.delimiter = args.delimiter;
  csv_args.header = args.header;
  csv_args.labels = args.labels;
  csv_args.orientation = args.orientation;
  io::Dataset ds = io::read_matrix_csv(args.data_path,
                                       csv_options_from(csv_args));
  if (args.genes > 0) {
    if (args.genes > ds.p()) {
      std::ostringstream msg;
      msg << "--genes " << args.genes << " exceeds the " << ds.p()
          << " columns in " << args.data_path;
      throw ConfigError(msg.str());
    }
    ds = io::subset_columns(ds, args.genes);
  }
  ds = io::standardize_arrays(ds);

  EprReport report =
      epr_experiment(ds.values, sizes, estimators, args.reps, args.seed,
                     args.workers, policy);
  report.source = args.data_path;
  io::write_report(report, args.output, format);
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"shrinkage estimation of high-dimensional means: simulation, "
               "sweeps, estimation and train/test evaluation"};
  app.require_subcommand(1);

  // simulate / sweep
  std::string config_path;
  CommonOverrides overrides;
  std::uint64_t seed_override = 0;
  int workers_override = 0;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "JSON run config")->required();
    cmd->add_option("--seed", seed_override, "override the config seed")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--workers", workers_override,
                    "worker threads (0 = hardware)");
    cmd->add_option("--output", overrides.output_path,
                    "override the config output path");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a Monte Carlo design and write a risk report");
  add_overrides(simulate);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run a correlation sweep and write a sweep report");
  add_overrides(sweep);

  EstimateArgs est;
  CLI::App* estimate = app.add_subcommand(
      "estimate", "apply one estimator to a data matrix");
  estimate->add_option("data", est.data_path, "numeric CSV, rows = samples")
      ->required();
  estimate->add_option("--q", est.q_spec,
                       "identity | estimate | diag:<csv> | dense:<csv>");
  estimate->add_option("--estimator", est.estimator, "estimator name")
      ->required();
  estimate->add_option("--seed", est.seed, "seed recorded in the output")
      ->required();
  estimate->add_option("--policy", est.policy, "raw | clamped");
  estimate->add_option("--output", est.output, "output path");
  estimate->add_option("--delimiter", est.delimiter, "CSV delimiter");
  estimate->add_flag("--header", est.header, "first row is a header");
  estimate->add_flag("--labels", est.labels, "first column is row labels");
  estimate->add_option("--orientation", est.orientation, "samples | genes");
  int estimate_workers = 0;
  estimate->add_option("--workers", estimate_workers, "accepted for symmetry");

  EprArgs epr_args;
  CLI::App* epr_cmd = app.add_subcommand(
      "epr", "train/test improvement-over-training-mean evaluation");
  epr_cmd->add_option("data", epr_args.data_path, "numeric CSV, rows = arrays")
      ->required();
  epr_cmd->add_option("--train-sizes", epr_args.train_sizes,
                      "comma list of training-set sizes")
      ->required();
  epr_cmd->add_option("--genes", epr_args.genes,
                      "use only the first k columns (0 = all)");
  epr_cmd->add_option("--reps", epr_args.reps, "random splits per train size")
      ->required();
  epr_cmd->add_option("--seed", epr_args.seed, "master seed")->required();
  epr_cmd->add_option("--estimators", epr_args.estimators,
                      "comma list of estimator names");
  epr_cmd->add_option("--policy", epr_args.policy, "raw | clamped");
  epr_cmd->add_option("--output", epr_args.output, "output path");
  epr_cmd->add_option("--format", epr_args.format, "csv | table");
  epr_cmd->add_option("--workers", epr_args.workers,
                      "worker threads (0 = hardware)");
  epr_cmd->add_option("--delimiter", epr_args.delimiter, "CSV delimiter");
  epr_cmd->add_flag("--header", epr_args.header, "first row is a header");
  epr_cmd->add_flag("--labels", epr_args.labels, "first column is row labels");
  epr_cmd->add_option("--orientation", epr_args.orientation,
                      "samples | genes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->count("--seed") || sweep->count("--seed")) {
      overrides.seed = seed_override;
    }
    if (simulate->count("--workers") || sweep->count("--workers")) {
      overrides.workers = workers_override;
    }
    if (simulate->parsed()) return cmd_simulate(config_path, overrides);
    if (sweep->parsed()) return cmd_sweep(config_path, overrides);
    if (estimate->parsed()) return cmd_estimate(est);
    if (epr_cmd->parsed()) return cmd_epr(epr_args);
    return 2;
  } catch (const ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hdmean::cli

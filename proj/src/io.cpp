#include "hdmean/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hdmean::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool is_comment_or_blank(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, delimiter)) out.push_back(field);
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

double parse_cell(const std::string& raw, Index row, Index col) {
  const std::string cell = trim(raw);
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  const bool consumed = end != begin && *end == '\0' && !cell.empty();
  if (!consumed || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-numeric cell \"" << cell << "\" at row " << row + 1
        << ", column " << col + 1;
    throw std::runtime_error(msg.str());
  }
  return value;
}

std::string format_value(double value, int precision = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
  return buf;
}

std::string csv_escape(const std::string& s, char delimiter) {
  if (s.find(delimiter) == std::string::npos &&
      s.find('"') == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void metadata_header(std::ostringstream& out, const char* what,
                     std::uint64_t seed, int replications) {
  out << "# hdmean " << what << "\n";
  out << "# seed: " << seed << "\n";
  out << "# replications: " << replications << "\n";
}

// Fixed-width table: design columns, then one "mean (se)" column per
// estimator. Skipped/errored cells print "--" and the reason is appended
// as a trailing comment line.
std::string format_table(
    const std::vector<std::pair<std::string, std::string>>& design_cols,
    const std::vector<std::vector<std::string>>& design_values,
    const std::vector<std::string>& estimator_names,
    const std::vector<std::vector<const EstimatorRisk*>>& cells) {
  std::vector<std::string> headers;
  for (const auto& [name, value] : design_cols) headers.push_back(name);
  for (const auto& name : estimator_names) headers.push_back(name);

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> notes;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::vector<std::string> row = design_values[r];
    for (std::size_t e = 0; e < estimator_names.size(); ++e) {
      const EstimatorRisk* cell = cells[r][e];
      if (cell == nullptr || cell->status != "ok") {
        row.push_back("--");
        if (cell != nullptr && cell->status != "ok") {
          notes.push_back("# note: " + estimator_names[e] + " @ row " +
                          std::to_string(r + 1) + ": " + cell->status);
        }
      } else {
        std::string text = format_value(cell->mean_loss, 6);
        if (std::isfinite(cell->std_error)) {
          text += " (" + format_value(cell->std_error, 3) + ")";
        }
        row.push_back(text);
      }
    }
    grid.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& row : grid) widths[c] = std::max(widths[c], row[c].size());
  }

  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) {
        out << std::string(widths[c] - row[c].size() + 2, ' ');
      }
    }
    out << "\n";
  };
  emit_row(headers);
  for (const auto& row : grid) emit_row(row);
  for (const auto& note : notes) out << note << "\n";
  return out.str();
}

}  // namespace

Dataset read_matrix_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  bool header_pending = options.header_row;
  Index width = -1;

  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    std::vector<std::string> fields = split(line, options.delimiter);
    if (header_pending) {
      header_pending = false;
      if (options.label_column && !fields.empty()) {
        fields.erase(fields.begin());
      }
      for (auto& f : fields) col_labels.push_back(trim(f));
      continue;
    }
    std::string label;
    if (options.label_column) {
      if (fields.empty()) {
        throw std::runtime_error("row " + std::to_string(rows.size() + 1) +
                                 " has no label column");
      }
      label = trim(fields.front());
      fields.erase(fields.begin());
    }
    if (width < 0) {
      width = static_cast<Index>(fields.size());
      if (width == 0) {
        throw std::runtime_error("row 1 has no data cells");
      }
    } else if (static_cast<Index>(fields.size()) != width) {
      std::ostringstream msg;
      msg << "ragged row " << rows.size() + 1 << ": expected " << width
          << " cells, found " << fields.size();
      throw std::runtime_error(msg.str());
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row[c] = parse_cell(fields[c], static_cast<Index>(rows.size()),
                          static_cast<Index>(c));
    }
    rows.push_back(std::move(row));
    row_labels.push_back(label);
  }
  if (rows.empty()) {
    throw std::runtime_error("empty file: " + path);
  }
  if (!col_labels.empty() && static_cast<Index>(col_labels.size()) != width) {
    std::ostringstream msg;
    msg << "header has " << col_labels.size() << " labels for " << width
        << " columns";
    throw std::runtime_error(msg.str());
  }

  Matrix values(static_cast<Index>(rows.size()), width);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < width; ++j) {
      values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }

  // Fill defaults, then orient to samples-by-genes.
  auto default_labels = [](Index count, const char* prefix) {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
      out.push_back(prefix + std::to_string(i + 1));
    }
    return out;
  };
  if (col_labels.empty()) col_labels = default_labels(width, "c");
  bool have_row_labels = options.label_column;
  if (!have_row_labels) {
    row_labels = default_labels(values.rows(), "r");
  }

  Dataset ds;
  ds.source = path;
  if (options.orientation == Orientation::GenesBySamples) {
    ds.values = values.transpose();
    ds.row_labels = std::move(col_labels);
    ds.col_labels = std::move(row_labels);
    ds.transform_log.push_back("transpose(genes-by-samples input)");
  } else {
    ds.values = std::move(values);
    ds.row_labels = std::move(row_labels);
    ds.col_labels = std::move(col_labels);
  }
  return ds;
}

Dataset standardize_arrays(const Dataset& ds) {
  const Index n = ds.n();
  const Index p = ds.p();
  if (p < 2) {
    throw std::invalid_argument("standardize_arrays: need p >= 2");
  }
  Dataset out = ds;
  for (Index i = 0; i < n; ++i) {
    const double mean = ds.values.row(i).mean();
    const double var = (ds.values.row(i).array() - mean).square().sum() /
                       static_cast<double>(p - 1);
    if (!(var > 1e-20 * (1.0 + mean * mean))) {
      std::ostringstream msg;
      msg << "standardize_arrays: row " << i + 1 << " has zero variance";
      throw std::invalid_argument(msg.str());
    }
    out.values.row(i) /= std::sqrt(var);
  }
  out.transform_log.push_back("standardize_arrays(row variance -> 1)");
  return out;
}

Dataset subset_columns(const Dataset& ds, Index count) {
  if (count < 1 || count > ds.p()) {
    std::ostringstream msg;
    msg << "subset_columns: count " << count << " outside [1, " << ds.p() << "]";
    throw std::invalid_argument(msg.str());
  }
  Dataset out = ds;
  out.values = ds.values.leftCols(count);
  out.col_labels.assign(ds.col_labels.begin(), ds.col_labels.begin() + count);
  out.transform_log.push_back("subset_columns(first " + std::to_string(count) +
                              ")");
  return out;
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, Index n_train,
                                             rng::Engine& gen) {
  const Index n = ds.n();
  if (n_train < 1 || n_train >= n) {
    std::ostringstream msg;
    msg << "split_train_test: n_train " << n_train << " outside [1, " << n - 1
        << "]";
    throw std::invalid_argument(msg.str());
  }
  const std::vector<std::int64_t> train_idx =
      rng::sample_without_replacement(n, n_train, gen);

  Dataset train, test;
  train.source = ds.source;
  test.source = ds.source;
  train.col_labels = ds.col_labels;
  test.col_labels = ds.col_labels;
  train.values.resize(n_train, ds.p());
  test.values.resize(n - n_train, ds.p());
  Index ti = 0, si = 0;
  std::size_t next = 0;
  for (Index i = 0; i < n; ++i) {
    if (next < train_idx.size() && train_idx[next] == i) {
      train.values.row(ti++) = ds.values.row(i);
      train.row_labels.push_back(ds.row_labels[static_cast<std::size_t>(i)]);
      ++next;
    } else {
      test.values.row(si++) = ds.values.row(i);
      test.row_labels.push_back(ds.row_labels[static_cast<std::size_t>(i)]);
    }
  }
  train.transform_log = ds.transform_log;
  test.transform_log = ds.transform_log;
  const std::string note = "split_train_test(n_train=" +
                           std::to_string(n_train) + " of " +
                           std::to_string(n) + ")";
  train.transform_log.push_back(note + " -> train");
  test.transform_log.push_back(note + " -> test");
  return {std::move(train), std::move(test)};
}

std::string format_report(const RiskReport& report, ReportFormat format) {
  std::ostringstream out;
  metadata_header(out, "risk report", report.seed, report.replications);
  out << "# design: " << report.design_description << "\n";
  if (format == ReportFormat::Csv) {
    out << "estimator,mean_loss,std_error,prial_vs_mean,replications,status\n";
    for (const auto& row : report.estimators) {
      out << row.name << ',' << format_value(row.mean_loss) << ','
          << format_value(row.std_error) << ','
          << format_value(row.prial_vs_mean) << ',' << report.replications
          << ',' << csv_escape(row.status, ',') << "\n";
    }
    return out.str();
  }
  std::vector<std::string> names;
  std::vector<const EstimatorRisk*> cells;
  for (const auto& row : report.estimators) {
    names.push_back(row.name);
    cells.push_back(&row);
  }
  std::vector<std::string> design_values;
  for (const auto& [key, value] : report.design_fields) {
    design_values.push_back(value);
  }
  out << format_table(report.design_fields, {design_values}, names, {cells});
  return out.str();
}

std::string format_report(const SweepReport& report, ReportFormat format) {
  std::ostringstream out;
  metadata_header(out, "sweep report", report.seed, report.replications);
  out << "# family: "
      << (report.family == SigmaFamily::Sigma2 ? "sigma2" : "sigma3") << "\n";
  out << "# base design: " << report.design_description << "\n";
  if (format == ReportFormat::Csv) {
    out << "rho,estimator,mean_loss,std_error,prial_vs_mean,replications,status\n";
    for (const auto& point : report.points) {
      for (const auto& row : point.estimators) {
        out << format_value(point.rho) << ',' << row.name << ','
            << format_value(row.mean_loss) << ',' << format_value(row.std_error)
            << ',' << format_value(row.prial_vs_mean) << ','
            << report.replications << ',' << csv_escape(row.status, ',')
            << "\n";
      }
    }
    return out.str();
  }
  std::vector<std::pair<std::string, std::string>> design_cols = {{"rho", ""}};
  std::vector<std::string> names;
  if (!report.points.empty()) {
    for (const auto& row : report.points.front().estimators) {
      names.push_back(row.name);
    }
  }
  std::vector<std::vector<std::string>> design_values;
  std::vector<std::vector<const EstimatorRisk*>> cells;
  for (const auto& point : report.points) {
    design_values.push_back({format_value(point.rho, 6)});
    std::vector<const EstimatorRisk*> row_cells;
    for (const auto& name : names) {
      const EstimatorRisk* found = nullptr;
      for (const auto& row : point.estimators) {
        if (row.name == name) {
          found = &row;
          break;
        }
      }
      row_cells.push_back(found);
    }
    cells.push_back(std::move(row_cells));
  }
  out << format_table(design_cols, design_values, names, cells);
  return out.str();
}

std::string format_report(const EprReport& report, ReportFormat format) {
  std::ostringstream out;
  metadata_header(out, "epr report", report.seed, report.replications);
  if (!report.source.empty()) out << "# source: " << report.source << "\n";
  if (format == ReportFormat::Csv) {
    out << "n_train,estimator,mean_epr,std_error,replications,status\n";
    for (const auto& row : report.rows) {
      out << row.n_train << ',' << row.name << ',' << format_value(row.mean_epr)
          << ',' << format_value(row.std_error) << ',' << report.replications
          << ',' << csv_escape(row.status, ',') << "\n";
    }
    return out.str();
  }
  // Group rows by n_train, estimator columns in first-seen order.
  std::vector<Index> sizes;
  std::vector<std::string> names;
  for (const auto& row : report.rows) {
    if (std::find(sizes.begin(), sizes.end(), row.n_train) == sizes.end()) {
      sizes.push_back(row.n_train);
    }
    if (std::find(names.begin(), names.end(), row.name) == names.end()) {
      names.push_back(row.name);
    }
  }
  std::vector<std::pair<std::string, std::string>> design_cols = {
      {"n_train", ""}};
  std::vector<std::vector<std::string>> design_values;
  std::vector<std::vector<const EstimatorRisk*>> cells;
  std::vector<std::vector<EstimatorRisk>> storage;  // adapt EprRow -> cell
  for (Index size : sizes) {
    design_values.push_back({std::to_string(size)});
    std::vector<EstimatorRisk> adapted;
    for (const auto& name : names) {
      EstimatorRisk cell;
      cell.name = name;
      cell.status = "missing";
      for (const auto& row : report.rows) {
        if (row.n_train == size && row.name == name) {
          cell.mean_loss = row.mean_epr;
          cell.std_error = row.std_error;
          cell.status = row.status;
          break;
        }
      }
      adapted.push_back(std::move(cell));
    }
    storage.push_back(std::move(adapted));
  }
  for (const auto& row : storage) {
    std::vector<const EstimatorRisk*> row_cells;
    for (const auto& cell : row) row_cells.push_back(&cell);
    cells.push_back(std::move(row_cells));
  }
  out << format_table(design_cols, design_values, names, cells);
  return out.str();
}

void write_report(const RiskReport& report, const std::string& path,
                  ReportFormat format) {
  write_text(path, format_report(report, format));
}

void write_report(const SweepReport& report, const std::string& path,
                  ReportFormat format) {
  write_text(path, format_report(report, format));
}

void write_report(const EprReport& report, const std::string& path,
                  ReportFormat format) {
  write_text(path, format_report(report, format));
}

RiskReport read_risk_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  RiskReport report;
  bool header_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto seed_pos = t.find("# seed: ");
      if (seed_pos == 0) report.seed = std::stoull(t.substr(8));
      const auto reps_pos = t.find("# replications: ");
      if (reps_pos == 0) report.replications = std::stoi(t.substr(16));
      const auto design_pos = t.find("# design: ");
      if (design_pos == 0) report.design_description = t.substr(10);
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields = split(t, ',');
    if (fields.size() < 6) {
      throw std::runtime_error("malformed report row: " + t);
    }
    EstimatorRisk row;
    row.name = fields[0];
    row.mean_loss = std::strtod(fields[1].c_str(), nullptr);
    row.std_error = std::strtod(fields[2].c_str(), nullptr);
    row.prial_vs_mean = std::strtod(fields[3].c_str(), nullptr);
    // status may have been quoted; strip quotes and rejoin extra fields
    std::string status = fields[5];
    for (std::size_t i = 6; i < fields.size(); ++i) status += "," + fields[i];
    if (status.size() >= 2 && status.front() == '"' && status.back() == '"') {
      status = status.substr(1, status.size() - 2);
      std::string unescaped;
      for (std::size_t i = 0; i < status.size(); ++i) {
        if (status[i] == '"' && i + 1 < status.size() && status[i + 1] == '"') {
          ++i;
        }
        unescaped += status[i];
      }
      status = unescaped;
    }
    row.status = status;
    report.estimators.push_back(std::move(row));
  }
  if (!header_seen) throw std::runtime_error("no report header in " + path);
  return report;
}

Vector read_vector_csv(const std::string& path, char delimiter) {
  CsvOptions options;
  options.delimiter = delimiter;
  const Dataset ds = read_matrix_csv(path, options);
  if (ds.n() == 1) return ds.values.row(0).transpose();
  if (ds.p() == 1) return ds.values.col(0);
  throw std::runtime_error(path + ": expected a single-row or single-column CSV");
}

void write_matrix_csv(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& col_labels,
                      int precision) {
  std::ostringstream out;
  if (!col_labels.empty()) {
    if (static_cast<Index>(col_labels.size()) != values.cols()) {
      throw std::invalid_argument("write_matrix_csv: label count mismatch");
    }
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
      if (j > 0) out << ',';
      out << col_labels[j];
    }
    out << "\n";
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_value(values(i, j), precision);
    }
    out << "\n";
  }
  write_text(path, out.str());
}

}  // namespace hdmean::io

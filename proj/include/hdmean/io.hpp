#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hdmean/risk.hpp"
#include "hdmean/rng.hpp"
#include "hdmean/types.hpp"

namespace hdmean::io {

enum class Orientation { SamplesByGenes, GenesBySamples };

struct CsvOptions {
  char delimiter = ',';
  bool header_row = false;
  bool label_column = false;
  Orientation orientation = Orientation::SamplesByGenes;
};

// Expression-style matrix with labels and an append-only transform log.
struct Dataset {
  DataMatrix values;  // samples by genes after loading
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::string source;
  std::vector<std::string> transform_log;

  Index n() const { return values.rows(); }
  Index p() const { return values.cols(); }
};

// Strict numeric CSV reader: '#' comment lines and blank lines are skipped,
// rows must be rectangular, every data cell must parse as a finite number.
// Errors name the offending (row, column) in 1-based data coordinates.
Dataset read_matrix_csv(const std::string& path, const CsvOptions& options = {});

// Divides each row by its own standard deviation across genes (divisor
// p - 1) so every row has variance one. Requires p >= 2 and positive row
// variances. Idempotent up to rounding.
Dataset standardize_arrays(const Dataset& ds);

// Keeps the first `count` columns.
Dataset subset_columns(const Dataset& ds, Index count);

// Uniform sample of n_train rows without replacement -> (train, test); rows
// keep their original relative order and labels. Requires 1 <= n_train < n.
std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, Index n_train,
                                             rng::Engine& gen);

enum class ReportFormat { Csv, Table };

// CSV bodies carry '#'-prefixed metadata lines (seed, design, replication
// count) and 17-significant-digit values so numbers round-trip exactly.
// Table format mirrors the usual comparison-table layout: design columns,
// then one column per estimator.
void write_report(const RiskReport& report, const std::string& path,
                  ReportFormat format);
void write_report(const SweepReport& report, const std::string& path,
                  ReportFormat format);
void write_report(const EprReport& report, const std::string& path,
                  ReportFormat format);

std::string format_report(const RiskReport& report, ReportFormat format);
std::string format_report(const SweepReport& report, ReportFormat format);
std::string format_report(const EprReport& report, ReportFormat format);

// Reads back a risk-report CSV body written by write_report (round-trip
// checks and downstream tooling).
RiskReport read_risk_report_csv(const std::string& path);

// Vector loader for custom mu / diagonal Q: accepts a single-column or
// single-row numeric CSV.
Vector read_vector_csv(const std::string& path, char delimiter = ',');

void write_matrix_csv(const std::string& path, const Matrix& values,
                      const std::vector<std::string>& col_labels = {},
                      int precision = 17);

}  // namespace hdmean::io

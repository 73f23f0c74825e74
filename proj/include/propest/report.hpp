#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace propest {

struct ReportRow {
  std::string label;

  // First-order theory.
  std::optional<double> bias;
  std::optional<double> mse;
  std::optional<double> pre;
  std::optional<double> reference_pre;  // published value, table1 only
  std::optional<bool> within_tolerance;
  std::optional<double> q1_star;
  std::optional<double> q2_star;
  std::optional<bool> beats_usual;
  std::optional<bool> beats_regression;

  // Monte Carlo.
  std::optional<double> emp_mean;
  std::optional<double> emp_bias;
  std::optional<double> emp_mse;
  std::optional<double> emp_mse_se;
  std::optional<double> emp_pre;

  // Exact enumeration.
  std::optional<double> exact_mean;
  std::optional<double> exact_bias;
  std::optional<double> exact_mse;
  std::optional<double> relative_gap;  // |theory - exact| / exact

  std::string note;
};

struct Report {
  std::string title;
  std::vector<std::string> header_lines;  // key: value pairs printed above the table
  std::vector<ReportRow> rows;
};

enum class ReportFormat { markdown, csv };

/// Only columns that are set on at least one row are emitted.
/// PRE columns use three decimals; other numbers use 8 significant digits.
void render_markdown(std::ostream& out, const Report& report);
void render_csv(std::ostream& out, const Report& report);
void render(std::ostream& out, const Report& report, ReportFormat format);

}  // namespace propest

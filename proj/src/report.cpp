#include "propest/report.hpp"

#include <algorithm>
#include <functional>
#include <ostream>

#include <fmt/format.h>

namespace propest {

namespace {

enum class Style { general, percent, flag, text };

struct Column {
  const char* name;
  Style style;
  std::function<std::optional<std::string>(const ReportRow&, Style)> cell;
};

std::string format_number(double v, Style style) {
  if (style == Style::percent) return fmt::format("{:.3f}", v);
  return fmt::format("{:.8g}", v);
}

template <typename T>
auto field(std::optional<T> ReportRow::*member) {
  return [member](const ReportRow& row, Style style) -> std::optional<std::string> {
    const auto& v = row.*member;
    if (!v) return std::nullopt;
    if constexpr (std::is_same_v<T, bool>)
      return std::string(*v ? "yes" : "no");
    else
      return format_number(*v, style);
  };
}

const std::vector<Column>& columns() {
  static const std::vector<Column> kColumns = {
      {"estimator", Style::text, [](const ReportRow& r, Style) { return std::optional(r.label); }},
      {"bias", Style::general, field(&ReportRow::bias)},
      {"mse", Style::general, field(&ReportRow::mse)},
      {"pre", Style::percent, field(&ReportRow::pre)},
      {"published_pre", Style::percent, field(&ReportRow::reference_pre)},
      {"within_1pct", Style::flag, field(&ReportRow::within_tolerance)},
      {"q1_star", Style::general, field(&ReportRow::q1_star)},
      {"q2_star", Style::general, field(&ReportRow::q2_star)},
      {"beats_usual", Style::flag, field(&ReportRow::beats_usual)},
      {"beats_regression", Style::flag, field(&ReportRow::beats_regression)},
      {"emp_mean", Style::general, field(&ReportRow::emp_mean)},
      {"emp_bias", Style::general, field(&ReportRow::emp_bias)},
      {"emp_mse", Style::general, field(&ReportRow::emp_mse)},
      {"emp_mse_se", Style::general, field(&ReportRow::emp_mse_se)},
      {"emp_pre", Style::percent, field(&ReportRow::emp_pre)},
      {"exact_mean", Style::general, field(&ReportRow::exact_mean)},
      {"exact_bias", Style::general, field(&ReportRow::exact_bias)},
      {"exact_mse", Style::general, field(&ReportRow::exact_mse)},
      {"relative_gap", Style::general, field(&ReportRow::relative_gap)},
      {"note", Style::text,
       [](const ReportRow& r, Style) {
         return r.note.empty() ? std::nullopt : std::optional(r.note);
       }},
  };
  return kColumns;
}

using Grid = std::vector<std::vector<std::string>>;

// Header row first; missing cells become `missing`.
Grid layout(const Report& report, const std::string& missing) {
  std::vector<const Column*> active;
  for (const auto& col : columns()) {
    const bool used = std::any_of(report.rows.begin(), report.rows.end(),
                                  [&](const ReportRow& r) { return col.cell(r, col.style).has_value(); });
    if (used) active.push_back(&col);
  }
  Grid grid;
  grid.emplace_back();
  for (const auto* col : active) grid.back().emplace_back(col->name);
  for (const auto& row : report.rows) {
    grid.emplace_back();
    for (const auto* col : active) grid.back().push_back(col->cell(row, col->style).value_or(missing));
  }
  return grid;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void render_markdown(std::ostream& out, const Report& report) {
  if (!report.title.empty()) out << "## " << report.title << "\n\n";
  for (const auto& line : report.header_lines) out << "- " << line << "\n";
  if (!report.header_lines.empty()) out << "\n";

  const Grid grid = layout(report, "-");
  if (grid.front().empty()) return;
  std::vector<std::size_t> width(grid.front().size(), 3);
  for (const auto& row : grid)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  auto emit = [&](const std::vector<std::string>& row) {
    out << "|";
    for (std::size_t c = 0; c < row.size(); ++c)
      out << " " << (c == 0 ? fmt::format("{:<{}}", row[c], width[c]) : fmt::format("{:>{}}", row[c], width[c]))
          << " |";
    out << "\n";
  };
  emit(grid.front());
  out << "|";
  for (std::size_t c = 0; c < width.size(); ++c)
    out << (c == 0 ? ":" : "-") << std::string(width[c], '-') << (c == 0 ? "-" : ":") << "|";
  out << "\n";
  for (std::size_t r = 1; r < grid.size(); ++r) emit(grid[r]);
}

void render_csv(std::ostream& out, const Report& report) {
  for (const auto& row : layout(report, "")) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_escape(row[c]);
    out << "\n";
  }
}

void render(std::ostream& out, const Report& report, ReportFormat format) {
  if (format == ReportFormat::csv)
    render_csv(out, report);
  else
    render_markdown(out, report);
}

}  // namespace propest

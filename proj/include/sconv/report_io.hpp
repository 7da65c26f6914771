#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sconv/serialize.hpp"
#include "sconv/testing.hpp"

namespace sconv {

// %.12g, with inf/-inf/nan spelled out.
std::string format_number(double x);
std::string format_optional(const std::optional<double>& x);

// RFC-4180 table with LF line endings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_string() const;
  // Throws std::runtime_error when the file cannot be written.
  void write(const std::string& path) const;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text);
double parse_number(const std::string& cell);

struct ConvergenceRow {
  std::string n;  // block size, or "fit" for the footer
  double a_or_r = 0.0;
  std::optional<double> alpha_err;
  std::optional<double> beta_err;
  std::optional<double> success;
  double log_success_over_n = 0.0;  // fitted success rate in the footer
  double predicted_phi = 0.0;
  double predicted_H = 0.0;
  double log_beta_over_n = 0.0;  // fitted beta rate in the footer
  std::string provenance;

  bool operator==(const ConvergenceRow&) const = default;
};

extern const std::vector<std::string> kConvergenceColumns;

// Per-n rows followed by a footer row; empty when per_n is empty.
std::vector<ConvergenceRow> convergence_rows(const ExponentReport& report);
std::string convergence_table_csv(const ExponentReport& report);
void emit_convergence_table(const ExponentReport& report, const std::string& path);
std::vector<ConvergenceRow> parse_convergence_table(const std::string& text);

// Rows as they appear after a trip through the 12-digit text format.
ConvergenceRow rounded(const ConvergenceRow& row);

Json report_to_json(const ExponentReport& report);

}  // namespace sconv

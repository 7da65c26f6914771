#include "sconv/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "sconv/errors.hpp"

namespace sconv {

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_number(cell);
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return parse_number(format_number(x));
}

std::optional<double> round12(const std::optional<double>& x) {
  if (!x) return x;
  return round12(*x);
}

}  // namespace

const std::vector<std::string> kConvergenceColumns = {
    "n", "a_or_r", "alpha_err", "beta_err", "success", "log_success_over_n",
    "predicted_phi", "predicted_H", "log_beta_over_n", "provenance"};

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

double parse_number(const std::string& cell) {
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + cell + "'");
  }
  if (used != cell.size()) throw ValidationError("not a number: '" + cell + "'");
  return v;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("CSV row width differs from header");
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote(cells[i]);
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << to_string();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cell));
      cell.clear();
      out.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV cell");
  if (any) {
    row.push_back(std::move(cell));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ConvergenceRow> convergence_rows(const ExponentReport& report) {
  std::vector<ConvergenceRow> out;
  if (report.per_n.empty()) return out;
  for (const ErrorPair& e : report.per_n) {
    const double scale = std::pow(static_cast<double>(e.n), report.scaling_exponent);
    ConvergenceRow r;
    r.n = std::to_string(e.n);
    r.a_or_r = report.parameter;
    r.alpha_err = e.alpha_err;
    r.beta_err = e.beta_err;
    r.success = e.success;
    r.log_success_over_n = e.log_success / scale;
    r.predicted_phi = report.predicted_phi;
    r.predicted_H = report.predicted_H;
    r.log_beta_over_n = e.log_beta / scale;
    r.provenance = report.provenance;
    out.push_back(r);
  }
  ConvergenceRow fit;
  fit.n = "fit";
  fit.a_or_r = report.parameter;
  fit.log_success_over_n = report.success_fit.rate;
  fit.predicted_phi = report.predicted_phi;
  fit.predicted_H = report.predicted_H;
  fit.log_beta_over_n = report.beta_fit.rate;
  fit.provenance = report.provenance + "; rates: least squares over the last half of n";
  out.push_back(fit);
  return out;
}

std::string convergence_table_csv(const ExponentReport& report) {
  CsvTable t;
  t.header = kConvergenceColumns;
  for (const ConvergenceRow& r : convergence_rows(report)) {
    t.add_row({r.n, format_number(r.a_or_r), format_optional(r.alpha_err), format_optional(r.beta_err),
               format_optional(r.success), format_number(r.log_success_over_n), format_number(r.predicted_phi),
               format_number(r.predicted_H), format_number(r.log_beta_over_n), r.provenance});
  }
  return t.to_string();
}

void emit_convergence_table(const ExponentReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << convergence_table_csv(report);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::vector<ConvergenceRow> parse_convergence_table(const std::string& text) {
  const auto cells = parse_csv(text);
  if (cells.empty() || cells.front() != kConvergenceColumns) {
    throw ValidationError("convergence table header does not match", "header");
  }
  std::vector<ConvergenceRow> out;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.size() != kConvergenceColumns.size()) {
      throw ValidationError("row " + std::to_string(i) + " has the wrong width", "row");
    }
    ConvergenceRow r;
    r.n = c[0];
    r.a_or_r = parse_number(c[1]);
    r.alpha_err = parse_optional(c[2]);
    r.beta_err = parse_optional(c[3]);
    r.success = parse_optional(c[4]);
    r.log_success_over_n = parse_number(c[5]);
    r.predicted_phi = parse_number(c[6]);
    r.predicted_H = parse_number(c[7]);
    r.log_beta_over_n = parse_number(c[8]);
    r.provenance = c[9];
    out.push_back(r);
  }
  return out;
}

ConvergenceRow rounded(const ConvergenceRow& row) {
  ConvergenceRow r = row;
  r.a_or_r = round12(r.a_or_r);
  r.alpha_err = round12(r.alpha_err);
  r.beta_err = round12(r.beta_err);
  r.success = round12(r.success);
  r.log_success_over_n = round12(r.log_success_over_n);
  r.predicted_phi = round12(r.predicted_phi);
  r.predicted_H = round12(r.predicted_H);
  r.log_beta_over_n = round12(r.log_beta_over_n);
  return r;
}

Json report_to_json(const ExponentReport& report) {
  const auto num = [](double x) -> Json {
    if (std::isfinite(x)) return x;
    return format_number(x);
  };
  Json j;
  j["family"] = report.family;
  j["scaling_exponent"] = report.scaling_exponent;
  j[report.parameter_name] = num(report.parameter);
  j["a_used"] = num(report.a_used);
  j["mode"] = to_string(report.mode);
  j["route"] = report.route;
  j["predicted_phi"] = num(report.predicted_phi);
  j["predicted_H"] = num(report.predicted_H);
  if (report.regime) j["regime"] = to_string(*report.regime);
  j["test_scale_exponent"] = num(report.test_scale_exponent);
  j["provenance"] = report.provenance;
  const auto fit = [&](const RateFitSummary& f) {
    return Json{{"rate", num(f.rate)},
                {"intercept", num(f.intercept)},
                {"r_squared", num(f.r_squared)},
                {"residual", num(f.residual)},
                {"asymptotic", f.asymptotic}};
  };
  j["success_fit"] = fit(report.success_fit);
  j["beta_fit"] = fit(report.beta_fit);
  Json checks = Json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  return j;
}

}  // namespace sconv

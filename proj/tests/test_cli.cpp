#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sconv/errors.hpp"
#include "sconv/report_io.hpp"
#include "sconv/scenario.hpp"
#include "sconv/testing.hpp"

using namespace sconv;

namespace {

ExponentReport five_point_report() {
  ExponentReport r;
  r.family = "iid";
  r.parameter = 0.4;
  r.a_used = 0.4;
  r.predicted_phi = 0.13;
  r.predicted_H = 0.53;
  r.provenance = "phi: test, with \"quotes\", commas";
  for (int n = 1; n <= 5; ++n) {
    ErrorPair e;
    e.n = 10 * n;
    e.a = 0.4;
    e.success = std::exp(-0.13 * e.n);
    e.alpha_err = 1.0 - e.success;
    e.beta_err = std::exp(-0.53 * e.n);
    e.log_success = std::log(e.success);
    e.log_beta = std::log(e.beta_err);
    r.per_n.push_back(e);
  }
  r.success_fit.rate = -0.13;
  r.beta_fit.rate = -0.53;
  return r;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sconv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string validation_field(const std::string& text) {
  try {
    parse_scenario(Json::parse(text));
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<no error>";
}

const char* kBinaryFamily = R"("family": {"kind": "iid", "payload": {
    "rho": {"dim": 2, "re": [0.5, 0, 0, 0.5]},
    "sigma": {"dim": 2, "re": [0.25, 0, 0, 0.75]}}})";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_optional(std::nullopt) == "");
  CHECK(std::isinf(parse_number("-inf")));
  CHECK(parse_number("0.25") == 0.25);
}

TEST_CASE("CSV quoting round trip") {
  CsvTable t;
  t.header = {"a", "b"};
  t.add_row({"plain", "with, comma"});
  t.add_row({"say \"hi\"", "two\nlines"});
  const std::string text = t.to_string();
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == t.header);
  CHECK(rows[1] == t.rows[0]);
  CHECK(rows[2] == t.rows[1]);
  CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("convergence tables") {
  const ExponentReport empty;
  const std::string header_only = convergence_table_csv(empty);
  CHECK(header_only ==
        "n,a_or_r,alpha_err,beta_err,success,log_success_over_n,predicted_phi,predicted_H,log_beta_over_n,provenance\n");

  const ExponentReport r = five_point_report();
  const std::string text = convergence_table_csv(r);
  const auto cells = parse_csv(text);
  CHECK(cells.size() == 7);
  CHECK(cells.back()[0] == "fit");
  // Emitting twice is byte-identical.
  CHECK(convergence_table_csv(r) == text);

  const std::vector<ConvergenceRow> rows = convergence_rows(r);
  const std::vector<ConvergenceRow> back = parse_convergence_table(text);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i] == rounded(rows[i]));
  CHECK(rows[2].log_success_over_n == doctest::Approx(-0.13));
  CHECK(rows.back().log_beta_over_n == -0.53);

  const auto dir = scratch_dir("table");
  emit_convergence_table(r, (dir / "t.csv").string());
  CHECK(slurp(dir / "t.csv") == text);
}

TEST_CASE("report JSON") {
  const Json j = report_to_json(five_point_report());
  CHECK(j.at("success_fit").at("rate").get<double>() == -0.13);
  CHECK(j.at("predicted_phi").get<double>() == 0.13);
}

TEST_CASE("scenario validation names the offending field") {
  CHECK(validation_field(R"({"task": "dance"})") == "task");
  CHECK(validation_field(R"({"params": {}})") == "task");
  CHECK(validation_field(R"({"task": "renyi", "params": {"alphas": [2]}})") == "family");
  CHECK(validation_field(std::string(R"({"task": "sc-report", )") + kBinaryFamily +
                         R"(, "params": {"r_grid": [0.4]}})") == "params.n_list");
  CHECK(validation_field(std::string(R"({"task": "np-sweep", )") + kBinaryFamily +
                         R"(, "params": {"n_list": [4, 2]}})") == "params.n_list");
  CHECK(validation_field(std::string(R"({"task": "np-sweep", )") + kBinaryFamily +
                         R"(, "params": {"n_list": [2, 4], "mode": "exact"}})") == "params.mode");
  CHECK(validation_field(R"({"task": "ldp", "params": {"x_grid": [0.7], "n_list": [1, 2]}})") == "params.n_list");
  CHECK(validation_field(R"({"task": "hoeffding", "params": {"r_grid": [1], "rate": {"name": "cubic"}}})") ==
        "params.rate.name");
  CHECK(validation_field(R"({"task": "renyi", "family": {"kind": "iid", "payload": {
      "rho": {"dim": 2, "re": [0.5, 0.1, 0, 0.5]}, "sigma": {"dim": 2, "re": [0.5, 0, 0, 0.5]}}},
      "params": {"alphas": [2]}})")
            .rfind("family.payload", 0) == 0);
}

TEST_CASE("malformed JSON reports the byte offset") {
  const auto dir = scratch_dir("malformed");
  std::ofstream(dir / "bad.json") << "{\"task\": \"renyi\", ";
  try {
    load_scenario((dir / "bad.json").string());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field().rfind("<byte ", 0) == 0);
  }
  CHECK_THROWS_AS(load_scenario((dir / "missing.json").string()), ValidationError);
}

TEST_CASE("hoeffding scenario output") {
  const Scenario s = parse_scenario(
      Json::parse(R"({"task": "hoeffding", "params": {"r_grid": [0, 3], "rate": {"name": "quadratic", "scale": 1}}})"));
  RunOptions opts;
  const auto dir = scratch_dir("hoeffding");
  opts.out_dir = dir.string();
  const RunResult r = run_scenario(s, opts);
  CHECK(r.exit_code == kExitOk);
  const auto rows = parse_csv(slurp(dir / "hoeffding.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1][2] == "zero");
  CHECK(parse_number(rows[2][1]) == doctest::Approx(1.0));
  CHECK(rows[2][2] == "interior");
  CHECK(parse_number(rows[2][3]) == doctest::Approx(2.0));
  CHECK(std::filesystem::exists(dir / "hoeffding.json"));
}

TEST_CASE("sc-report scenario matches the direct computation") {
  const Scenario s = parse_scenario(Json::parse(std::string(R"({"task": "sc-report", )") + kBinaryFamily +
                                                R"(, "params": {"r_grid": [0.4], "n_list": [256, 512, 1024, 2048]}})"));
  RunOptions opts;
  const auto dir = scratch_dir("sc");
  opts.out_dir = dir.string();
  const RunResult r = run_scenario(s, opts);
  CHECK(r.exit_code == kExitOk);

  const FamilyRate fr = family_rate(*s.family, RenyiVariant::sandwiched);
  SweepOptions so;
  so.rate = fr.rate;
  so.rate_provenance = fr.provenance;
  const ExponentReport direct = sc_report(*s.family, 0.4, {256, 512, 1024, 2048}, SweepMode::np, so);
  CHECK(slurp(dir / "sc-report.csv") == convergence_table_csv(direct));
}

TEST_CASE("ldp and family scenarios") {
  const auto dir = scratch_dir("ldp");
  RunOptions opts;
  opts.out_dir = dir.string();
  const Scenario l = parse_scenario(Json::parse(
      R"({"task": "ldp", "params": {"source": {"kind": "binomial", "p": 0.5}, "x_grid": [0.7],
          "n_list": [512, 1024, 2048, 4096], "window": [0.7, 1.0], "t_range": [-5, 5]}})"));
  const RunResult lr = run_scenario(l, opts);
  CHECK(lr.exit_code == kExitOk);
  CHECK(parse_csv(slurp(dir / "ldp.csv")).size() == 5);
  CHECK(lr.summary.at("chernoff_dominates").get<bool>());

  const Scenario f = parse_scenario(Json::parse(std::string(R"({"task": "family", )") + kBinaryFamily +
                                                R"(, "params": {"alphas": [1.5, 2], "n_list": [1, 2, 3]}})"));
  const RunResult fr = run_scenario(f, opts);
  CHECK(fr.exit_code == kExitOk);
  const auto rows = parse_csv(slurp(dir / "family.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(parse_number(rows[6][4]) == doctest::Approx(parse_number(rows[6][5])).epsilon(1e-12));
}

TEST_CASE("error JSON") {
  const Json e = error_json("bad", "params.n_list");
  CHECK(e.at("error") == "bad");
  CHECK(e.at("field") == "params.n_list");
}

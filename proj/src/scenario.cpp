#include "sconv/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "sconv/errors.hpp"
#include "sconv/hoeffding.hpp"
#include "sconv/invariants.hpp"
#include "sconv/ldp.hpp"
#include "sconv/report_io.hpp"
#include "sconv/testing.hpp"

namespace sconv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> grid(const Json& params, const std::string& key, bool required = true) {
  if (!params.contains(key)) {
    if (required) throw ValidationError("missing grid '" + key + "'", "params." + key);
    return {};
  }
  std::vector<double> g = json_numbers(params, key, "params");
  if (g.empty()) throw ValidationError("grid must be nonempty", "params." + key);
  return g;
}

std::vector<int> n_list(const Json& params) {
  const std::vector<double> raw = grid(params, "n_list");
  std::vector<int> out;
  for (double x : raw) {
    if (x != std::floor(x) || x < 1 || x > 1e7) throw ValidationError("block sizes must be positive integers", "params.n_list");
    if (!out.empty() && static_cast<int>(x) <= out.back()) {
      throw ValidationError("n_list must be strictly increasing", "params.n_list");
    }
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::string text(const Json& params, const std::string& key, const std::string& fallback) {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_string()) throw ValidationError("'" + key + "' must be a string", "params." + key);
  return params.at(key).get<std::string>();
}

std::pair<double, double> interval(const Json& params, const std::string& key, std::pair<double, double> fallback) {
  if (!params.contains(key)) return fallback;
  const auto v = json_numbers(params, key, "params");
  if (v.size() != 2 || !(v[0] < v[1])) throw ValidationError("'" + key + "' must be [lo, hi] with lo < hi", "params." + key);
  return {v[0], v[1]};
}

std::vector<RenyiVariant> variants(const Json& params) {
  if (!params.contains("variants")) return {RenyiVariant::plain, RenyiVariant::sandwiched};
  const Json& arr = params.at("variants");
  if (!arr.is_array() || arr.empty()) throw ValidationError("variants must be a nonempty array", "params.variants");
  std::vector<RenyiVariant> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) throw ValidationError("variant must be a string", "params.variants[" + std::to_string(i) + "]");
    try {
      out.push_back(parse_variant(arr[i].get<std::string>()));
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), "params.variants[" + std::to_string(i) + "]");
    }
  }
  return out;
}

SweepMode mode_of(const Json& params) {
  try {
    return parse_mode(text(params, "mode", "np"));
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), "params.mode");
  }
}

const StateFamilySpec& need_family(const Scenario& s) {
  if (!s.family) throw ValidationError("task '" + s.task + "' needs a family", "family");
  return *s.family;
}

// Rate for the hoeffding task: explicit samples, a named closed form, or the family's.
FamilyRate hoeffding_rate(const Scenario& s) {
  if (!s.params.contains("rate")) {
    return family_rate(need_family(s), RenyiVariant::sandwiched);
  }
  const Json& r = s.params.at("rate");
  if (!r.is_object()) throw ValidationError("rate must be an object", "params.rate");
  if (r.contains("alphas") || r.contains("psis")) {
    const auto alphas = json_numbers(r, "alphas", "params.rate");
    const auto psis = json_numbers(r, "psis", "params.rate");
    if (alphas.empty() || alphas.size() != psis.size()) {
      throw ValidationError("alphas and psis must be nonempty and of equal length", "params.rate");
    }
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      if (!(alphas[i] > 1.0) || (i > 0 && alphas[i] <= alphas[i - 1])) {
        throw ValidationError("alphas must be increasing and > 1", "params.rate.alphas");
      }
    }
    return {ConvexRate::from_samples(alphas, psis), "hoeffding: piecewise-linear rate through supplied samples"};
  }
  const Json& name_j = json_member(r, "name", "params.rate");
  if (!name_j.is_string()) throw ValidationError("rate name must be a string", "params.rate.name");
  const std::string name = name_j.get<std::string>();
  if (name == "quadratic") {
    const double c = json_number(r, "scale", "params.rate");
    if (!(c > 0.0)) throw ValidationError("scale must be positive", "params.rate.scale");
    return {ConvexRate::analytic([c](double t) { return c * (t - 1.0) * (t - 1.0); }, 0.0, std::nullopt, "quadratic"),
            "hoeffding: closed form c (t-1)^2"};
  }
  if (name == "linear") {
    const double a = json_number(r, "slope", "params.rate");
    return {ConvexRate::analytic([a](double t) { return a * (t - 1.0); }, a, a, "linear"),
            "hoeffding: closed form a (t-1)"};
  }
  throw ValidationError("unknown rate '" + name + "'", "params.rate.name");
}

WeightedSampleSequence ldp_sequence(const Scenario& s, std::size_t dim_cap) {
  const Json source = s.params.contains("source") ? s.params.at("source") : Json{{"kind", "binomial"}, {"p", 0.5}};
  if (!source.is_object()) throw ValidationError("source must be an object", "params.source");
  const Json& kind_j = json_member(source, "kind", "params.source");
  if (!kind_j.is_string()) throw ValidationError("source kind must be a string", "params.source.kind");
  const std::string kind = kind_j.get<std::string>();
  if (kind == "binomial") {
    const double p = json_number(source, "p", "params.source");
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("p must lie in (0,1)", "params.source.p");
    return binomial_mean_sequence(p);
  }
  if (kind == "pinched-llr") {
    const StateFamilySpec spec = need_family(s);
    const std::string under = text(source, "measure", "alternative");
    if (under != "alternative" && under != "null") {
      throw ValidationError("measure must be 'alternative' or 'null'", "params.source.measure");
    }
    return llr_sequence([spec, dim_cap](int n) { return family_classical(spec, n, true, dim_cap); },
                        under == "null" ? LlrMeasure::null_state : LlrMeasure::alternative, "pinched llr");
  }
  throw ValidationError("unknown source kind '" + kind + "'", "params.source.kind");
}

void validate_params(const Scenario& s) {
  const Json& p = s.params;
  if (s.task == "renyi") {
    need_family(s);
    grid(p, "alphas");
    variants(p);
    if (p.contains("n") && json_int(p, "n", "params") < 1) throw ValidationError("n must be positive", "params.n");
  } else if (s.task == "hoeffding") {
    grid(p, "r_grid");
    if (p.contains("rate")) {
      hoeffding_rate(s);
    } else {
      need_family(s);
    }
  } else if (s.task == "np-sweep") {
    need_family(s);
    grid(p, "a_grid", false);
    n_list(p);
    mode_of(p);
  } else if (s.task == "sc-report") {
    need_family(s);
    grid(p, "r_grid");
    n_list(p);
    mode_of(p);
  } else if (s.task == "ldp") {
    grid(p, "x_grid");
    const auto ns = n_list(p);
    if (ns.size() < 3) throw ValidationError("ldp needs at least three block sizes", "params.n_list");
    interval(p, "t_range", {-10.0, 10.0});
  } else if (s.task == "family") {
    need_family(s);
    grid(p, "alphas");
    n_list(p);
    parse_variant(text(p, "variant", "sandwiched"));
  }
}

std::string write_text(const RunOptions& opts, const std::string& name, const std::string& body,
                       std::vector<std::string>& files) {
  std::filesystem::create_directories(opts.out_dir);
  const std::string path = (std::filesystem::path(opts.out_dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
  files.push_back(path);
  return path;
}

Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

RunResult run_renyi(const Scenario& s, const RunOptions& opts) {
  const StateFamilySpec& spec = need_family(s);
  const int n = s.params.contains("n") ? json_int(s.params, "n", "params") : 1;
  const RenyiEvaluator ev(family_states(spec, n, opts.dim_cap));
  CsvTable t;
  t.header = {"alpha", "variant", "q", "psi", "divergence", "derivative"};
  for (double a : grid(s.params, "alphas")) {
    for (RenyiVariant v : variants(s.params)) {
      const RenyiValue val = ev.value(a, v);
      const double d = val.divergence.infinite ? std::numeric_limits<double>::infinity() : val.divergence.value;
      double deriv = kNaN;
      if (std::isfinite(val.psi)) deriv = ev.psi_derivative(a, v);
      t.add_row({format_number(a), to_string(v), format_number(val.q), format_number(val.psi), format_number(d),
                 format_number(deriv)});
    }
  }
  RunResult out;
  write_text(opts, "renyi.csv", t.to_string(), out.files);
  out.summary = {{"task", "renyi"}, {"rows", t.rows.size()}, {"n", n}};
  return out;
}

RunResult run_hoeffding(const Scenario& s, const RunOptions& opts) {
  const FamilyRate fr = hoeffding_rate(s);
  CsvTable t;
  t.header = {"r", "value", "regime", "a_r", "attaining_t"};
  Json rows = Json::array();
  for (double r : grid(s.params, "r_grid")) {
    const HoeffdingResult h = hoeffding_anti(fr.rate, r);
    t.add_row({format_number(r), format_number(h.value), to_string(h.regime), format_optional(h.a_r),
               format_optional(h.attaining_t)});
  }
  RunResult out;
  write_text(opts, "hoeffding.csv", t.to_string(), out.files);
  const ConvexityReport c = fr.rate.check();
  out.summary = {{"task", "hoeffding"},
                 {"rows", t.rows.size()},
                 {"rate_provenance", fr.provenance},
                 {"a_min", num(fr.rate.right_derivative_at_1())},
                 {"a_max", fr.rate.slope_at_infinity() ? num(*fr.rate.slope_at_infinity()) : Json("inf")},
                 {"convexity_ok", c.ok}};
  if (!c.ok) out.exit_code = kExitInvariant;
  return out;
}

RunResult run_reports(const Scenario& s, const RunOptions& opts) {
  const StateFamilySpec& spec = need_family(s);
  const bool sweep = s.task == "np-sweep";
  const FamilyRate fr = family_rate(spec, RenyiVariant::sandwiched);
  SweepOptions so;
  so.dim_cap = opts.dim_cap;
  so.threads = opts.threads;
  so.rate = fr.rate;
  so.rate_provenance = fr.provenance;
  std::vector<double> params = grid(s.params, sweep ? "a_grid" : "r_grid", !sweep);
  if (params.empty()) params = default_a_grid(fr.rate);
  const std::vector<int> ns = n_list(s.params);
  const SweepMode mode = mode_of(s.params);

  std::string csv;
  Json reports = Json::array();
  bool ok = true;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ExponentReport rep =
        sweep ? exponent_sweep(spec, params[i], ns, mode, so) : sc_report(spec, params[i], ns, mode, so);
    std::string part = convergence_table_csv(rep);
    if (i > 0) part = part.substr(part.find('\n') + 1);  // one header for the whole file
    csv += part;
    reports.push_back(report_to_json(rep));
    ok = ok && rep.all_checks_passed();
  }
  RunResult out;
  write_text(opts, s.task + ".csv", csv, out.files);
  out.summary = {{"task", s.task}, {"reports", reports}, {"all_checks_passed", ok}};
  if (!ok) out.exit_code = kExitInvariant;
  return out;
}

RunResult run_ldp(const Scenario& s, const RunOptions& opts) {
  const WeightedSampleSequence seq = ldp_sequence(s, opts.dim_cap);
  const std::vector<int> ns = n_list(s.params);
  const auto t_range = interval(s.params, "t_range", {-10.0, 10.0});
  const double t_max = std::max(std::abs(t_range.first), std::abs(t_range.second));
  const RateCurve limit = RateCurve::from_sequence(seq, ns);
  CsvTable t;
  t.header = {"n", "x", "exact_tail_rate", "chernoff_bound", "ge_lower", "margin"};
  Json verdicts = Json::array();
  bool dominated = true;
  for (double x : grid(s.params, "x_grid")) {
    const double bound = chernoff_upper(limit, x, t_max);
    const auto window = interval(s.params, "window", {x, 1.0});
    double ge = kNaN;
    std::vector<double> margins(ns.size(), kNaN);
    Json verdict = {{"x", num(x)}};
    try {
      const LowerBoundVerdict v = gartner_ellis_lower_check(seq, x, {x, window.second}, t_range, ns);
      ge = -v.legendre_x;
      for (std::size_t k = 0; k < ns.size(); ++k) margins[k] = v.rows[k].margin;
      verdict["t_x"] = num(v.t_x);
      verdict["legendre"] = num(v.legendre_x);
      verdict["cauchy_gap"] = num(v.cauchy_gap);
      verdict["duality_residual"] = num(v.duality_residual);
      verdict["tilted_mass"] = num(v.tilted_mass);
      verdict["delta"] = num(v.delta);
      verdict["margins_shrinking"] = v.margins_shrinking;
    } catch (const DomainError& e) {
      verdict["lower_bound_skipped"] = e.what();
    } catch (const DataError& e) {
      verdict["lower_bound_skipped"] = e.what();
    }
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const WeightedSample sample = seq.sample(ns[k]);
      const double c = seq.scale(ns[k]);
      const double exact = exact_tail_rate(sample, c, x);
      // The finite-n Chernoff bound uses Lambda_n itself.
      const RateCurve finite =
          RateCurve::closed_form([&sample, c](double u) { return log_mgf(sample, c * u) / c; });
      if (exact > chernoff_upper(finite, x, t_max) + 1e-12) dominated = false;
      t.add_row({std::to_string(ns[k]), format_number(x), format_number(exact), format_number(bound),
                 format_number(ge), format_number(margins[k])});
    }
    verdicts.push_back(verdict);
  }
  RunResult out;
  write_text(opts, "ldp.csv", t.to_string(), out.files);
  out.summary = {{"task", "ldp"}, {"sequence", seq.name()}, {"verdicts", verdicts}, {"chernoff_dominates", dominated}};
  if (!dominated) out.exit_code = kExitInvariant;
  return out;
}

RunResult run_family(const Scenario& s, const RunOptions& opts) {
  const StateFamilySpec& spec = need_family(s);
  const RenyiVariant v = parse_variant(text(s.params, "variant", "sandwiched"));
  const FamilyRate fr = family_rate(spec, v);
  CsvTable t;
  t.header = {"n", "alpha", "variant", "psi_n", "psi_n_normalized", "limit", "provenance"};
  for (int n : n_list(s.params)) {
    const double scale = std::pow(static_cast<double>(n), spec.scaling_exponent);
    for (double a : grid(s.params, "alphas")) {
      const ExtendedReal psi = family_psi_n(spec, a, n, v, opts.dim_cap);
      const double value = psi.infinite ? std::numeric_limits<double>::infinity() : psi.value;
      const double lim = a >= 1.0 ? fr.rate(a) : kNaN;
      t.add_row({std::to_string(n), format_number(a), to_string(v), format_number(value),
                 format_number(value / scale), format_number(lim), fr.provenance});
    }
  }
  RunResult out;
  write_text(opts, "family.csv", t.to_string(), out.files);
  const ConvexityReport c = fr.rate.check();
  out.summary = {{"task", "family"},
                 {"kind", to_string(spec.kind)},
                 {"rows", t.rows.size()},
                 {"rate_provenance", fr.provenance},
                 {"convexity_ok", c.ok}};
  if (!c.ok) out.exit_code = kExitInvariant;
  return out;
}

RunResult run_verify(const RunOptions& opts) {
  const std::vector<SuiteResult> suites = run_invariant_suite(opts.seed);
  CsvTable t;
  t.header = {"module", "check", "passed", "detail"};
  Json modules = Json::array();
  int passed = 0;
  int failed = 0;
  for (const SuiteResult& s : suites) {
    Json failures = Json::array();
    for (const InvariantCheck& c : s.checks) {
      t.add_row({s.module, c.name, c.passed ? "true" : "false", c.detail});
      if (!c.passed) failures.push_back({{"check", c.name}, {"detail", c.detail}});
    }
    passed += s.passed();
    failed += s.failed();
    modules.push_back({{"module", s.module}, {"passed", s.passed()}, {"failed", s.failed()}, {"failures", failures}});
  }
  RunResult out;
  write_text(opts, "verify.csv", t.to_string(), out.files);
  out.summary = {{"task", "verify"}, {"seed", opts.seed}, {"modules", modules}, {"passed", passed}, {"failed", failed}};
  if (failed > 0) out.exit_code = kExitInvariant;
  return out;
}

}  // namespace

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) throw ValidationError("scenario must be a JSON object", "");
  Scenario s;
  const Json& task = json_member(j, "task", "");
  if (!task.is_string()) throw ValidationError("task must be a string", "task");
  s.task = task.get<std::string>();
  if (std::find(kTasks.begin(), kTasks.end(), s.task) == kTasks.end()) {
    throw ValidationError("unknown task '" + s.task + "'", "task");
  }
  if (j.contains("family")) s.family = family_from_json(j.at("family"), "family");
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ValidationError("params must be an object", "params");
    s.params = j.at("params");
  }
  validate_params(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read scenario file '" + path + "'", "scenario");
  std::stringstream buf;
  buf << f.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "<byte " + std::to_string(e.byte) + ">");
  }
  return parse_scenario(j);
}

RunResult run_scenario(const Scenario& s, const RunOptions& opts) {
  RunResult out;
  if (s.task == "renyi") {
    out = run_renyi(s, opts);
  } else if (s.task == "hoeffding") {
    out = run_hoeffding(s, opts);
  } else if (s.task == "np-sweep" || s.task == "sc-report") {
    out = run_reports(s, opts);
  } else if (s.task == "ldp") {
    out = run_ldp(s, opts);
  } else if (s.task == "family") {
    out = run_family(s, opts);
  } else {
    out = run_verify(opts);
  }
  write_text(opts, s.task + ".json", out.summary.dump(2) + "\n", out.files);
  return out;
}

Json error_json(const std::string& message, const std::string& field) {
  return {{"error", message}, {"field", field}};
}

}  // namespace sconv

#include "sconv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "sconv/hoeffding.hpp"
#include "sconv/ldp.hpp"
#include "sconv/random.hpp"
#include "sconv/renyi.hpp"
#include "sconv/report_io.hpp"

namespace sconv {

namespace {

// Returns the worst observed error; passes when it is <= tol.
using Measure = std::function<double()>;

class Suite {
 public:
  explicit Suite(std::string module) { result_.module = std::move(module); }

  void check(const std::string& name, double tol, const Measure& measure) {
    InvariantCheck c;
    c.name = name;
    try {
      const double err = measure();
      c.passed = err <= tol;
      std::ostringstream s;
      s.precision(3);
      s << "worst " << err << " (tolerance " << tol << ")";
      c.detail = s.str();
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("threw: ") + e.what();
    }
    result_.checks.push_back(std::move(c));
  }

  SuiteResult done() { return std::move(result_); }

 private:
  SuiteResult result_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

HermitianOperator measured(const HermitianOperator& x, const HermitianOperator& proj) {
  const double p = (x.matrix() * proj.matrix()).trace().real();
  RealVector d(2);
  d << p, x.trace() - p;
  return HermitianOperator::diagonal(d);
}

SuiteResult operator_suite(Rng& rng) {
  Suite s("operator-core");
  s.check("spectral_reconstruction", 1e-12, [&] {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const HermitianOperator a = random_density(4, rng);
      const Matrix back = a.eigenvectors() * a.eigenvalues().cast<Complex>().asDiagonal() * a.eigenvectors().adjoint();
      worst = std::max(worst, (back - a.matrix()).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  s.check("pinching_commutes_and_preserves_trace", 1e-10, [&] {
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
      const HermitianOperator rho = random_density(3, rng);
      const HermitianOperator sigma = random_density(3, rng);
      const HermitianOperator p = pinch(rho, sigma);
      worst = std::max({worst, commutator_norm(p, sigma), std::abs(p.trace() - rho.trace())});
    }
    return worst;
  });
  s.check("tensor_power_distinct_eigenvalues", 0.0, [&] {
    const HermitianOperator sigma = random_density(2, rng);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto v = distinct_eigenvalue_count(tensor_power(sigma, n));
      worst = std::max(worst, std::abs(static_cast<double>(v) - static_cast<double>(n + 1)));
    }
    return worst;
  });
  s.check("positive_projection_is_idempotent", 1e-10, [&] {
    const HermitianOperator x = random_density(4, rng) - random_density(4, rng);
    const Matrix p = positive_projection(x).matrix();
    return (p * p - p).cwiseAbs().maxCoeff();
  });
  return s.done();
}

SuiteResult renyi_suite(Rng& rng) {
  Suite s("renyi");
  s.check("tensor_additivity", 1e-8, [&] {
    double worst = 0.0;
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    const RenyiEvaluator one(rho, sigma);
    const RenyiEvaluator two(tensor_power(rho, 2), tensor_power(sigma, 2));
    for (double a : {0.6, 1.5, 3.0})
      for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched})
        worst = std::max(worst, std::abs(two.psi(a, v) - 2.0 * one.psi(a, v)));
    return worst;
  });
  s.check("scaling_law", 1e-10, [&] {
    double worst = 0.0;
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched}) {
      const ScalingResidual r = scaling_check(rho, sigma, 2.5, 0.3, 1.7, v);
      worst = std::max({worst, r.psi, r.divergence});
    }
    return worst;
  });
  s.check("data_processing_two_outcome", 1e-9, [&] {
    double worst = -1.0;
    for (int i = 0; i < 20; ++i) {
      const HermitianOperator rho = random_density(3, rng);
      const HermitianOperator sigma = random_density(3, rng);
      const HermitianOperator proj = random_projector(3, rng);
      const RenyiEvaluator q(rho, sigma);
      const RenyiEvaluator c(measured(rho, proj), measured(sigma, proj));
      for (double a : {0.5, 1.5, 4.0}) {
        worst = std::max(worst, c.divergence(a, RenyiVariant::sandwiched).value -
                                    q.divergence(a, RenyiVariant::sandwiched).value);
      }
    }
    return worst;
  });
  s.check("sandwiched_below_plain", 1e-10, [&] {
    double worst = -1.0;
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    const RenyiEvaluator ev(rho, sigma);
    for (double a : {0.7, 1.5, 3.0}) {
      worst = std::max(worst, ev.divergence(a, RenyiVariant::sandwiched).value -
                                  ev.divergence(a, RenyiVariant::plain).value);
    }
    return worst;
  });
  s.check("derivative_matches_finite_difference", 1e-6, [&] {
    double worst = 0.0;
    const RenyiEvaluator ev(random_density(3, rng), random_density(3, rng));
    const double h = 1e-5;
    for (double t : {0.7, 1.0, 1.8, 4.0})
      for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched}) {
        const double fd = (ev.psi(t + h, v) - ev.psi(t - h, v)) / (2.0 * h);
        worst = std::max(worst, rel(ev.psi_derivative(t, v), fd));
      }
    return worst;
  });
  s.check("divergence_nondecreasing_in_alpha", 1e-10, [&] {
    const RenyiEvaluator ev(random_density(3, rng), random_density(3, rng));
    double worst = -1.0;
    double prev = ev.divergence(0.5, RenyiVariant::sandwiched).value;
    for (double a : {0.8, 1.0, 1.5, 2.0, 4.0, 16.0}) {
      const double cur = ev.divergence(a, RenyiVariant::sandwiched).value;
      worst = std::max(worst, prev - cur);
      prev = cur;
    }
    return worst;
  });
  return s.done();
}

SuiteResult hoeffding_suite(Rng& rng) {
  Suite s("hoeffding");
  const ConvexRate quad = ConvexRate::analytic([](double t) { return (t - 1.0) * (t - 1.0); }, 0.0, std::nullopt,
                                               "quadratic");
  s.check("quadratic_anti_divergence", 1e-10, [&] {
    const HoeffdingResult h = hoeffding_anti(quad, 3.0);
    return std::max(std::abs(h.value - 1.0), std::abs(h.a_r.value_or(0.0) - 2.0));
  });
  s.check("measured_curve_matches_anti_divergence", 1e-7, [&] {
    double worst = 0.0;
    for (double r : {0.5, 1.0, 3.0, 6.0}) worst = std::max(worst, std::abs(sc_lower_bound_curve(quad, r) -
                                                                          hoeffding_anti(quad, r).value));
    return worst;
  });
  s.check("zero_iff_below_right_derivative", 0.0, [&] {
    const HermitianOperator rho = random_density(2, rng);
    const HermitianOperator sigma = random_density(2, rng);
    const RenyiEvaluator ev(rho, sigma);
    const double d1 = ev.relative_entropy().value;
    const ConvexRate f = ConvexRate::analytic(
        [&](double t) { return ev.psi(t, RenyiVariant::sandwiched); }, d1,
        ev.max_relative_entropy().value);
    double bad = 0.0;
    for (double r : {0.5 * d1, 0.999 * d1, 1.01 * d1, 2.0 * d1}) {
      const bool zero = hoeffding_anti(f, r).value <= 1e-12;
      if (zero != (r <= d1)) bad += 1.0;
    }
    return bad;
  });
  s.check("sampled_rate_is_convex", 1e-8, [&] {
    const RenyiEvaluator ev(random_density(2, rng), random_density(2, rng));
    std::vector<double> alphas{1.25, 1.5, 2.0, 3.0, 4.0, 6.0};
    std::vector<double> values;
    for (double a : alphas) values.push_back(ev.psi(a, RenyiVariant::sandwiched));
    const ConvexityReport c = ConvexRate::from_samples(alphas, values).check();
    return std::max({std::abs(c.f_at_1), c.midpoint_violation, c.chord_violation});
  });
  return s.done();
}

SuiteResult families_suite(Rng& rng) {
  Suite s("state-families");
  s.check("iid_psi_matches_tensor_power", 1e-8, [&] {
    const HermitianOperator rho = random_density(2, rng);
    const HermitianOperator sigma = random_density(2, rng);
    const StateFamilySpec spec = StateFamilySpec::make_iid(rho, sigma);
    const RenyiEvaluator ev(tensor_power(rho, 3), tensor_power(sigma, 3));
    double worst = 0.0;
    for (double a : {1.5, 3.0})
      worst = std::max(worst, std::abs(family_psi_n(spec, a, 3, RenyiVariant::sandwiched).value -
                                       ev.psi(a, RenyiVariant::sandwiched)));
    return worst;
  });
  s.check("markov_transfer_matches_paths", 1e-12, [&] {
    MarkovPayload m;
    m.states = 2;
    m.pi0 = RealVector::Constant(2, 0.5);
    m.pi1 = RealVector::Constant(2, 0.5);
    m.P0.resize(2, 2);
    m.P1.resize(2, 2);
    m.P0 << 0.8, 0.2, 0.3, 0.7;
    m.P1 << 0.5, 0.5, 0.5, 0.5;
    double worst = 0.0;
    for (double a : {1.5, 2.0}) {
      const double transfer = markov_psi_n(m, a, 4).value;
      worst = std::max(worst, std::abs(transfer - markov_paths(m, 4).psi(a)));
    }
    return worst;
  });
  s.check("quasifree_single_particle_matches_fock", 1e-8, [&] {
    QuasiFreePayload q;
    q.c_bound = 0.2;
    q.q = Symbol::trig1(0.5, {0.15}, {0.05});
    q.r = Symbol::trig1(0.45, {-0.1}, {0.1});
    const StateFamilySpec spec = StateFamilySpec::make_quasifree(q);
    const RenyiEvaluator ev(family_states(spec, 4));
    double worst = 0.0;
    for (double a : {1.5, 3.0})
      worst = std::max(worst, std::abs(quasifree_psi_star_singleparticle(q, 4, a) -
                                       ev.psi(a, RenyiVariant::sandwiched)));
    return worst;
  });
  s.check("onsite_gibbs_factorizes_exactly", 0.0, [&] {
    GibbsPayload g;
    g.site_dim = 2;
    g.beta = 0.7;
    RealVector h(2);
    h << 0.3, -0.4;
    g.terms = {HermitianOperator::diagonal(h)};
    double bad = 0.0;
    for (const Split& sp : factorization_splits(5)) {
      const CertificatePair c = factorization_certificate(g, sp.m, sp.k, sp.r, 1.0);
      if (!c.upper || !c.lower) bad += 1.0;
    }
    return bad;
  });
  return s.done();
}

SuiteResult testing_suite(Rng& rng) {
  Suite s("testing");
  RealVector p(2);
  RealVector q(2);
  p << 0.5, 0.5;
  q << 0.25, 0.75;
  const StateFamilySpec binary = StateFamilySpec::make_iid(HermitianOperator::diagonal(p), HermitianOperator::diagonal(q));
  s.check("classical_np_example", 1e-12, [&] {
    const StatePair pair(HermitianOperator::diagonal(p), HermitianOperator::diagonal(q));
    const ErrorPair e = error_pair(pair, np_test(pair, 0.0));
    return std::max({std::abs(e.success - 0.5), std::abs(e.beta_err - 0.25), std::abs(e.alpha_err - 0.5)});
  });
  s.check("binary_sweep_invariants", 0.0, [&] {
    const ExponentReport r = exponent_sweep(binary, 0.4, {64, 128, 256, 512}, SweepMode::np);
    return r.all_checks_passed() ? 0.0 : 1.0;
  });
  s.check("beta_nonincreasing_in_a", 0.0, [&] {
    const StatePair pair(tensor_power(random_density(2, rng), 4), tensor_power(random_density(2, rng), 4));
    double prev = 2.0;
    double bad = 0.0;
    for (double a : {-1.0, 0.0, 0.2, 0.5, 1.0}) {
      const double beta = error_pair(pair, np_test(pair, 4.0 * a)).beta_err;
      if (beta > prev + 1e-12) bad += 1.0;
      prev = beta;
    }
    return bad;
  });
  s.check("pinched_sweep_invariants", 0.0, [&] {
    const StateFamilySpec spec = StateFamilySpec::make_iid(random_density(2, rng), random_density(2, rng));
    const ExponentReport r = exponent_sweep(spec, 0.1, {4, 5, 6, 7, 8}, SweepMode::pinched);
    return r.all_checks_passed() ? 0.0 : 1.0;
  });
  s.check("pinched_matrix_test_commutes", 1e-10, [&] {
    const StatePair pair(tensor_power(random_density(2, rng), 3), tensor_power(random_density(2, rng), 3));
    const Test t = pinched_np_test(pair, 0.3);
    return commutator_norm(t.op(), pair.sigma());
  });
  return s.done();
}

SuiteResult ldp_suite() {
  Suite s("ldp");
  const WeightedSampleSequence seq = binomial_mean_sequence(0.5);
  s.check("log_mgf_two_point_identity", 1e-12, [&] {
    WeightedSample two;
    two.y = {-1.0, 1.0};
    two.log_w = {0.0, 0.0};
    double worst = 0.0;
    for (double t : {-3.0, 0.0, 0.5, 7.0})
      worst = std::max(worst, std::abs(log_mgf(two, t) - std::log(std::cosh(t)) - std::log(2.0)));
    return worst;
  });
  s.check("log_mgf_convex", 1e-12, [&] {
    return mgf_convexity_violation(seq, 40, {-4.0, -1.0, 0.0, 0.5, 2.0, 5.0});
  });
  s.check("chernoff_dominates_exact_tail", 1e-12, [&] {
    const RateCurve curve = RateCurve::closed_form([](double t) { return std::log(0.5 * (1.0 + std::exp(t))); });
    double worst = -1.0;
    for (int n : {16, 64, 256, 1024})
      for (double x : {0.55, 0.7, 0.9}) worst = std::max(worst, exact_tail_rate(seq, n, x) - chernoff_upper(curve, x));
    return worst;
  });
  s.check("legendre_duality", 1e-8, [&] {
    return gartner_ellis_lower_check(seq, 0.7, {0.7, 1.0}, {-5.0, 5.0}, {256, 512, 1024}).duality_residual;
  });
  return s.done();
}

SuiteResult cli_suite() {
  Suite s("cli");
  s.check("csv_quoting_round_trip", 0.0, [&] {
    CsvTable t;
    t.header = {"a", "b"};
    t.add_row({"plain", "has,comma and \"quote\""});
    const auto back = parse_csv(t.to_string());
    return back.size() == 2 && back[1] == t.rows[0] ? 0.0 : 1.0;
  });
  s.check("convergence_table_round_trip", 0.0, [&] {
    RealVector p(2);
    RealVector q(2);
    p << 0.5, 0.5;
    q << 0.25, 0.75;
    const StateFamilySpec spec = StateFamilySpec::make_iid(HermitianOperator::diagonal(p), HermitianOperator::diagonal(q));
    const ExponentReport r = exponent_sweep(spec, 0.4, {32, 64, 128}, SweepMode::np);
    const auto rows = convergence_rows(r);
    const auto back = parse_convergence_table(convergence_table_csv(r));
    if (back.size() != rows.size()) return 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!(back[i] == rounded(rows[i]))) return 1.0;
    return 0.0;
  });
  return s.done();
}

}  // namespace

int SuiteResult::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

int SuiteResult::failed() const { return static_cast<int>(checks.size()) - passed(); }

std::vector<SuiteResult> run_invariant_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SuiteResult> out;
  out.push_back(operator_suite(rng));
  out.push_back(renyi_suite(rng));
  out.push_back(hoeffding_suite(rng));
  out.push_back(families_suite(rng));
  out.push_back(testing_suite(rng));
  out.push_back(ldp_suite());
  out.push_back(cli_suite());
  return out;
}

}  // namespace sconv

#include <doctest.h>

#include <cmath>

#include "sconv/errors.hpp"
#include "sconv/families.hpp"
#include "sconv/random.hpp"
#include "support.hpp"

using namespace sconv;
using namespace sconv::test;

namespace {

MarkovPayload chain(const Eigen::MatrixXd& p0, const Eigen::MatrixXd& p1, const RealVector& pi0, const RealVector& pi1) {
  MarkovPayload m;
  m.states = static_cast<int>(p0.rows());
  m.P0 = p0;
  m.P1 = p1;
  m.pi0 = pi0;
  m.pi1 = pi1;
  return m;
}

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double binary_psi_star(double q0, double r0, double a) {
  // Sandwiched psi of two commuting qubits diag(1-q0, q0), diag(1-r0, r0).
  return std::log(std::pow(1 - q0, a) * std::pow(1 - r0, 1 - a) + std::pow(q0, a) * std::pow(r0, 1 - a));
}

}  // namespace

TEST_CASE("iid family states are Kronecker powers") {
  Rng rng(1);
  const HermitianOperator rho = random_density(2, rng);
  const HermitianOperator sigma = random_density(2, rng);
  const StateFamilySpec spec = StateFamilySpec::make_iid(rho, sigma);
  const StatePair p2 = family_states(spec, 2);
  CHECK(max_abs(p2.rho().matrix() - kron(rho, rho).matrix()) < 1e-15);
  CHECK(max_abs(p2.sigma().matrix() - kron(sigma, sigma).matrix()) < 1e-15);
  CHECK_FALSE(family_commuting(spec));
  const RenyiEvaluator one(rho, sigma);
  CHECK(family_psi_n(spec, 2.0, 5, RenyiVariant::sandwiched).value ==
        doctest::Approx(5 * one.psi(2.0, RenyiVariant::sandwiched)).epsilon(1e-12));
}

TEST_CASE("Markov chains with equal rows are iid") {
  const RealVector p = vec({0.3, 0.7});
  const RealVector q = vec({0.6, 0.4});
  const MarkovPayload m = chain(mat2(0.3, 0.7, 0.3, 0.7), mat2(0.6, 0.4, 0.6, 0.4), p, q);
  const StatePair s = family_states(StateFamilySpec::make_markov(m), 3);
  const HermitianOperator product = tensor_power(HermitianOperator::diagonal(p), 3);
  CHECK(max_abs(s.rho().matrix() - product.matrix()) < 1e-15);

  const double single = std::log(std::pow(0.3, 2.0) * std::pow(0.6, -1.0) + std::pow(0.7, 2.0) * std::pow(0.4, -1.0));
  CHECK(markov_psi_n(m, 2.0, 10).value == doctest::Approx(10 * single).epsilon(1e-12));
  CHECK(markov_psi_limit(m, 2.0) == doctest::Approx(single).epsilon(1e-12));
  CHECK(std::abs(markov_psi_n(m, 1.0, 7).value) < 1e-14);
}

TEST_CASE("Markov transfer matrix against paths and the Perron limit") {
  const MarkovPayload m = chain(mat2(0.9, 0.1, 0.2, 0.8), mat2(0.5, 0.5, 0.5, 0.5), vec({0.5, 0.5}), vec({0.5, 0.5}));
  for (double a : {0.5, 1.5, 2.0, 3.0}) {
    CHECK(std::abs(markov_psi_n(m, a, 2).value - markov_paths(m, 2).psi(a)) <= 1e-14);
    CHECK(std::abs(markov_psi_n(m, a, 10).value - markov_paths(m, 10).psi(a)) <= 1e-12);
  }
  CHECK(std::abs(markov_psi_n(m, 2.0, 2048).value / 2048 - markov_psi_limit(m, 2.0)) <= 1e-3);

  // Perron root of [[.81/.5, .01/.5], [.04/.5, .64/.5]] at alpha = 2.
  const double tr = (0.81 + 0.64) / 0.5;
  const double det = (0.81 * 0.64 - 0.01 * 0.04) / 0.25;
  CHECK(markov_psi_limit(m, 2.0) == doctest::Approx(std::log(0.5 * (tr + std::sqrt(tr * tr - 4 * det)))).epsilon(1e-12));

  const double h = 1e-5;
  const double fd = (markov_psi_limit(m, 1.0 + h) - markov_psi_limit(m, 1.0 - h)) / (2 * h);
  CHECK(markov_relative_entropy_rate(m) == doctest::Approx(fd).epsilon(1e-7));
  // log(P0/P1) cycle means: self-loop at state 0 gives log 1.8.
  CHECK(markov_max_rate(m) == doctest::Approx(std::log(1.8)).epsilon(1e-12));
}

TEST_CASE("Markov validation") {
  const MarkovPayload bad = chain(mat2(0.9, 0.2, 0.2, 0.8), mat2(0.5, 0.5, 0.5, 0.5), vec({0.5, 0.5}), vec({0.5, 0.5}));
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  const MarkovPayload support = chain(mat2(0.5, 0.5, 0.5, 0.5), mat2(1.0, 0.0, 0.5, 0.5), vec({0.5, 0.5}), vec({0.5, 0.5}));
  CHECK_THROWS_AS(support.validate(), ValidationError);
  CHECK(strongly_connected(mat2(0.5, 0.5, 0.5, 0.5)));
  CHECK_FALSE(strongly_connected(mat2(1.0, 0.0, 0.5, 0.5)));
}

TEST_CASE("Gibbs local Hamiltonians") {
  GibbsPayload g;
  g.site_dim = 2;
  g.beta = 1.0;
  g.terms = {pauli('z')};
  const HermitianOperator id = HermitianOperator::identity(2);
  const HermitianOperator z = pauli('z');
  const HermitianOperator expected = kron(kron(z, id), id) + kron(kron(id, z), id) + kron(kron(id, id), z);
  CHECK(max_abs(gibbs_local_hamiltonian(g, 3).matrix() - expected.matrix()) < 1e-15);

  GibbsPayload nn;
  nn.site_dim = 2;
  nn.beta = 1.0;
  nn.terms = {std::nullopt, kron(z, z)};
  const HermitianOperator zz = kron(kron(z, z), id) + kron(id, kron(z, z));
  CHECK(max_abs(gibbs_local_hamiltonian(nn, 3).matrix() - zz.matrix()) < 1e-15);
}

TEST_CASE("on-site Gibbs states are products") {
  GibbsPayload g;
  g.site_dim = 2;
  g.beta = 0.7;
  g.terms = {pauli('x').scaled(0.5) + pauli('z')};
  const HermitianOperator single = gibbs_state(g, 1);
  CHECK(max_abs(gibbs_state(g, 3).matrix() - tensor_power(single, 3).matrix()) < 1e-13);
  for (const Split& s : factorization_splits(6)) {
    const CertificatePair c = factorization_certificate(g, s.m, s.k, s.r, 1.0);
    CHECK(c.upper);
    CHECK(c.lower);
  }
}

TEST_CASE("nearest-neighbour Gibbs certificates") {
  GibbsPayload g;
  g.site_dim = 2;
  g.beta = 0.5;
  g.terms = {pauli('x'), kron(pauli('z'), pauli('z'))};
  const CertificatePair tight = factorization_certificate(g, 2, 2, 0, 1.0);
  CHECK_FALSE(tight.upper);
  CHECK_FALSE(tight.lower);
  const double crude = std::exp(2.0 * g.beta * g.range() * 1.0);
  for (const Split& s : factorization_splits(6)) {
    const CertificatePair c = factorization_certificate(g, s.m, s.k, s.r, crude);
    CHECK(c.upper);
    CHECK(c.lower);
  }
  const EtaCertificate e = smallest_eta(g, 6);
  CHECK(e.certified);
  CHECK(e.eta > 1.0);
  CHECK(e.eta <= e.seed);
  // Slightly below the bisected constant some split must fail.
  bool any_fails = false;
  for (const Split& s : factorization_splits(6)) {
    const CertificatePair c = factorization_certificate(g, s.m, s.k, s.r, e.eta * 0.99);
    any_fails = any_fails || !c.upper || !c.lower;
  }
  CHECK(any_fails);
}

TEST_CASE("factorization splits") {
  for (const Split& s : factorization_splits(5)) {
    CHECK(s.k >= 1);
    CHECK(s.m >= 1);
    CHECK(s.r >= 0);
    CHECK(s.k * s.m + s.r <= 5);
  }
}

TEST_CASE("Toeplitz compressions") {
  const Symbol constant = Symbol::trig1(0.3, {}, {});
  const HermitianOperator c = toeplitz_block(FourierTable(constant, default_fourier_grid(1)), 1, 4);
  CHECK(max_abs(c.matrix() - HermitianOperator::identity(4).scaled(0.3).matrix()) < 1e-14);

  const Symbol cosine = Symbol::trig1(0.5, {0.2}, {});
  const HermitianOperator t = toeplitz_block(FourierTable(cosine, default_fourier_grid(1)), 1, 5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(t.matrix()(i, i).real() == doctest::Approx(0.5));
    if (i + 1 < 5) CHECK(std::abs(t.matrix()(i, i + 1) - Complex(0.1, 0.0)) < 1e-14);
    if (i + 2 < 5) CHECK(std::abs(t.matrix()(i, i + 2)) < 1e-14);
  }
  CHECK(t.min_eigenvalue() >= 0.3 - 1e-12);
  CHECK(t.max_eigenvalue() <= 0.7 + 1e-12);

  const Symbol two = Symbol::trig2(0.5, {{1, 0, 0.1, 0.0}, {0, 1, 0.0, 0.05}});
  const HermitianOperator t2 = toeplitz_block(FourierTable(two, default_fourier_grid(2)), 2, 3);
  CHECK(t2.dim() == 9);
  CHECK(t2.min_eigenvalue() >= 0.35 - 1e-12);
  CHECK(t2.max_eigenvalue() <= 0.65 + 1e-12);
}

TEST_CASE("quasi-free single-particle formulas") {
  QuasiFreePayload q;
  q.c_bound = 0.1;
  q.q = Symbol::trig1(0.3, {}, {});
  q.r = Symbol::trig1(0.5, {}, {});
  CHECK(quasifree_psi_star_singleparticle(q, 4, 2.0) == doctest::Approx(4 * std::log(1.16)).epsilon(1e-12));
  CHECK(quasifree_psi_star_singleparticle(q, 4, 2.0) == doctest::Approx(4 * binary_psi_star(0.3, 0.5, 2.0)).epsilon(1e-12));

  QuasiFreePayload same;
  same.c_bound = 0.1;
  same.q = Symbol::trig1(0.4, {0.1}, {0.05});
  same.r = same.q;
  for (double a : {1.5, 3.0}) CHECK(std::abs(quasifree_psi_star_singleparticle(same, 6, a)) < 1e-12);
}

TEST_CASE("Fock densities") {
  const HermitianOperator one = fock_density(HermitianOperator::identity(1).scaled(0.3));
  CHECK(max_abs(one.matrix() - diag({0.7, 0.3}).matrix()) < 1e-14);

  const HermitianOperator d = fock_density(diag({0.2, 0.6}));
  CHECK(max_abs(d.matrix() - kron(diag({0.8, 0.2}), diag({0.4, 0.6})).matrix()) < 1e-14);

  const double b = 0.35;
  const HermitianOperator s = fock_density(HermitianOperator::identity(4).scaled(b));
  const RealVector& e = s.eigenvalues();
  CHECK(s.trace() == doctest::Approx(1.0));
  for (int k = 0; k <= 4; ++k) {
    const double value = std::pow(b, k) * std::pow(1 - b, 4 - k);
    int count = 0;
    for (Eigen::Index i = 0; i < e.size(); ++i)
      if (std::abs(e(i) - value) < 1e-14) ++count;
    const int binom[] = {1, 4, 6, 4, 1};
    CHECK(count == binom[k]);
  }
}

TEST_CASE("single-particle psi matches the Fock-space oracle") {
  QuasiFreePayload q;
  q.c_bound = 0.2;
  q.q = Symbol::trig1(0.5, {0.15}, {0.05});
  q.r = Symbol::trig1(0.45, {-0.1}, {0.1});
  const StateFamilySpec spec = StateFamilySpec::make_quasifree(q);
  for (int n = 1; n <= 6; ++n) {
    const RenyiEvaluator ev(family_states(spec, n));
    for (double a : {0.5, 1.5, 2.0, 3.0}) {
      CHECK(quasifree_psi_star_singleparticle(q, n, a) ==
            doctest::Approx(ev.psi(a, RenyiVariant::sandwiched)).epsilon(1e-9));
      CHECK(quasifree_psi_singleparticle(q, n, a, RenyiVariant::plain) ==
            doctest::Approx(ev.psi(a, RenyiVariant::plain)).epsilon(1e-9));
    }
  }
}

TEST_CASE("Szego limits") {
  QuasiFreePayload c;
  c.c_bound = 0.1;
  c.q = Symbol::trig1(0.3, {}, {});
  c.r = Symbol::trig1(0.5, {}, {});
  CHECK(szego_limit(c, 2.0).value == doctest::Approx(binary_psi_star(0.3, 0.5, 2.0)).epsilon(1e-12));
  CHECK(quasifree_relent_limit(c).value ==
        doctest::Approx(0.7 * std::log(0.7 / 0.5) + 0.3 * std::log(0.3 / 0.5)).epsilon(1e-12));

  QuasiFreePayload same;
  same.c_bound = 0.1;
  same.q = Symbol::trig1(0.4, {0.1}, {0.05});
  same.r = same.q;
  CHECK(std::abs(szego_limit(same, 2.0).value) < 1e-14);
  CHECK(std::abs(quasifree_relent_limit(same).value) < 1e-14);

  QuasiFreePayload q;
  q.c_bound = 0.2;
  q.q = Symbol::trig1(0.5, {0.2, 0.05}, {0.0, 0.03});
  q.r = Symbol::trig1(0.45, {-0.1}, {0.15});
  const double limit = szego_limit(q, 2.0).value;
  double prev = INFINITY;
  for (int n : {64, 128, 256, 512}) {
    const double gap = std::abs(quasifree_psi_star_singleparticle(q, n, 2.0) / n - limit);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
  const double h = 1e-4;
  const double fd = (szego_limit(q, 1.0 + h).value - szego_limit(q, 1.0 - h).value) / (2 * h);
  CHECK(std::abs(fd - quasifree_relent_limit(q).value) <= 1e-6);
}

TEST_CASE("quasi-free validation") {
  QuasiFreePayload q;
  q.c_bound = 0.3;
  q.q = Symbol::trig1(0.5, {0.3}, {});
  q.r = Symbol::trig1(0.5, {}, {});
  CHECK_THROWS_AS(q.validate(), ValidationError);
}

TEST_CASE("family JSON") {
  const Json j = Json::parse(R"({
    "kind": "markov",
    "payload": {"states": 2, "pi0": [0.5, 0.5], "pi1": [0.5, 0.5],
                "P0": [[0.9, 0.1], [0.2, 0.8]], "P1": [[0.5, 0.5], [0.5, 0.5]]}})");
  const StateFamilySpec spec = family_from_json(j);
  CHECK(spec.kind == FamilyKind::markov);
  CHECK(family_commuting(spec));

  Json bad = j;
  bad["payload"]["P0"][0][0] = 0.95;
  try {
    family_from_json(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.field()).find("family") == 0);
  }
  Json unknown = j;
  unknown["kind"] = "bosonic";
  CHECK_THROWS_AS(family_from_json(unknown), ValidationError);
}

TEST_CASE("family rates") {
  const MarkovPayload m = chain(mat2(0.9, 0.1, 0.2, 0.8), mat2(0.5, 0.5, 0.5, 0.5), vec({0.5, 0.5}), vec({0.5, 0.5}));
  const FamilyRate fr = family_rate(StateFamilySpec::make_markov(m), RenyiVariant::sandwiched);
  CHECK(fr.rate(2.0) == doctest::Approx(markov_psi_limit(m, 2.0)).epsilon(1e-12));
  CHECK(fr.rate.right_derivative_at_1() == doctest::Approx(markov_relative_entropy_rate(m)).epsilon(1e-8));
  CHECK(fr.rate.check().ok);

  Rng rng(2);
  const HermitianOperator rho = random_density(2, rng);
  const HermitianOperator sigma = random_density(2, rng);
  const FamilyRate iid = family_rate(StateFamilySpec::make_iid(rho, sigma), RenyiVariant::sandwiched);
  CHECK(iid.rate(3.0) == doctest::Approx(psi_value(rho, sigma, 3.0, RenyiVariant::sandwiched)).epsilon(1e-12));
  CHECK(iid.rate.right_derivative_at_1() == doctest::Approx(relative_entropy(rho, sigma).value).epsilon(1e-10));
  REQUIRE(iid.rate.slope_at_infinity());
  CHECK(*iid.rate.slope_at_infinity() == doctest::Approx(max_relative_entropy(rho, sigma).value).epsilon(1e-10));
}

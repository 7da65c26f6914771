#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "sconv/errors.hpp"
#include "sconv/random.hpp"
#include "sconv/renyi.hpp"
#include "support.hpp"

using namespace sconv;
using namespace sconv::test;

namespace {

// Sandwiched Q through Schur-Pade matrix powers, independent of the
// eigendecomposition path used by the library.
double sandwiched_q_oracle(const Matrix& rho, const Matrix& sigma, double a) {
  const Matrix s = sigma.pow((1.0 - a) / (2.0 * a));
  const Matrix inner = s * rho * s;
  const Matrix h = (inner + inner.adjoint()) / 2.0;
  return h.pow(a).trace().real();
}

double plain_q_oracle(const Matrix& rho, const Matrix& sigma, double t) {
  return (rho.pow(t) * sigma.pow(1.0 - t)).trace().real();
}

}  // namespace

TEST_CASE("Q values on simple pairs") {
  const HermitianOperator half = diag({0.5, 0.5});
  const HermitianOperator skew = diag({0.25, 0.75});
  for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched}) CHECK(q_value(half, half, 2.0, v) == doctest::Approx(1.0));
  CHECK(q_value(half, skew, 2.0, RenyiVariant::plain) == doctest::Approx(4.0 / 3.0));

  Rng rng(1);
  const HermitianOperator p = random_diagonal_density(3, rng);
  const HermitianOperator q = random_diagonal_density(3, rng);
  for (double t : {0.5, 2.0, 5.0})
    CHECK(q_value(p, q, t, RenyiVariant::plain) ==
          doctest::Approx(q_value(p, q, t, RenyiVariant::sandwiched)).epsilon(1e-12));
}

TEST_CASE("Q values against matrix-function oracles") {
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    for (double a : {0.5, 0.8, 1.5, 2.0, 4.0}) {
      CHECK(q_value(rho, sigma, a, RenyiVariant::sandwiched) ==
            doctest::Approx(sandwiched_q_oracle(rho.matrix(), sigma.matrix(), a)).epsilon(1e-10));
      CHECK(q_value(rho, sigma, a, RenyiVariant::plain) ==
            doctest::Approx(plain_q_oracle(rho.matrix(), sigma.matrix(), a)).epsilon(1e-10));
    }
  }
}

TEST_CASE("sandwiched Q of a pure state") {
  Rng rng(9);
  const HermitianOperator proj = random_projector(3, rng);
  const HermitianOperator sigma = random_density(3, rng);
  const Spectrum s = spectral(proj);
  const Eigen::VectorXcd psi = s.vectors.col(2);
  for (double a : {0.6, 1.5, 3.0}) {
    const Matrix m = power_on_support(sigma, (1.0 - a) / a).matrix();
    const double expected = std::pow((psi.adjoint() * m * psi)(0).real(), a);
    CHECK(q_value(proj, sigma, a, RenyiVariant::sandwiched) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("Renyi divergences") {
  const HermitianOperator half = diag({0.5, 0.5});
  const HermitianOperator skew = diag({0.25, 0.75});
  for (double a : {0.5, 2.0, 3.0}) CHECK(std::abs(renyi_divergence(half, half, a, RenyiVariant::sandwiched).value) < 1e-14);
  CHECK(renyi_divergence(half, skew, 2.0, RenyiVariant::plain).value == doctest::Approx(std::log(4.0 / 3.0)));
  const Divergence inf = renyi_divergence(diag({1, 0}), diag({0, 1}), 2.0, RenyiVariant::sandwiched);
  CHECK(inf.infinite);
  // Below 1 disjoint supports give a finite value only when the overlap is nonzero.
  CHECK(renyi_divergence(diag({1, 0}), diag({0, 1}), 0.5, RenyiVariant::plain).infinite);
  // alpha = 1 is the relative entropy.
  CHECK(renyi_divergence(half, skew, 1.0, RenyiVariant::plain).value ==
        doctest::Approx(relative_entropy(half, skew).value));
}

TEST_CASE("relative entropy") {
  const HermitianOperator half = diag({0.5, 0.5});
  CHECK(std::abs(relative_entropy(half, half).value) < 1e-14);
  CHECK(relative_entropy(half, diag({0.25, 0.75})).value ==
        doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK(relative_entropy(diag({1, 0}), diag({0, 1})).infinite);

  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    const double d = relative_entropy(rho, sigma).value;
    for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched}) {
      CHECK(std::abs(renyi_divergence(rho, sigma, 1.0 + 1e-4, v).value - d) <= 1e-3);
      CHECK(std::abs(renyi_divergence(rho, sigma, 1.0 - 1e-4, v).value - d) <= 1e-3);
    }
  }
}

TEST_CASE("max-relative entropy") {
  const HermitianOperator half = diag({0.5, 0.5});
  const HermitianOperator skew = diag({0.25, 0.75});
  CHECK(std::abs(max_relative_entropy(half, half).value) < 1e-12);
  CHECK(max_relative_entropy(half, skew).value == doctest::Approx(std::log(2.0)));

  Rng rng(6);
  const HermitianOperator rho = random_density(3, rng);
  const HermitianOperator sigma = random_density(3, rng);
  const double dmax = max_relative_entropy(rho, sigma).value;
  // Oracle: smallest lambda with rho <= e^lambda sigma, by bisection on the PSD order.
  double lo = 0.0;
  double hi = 20.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (psd_dominates(sigma.scaled(std::exp(mid)), rho, 0.0) ? hi : lo) = mid;
  }
  CHECK(dmax == doctest::Approx(hi).epsilon(1e-9));
  double prev = -INFINITY;
  for (double a : {2.0, 8.0, 32.0, 128.0}) {
    const double d = renyi_divergence(rho, sigma, a, RenyiVariant::sandwiched).value;
    CHECK(d >= prev);
    CHECK(d <= dmax + 1e-12);
    prev = d;
  }
  CHECK(dmax - prev < 0.05);
}

TEST_CASE("psi derivative") {
  const HermitianOperator p = diag({0.2, 0.3, 0.5});
  const HermitianOperator q = diag({0.4, 0.4, 0.2});
  for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched})
    CHECK(psi_derivative(p, q, 1.0, v) == doctest::Approx(relative_entropy(p, q).value).epsilon(1e-10));

  // Classical derivative of log sum p^t q^(1-t).
  const double t = 1.7;
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < 3; ++i) {
    const double pi = p.matrix()(i, i).real();
    const double qi = q.matrix()(i, i).real();
    const double w = std::pow(pi, t) * std::pow(qi, 1.0 - t);
    num += w * std::log(pi / qi);
    den += w;
  }
  CHECK(psi_derivative(p, q, t, RenyiVariant::plain) == doctest::Approx(num / den).epsilon(1e-12));

  Rng rng(8);
  const HermitianOperator rho = random_density(3, rng);
  const HermitianOperator sigma = random_density(3, rng);
  const double h = 1e-5;
  for (auto v : {RenyiVariant::plain, RenyiVariant::sandwiched}) {
    const double fd = (psi_value(rho, sigma, t + h, v) - psi_value(rho, sigma, t - h, v)) / (2.0 * h);
    CHECK(psi_derivative(rho, sigma, t, v) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("scaling identities") {
  Rng rng(10);
  const HermitianOperator rho = random_density(2, rng);
  const HermitianOperator sigma = random_density(2, rng);
  const ScalingResidual unit = scaling_check(rho, sigma, 1.0, 1.0, 2.0, RenyiVariant::plain);
  CHECK(unit.psi == doctest::Approx(0.0));
  CHECK(unit.divergence == doctest::Approx(0.0));
  const ScalingResidual r = scaling_check(rho, sigma, 2.0, 3.0, 2.0, RenyiVariant::plain);
  CHECK(std::abs(r.psi) < 1e-10);
  CHECK(std::abs(r.divergence) < 1e-10);
  const ScalingResidual same = scaling_check(rho, sigma, 5.0, 5.0, 2.0, RenyiVariant::sandwiched);
  CHECK(std::abs(same.divergence) <= 1e-12);
}

TEST_CASE("sandwiched never exceeds plain for alpha > 1") {
  Rng rng(12);
  for (int i = 0; i < 10; ++i) {
    const HermitianOperator rho = random_density(3, rng);
    const HermitianOperator sigma = random_density(3, rng);
    for (double a : {1.5, 2.0, 5.0})
      CHECK(psi_value(rho, sigma, a, RenyiVariant::sandwiched) <= psi_value(rho, sigma, a, RenyiVariant::plain) + 1e-12);
  }
}

TEST_CASE("evaluator rejects invalid orders") {
  const RenyiEvaluator ev(diag({0.5, 0.5}), diag({0.25, 0.75}));
  CHECK_THROWS(ev.psi(0.0, RenyiVariant::sandwiched));
  CHECK_THROWS_AS(parse_variant("measured"), ValidationError);
  CHECK(parse_variant("sandwiched") == RenyiVariant::sandwiched);
  CHECK(to_string(RenyiVariant::plain) == "plain");
}

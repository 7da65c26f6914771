#include "sconv/families.hpp"

#include <cmath>
#include <memory>

#include "sconv/errors.hpp"
#include "sconv/hoeffding.hpp"

namespace sconv {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

RealVector vector_from_json(const Json& j, const std::string& key, const std::string& path) {
  const auto v = json_numbers(j, key, path);
  return Eigen::Map<const RealVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd rows_from_json(const Json& j, const std::string& key, const std::string& path) {
  const Json& rows = json_member(j, key, path);
  const std::string where = join(path, key);
  if (!rows.is_array() || rows.empty()) throw ValidationError("expected an array of rows", where);
  const auto d = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw ValidationError("transition matrix must be square", rw);
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) throw ValidationError("expected a number", rw);
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

GibbsPayload gibbs_side_from_json(const Json& side, int site_dim, double beta, const std::string& path) {
  GibbsPayload g;
  g.site_dim = site_dim;
  g.beta = beta;
  const Json& terms = json_member(side, "terms", path);
  if (!terms.is_array() || terms.empty()) throw ValidationError("terms must be a nonempty array", join(path, "terms"));
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const std::string where = join(path, "terms") + "[" + std::to_string(j) + "]";
    if (terms[j].is_null()) {
      g.terms.emplace_back(std::nullopt);
    } else {
      g.terms.emplace_back(operator_from_json(terms[j], where));
    }
  }
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), path);
  }
  return g;
}

}  // namespace

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::iid:
      return "iid";
    case FamilyKind::markov:
      return "markov";
    case FamilyKind::gibbs:
      return "gibbs";
    case FamilyKind::quasifree:
      return "quasifree";
  }
  return "unknown";
}

StateFamilySpec StateFamilySpec::make_iid(HermitianOperator rho, HermitianOperator sigma) {
  StatePair check(rho, sigma);
  StateFamilySpec s;
  s.kind = FamilyKind::iid;
  s.payload = IidPayload{std::move(rho), std::move(sigma)};
  return s;
}

StateFamilySpec StateFamilySpec::make_markov(MarkovPayload m) {
  m.validate();
  StateFamilySpec s;
  s.kind = FamilyKind::markov;
  s.payload = std::move(m);
  return s;
}

StateFamilySpec StateFamilySpec::make_gibbs(GibbsPayload null_model, GibbsPayload alternative) {
  null_model.validate();
  alternative.validate();
  if (null_model.site_dim != alternative.site_dim) throw ValidationError("Gibbs pair must share the site dimension");
  StateFamilySpec s;
  s.kind = FamilyKind::gibbs;
  s.payload = GibbsFamilyPayload{std::move(null_model), std::move(alternative)};
  return s;
}

StateFamilySpec StateFamilySpec::make_quasifree(QuasiFreePayload q) {
  q.validate();
  StateFamilySpec s;
  s.kind = FamilyKind::quasifree;
  s.scaling_exponent = q.nu;
  s.payload = std::move(q);
  return s;
}

Symbol symbol_from_json(const Json& j, int nu, const std::string& path) {
  if (!j.is_object()) throw ValidationError("symbol must be an object", path);
  const double constant = json_number(j, "constant", path);
  if (nu == 1) {
    std::vector<double> c;
    std::vector<double> s;
    if (j.contains("cos_coeffs")) c = json_numbers(j, "cos_coeffs", path);
    if (j.contains("sin_coeffs")) s = json_numbers(j, "sin_coeffs", path);
    return Symbol::trig1(constant, c, s);
  }
  std::vector<TrigTerm> terms;
  if (j.contains("terms")) {
    const Json& arr = j.at("terms");
    if (!arr.is_array()) throw ValidationError("terms must be an array", join(path, "terms"));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = join(path, "terms") + "[" + std::to_string(i) + "]";
      const auto k = json_numbers(arr[i], "k", where);
      if (k.size() != 2) throw ValidationError("wave vector needs two entries", where + ".k");
      TrigTerm t;
      t.k1 = static_cast<int>(k[0]);
      t.k2 = static_cast<int>(k[1]);
      t.cos = arr[i].contains("cos") ? json_number(arr[i], "cos", where) : 0.0;
      t.sin = arr[i].contains("sin") ? json_number(arr[i], "sin", where) : 0.0;
      terms.push_back(t);
    }
  }
  return Symbol::trig2(constant, terms);
}

StateFamilySpec family_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError("family must be an object", path);
  const Json& kind_j = json_member(j, "kind", path);
  if (!kind_j.is_string()) throw ValidationError("kind must be a string", join(path, "kind"));
  const std::string kind = kind_j.get<std::string>();
  const std::string pp = join(path, "payload");
  const Json& p = json_member(j, "payload", path);
  std::optional<int> scaling;
  if (j.contains("scaling_exponent")) {
    scaling = json_int(j, "scaling_exponent", path);
    if (*scaling < 1) throw ValidationError("scaling exponent must be positive", join(path, "scaling_exponent"));
  }

  StateFamilySpec spec;
  if (kind == "iid") {
    HermitianOperator rho = operator_from_json(json_member(p, "rho", pp), join(pp, "rho"));
    HermitianOperator sigma = operator_from_json(json_member(p, "sigma", pp), join(pp, "sigma"));
    try {
      spec = StateFamilySpec::make_iid(rho, sigma);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), pp);
    }
  } else if (kind == "markov") {
    MarkovPayload m;
    m.states = json_int(p, "states", pp);
    m.pi0 = vector_from_json(p, "pi0", pp);
    m.pi1 = vector_from_json(p, "pi1", pp);
    m.P0 = rows_from_json(p, "P0", pp);
    m.P1 = rows_from_json(p, "P1", pp);
    try {
      m.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), path + "." + e.field());
    }
    spec = StateFamilySpec::make_markov(std::move(m));
  } else if (kind == "gibbs") {
    const int site_dim = json_int(p, "site_dim", pp);
    if (site_dim < 1) throw ValidationError("site dimension must be positive", join(pp, "site_dim"));
    const double beta = json_number(p, "beta", pp);
    if (!(beta > 0.0)) throw ValidationError("inverse temperature must be positive", join(pp, "beta"));
    GibbsPayload null_model = gibbs_side_from_json(json_member(p, "null", pp), site_dim, beta, join(pp, "null"));
    GibbsPayload alt = gibbs_side_from_json(json_member(p, "alternative", pp), site_dim, beta, join(pp, "alternative"));
    spec = StateFamilySpec::make_gibbs(std::move(null_model), std::move(alt));
  } else if (kind == "quasifree") {
    QuasiFreePayload q;
    q.nu = json_int(p, "nu", pp);
    if (q.nu != 1 && q.nu != 2) throw ValidationError("lattice dimension must be 1 or 2", join(pp, "nu"));
    q.c_bound = json_number(p, "c_bound", pp);
    q.q = symbol_from_json(json_member(p, "q_symbol", pp), q.nu, join(pp, "q_symbol"));
    q.r = symbol_from_json(json_member(p, "r_symbol", pp), q.nu, join(pp, "r_symbol"));
    try {
      q.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), path + "." + e.field());
    }
    if (scaling && *scaling != q.nu) {
      throw ValidationError("quasi-free scaling exponent must equal nu", join(path, "scaling_exponent"));
    }
    spec = StateFamilySpec::make_quasifree(std::move(q));
  } else {
    throw ValidationError("unknown family kind '" + kind + "'", join(path, "kind"));
  }
  if (scaling) spec.scaling_exponent = *scaling;
  return spec;
}

std::size_t family_sites(const StateFamilySpec& spec, int n) {
  std::size_t sites = 1;
  for (int i = 0; i < spec.scaling_exponent; ++i) sites *= static_cast<std::size_t>(n);
  return sites;
}

StatePair family_states(const StateFamilySpec& spec, int n, std::size_t dim_cap) {
  if (n < 1) throw DomainError("block size must be positive");
  switch (spec.kind) {
    case FamilyKind::iid: {
      const auto& p = spec.iid();
      const auto k = static_cast<std::size_t>(n);
      return StatePair(tensor_power(p.rho, k, dim_cap), tensor_power(p.sigma, k, dim_cap));
    }
    case FamilyKind::markov:
      return markov_states(spec.markov(), n, dim_cap);
    case FamilyKind::gibbs: {
      const auto& g = spec.gibbs();
      return StatePair(gibbs_state(g.null_model, n, dim_cap), gibbs_state(g.alternative, n, dim_cap));
    }
    case FamilyKind::quasifree: {
      const std::size_t modes = family_sites(spec, n);
      if (modes > 12 || (std::size_t{1} << modes) > dim_cap) {
        throw ResourceError("Fock space of " + std::to_string(modes) +
                                " modes exceeds the cap; use the single-particle quantities instead",
                            modes >= 63 ? ~std::size_t{0} : std::size_t{1} << modes);
      }
      const BlockSymbols b = quasifree_block_symbol(spec.quasifree(), n);
      return StatePair(fock_density(b.Q), fock_density(b.R));
    }
  }
  throw DomainError("unknown family kind");
}

ExtendedReal family_psi_n(const StateFamilySpec& spec, double alpha, int n, RenyiVariant v,
                          std::size_t dim_cap) {
  if (n < 1) throw DomainError("block size must be positive");
  switch (spec.kind) {
    case FamilyKind::iid: {
      const RenyiEvaluator ev(spec.iid().rho, spec.iid().sigma);
      if (alpha > 1.0 && !ev.support_contained()) return ExtendedReal::infinity();
      return ExtendedReal::finite(n * ev.psi(alpha, v));
    }
    case FamilyKind::markov:
      return markov_psi_n(spec.markov(), alpha, n);
    case FamilyKind::gibbs: {
      const RenyiEvaluator ev(family_states(spec, n, dim_cap));
      return ExtendedReal::finite(ev.psi(alpha, v));
    }
    case FamilyKind::quasifree:
      return ExtendedReal::finite(quasifree_psi_singleparticle(spec.quasifree(), n, alpha, v));
  }
  throw DomainError("unknown family kind");
}

bool family_commuting(const StateFamilySpec& spec) {
  switch (spec.kind) {
    case FamilyKind::iid:
      return commutator_norm(spec.iid().rho, spec.iid().sigma) <= 1e-10;
    case FamilyKind::markov:
      return true;
    default:
      return false;
  }
}

FamilyRate family_rate(const StateFamilySpec& spec, RenyiVariant v, const RateOptions& opts) {
  switch (spec.kind) {
    case FamilyKind::iid: {
      auto ev = std::make_shared<RenyiEvaluator>(spec.iid().rho, spec.iid().sigma);
      const Divergence d1 = ev->relative_entropy();
      const Divergence dinf = ev->psi_slope_at_infinity(v);
      if (d1.infinite) throw DataError("relative entropy is infinite; no finite rate");
      std::optional<double> a_max;
      if (!dinf.infinite) a_max = dinf.value;
      return {ConvexRate::analytic([ev, v](double t) { return ev->psi(t, v); }, d1.value, a_max,
                                   "iid closed form"),
              "renyi: single-copy psi (additivity)"};
    }
    case FamilyKind::markov: {
      const MarkovPayload m = spec.markov();
      return {ConvexRate::analytic([m](double t) { return markov_psi_limit(m, t); }, markov_relative_entropy_rate(m),
                                   markov_max_rate(m), "markov Perron root"),
              "state-families: log Perron root of the transfer matrix"};
    }
    case FamilyKind::quasifree: {
      const QuasiFreePayload& q = spec.quasifree();
      auto grid = std::make_shared<SzegoGrid>(q);
      return {ConvexRate::analytic([grid](double t) { return grid->psi_limit(t); }, grid->relent_limit(),
                                   grid->max_rate(), "quasifree Szegő limit"),
              "state-families: Szegő quadrature of the symbol integrand"};
    }
    case FamilyKind::gibbs: {
      std::vector<std::vector<PsiSample>> samples(opts.alphas.size());
      for (int n : opts.sample_sizes) {
        const RenyiEvaluator ev(family_states(spec, n, opts.dim_cap));
        for (std::size_t k = 0; k < opts.alphas.size(); ++k) {
          samples[k].push_back({static_cast<double>(n), ev.psi(opts.alphas[k], v)});
        }
      }
      RateFit fit = rate_from_samples(opts.alphas, samples, spec.scaling_exponent);
      double worst = 0.0;
      for (double r : fit.residuals) worst = std::max(worst, r);
      return {*fit.rate, "hoeffding: Richardson-extrapolated finite-n psi (max residual " +
                             std::to_string(worst) + ")"};
    }
  }
  throw DomainError("unknown family kind");
}

ClassicalPair family_classical(const StateFamilySpec& spec, int n, bool pinched, std::size_t dim_cap) {
  switch (spec.kind) {
    case FamilyKind::iid: {
      const auto& p = spec.iid();
      if (family_commuting(spec)) {
        const ClassicalPair one = classical_from_commuting(p.rho, p.sigma);
        const RealVector a = Eigen::Map<const RealVector>(one.log_p.data(), static_cast<Eigen::Index>(one.size()))
                                 .array()
                                 .exp();
        const RealVector b = Eigen::Map<const RealVector>(one.log_q.data(), static_cast<Eigen::Index>(one.size()))
                                 .array()
                                 .exp();
        return iid_types(a, b, n);
      }
      if (pinched) return pinched_iid(p.rho, p.sigma, n, dim_cap);
      throw DomainError("non-commuting iid pair has no classical form without pinching");
    }
    case FamilyKind::markov:
      return markov_paths(spec.markov(), n);
    default:
      throw DomainError("family " + to_string(spec.kind) + " has no exact classical reduction");
  }
}

}  // namespace sconv

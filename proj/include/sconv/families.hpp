#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sconv/classical.hpp"
#include "sconv/convex_rate.hpp"
#include "sconv/extended.hpp"
#include "sconv/gibbs.hpp"
#include "sconv/markov.hpp"
#include "sconv/quasifree.hpp"
#include "sconv/renyi.hpp"
#include "sconv/serialize.hpp"

namespace sconv {

enum class FamilyKind { iid, markov, gibbs, quasifree };
std::string to_string(FamilyKind k);

struct IidPayload {
  HermitianOperator rho;
  HermitianOperator sigma;
};

struct GibbsFamilyPayload {
  GibbsPayload null_model;
  GibbsPayload alternative;
};

struct StateFamilySpec {
  FamilyKind kind = FamilyKind::iid;
  int scaling_exponent = 1;
  std::variant<MarkovPayload, IidPayload, GibbsFamilyPayload, QuasiFreePayload> payload;

  const IidPayload& iid() const { return std::get<IidPayload>(payload); }
  const MarkovPayload& markov() const { return std::get<MarkovPayload>(payload); }
  const GibbsFamilyPayload& gibbs() const { return std::get<GibbsFamilyPayload>(payload); }
  const QuasiFreePayload& quasifree() const { return std::get<QuasiFreePayload>(payload); }

  static StateFamilySpec make_iid(HermitianOperator rho, HermitianOperator sigma);
  static StateFamilySpec make_markov(MarkovPayload m);
  static StateFamilySpec make_gibbs(GibbsPayload null_model, GibbsPayload alternative);
  static StateFamilySpec make_quasifree(QuasiFreePayload q);
};

// {kind, scaling_exponent, payload}; errors name the offending field.
StateFamilySpec family_from_json(const Json& j, const std::string& path = "family");
Symbol symbol_from_json(const Json& j, int nu, const std::string& path);

// Number of sites carried by block size n (n^nu for lattices).
std::size_t family_sites(const StateFamilySpec& spec, int n);

StatePair family_states(const StateFamilySpec& spec, int n, std::size_t dim_cap = kDefaultDimCap);

// Raw psi(alpha | rho_n || sigma_n) without any 1/n normalisation. Uses
// additivity (iid), transfer matrices (markov), explicit Gibbs states, or the
// single-particle formula (quasifree).
ExtendedReal family_psi_n(const StateFamilySpec& spec, double alpha, int n, RenyiVariant v,
                          std::size_t dim_cap = kDefaultDimCap);

// True when rho_n and sigma_n commute for every n.
bool family_commuting(const StateFamilySpec& spec);

struct FamilyRate {
  ConvexRate rate;
  std::string provenance;
};

struct RateOptions {
  std::vector<double> alphas{1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
  std::vector<int> sample_sizes{4, 5, 6, 7, 8};
  std::size_t dim_cap = kDefaultDimCap;
};

// The asymptotic rate psi-bar(t) for t >= 1: closed forms for iid, markov
// and quasifree; extrapolated samples for gibbs.
FamilyRate family_rate(const StateFamilySpec& spec, RenyiVariant v, const RateOptions& opts = {});

// Classical reduction at block size n: the commuting pair itself, or the
// pinched pair when `pinched` is set. Throws DomainError when the family has
// no exact classical form.
ClassicalPair family_classical(const StateFamilySpec& spec, int n, bool pinched,
                               std::size_t dim_cap = kDefaultDimCap);

}  // namespace sconv

#pragma once

#include <cstdint>
#include <random>

#include "sconv/operator.hpp"

namespace sconv {

using Rng = std::mt19937_64;

// SCONV_SEED from the environment, 42 when unset or malformed.
std::uint64_t seed_from_env();

// Haar-distributed unitary (QR of a complex Ginibre matrix with phase fix).
Matrix random_unitary(std::size_t dim, Rng& rng);

// G G^dagger / Tr with complex Gaussian G, mixed with min_weight * I/d so
// every eigenvalue is at least min_weight / d.
HermitianOperator random_density(std::size_t dim, Rng& rng, double min_weight = 0.05);

// Diagonal density with entries drawn uniformly and normalized.
HermitianOperator random_diagonal_density(std::size_t dim, Rng& rng, double min_weight = 0.05);

// Rank-one projector onto a Haar-random unit vector.
HermitianOperator random_projector(std::size_t dim, Rng& rng);

}  // namespace sconv

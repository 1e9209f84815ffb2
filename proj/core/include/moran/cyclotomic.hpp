#pragma once

// Exact vanishing test for sums of roots of unity.
//
// sum_{p in P} exp(2 pi i p / q) == 0  iff  Phi_q divides sum_p x^(p mod q).

#include <cstdint>
#include <span>
#include <vector>

#include "moran/exact.hpp"

namespace moran {

bool cyclotomic_vanishes(std::span<const std::int64_t> exponents, std::int64_t q);
bool cyclotomic_vanishes(std::span<const Integer> exponents, const Integer& q);

/// sum_t exp(2 pi i t) == 0 for rational phases t.
bool root_sum_vanishes(std::span<const Rational> phases);

/// Coefficients of Phi_q, lowest degree first. Cached; safe to call concurrently.
const std::vector<Integer>& cyclotomic_polynomial(std::uint64_t q);

}  // namespace moran

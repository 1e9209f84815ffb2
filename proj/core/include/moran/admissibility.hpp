#pragma once

// Membership of products A = R_{k+1}^t ... R_{k+p}^t in the class A_{delta,beta}:
// the image E = A^{-1} [-1/2-delta, 1/2+delta]^n must stay at Euclidean distance
// >= beta from every coset point j nu / m + z of every level's zero set.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "moran/exact.hpp"
#include "moran/system.hpp"

namespace moran {

enum class ScanOutcome { Certified, Violation, Inconclusive };

std::string to_string(ScanOutcome o);

struct AdmissibilityWitness {
    std::size_t k = 0;              // product starts after level k
    std::size_t p = 0;              // number of factors
    RationalVector zero_point;      // j nu / m + z
    RationalVector image_point;     // a point of E close to it
    double distance = 0.0;          // approximate distance
};

struct AdmissibilityResult {
    ScanOutcome outcome = ScanOutcome::Inconclusive;
    /// Certificate covers every k >= first_k and p >= 1, not only the scanned horizon.
    bool unconditional = false;
    std::string method;     // "diagonal-levels", "slab", "horizon"
    std::string caveat;
    std::optional<AdmissibilityWitness> witness;
    std::size_t products_checked = 0;
    std::size_t points_checked = 0;
    double min_margin = 0.0;  // smallest certified (distance - beta) seen, approximate
};

struct AdmissibilityOptions {
    std::size_t horizon = 0;      // 0: three cycle lengths
    std::size_t first_k = 1;      // N_0
    std::size_t point_cap = 1000000;
};

/// Throws ParameterError when delta or beta lies outside (0, 1/4).
AdmissibilityResult admissibility_scan(const MoranSystem& system, const AdmissibilityOptions& options = {});

/// Single-product check, exposed for tests: outcome for A^{-1} B against all zero cosets.
AdmissibilityResult check_product(const IntMatrix& A, const std::vector<IntVector>& directions, long m,
                                  const Rational& delta, const Rational& beta, std::size_t point_cap = 1000000);

}  // namespace moran

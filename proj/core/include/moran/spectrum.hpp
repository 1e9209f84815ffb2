#pragma once

// Candidate spectra for Moran systems whose first matrix is m I: blocks of K
// consecutive levels, per-level coset labels, their towers reduced into the
// fundamental domains R~_k^t (-1/2, 1/2]^n, and the nested finite sets
//   Lambda_k = L_0 + R~_0^t L_1 + ... + R~_0^t ... R~_{k-1}^t L_k.

#include <cstddef>
#include <optional>
#include <vector>

#include "moran/exact.hpp"
#include "moran/pairs.hpp"
#include "moran/system.hpp"

namespace moran {

struct TransformRecord {
    bool identity = true;
    /// Spectrum of the normalized system maps to one of the original by
    /// lambda = pullback * lambda'  (pullback = R_1^t / m).
    RationalMatrix pullback;
    /// mu^(xi) = mu'^(forward * xi)  (forward = m R_1^{-t}).
    RationalMatrix forward;
};

struct NormalizedSystem {
    MoranSystem system;
    TransformRecord transform;
};

/// Replaces R_1 by m I. The contraction bound becomes max(r, 1/m).
NormalizedSystem normalize_first(const MoranSystem& system);

/// Least i with m | every entry of nu_{k,i}^t R_k.
std::optional<std::size_t> find_admissible_direction(const MoranSystem& system, std::size_t k);

struct BlockSize {
    std::size_t M = 0;
    std::size_t K = 0;
};

/// M: least integer with 2 pi s (3 sqrt(n) / 2) c^2 r^M <= 1/2.
/// K: least K >= M with c^2 (sqrt(n) / 2) r^K / (1 - r^K) <= delta / 4.
/// Throws NoAdmissibleDirection(k) for the first level k >= 2 without one.
BlockSize choose_block_size(const MoranSystem& system);

/// The closed-form pieces of choose_block_size, exposed for tests and reports.
double block_tail_bound(std::size_t n, double r, double c, std::size_t K);

struct Block {
    IntMatrix R;                     // R_{(k+1)K} ... R_{kK+1}
    DigitSet D;                      // digit tower, m^K elements
    std::vector<IntVector> L;        // reduced labels, contains 0
    std::vector<std::size_t> direction_index;  // i_j for the K levels of the block
    bool literal_index_reading = false;        // fallback label reading was needed
};

struct BlockDecomposition {
    std::size_t K = 0;
    std::size_t guaranteed_K = 0;  // K from choose_block_size (containment is only guaranteed from here)
    long m = 0;
    Rational delta;
    std::vector<Block> blocks;
};

/// Builds blocks 0 .. count-1. R_1 must already be m I for block 0 to have an
/// admissible first level. Throws NoAdmissibleDirection and PairVerificationFailed.
/// guaranteed_K = 0 means "compute with choose_block_size" (0 is stored if that throws).
BlockDecomposition build_blocks(const MoranSystem& system, std::size_t K, std::size_t count,
                                std::size_t guaranteed_K = 0);

/// Per-level coset labels C = {0, c^(1), ..., c^(m-1)}: c^(l) = l nu mod m, c/m in (-1/2, 1/2]^n.
std::vector<IntVector> coset_labels(const IntVector& nu, long m);

struct SpectrumLevel {
    std::size_t k = 0;
    std::vector<IntVector> elements;  // enumeration order: odometer, L_0 fastest
    bool containment = true;          // (R~_0^t ... R~_k^t)^{-1} Lambda_k within [-1/2-delta/4, 1/2+delta/4]^n
    Rational max_scaled_coordinate;   // largest |coordinate| of the scaled set
};

/// Throws CollisionDetected, CapExceeded (more than `cap` elements) and
/// ContainmentViolation when K >= guaranteed_K and the containment fails.
SpectrumLevel build_spectrum_level(const BlockDecomposition& decomp, std::size_t k, std::size_t cap = 1000000);

}  // namespace moran

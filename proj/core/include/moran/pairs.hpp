#pragma once

// Compatible pairs (Hadamard triples): (R, D, L) with
// H = #D^{-1/2} [exp(2 pi i <R^{-1} d, l>)]_{l, d} unitary.
//
// Digits only matter modulo R Z^n and labels modulo R^t Z^n; shifting a digit
// by R z changes every phase by the integer <z, l>.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "moran/exact.hpp"
#include "moran/mask.hpp"

namespace moran {

enum class VerifyMode { Exact, Numeric };
enum class PairStatus { Unverified, Exact, Numeric, Failed };

struct PairCheck {
    bool ok = false;
    std::optional<std::pair<IntVector, IntVector>> witness;  // (l, l') with row l not orthogonal to row l'
    double max_deviation = 0.0;                              // numeric mode: max |HH* - I|
};

struct CompatiblePair {
    IntMatrix R;
    DigitSet D;
    std::vector<IntVector> L;
    PairStatus status = PairStatus::Unverified;
};

/// Throws SingularMatrix, SizeMismatch (#L != #D) and DimensionMismatch.
PairCheck is_compatible_pair(const IntMatrix& R, const DigitSet& D, const std::vector<IntVector>& L,
                             VerifyMode mode = VerifyMode::Exact, double tol = 1e-9);

/// Verifies and records the status; throws PairVerificationFailed(0, ...) on failure.
CompatiblePair make_pair(IntMatrix R, DigitSet D, std::vector<IntVector> L, VerifyMode mode = VerifyMode::Exact);

/// (R, D + d0, L + s).
CompatiblePair translate_pair(const CompatiblePair& P, const IntVector& s, const IntVector& d0);

/// Replaces D and L by congruent sets: D2[i] = D[i] mod R Z^n, L2[i] = L[i] mod R^t Z^n.
/// CongruenceViolation otherwise.
CompatiblePair reduce_pair_mod(const CompatiblePair& P, const DigitSet& D2, const std::vector<IntVector>& L2);

/// Product of pairs over levels 1..K: matrix R_K...R_1, digits
/// D_K + R_K D_{K-1} + ... + R_K...R_2 D_1, labels L_1 + R_1^t L_2 + ... + R_1^t...R_{K-1}^t L_K.
CompatiblePair tower_pair(std::span<const CompatiblePair> pairs, VerifyMode mode = VerifyMode::Exact);

/// Digit tower alone (same ordering convention as tower_pair).
DigitSet digit_tower(std::span<const IntMatrix> R, std::span<const DigitSet> D);

/// Canonical representative of v mod M Z^n, in M [0,1)^n.
IntVector reduce_mod_lattice(const IntMatrix& M, const IntVector& v);
/// Representative of v mod M Z^n in M (-1/2, 1/2]^n.
IntVector reduce_centered(const IntMatrix& M, const IntVector& v);
bool distinct_mod_lattice(const IntMatrix& M, const std::vector<IntVector>& vs);
bool congruent_mod_lattice(const IntMatrix& M, const IntVector& a, const IntVector& b);

}  // namespace moran

#pragma once

// Eventually periodic Moran systems: a finite preamble of levels followed by a
// cycle repeated forever. Levels are 1-based, as in mu = d_{R_1^-1 D_1} * d_{(R_2 R_1)^-1 D_2} * ...

#include <optional>
#include <string>
#include <vector>

#include "moran/exact.hpp"
#include "moran/mask.hpp"

namespace moran {

struct Level {
    IntMatrix R;
    DigitSet D;
    ZeroStructure Z;
};

/// Builds a level. When `directions` is empty the zero structure is computed
/// with find_zero_directions (if #D == m and m is prime); supplied directions
/// are canonicalized and kept as given, the validator checks them.
Level make_level(IntMatrix R, DigitSet D, long m, const std::vector<IntVector>& directions = {});

struct Params {
    Rational r;      // contraction bound, sup ||R_k^{-1}|| <= r < 1
    Rational delta;  // (0, 1/4)
    Rational beta;   // (0, 1/4)
    Rational c = 1;  // norm-equivalence constant
};

struct Diagnostic {
    std::string code;  // dimension | prime | digit-count | expansion | contraction | parameters | zero-set-model | bounded-growth
    std::string message;
    std::optional<std::size_t> level;
};

std::string format(const Diagnostic& d);

class MoranSystem {
public:
    /// Throws DimensionMismatch when a level does not live in dimension n and
    /// SizeMismatch when the cycle is empty. Everything else is reported by validate().
    MoranSystem(std::size_t n, long m, std::vector<Level> preamble, std::vector<Level> cycle, Params params);

    /// Fills unset r/delta/beta with defaults: delta = 1/8, beta = 1/(8m) and r the
    /// largest certified bound on ||R_k^{-1}|| over all levels.
    static MoranSystem with_default_params(std::size_t n, long m, std::vector<Level> preamble, std::vector<Level> cycle,
                                           std::optional<Rational> r = std::nullopt,
                                           std::optional<Rational> delta = std::nullopt,
                                           std::optional<Rational> beta = std::nullopt, Rational c = 1);

    std::size_t dimension() const noexcept { return n_; }
    long prime() const noexcept { return m_; }
    const std::vector<Level>& preamble() const noexcept { return preamble_; }
    const std::vector<Level>& cycle() const noexcept { return cycle_; }
    const Params& params() const noexcept { return params_; }

    /// Level k >= 1, cycle-resolved.
    const Level& level(std::size_t k) const;

    /// Every distinct level k >= 2 once: 2 .. max(P,1) + C.
    std::vector<std::size_t> tail_levels() const;
    /// Every distinct level k >= 1 once: 1 .. P + C.
    std::vector<std::size_t> distinct_levels() const;

    /// Largest Euclidean digit norm over all levels.
    double max_digit_norm() const;
    /// Largest digit-set diameter over all levels.
    double max_digit_diameter() const;

    std::vector<Diagnostic> validate() const;
    /// Throws HypothesisViolation listing every diagnostic.
    void require_valid() const;

    /// Copy with level 1 replaced (used by normalization).
    MoranSystem with_first_level(Level first, Params params) const;

private:
    std::size_t n_;
    long m_;
    std::vector<Level> preamble_;
    std::vector<Level> cycle_;
    Params params_;
};

/// Rational upper bound on ||R^{-1}||: exact for diagonal R, otherwise the
/// certified floating bound converted exactly.
Rational inverse_norm_bound(const IntMatrix& R);

}  // namespace moran

#pragma once

// Mask polynomials m_D(x) = (1/#D) sum_d exp(2 pi i <x, d>) and the coset-line
// zero structure Z(m_D) = U_j (j nu / m + Z^n) of model-class digit sets.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "moran/exact.hpp"

namespace moran {

class DigitSet {
public:
    DigitSet() = default;
    /// Throws SizeMismatch for fewer than two digits, DimensionMismatch for ragged
    /// vectors and ModelViolation for repeated digits.
    explicit DigitSet(std::vector<IntVector> digits);
    static DigitSet of(std::initializer_list<std::initializer_list<long>> digits);

    std::size_t size() const noexcept { return digits_.size(); }
    std::size_t dimension() const noexcept { return digits_.empty() ? 0 : digits_.front().size(); }
    const std::vector<IntVector>& digits() const noexcept { return digits_; }
    const IntVector& operator[](std::size_t i) const { return digits_[i]; }
    auto begin() const noexcept { return digits_.begin(); }
    auto end() const noexcept { return digits_.end(); }

    /// Largest Euclidean digit norm.
    double max_norm() const;
    /// Largest Euclidean distance between two digits.
    double diameter() const;

    friend bool operator==(const DigitSet&, const DigitSet&) = default;

private:
    std::vector<IntVector> digits_;
};

struct ZeroDirection {
    IntVector nu;                  // entries in [0, m-1], first nonzero entry 1
    bool model_compliant = false;  // every entry in [1, m-1]
    friend bool operator==(const ZeroDirection&, const ZeroDirection&) = default;
};

struct ZeroStructure {
    std::vector<ZeroDirection> directions;

    std::size_t size() const noexcept { return directions.size(); }
    bool empty() const noexcept { return directions.empty(); }
    /// Index of the direction whose scalar class contains v (mod m), if any.
    std::optional<std::size_t> index_of(const IntVector& v, long m) const;
};

bool is_prime(long m);

/// Canonical representative of the scalar class of v mod m: entries in
/// [0, m-1] with first nonzero entry 1. Returns the zero vector when v == 0 mod m.
IntVector canonical_direction(const IntVector& v, long m);

/// Floating path. Throws DimensionMismatch.
std::complex<double> mask_eval(const DigitSet& D, std::span<const double> xi);
/// Phases are reduced mod 1 exactly before conversion, so integer shifts of xi
/// give bit-identical results.
std::complex<double> mask_eval(const DigitSet& D, const RationalVector& xi);
/// Exact zero test m_D(xi) == 0.
bool mask_vanishes(const DigitSet& D, const RationalVector& xi);

/// True iff {<d, nu> mod m : d in D} = {0, ..., m-1}. ModelViolation when #D != m
/// or m is not prime.
bool residue_vanishing_test(const DigitSet& D, const IntVector& nu, long m);

/// All canonical nu with the residue property. ModelViolation as above.
ZeroStructure find_zero_directions(const DigitSet& D, long m);

struct ExactnessReport {
    bool pass = true;
    double min_modulus = 1.0;                          // outside the excluded neighbourhoods
    std::vector<std::vector<double>> suspected_zeros;  // grid points with |m_D| < tol
    std::size_t samples = 0;
    std::size_t excluded = 0;
};

/// Sampling falsifier for the claim that Z covers every zero of m_D on [0,1)^n,
/// with m = #D. Grid points within `tol` (Euclidean, mod Z^n) of a claimed coset
/// are skipped. ParameterError when grid < 8.
ExactnessReport verify_zero_exactness(const DigitSet& D, const ZeroStructure& Z, std::size_t grid, double tol);

}  // namespace moran

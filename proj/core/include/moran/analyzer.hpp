#pragma once

// Fourier-side checks: truncated products for mu^, exact zero-set membership,
// orthogonality of finite sets and sampled Q-functions
//   Q(xi) = sum_{lambda} |mu^(xi + lambda)|^2.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "moran/exact.hpp"
#include "moran/spectrum.hpp"
#include "moran/system.hpp"

namespace moran {

struct TruncatedTransform {
    std::size_t level = 0;
    std::complex<double> value;
    /// |mu^(xi) - value| <= tail_bound.
    double tail_bound = 0.0;
    /// Every omitted factor provably has modulus >= 1/2 (the bound is then tight
    /// to first order); otherwise the value is an uncertified partial product.
    bool certified = false;
    bool exact_zero = false;
    /// Bound on |value|^2 - |mu^(xi)|^2 (>= 0): the Q-function truncation error of this term.
    double q_tail = 0.0;
};

/// Exact description of the first N factors: factor k is
/// (1/m) sum_d exp(2 pi i <xi, W_k d / q_k>) with W_k / q_k = (R_k ... R_1)^{-1}.
class FactorPlan {
public:
    FactorPlan(const MoranSystem& system, std::size_t N);

    std::size_t depth() const noexcept { return N_; }
    std::size_t dimension() const noexcept { return n_; }
    long digits_per_level() const noexcept { return m_; }

    std::complex<double> evaluate(std::span<const double> xi) const;
    TruncatedTransform truncated(std::span<const double> xi) const;
    /// Factors for xi rational: exact zero detection, value from exactly reduced phases.
    TruncatedTransform truncated(const RationalVector& xi) const;

    /// exp(2 pi i <lambda, w_{k,d}>) for every (k, d), k-major, for integer lambda.
    void lattice_phases(const IntVector& lambda, std::vector<std::complex<double>>& out) const;
    /// exp(2 pi i <x, w_{k,d}>), same layout.
    void point_phases(std::span<const double> x, std::vector<std::complex<double>>& out) const;
    /// (R_N ... R_1)^{-t} as doubles, row-major: eta_N = P xi.
    const std::vector<double>& final_map() const noexcept { return final_map_; }

    /// Tail quantities for a point whose N-th iterate eta_N has Euclidean norm `eta_norm`.
    void fill_tail(TruncatedTransform& t, double eta_norm) const;

private:
    std::size_t N_, n_;
    long m_;
    double s_, t_, r_, c_;
    std::vector<Integer> q_;                       // per level
    std::vector<std::vector<IntVector>> numer_;    // [k][d] integer numerators
    std::vector<std::vector<std::vector<double>>> w_;  // [k][d] floating w_{k,d}
    std::vector<bool> small_;                      // q_k and numerators fit in 62 bits
    std::vector<std::vector<std::vector<std::int64_t>>> numer64_;
    std::vector<double> final_map_;
};

TruncatedTransform muhat_truncated(const MoranSystem& system, std::span<const double> xi, std::size_t N);

/// First level k whose mask polynomial vanishes at (R_1^t ... R_k^t)^{-1} xi through
/// the coset structure; none for xi = 0 or once the iterate has Euclidean norm < 1/m.
/// CapExceeded after `max_levels` iterations.
std::optional<std::size_t> in_zero_set(const MoranSystem& system, const RationalVector& xi,
                                       std::size_t max_levels = 100000);
std::optional<std::size_t> in_zero_set(const MoranSystem& system, const IntVector& xi);

enum class ReportKind { Orthogonality, Completeness, Exactness };

struct Witness {
    std::vector<IntVector> vectors;  // e.g. (lambda_i, lambda_j)
    std::vector<double> point;       // e.g. a grid point
    std::string note;
};

struct VerificationReport {
    ReportKind kind = ReportKind::Orthogonality;
    bool pass = true;
    std::vector<Witness> witnesses;
    std::map<std::string, double> margins;

    void add(Witness w) {
        witnesses.push_back(std::move(w));
        pass = false;
    }
};

/// Every nonzero difference of distinct elements must lie in Z(mu^).
/// Witnesses are (lambda_i, lambda_j) with j < i in input order.
VerificationReport verify_orthogonality(const MoranSystem& system, const std::vector<IntVector>& Lambda,
                                        std::size_t max_witnesses = 16);

struct QScanOptions {
    std::size_t grid = 8;            // points per axis on [0,1)^n
    std::size_t random_points = 16;  // extra uniform points
    std::uint64_t seed = 0x5eed;
    double bessel_tolerance = 1e-9;
};

struct QScanResult {
    VerificationReport report;
    std::size_t depth = 0;
    std::vector<std::vector<double>> points;
    /// q_hat[p][k]: truncated Q at point p over levels[k].
    std::vector<std::vector<double>> q_hat;
    std::vector<double> max_gap;          // per level: max_p |1 - q_hat|
    double certified_tail = 0.0;          // max_p sum_lambda q_tail over the largest level
    bool tail_regime_certified = true;    // every term had certified tail flags
    bool monotone = true;
    bool bessel = true;
};

/// Pre: levels nested (each contained in the next); N >= 1.
QScanResult q_function_scan(const MoranSystem& system, const std::vector<SpectrumLevel>& levels, std::size_t N,
                            const QScanOptions& options = {});

/// sum_{lambda in Lambda} |mu^_N(xi + lambda)|^2 with compensated summation.
double q_value(const FactorPlan& plan, const std::vector<IntVector>& Lambda, std::span<const double> xi);

}  // namespace moran

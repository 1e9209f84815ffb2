#include <gtest/gtest.h>

#include <cmath>

#include "moran/admissibility.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace moran;

namespace {

// Euclidean distance from x to the union of the cosets j nu / m + Z^n, j = 1..m-1.
double coset_distance(const std::vector<double>& x, const std::vector<IntVector>& dirs, long m) {
    double best = INFINITY;
    for (const auto& nu : dirs)
        for (long j = 1; j < m; ++j) {
            double s = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double off = std::fmod(j * nu[i].get_d(), static_cast<double>(m)) / m;
                double t = x[i] - off;
                t -= std::round(t);
                s += t * t;
            }
            best = std::min(best, std::sqrt(s));
        }
    return best;
}

}  // namespace

TEST(Admissibility, ScaledSierpinskiCertified) {
    auto S = fixtures::sierpinski(9);
    ASSERT_EQ(S.params().beta, Rational(1, 24));
    auto res = admissibility_scan(S);
    EXPECT_EQ(res.outcome, ScanOutcome::Certified);
    EXPECT_TRUE(res.unconditional);
    EXPECT_EQ(res.method, "diagonal-levels");
    EXPECT_GT(res.min_margin, 0.0);
}

TEST(Admissibility, DiagonalExampleCertified) {
    auto res = admissibility_scan(fixtures::diagonal_example(10, 5));
    EXPECT_EQ(res.outcome, ScanOutcome::Certified);
    EXPECT_EQ(res.method, "diagonal-levels");
}

TEST(Admissibility, TriangularSlab) {
    auto res = admissibility_scan(fixtures::triangular_example(3, 6));
    EXPECT_EQ(res.outcome, ScanOutcome::Certified);
    EXPECT_TRUE(res.unconditional);
    EXPECT_EQ(res.method, "slab");
}

TEST(Admissibility, RejectsDegenerateParameters) {
    auto S = MoranSystem::with_default_params(2, 3, {}, {fixtures::level(fixtures::diag(3, 3), fixtures::sierpinski_digits(), 3)},
                                              std::nullopt, Rational(0), Rational(0));
    EXPECT_THROW(admissibility_scan(S), ParameterError);
    auto T = MoranSystem::with_default_params(2, 3, {}, {fixtures::level(fixtures::diag(3, 3), fixtures::sierpinski_digits(), 3)},
                                              std::nullopt, Rational(1, 8), Rational(1, 4));
    EXPECT_THROW(admissibility_scan(T), ParameterError);
}

TEST(Admissibility, IdentityProductViolates) {
    // E = [-5/8, 5/8]^2 contains the coset point (1/3, -1/3).
    auto res = check_product(IntMatrix::identity(2), {make_int_vector({1, 2})}, 3, Rational(1, 8), Rational(1, 24));
    EXPECT_EQ(res.outcome, ScanOutcome::Violation);
    ASSERT_TRUE(res.witness.has_value());
    EXPECT_LT(res.witness->distance, 1.0 / 24);
}

TEST(Admissibility, PointCap) {
    auto res = check_product(IntMatrix::identity(2), {make_int_vector({1, 2})}, 3, Rational(1, 8), Rational(1, 24), 2);
    EXPECT_EQ(res.outcome, ScanOutcome::Inconclusive);
    EXPECT_FALSE(res.caveat.empty());
}

TEST(Admissibility, ToString) {
    EXPECT_EQ(to_string(ScanOutcome::Certified), "certified");
    EXPECT_EQ(to_string(ScanOutcome::Violation), "violation");
    EXPECT_EQ(to_string(ScanOutcome::Inconclusive), "inconclusive");
}

// A certified product must keep 10^4 resampled points of E at distance >= beta;
// a violation witness must really be close.
TEST(AdmissibilityProperty, SoundUnderResampling) {
    oracle::Rng rng(1212);
    const std::vector<IntVector> dirs{make_int_vector({1, 2})};
    const long m = 3;
    const Rational delta(1, 8), beta(1, 24);
    const double h = 0.5 + 1.0 / 8;
    std::size_t certified = 0, violations = 0, samples = 0;
    for (int t = 0; t < 400 && (samples < 10000 || violations == 0); ++t) {
        // Small entries give small products and so the occasional violation.
        auto a = t % 2 ? rng.int_matrix(2, -9, 9) : rng.int_matrix(2, -2, 2);
        IntMatrix A = oracle::to_matrix(a);
        auto res = check_product(A, dirs, m, delta, beta);
        RationalMatrix inv = rational_inverse(A);
        if (res.outcome == ScanOutcome::Certified) {
            ++certified;
            for (int s = 0; s < 1250; ++s, ++samples) {
                std::vector<double> y{rng.real(-h, h), rng.real(-h, h)};
                std::vector<double> x(2, 0.0);
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) x[i] += inv(i, j).get_d() * y[j];
                ASSERT_GE(coset_distance(x, dirs, m), 1.0 / 24 - 1e-12) << "case " << t;
            }
        } else if (res.outcome == ScanOutcome::Violation) {
            ++violations;
            ASSERT_TRUE(res.witness.has_value());
            const auto& w = *res.witness;
            double d2 = 0;
            for (std::size_t i = 0; i < 2; ++i) d2 += std::pow(Rational(w.zero_point[i] - w.image_point[i]).get_d(), 2);
            EXPECT_LT(std::sqrt(d2), 1.0 / 24 + 1e-12);
            // The image point lies in E: A p in [-h, h]^2.
            RationalVector Ap(2);
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) Ap[i] += A(i, j) * w.image_point[j];
            for (const auto& v : Ap) EXPECT_LE(std::abs(v.get_d()), h + 1e-12);
        }
    }
    EXPECT_GE(samples, 10000u);
    EXPECT_GT(certified, 0u);
    EXPECT_GT(violations, 0u);
}

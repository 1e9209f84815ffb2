#include <gtest/gtest.h>

#include <cmath>

#include "moran/mask.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace moran;

namespace {

RationalVector rv(std::initializer_list<Rational> xs) { return RationalVector(xs); }

std::set<std::vector<long long>> as_set(const ZeroStructure& Z) {
    std::set<std::vector<long long>> s;
    for (const auto& z : Z.directions) {
        std::vector<long long> v;
        for (const auto& x : z.nu) v.push_back(x.get_si());
        s.insert(v);
    }
    return s;
}

}  // namespace

TEST(DigitSet, RejectsBadInput) {
    EXPECT_THROW(DigitSet::of({{0, 0}}), SizeMismatch);
    EXPECT_THROW(DigitSet::of({{0, 0}, {1}}), DimensionMismatch);
    EXPECT_THROW(DigitSet::of({{0, 0}, {0, 0}}), ModelViolation);
}

TEST(Mask, SierpinskiZero) {
    auto D = fixtures::sierpinski_digits();
    EXPECT_TRUE(mask_vanishes(D, rv({Rational(1, 3), Rational(2, 3)})));
    EXPECT_LT(std::abs(mask_eval(D, rv({Rational(1, 3), Rational(2, 3)}))), 1e-15);
}

TEST(Mask, OneAtOrigin) {
    for (const auto& D : {fixtures::sierpinski_digits(), fixtures::B1(), fixtures::B3()}) {
        auto v = mask_eval(D, rv({Rational(0), Rational(0)}));
        EXPECT_DOUBLE_EQ(v.real(), 1.0);
        EXPECT_DOUBLE_EQ(v.imag(), 0.0);
    }
}

TEST(Mask, OneDimensionalHalf) {
    auto D = DigitSet::of({{0}, {1}, {2}});
    auto v = mask_eval(D, rv({Rational(1, 2)}));
    EXPECT_NEAR(v.real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(Mask, DimensionMismatch) {
    std::vector<double> xi{0.1};
    EXPECT_THROW(mask_eval(fixtures::sierpinski_digits(), std::span<const double>(xi)), DimensionMismatch);
}

TEST(MaskProperty, PeriodicityAndBound) {
    oracle::Rng rng(11);
    const std::vector<DigitSet> sets{fixtures::sierpinski_digits(), fixtures::B1(), fixtures::B2(), fixtures::B3()};
    for (int t = 0; t < 200; ++t) {
        const auto& D = sets[t % sets.size()];
        RationalVector xi{Rational(rng.uniform(-50, 50), rng.uniform(1, 30)), Rational(rng.uniform(-50, 50), rng.uniform(1, 30))};
        RationalVector shifted = xi;
        shifted[0] += rng.uniform(-5, 5);
        shifted[1] += rng.uniform(-5, 5);
        for (auto& q : xi) q.canonicalize();
        for (auto& q : shifted) q.canonicalize();
        EXPECT_EQ(mask_eval(D, xi), mask_eval(D, shifted));
        std::vector<double> a{xi[0].get_d(), xi[1].get_d()}, b{shifted[0].get_d(), shifted[1].get_d()};
        EXPECT_LT(std::abs(mask_eval(D, std::span<const double>(a)) - mask_eval(D, std::span<const double>(b))), 1e-12);
        EXPECT_LE(std::abs(mask_eval(D, xi)), 1.0 + 1e-15);
        EXPECT_EQ(mask_vanishes(D, xi), mask_vanishes(D, shifted));
    }
}

TEST(Residue, Examples) {
    EXPECT_TRUE(residue_vanishing_test(fixtures::sierpinski_digits(), make_int_vector({1, 2}), 3));
    EXPECT_TRUE(residue_vanishing_test(fixtures::B3(), make_int_vector({1, 1}), 5));
    EXPECT_FALSE(residue_vanishing_test(fixtures::B1(), make_int_vector({1, 1}), 5));
    EXPECT_THROW(residue_vanishing_test(fixtures::B1(), make_int_vector({1, 1}), 3), ModelViolation);
    EXPECT_THROW(residue_vanishing_test(DigitSet::of({{0}, {1}, {2}, {3}}), make_int_vector({1}), 4), ModelViolation);
}

TEST(ResidueProperty, ScalarClosure) {
    const std::vector<std::pair<DigitSet, long>> sets{
        {fixtures::sierpinski_digits(), 3}, {fixtures::B1(), 5}, {fixtures::B2(), 5}, {fixtures::B3(), 5}};
    for (const auto& [D, m] : sets) {
        for (long a = 0; a < m; ++a)
            for (long b = 0; b < m; ++b) {
                if (a == 0 && b == 0) continue;
                const bool base = residue_vanishing_test(D, make_int_vector({a, b}), m);
                for (long j = 1; j < m; ++j)
                    EXPECT_EQ(residue_vanishing_test(D, make_int_vector({j * a, j * b}), m), base);
            }
    }
}

TEST(ZeroDirections, PaperExamples) {
    EXPECT_EQ(as_set(find_zero_directions(DigitSet::of({{0}, {1}, {2}}), 3)), (std::set<std::vector<long long>>{{1}}));
    EXPECT_EQ(as_set(find_zero_directions(fixtures::sierpinski_digits(), 3)),
              (std::set<std::vector<long long>>{{1, 2}}));
    EXPECT_EQ(as_set(find_zero_directions(fixtures::B1(), 5)), (std::set<std::vector<long long>>{{1, 2}, {1, 3}}));
    EXPECT_EQ(as_set(find_zero_directions(fixtures::B2(), 5)), (std::set<std::vector<long long>>{{1, 2}, {1, 3}}));
    EXPECT_EQ(as_set(find_zero_directions(fixtures::B3(), 5)), (std::set<std::vector<long long>>{{1, 1}}));
}

TEST(ZeroDirections, ComplianceFlag) {
    // <d, (1,0)> = 0, 1, 2: the only direction has a zero entry.
    auto Z = find_zero_directions(DigitSet::of({{0, 0}, {1, 0}, {2, 1}}), 3);
    ASSERT_EQ(Z.size(), 1u);
    EXPECT_EQ(Z.directions[0].nu, make_int_vector({1, 0}));
    EXPECT_FALSE(Z.directions[0].model_compliant);
    EXPECT_TRUE(find_zero_directions(fixtures::B3(), 5).directions[0].model_compliant);
}

TEST(ZeroDirections, Canonical) {
    EXPECT_EQ(canonical_direction(make_int_vector({2, 4}), 5), make_int_vector({1, 2}));
    EXPECT_EQ(canonical_direction(make_int_vector({0, 3}), 5), make_int_vector({0, 1}));
    EXPECT_EQ(canonical_direction(make_int_vector({-1, 1}), 3), make_int_vector({1, 2}));
    EXPECT_EQ(canonical_direction(make_int_vector({3, 6}), 3), make_int_vector({0, 0}));
    ZeroStructure Z = find_zero_directions(fixtures::B1(), 5);
    EXPECT_TRUE(Z.index_of(make_int_vector({2, 4}), 5).has_value());
    EXPECT_FALSE(Z.index_of(make_int_vector({1, 1}), 5).has_value());
}

TEST(ZeroDirectionsProperty, FloatingConsistency) {
    const std::vector<std::pair<DigitSet, long>> sets{
        {fixtures::sierpinski_digits(), 3}, {fixtures::B1(), 5}, {fixtures::B2(), 5}, {fixtures::B3(), 5},
        {fixtures::T1(), 3}, {fixtures::T2(), 3}};
    for (const auto& [D, m] : sets) {
        auto Z = find_zero_directions(D, m);
        EXPECT_EQ(as_set(Z), oracle::brute_zero_directions(D, m));
        for (const auto& z : Z.directions)
            for (long j = 1; j < m; ++j) {
                std::vector<double> xi{Integer(j * z.nu[0]).get_d() / m, Integer(j * z.nu[1]).get_d() / m};
                EXPECT_LT(std::abs(mask_eval(D, std::span<const double>(xi))), 1e-12);
            }
    }
}

// Every 3-element D in {0..4}^2, m = 3: residue directions agree with brute-force
// evaluation at the points (a/3, b/3).
TEST(ZeroDirectionsProperty, ExhaustiveSmallDigitSets) {
    std::vector<std::vector<long>> pts;
    for (long x = 0; x < 5; ++x)
        for (long y = 0; y < 5; ++y) pts.push_back({x, y});
    std::size_t count = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            for (std::size_t c = b + 1; c < pts.size(); ++c) {
                std::vector<IntVector> ds;
                for (auto i : {a, b, c}) ds.push_back(make_int_vector({pts[i][0], pts[i][1]}));
                DigitSet D(ds);
                ASSERT_EQ(as_set(find_zero_directions(D, 3)), oracle::brute_zero_directions(D, 3));
                ++count;
            }
    EXPECT_EQ(count, 2300u);
}

TEST(Exactness, SampledChecks) {
    auto S = fixtures::sierpinski_digits();
    auto rep = verify_zero_exactness(S, find_zero_directions(S, 3), 64, 1e-3);
    EXPECT_TRUE(rep.pass);
    EXPECT_TRUE(rep.suspected_zeros.empty());
    EXPECT_GT(rep.min_modulus, 0.0);

    auto B2 = fixtures::B2();
    EXPECT_TRUE(verify_zero_exactness(B2, find_zero_directions(B2, 5), 64, 1e-3).pass);

    auto two = DigitSet::of({{0}, {2}});
    auto bad = verify_zero_exactness(two, ZeroStructure{}, 64, 1e-3);
    EXPECT_FALSE(bad.pass);
    bool near_quarter = false;
    for (const auto& z : bad.suspected_zeros) near_quarter = near_quarter || std::abs(z[0] - 0.25) < 1e-9;
    EXPECT_TRUE(near_quarter);

    EXPECT_THROW(verify_zero_exactness(S, ZeroStructure{}, 4, 1e-3), ParameterError);
}

TEST(Exactness, MissingDirectionIsCaught) {
    // B1 has two directions; claiming only one leaves the other family of zeros exposed.
    // The grid is a multiple of 5 so the exposed coset points are sampled exactly.
    auto Z = find_zero_directions(fixtures::B1(), 5);
    Z.directions.pop_back();
    EXPECT_FALSE(verify_zero_exactness(fixtures::B1(), Z, 80, 1e-3).pass);
}

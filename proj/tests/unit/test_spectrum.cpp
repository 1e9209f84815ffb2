#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "moran/spectrum.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace moran;

namespace {

std::set<std::vector<long>> to_set(const std::vector<IntVector>& vs) {
    std::set<std::vector<long>> s;
    for (const auto& v : vs) {
        std::vector<long> w;
        for (const auto& x : v) w.push_back(x.get_si());
        s.insert(w);
    }
    return s;
}

// Block sizes straight from the two defining inequalities, in long double.
std::pair<std::size_t, std::size_t> oracle_block_size(std::size_t n, long double r, long double c, long double s,
                                                      long double delta) {
    const long double pi = std::numbers::pi_v<long double>;
    std::size_t M = 1;
    while (2 * pi * s * (3 * std::sqrt(static_cast<long double>(n)) / 2) * c * c * std::pow(r, M) > 0.5L) ++M;
    std::size_t K = M;
    while (c * c * (std::sqrt(static_cast<long double>(n)) / 2) * std::pow(r, K) / (1 - std::pow(r, K)) > delta / 4) ++K;
    return {M, K};
}

}  // namespace

TEST(Normalize, IdentityWhenAlreadyScalar) {
    auto N = normalize_first(fixtures::sierpinski());
    EXPECT_TRUE(N.transform.identity);
    EXPECT_EQ(N.system.params().r, Rational(1, 3));
}

TEST(Normalize, ScaledFirstLevel) {
    auto N = normalize_first(fixtures::sierpinski(9));
    EXPECT_FALSE(N.transform.identity);
    EXPECT_EQ(N.system.level(1).R, fixtures::diag(3, 3));
    EXPECT_EQ(N.system.level(2).R, fixtures::diag(9, 9));
    EXPECT_EQ(N.transform.pullback, (RationalMatrix{{Rational(3), Rational(0)}, {Rational(0), Rational(3)}}));
    EXPECT_EQ(N.transform.forward, (RationalMatrix{{Rational(1, 3), Rational(0)}, {Rational(0), Rational(1, 3)}}));
    EXPECT_EQ(N.system.params().r, Rational(1, 3));
    EXPECT_TRUE(N.system.validate().empty());
}

TEST(Normalize, TriangularFirstLevel) {
    auto N = normalize_first(fixtures::triangular_example(3, 6));
    EXPECT_EQ(N.transform.pullback, (RationalMatrix{{Rational(1), Rational(0)}, {Rational(1), Rational(1)}}));
    EXPECT_EQ(N.transform.forward, (RationalMatrix{{Rational(1), Rational(0)}, {Rational(-1), Rational(1)}}));
    EXPECT_EQ(N.transform.pullback * N.transform.forward, RationalMatrix::identity(2));
}

TEST(Spectrum, CosetLabels) {
    EXPECT_EQ(to_set(coset_labels(make_int_vector({1, 2}), 3)), (std::set<std::vector<long>>{{0, 0}, {1, -1}, {-1, 1}}));
    EXPECT_EQ(to_set(coset_labels(make_int_vector({1, 1}), 5)),
              (std::set<std::vector<long>>{{0, 0}, {1, 1}, {2, 2}, {-2, -2}, {-1, -1}}));
    EXPECT_EQ(coset_labels(make_int_vector({1, 2}), 3).front(), make_int_vector({0, 0}));
}

TEST(Spectrum, AdmissibleDirection) {
    EXPECT_EQ(find_admissible_direction(fixtures::diagonal_example(10, 5), 2), std::optional<std::size_t>(0));
    EXPECT_FALSE(find_admissible_direction(fixtures::diagonal_example(6, 5), 2).has_value());
    EXPECT_EQ(find_admissible_direction(fixtures::sierpinski(), 1), std::optional<std::size_t>(0));
    // [[3,3],[0,6]] with nu = (1,2): nu^t R = (3, 15).
    EXPECT_EQ(find_admissible_direction(fixtures::triangular_example(3, 6), 2), std::optional<std::size_t>(0));
    // [[4,4],[0,3]]: nu^t R = (4, 10).
    EXPECT_FALSE(find_admissible_direction(fixtures::triangular_example(4, 3), 2).has_value());
}

TEST(Spectrum, BlockSizeSierpinski) {
    auto S = fixtures::sierpinski();
    auto [M, K] = oracle_block_size(2, 1.0L / 3, 1, 1, 1.0L / 8);
    auto got = choose_block_size(S);
    EXPECT_EQ(got.M, M);
    EXPECT_EQ(got.K, K);
    // Frozen oracle values.
    EXPECT_EQ(got.M, 3u);
    EXPECT_EQ(got.K, 3u);
}

TEST(Spectrum, BlockSizeMatchesOracle) {
    for (auto S : {fixtures::diagonal_example(10, 5), fixtures::sierpinski(9)}) {
        auto N = normalize_first(S).system;
        auto [M, K] = oracle_block_size(N.dimension(), N.params().r.get_d(), N.params().c.get_d(),
                                        N.max_digit_norm(), N.params().delta.get_d());
        auto got = choose_block_size(N);
        EXPECT_EQ(got.M, M);
        EXPECT_EQ(got.K, K);
        EXPECT_LE(block_tail_bound(N.dimension(), N.params().r.get_d(), 1.0, got.K), N.params().delta.get_d() / 4);
    }
}

TEST(Spectrum, BlockSizeNeedsAdmissibleDirection) {
    try {
        choose_block_size(fixtures::diagonal_example(6, 5));
        FAIL() << "expected NoAdmissibleDirection";
    } catch (const NoAdmissibleDirection& e) {
        EXPECT_EQ(e.level(), 2u);
    }
}

TEST(Spectrum, BlocksAreCompatiblePairs) {
    auto S = fixtures::sierpinski();
    auto B = build_blocks(S, 2, 3);
    EXPECT_EQ(B.guaranteed_K, 3u);
    ASSERT_EQ(B.blocks.size(), 3u);
    for (const auto& b : B.blocks) {
        EXPECT_EQ(b.R, fixtures::diag(9, 9));
        EXPECT_EQ(b.D.size(), 9u);
        EXPECT_EQ(b.L.size(), 9u);
        EXPECT_TRUE(is_compatible_pair(b.R, b.D, b.L).ok);
        EXPECT_EQ(to_set(b.L).count({0, 0}), 1u);
        EXPECT_FALSE(b.literal_index_reading);
        // Reduced into R~^t (-1/2, 1/2]^2.
        for (const auto& l : b.L)
            for (const auto& x : l) {
                EXPECT_GT(Rational(x, 9), Rational(-1, 2));
                EXPECT_LE(Rational(x, 9), Rational(1, 2));
            }
    }
    EXPECT_THROW(build_blocks(S, 0, 1), ParameterError);
}

TEST(Spectrum, DiagonalExampleBlocks) {
    auto B = build_blocks(fixtures::diagonal_example(10, 5), 1, 3);
    ASSERT_EQ(B.blocks.size(), 3u);
    EXPECT_EQ(B.blocks[1].R, fixtures::diag(10, 5));
    for (const auto& b : B.blocks) EXPECT_TRUE(is_compatible_pair(b.R, b.D, b.L).ok);
    EXPECT_THROW(build_blocks(fixtures::diagonal_example(6, 5), 1, 2), NoAdmissibleDirection);
}

TEST(SpectrumProperty, NestedDistinctAndOrthogonal) {
    const std::vector<std::pair<MoranSystem, std::size_t>> cases{
        {fixtures::sierpinski(), 1}, {fixtures::sierpinski(), 2}, {fixtures::diagonal_example(10, 5), 1},
        {normalize_first(fixtures::triangular_example(3, 6)).system, 1}};
    for (const auto& [S, K] : cases) {
        auto B = build_blocks(S, K, 3);
        std::set<std::vector<long>> prev;
        std::size_t expected = 1;
        for (std::size_t k = 0; k < 3; ++k) {
            expected *= B.blocks[k].L.size();
            if (expected > 20000) break;
            auto level = build_spectrum_level(B, k);
            auto cur = to_set(level.elements);
            EXPECT_EQ(cur.size(), level.elements.size());
            EXPECT_EQ(cur.size(), expected);
            EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
            EXPECT_EQ(cur.count(std::vector<long>(S.dimension(), 0)), 1u);

            // Lambda_k is the label set of the product pair of blocks 0..k.
            std::vector<IntMatrix> Rs;
            std::vector<DigitSet> Ds;
            for (std::size_t j = 0; j <= k; ++j) {
                Rs.push_back(B.blocks[j].R);
                Ds.push_back(B.blocks[j].D);
            }
            IntMatrix R = IntMatrix::identity(S.dimension());
            for (const auto& Rj : Rs) R = Rj * R;
            if (expected <= 729) { EXPECT_TRUE(is_compatible_pair(R, digit_tower(Rs, Ds), level.elements).ok); }
            prev = std::move(cur);
        }
    }
}

// Lambda_{k+1} = Lambda_k + R~_0^t ... R~_k^t L_{k+1}, recomputed here from the blocks.
TEST(SpectrumProperty, RecursiveIdentity) {
    auto B = build_blocks(fixtures::sierpinski(), 1, 4);
    auto prev = build_spectrum_level(B, 0).elements;
    IntMatrix P = IntMatrix::identity(2);
    for (std::size_t k = 0; k + 1 < 4; ++k) {
        P = P * B.blocks[k].R.transposed();
        std::vector<IntVector> expect;
        for (const auto& lam : prev)
            for (const auto& l : B.blocks[k + 1].L) expect.push_back(lam + P * l);
        auto got = build_spectrum_level(B, k + 1).elements;
        EXPECT_EQ(to_set(got), to_set(expect));
        prev = got;
    }
}

TEST(Spectrum, ContainmentFromChosenBlockSize) {
    auto B = build_blocks(fixtures::sierpinski(), 3, 3);
    EXPECT_EQ(B.K, B.guaranteed_K);
    for (std::size_t k = 0; k < 2; ++k) {
        auto level = build_spectrum_level(B, k);
        EXPECT_TRUE(level.containment);
        EXPECT_LE(level.max_scaled_coordinate, Rational(1, 2) + Rational(1, 32));
    }
}

TEST(Spectrum, Caps) {
    auto B = build_blocks(fixtures::sierpinski(), 1, 3);
    EXPECT_THROW(build_spectrum_level(B, 2, 26), CapExceeded);
    EXPECT_NO_THROW(build_spectrum_level(B, 2, 27));
    EXPECT_THROW(build_spectrum_level(B, 3), ParameterError);
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "moran/admissibility.hpp"
#include "moran/analyzer.hpp"
#include "moran/decider.hpp"
#include "moran/mask.hpp"
#include "moran/pairs.hpp"
#include "moran/render.hpp"
#include "moran/spectrum.hpp"
#include "oracles.hpp"
#include "systems.hpp"

using namespace moran;

namespace {

struct Result {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

using Check = std::function<Result()>;

std::set<std::vector<long>> dir_set(const ZeroStructure& Z) {
    std::set<std::vector<long>> s;
    for (const auto& z : Z.directions) {
        std::vector<long> v;
        for (const auto& x : z.nu) v.push_back(x.get_si());
        s.insert(v);
    }
    return s;
}

std::vector<SpectrumLevel> spectrum_levels(const MoranSystem& S, std::size_t K, std::size_t count) {
    auto B = build_blocks(S, K, count);
    std::vector<SpectrumLevel> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(build_spectrum_level(B, k));
    return out;
}

Result zero_structure() {
    Result o;
    using Set = std::set<std::vector<long>>;
    const std::vector<std::tuple<const char*, DigitSet, long, Set>> cases{
        {"{0,1,2}", DigitSet::of({{0}, {1}, {2}}), 3, Set{{1}}},
        {"sierpinski", fixtures::sierpinski_digits(), 3, Set{{1, 2}}},
        {"B1", fixtures::B1(), 5, Set{{1, 2}, {1, 3}}},
        {"B2", fixtures::B2(), 5, Set{{1, 2}, {1, 3}}},
        {"B3", fixtures::B3(), 5, Set{{1, 1}}}};
    for (const auto& [name, D, m, want] : cases)
        if (dir_set(find_zero_directions(D, m)) != want) o.fail(std::string(name) + " directions differ");
    if (o.pass) o.detail = "5 digit sets match";
    return o;
}

Result decisions() {
    Result o;
    if (decide_diagonal(fixtures::diagonal_example(10, 5)).outcome != moran::Outcome::Spectral)
        o.fail("diag[10,5] not spectral");
    auto no = decide_diagonal(fixtures::diagonal_example(6, 5));
    if (no.outcome != moran::Outcome::NotSpectral || no.witness != std::make_pair<std::size_t, std::size_t>(2, 1))
        o.fail("diag[6,5] not rejected at (2,1)");
    auto yes = fixtures::triangular_example(3, 6), bad = fixtures::triangular_example(4, 3);
    if (decide_triangular(yes).outcome != moran::Outcome::Spectral || decide_phi1(yes).outcome != moran::Outcome::Spectral)
        o.fail("triangular example with entries in 3Z not spectral");
    if (decide_triangular(bad).outcome != moran::Outcome::NotSpectral ||
        decide_phi1(bad).outcome != moran::Outcome::NotSpectral)
        o.fail("triangular example with a_2 = 4 not rejected");
    if (o.pass) o.detail = "diagonal 2/2, triangular 4/4 verdicts";
    return o;
}

Result finite_identity() {
    Result o;
    auto S = fixtures::sierpinski();
    const std::size_t K = choose_block_size(S).K;
    auto levels = spectrum_levels(S, K, 3);
    oracle::Rng rng(31);
    double worst = 0.0;
    for (std::size_t l = 0; l < 3; ++l) {
        FactorPlan plan(S, (l + 1) * K);
        for (int t = 0; t < 20; ++t) {
            std::vector<double> xi{rng.real(-10, 10), rng.real(-10, 10)};
            worst = std::max(worst, std::abs(1.0 - q_value(plan, levels[l].elements, xi)));
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "K = %zu, max |1 - sum| = %.3g", K, worst);
    if (worst > 1e-9) o.fail(buf);
    else o.detail = buf;
    return o;
}

Result orthogonality() {
    Result o;
    const std::vector<std::tuple<const char*, MoranSystem, std::size_t>> cases{
        {"sierpinski", fixtures::sierpinski(), 2}, {"diag[10,5]", fixtures::diagonal_example(10, 5), 1}};
    std::string sizes;
    for (const auto& [name, S, K] : cases) {
        auto L2 = spectrum_levels(S, K, 3).back();
        if (L2.elements.size() > 10000) o.fail(std::string(name) + ": level too large");
        auto rep = verify_orthogonality(S, L2.elements);
        if (!rep.pass || !rep.witnesses.empty())
            o.fail(std::string(name) + ": " + (rep.witnesses.empty() ? "failed" : rep.witnesses.front().note));
        sizes += (sizes.empty() ? "" : ", ") + std::string(name) + " #Lambda_2 = " + std::to_string(L2.elements.size());
    }
    if (o.pass) o.detail = sizes + ", no witnesses";
    return o;
}

Result completeness() {
    Result o;
    auto S = fixtures::sierpinski();
    const std::size_t K = choose_block_size(S).K;
    auto levels = spectrum_levels(S, K, 4);
    QScanOptions opt;
    opt.grid = 8;
    auto res = q_function_scan(S, levels, 12, opt);
    const double gap = res.max_gap.back();
    if (gap > 0.02) o.fail("max |1 - Q| = " + std::to_string(gap));
    if (res.certified_tail > 1e-3) o.fail("certified tail " + std::to_string(res.certified_tail));
    if (!res.monotone || !res.bessel) o.fail("monotonicity or Bessel bound broken");
    if (o.pass) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "K = %zu, max |1 - Q| = %.3g, certified tail = %.3g", K, gap, res.certified_tail);
        o.detail = buf;
    }
    return o;
}

// Random (R, {j d}, {j l}) with <R^{-1} d, l> of exact denominator m.
CompatiblePair random_pair(oracle::Rng& rng, long m) {
    while (true) {
        IntMatrix R = oracle::to_matrix(rng.int_matrix(2, -6, 6));
        auto d = make_int_vector({rng.uniform(-4, 4), rng.uniform(-4, 4)});
        auto l = make_int_vector({rng.uniform(-4, 4), rng.uniform(-4, 4)});
        if (is_zero(d)) continue;
        Rational x = dot(rational_inverse(R) * d, l);
        if (x.get_den() != m) continue;
        std::vector<IntVector> D, L;
        for (long j = 0; j < m; ++j) {
            D.push_back(IntVector{Integer(j * d[0]), Integer(j * d[1])});
            L.push_back(IntVector{Integer(j * l[0]), Integer(j * l[1])});
        }
        return make_pair(R, DigitSet(D), L);
    }
}

bool both_modes(const CompatiblePair& P) {
    return is_compatible_pair(P.R, P.D, P.L).ok && is_compatible_pair(P.R, P.D, P.L, VerifyMode::Numeric).ok;
}

Result pair_suite() {
    Result o;
    oracle::Rng rng(41);
    std::size_t disagreements = 0, positives = 0;
    for (int t = 0; t < 200; ++t) {
        const long m = 2 + t % 2;
        IntMatrix R = oracle::to_matrix(rng.int_matrix(2, -6, 6));
        std::vector<IntVector> D, L;
        std::set<std::vector<long>> seen;
        while (static_cast<long>(D.size()) < m) {
            std::vector<long> d{rng.uniform(-4, 4), rng.uniform(-4, 4)};
            if (seen.insert(d).second) D.push_back(make_int_vector({d[0], d[1]}));
        }
        for (long j = 0; j < m; ++j) L.push_back(make_int_vector({rng.uniform(-4, 4), rng.uniform(-4, 4)}));
        const DigitSet Ds(D);
        bool e = is_compatible_pair(R, Ds, L).ok, n = is_compatible_pair(R, Ds, L, VerifyMode::Numeric).ok;
        disagreements += e != n;
        positives += e;
    }
    std::size_t closure_failures = 0;
    for (int t = 0; t < 50; ++t) {
        const long m = 2 + t % 2;
        auto P = random_pair(rng, m);
        // translation and label negation
        auto T = translate_pair(P, make_int_vector({rng.uniform(-9, 9), rng.uniform(-9, 9)}),
                                make_int_vector({rng.uniform(-9, 9), rng.uniform(-9, 9)}));
        CompatiblePair N = P;
        for (auto& l : N.L)
            for (auto& x : l) x = -x;
        // congruent replacements
        std::vector<IntVector> D2, L2;
        const IntMatrix Rt = P.R.transposed();
        for (const auto& d : P.D) D2.push_back(d + P.R * make_int_vector({rng.uniform(-3, 3), rng.uniform(-3, 3)}));
        for (const auto& l : P.L) L2.push_back(l + Rt * make_int_vector({rng.uniform(-3, 3), rng.uniform(-3, 3)}));
        auto C = reduce_pair_mod(P, DigitSet(D2), L2);
        // towers of two or three levels
        std::vector<CompatiblePair> levels{P, random_pair(rng, m)};
        if (t % 3 == 0) levels.push_back(random_pair(rng, m));
        auto W = tower_pair(levels);
        for (const auto* Q : {&T, &N, &C, &W})
            if (!both_modes(*Q)) ++closure_failures;
        if (W.status != PairStatus::Exact) ++closure_failures;
    }
    if (disagreements) o.fail(std::to_string(disagreements) + " exact/numeric disagreements");
    if (closure_failures) o.fail(std::to_string(closure_failures) + " closure re-verifications failed");
    if (o.pass)
        o.detail = "200 random pairs agree (" + std::to_string(positives) + " compatible), 50 closure rounds re-verify";
    return o;
}

Result gamma_classes() {
    Result o;
    std::size_t sets = 0;
    for (long a = -5; a <= 5; ++a)
        for (long b = -5; b <= 5; ++b)
            for (long c = -5; c <= 5; ++c)
                for (long d = -5; d <= 5; ++d) {
                    if (std::labs(a * d - b * c) != 1 || a * 11 + b >= c * 11 + d) continue;
                    ++sets;
                    auto D = DigitSet::of({{0, 0}, {a, b}, {c, d}});
                    auto brute = oracle::brute_zero_directions(D, 3);
                    GammaClass want = brute.count({1, 1}) ? GammaClass::Gamma1
                                      : brute.count({1, 2}) ? GammaClass::Gamma2
                                                            : GammaClass::Neither;
                    try {
                        if (classify_gamma(D).cls != want) o.fail("class mismatch at " + std::to_string(sets));
                    } catch (const Error& e) {
                        o.fail(e.what());
                    }
                }
    if (o.pass) o.detail = std::to_string(sets) + " digit sets agree";
    return o;
}

Result admissibility() {
    Result o;
    auto S = fixtures::sierpinski(9);
    auto res = admissibility_scan(S);
    if (res.outcome != ScanOutcome::Certified || !res.unconditional) o.fail("9I not certified: " + res.caveat);
    // Resample E = A^{-1} [-h, h]^2 for products A = (9I)^p, p = 1..4.
    oracle::Rng rng(51);
    const double h = 0.5 + S.params().delta.get_d(), beta = S.params().beta.get_d();
    double closest = INFINITY;
    for (int s = 0; s < 10000; ++s) {
        const double scale = std::pow(9.0, -(1 + s % 4));
        std::vector<double> x{rng.real(-h, h) * scale, rng.real(-h, h) * scale};
        for (long j = 1; j < 3; ++j) {
            double t0 = x[0] - j / 3.0, t1 = x[1] - std::fmod(2.0 * j, 3.0) / 3.0;
            t0 -= std::round(t0);
            t1 -= std::round(t1);
            closest = std::min(closest, std::hypot(t0, t1));
        }
    }
    if (closest < beta) o.fail("resampled point at distance " + std::to_string(closest));
    if (o.pass) o.detail = "certified via " + res.method + ", 10^4 samples, closest " + std::to_string(closest);
    return o;
}

Result rendering() {
    Result o;
    auto S = fixtures::diagonal_example(10, 5);
    std::string detail;
    for (std::size_t N : {1u, 2u}) {
        auto cloud = support_points(S, N);
        for (const auto& p : cloud.points)
            if (p[0] < 0 || p[0] > 1 || p[1] < 0 || p[1] > 1) o.fail("point outside [0,1]^2");
        const std::string img = render_to_string(cloud, ImageFormat::Ppm, 512);
        const std::size_t header = img.find('\n') + 1;
        std::size_t drawn = 0;
        for (std::size_t i = header; i + 2 < img.size(); i += 3)
            if (img[i] != static_cast<char>(255)) ++drawn;
        const double rel = std::abs(static_cast<double>(drawn) - static_cast<double>(cloud.points.size())) /
                           static_cast<double>(cloud.points.size());
        if (rel > 0.05) o.fail("N=" + std::to_string(N) + ": " + std::to_string(drawn) + " pixels for " +
                               std::to_string(cloud.points.size()) + " points");
        detail += (detail.empty() ? "" : ", ") + std::string("N=") + std::to_string(N) + ": " +
                  std::to_string(drawn) + "/" + std::to_string(cloud.points.size());
    }
    if (o.pass) o.detail = "inside [0,1]^2, drawn pixels/points " + detail;
    return o;
}

}  // namespace

int main() {
    // Name, check, runtime budget in seconds.
    const std::vector<std::tuple<const char*, Check, double>> criteria{
        {"zero-structure reproduction", zero_structure, 1},
        {"decision reproduction", decisions, 1},
        {"finite-level completeness identity", finite_identity, 10},
        {"orthogonality exactness", orthogonality, 30},
        {"completeness evidence (Q-function scan)", completeness, 120},
        {"compatible-pair suite", pair_suite, 30},
        {"gamma classification", gamma_classes, 60},
        {"admissibility", admissibility, 5},
        {"rendering", rendering, 10}};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Result o;
        try {
            o = std::get<1>(criteria[i])();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double budget = std::get<2>(criteria[i]);
        if (secs > budget) o.fail(o.detail + " (over the " + std::to_string(static_cast<int>(budget)) + "s budget)");
        std::printf("%s %zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, std::get<0>(criteria[i]), o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}

#include "moran/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

namespace moran {

NormalizedSystem normalize_first(const MoranSystem& system) {
    const std::size_t n = system.dimension();
    const long m = system.prime();
    const Level& first = system.level(1);
    const IntMatrix mI = IntMatrix::scalar(n, Integer(m));

    if (first.R == mI) {
        auto id = RationalMatrix::identity(n);
        return {system, {true, id, id}};
    }

    RationalMatrix R1t = to_rational(first.R.transposed());
    RationalMatrix pullback(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pullback(i, j) = R1t(i, j) / m;
    RationalMatrix forward = rational_inverse(pullback);

    Params p = system.params();
    p.r = std::max(p.r, Rational(1, m));
    Level replaced{mI, first.D, first.Z};
    return {system.with_first_level(std::move(replaced), std::move(p)), {false, pullback, forward}};
}

std::optional<std::size_t> find_admissible_direction(const MoranSystem& system, std::size_t k) {
    const Level& L = system.level(k);
    const Integer m(system.prime());
    const IntMatrix Rt = L.R.transposed();
    for (std::size_t i = 0; i < L.Z.size(); ++i) {
        IntVector row = Rt * L.Z.directions[i].nu;  // (nu^t R)^t
        bool ok = true;
        for (const auto& x : row)
            if (mod(x, m) != 0) {
                ok = false;
                break;
            }
        if (ok) return i;
    }
    return std::nullopt;
}

double block_tail_bound(std::size_t n, double r, double c, std::size_t K) {
    const double rk = std::pow(r, static_cast<double>(K));
    return c * c * (std::sqrt(static_cast<double>(n)) / 2.0) * rk / (1.0 - rk);
}

BlockSize choose_block_size(const MoranSystem& system) {
    for (std::size_t k : system.tail_levels())
        if (!find_admissible_direction(system, k)) throw NoAdmissibleDirection(k);

    const double r = system.params().r.get_d();
    const double c = system.params().c.get_d();
    const double delta = system.params().delta.get_d();
    const double s = system.max_digit_norm();
    const double n = static_cast<double>(system.dimension());
    if (!(r > 0 && r < 1)) throw ParameterError("contraction bound r must lie in (0, 1)");
    if (!(delta > 0)) throw ParameterError("delta must be positive");

    constexpr std::size_t limit = 100000;
    BlockSize out;
    const double lead = 2.0 * std::numbers::pi * s * (3.0 * std::sqrt(n) / 2.0) * c * c;
    out.M = 1;
    while (lead * std::pow(r, static_cast<double>(out.M)) > 0.5) {
        if (++out.M > limit) throw CapExceeded("block size search did not terminate");
    }
    out.K = out.M;
    while (block_tail_bound(system.dimension(), r, c, out.K) > delta / 4.0) {
        if (++out.K > limit) throw CapExceeded("block size search did not terminate");
    }
    return out;
}

std::vector<IntVector> coset_labels(const IntVector& nu, long m) {
    std::vector<IntVector> out;
    const Integer M(m);
    const Rational half(1, 2);
    for (long l = 0; l < m; ++l) {
        IntVector c(nu.size());
        for (std::size_t i = 0; i < nu.size(); ++i) {
            Integer v = mod(nu[i] * l, M);
            // c/m in (-1/2, 1/2]
            if (Rational(v, M) > half) v -= M;
            c[i] = v;
        }
        out.push_back(std::move(c));
    }
    return out;
}

namespace {

std::string vec_str(const IntVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s + ")";
}

// Labels R_j^t C_j / m of one level; integral because m | nu^t R_j.
std::vector<IntVector> level_labels(const Level& L, const IntVector& nu, long m) {
    const IntMatrix Rt = L.R.transposed();
    std::vector<IntVector> out;
    for (const auto& c : coset_labels(nu, m)) {
        IntVector v = Rt * c;
        for (auto& x : v) {
            if (mod(x, Integer(m)) != 0) throw CongruenceViolation("coset label is not divisible by m");
            x /= m;
        }
        out.push_back(std::move(v));
    }
    return out;
}

// L'_{first} + R_{first}^t L'_{first+1} + ... over the given level range.
std::vector<IntVector> label_tower(const MoranSystem& system, const std::vector<std::size_t>& levels,
                                   const std::vector<std::vector<IntVector>>& per_level) {
    std::vector<IntVector> acc = per_level.back();
    for (std::size_t j = levels.size() - 1; j-- > 0;) {
        const IntMatrix Rt = system.level(levels[j]).R.transposed();
        std::vector<IntVector> next;
        next.reserve(acc.size() * per_level[j].size());
        for (const auto& upper : acc) {
            IntVector shifted = Rt * upper;
            for (const auto& l : per_level[j]) next.push_back(l + shifted);
        }
        acc = std::move(next);
    }
    return acc;
}

std::vector<IntVector> reduce_all(const IntMatrix& Rt, const std::vector<IntVector>& labels) {
    RationalMatrix inv = rational_inverse(Rt);
    const Rational half(1, 2);
    std::vector<IntVector> out;
    out.reserve(labels.size());
    for (const auto& v : labels) {
        RationalVector y = inv * v;
        IntVector z(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) z[i] = ceil(y[i] - half);
        out.push_back(v - Rt * z);
    }
    return out;
}

}  // namespace

BlockDecomposition build_blocks(const MoranSystem& system, std::size_t K, std::size_t count, std::size_t guaranteed_K) {
    if (K == 0) throw ParameterError("block size must be positive");
    const long m = system.prime();
    const std::size_t n = system.dimension();

    BlockDecomposition out;
    out.K = K;
    out.m = m;
    out.delta = system.params().delta;
    if (guaranteed_K == 0) {
        try {
            guaranteed_K = choose_block_size(system).K;
        } catch (const Error&) {
            guaranteed_K = 0;
        }
    }
    out.guaranteed_K = guaranteed_K;

    for (std::size_t k = 0; k < count; ++k) {
        Block block;
        std::vector<std::size_t> levels;
        std::vector<IntMatrix> Rs;
        std::vector<DigitSet> Ds;
        std::vector<std::vector<IntVector>> per_level;
        for (std::size_t j = k * K + 1; j <= (k + 1) * K; ++j) {
            auto idx = find_admissible_direction(system, j);
            if (!idx) throw NoAdmissibleDirection(j);
            const Level& L = system.level(j);
            levels.push_back(j);
            Rs.push_back(L.R);
            Ds.push_back(L.D);
            per_level.push_back(level_labels(L, L.Z.directions[*idx].nu, m));
            block.direction_index.push_back(*idx);
        }
        block.R = IntMatrix::identity(n);
        for (const auto& R : Rs) block.R = R * block.R;
        block.D = digit_tower(Rs, Ds);

        const IntMatrix Rt = block.R.transposed();
        block.L = reduce_all(Rt, label_tower(system, levels, per_level));
        auto check = is_compatible_pair(block.R, block.D, block.L);

        if (!check.ok) {
            // Literal reading of the label display: the sum stops at level kK+k.
            std::string witness = check.witness ? vec_str(check.witness->first) + " vs " + vec_str(check.witness->second)
                                                : "duplicate labels";
            const std::size_t terms = std::max<std::size_t>(k, 1);
            if (terms <= K) {
                std::vector<std::size_t> lit(levels.begin(), levels.begin() + static_cast<std::ptrdiff_t>(terms));
                std::vector<std::vector<IntVector>> lit_labels(per_level.begin(),
                                                              per_level.begin() + static_cast<std::ptrdiff_t>(terms));
                auto alt = reduce_all(Rt, label_tower(system, lit, lit_labels));
                if (alt.size() == block.D.size() && is_compatible_pair(block.R, block.D, alt).ok) {
                    block.L = std::move(alt);
                    block.literal_index_reading = true;
                    out.blocks.push_back(std::move(block));
                    continue;
                }
            }
            throw PairVerificationFailed(k, witness);
        }
        out.blocks.push_back(std::move(block));
    }
    return out;
}

SpectrumLevel build_spectrum_level(const BlockDecomposition& decomp, std::size_t k, std::size_t cap) {
    if (k >= decomp.blocks.size())
        throw ParameterError("spectrum level " + std::to_string(k) + " needs " + std::to_string(k + 1) + " blocks");
    double expected = 1.0;
    for (std::size_t j = 0; j <= k; ++j) expected *= static_cast<double>(decomp.blocks[j].L.size());
    if (expected > static_cast<double>(cap))
        throw CapExceeded("spectrum level " + std::to_string(k) + " would have " + std::to_string(expected) +
                          " elements (cap " + std::to_string(cap) + ")");

    const std::size_t n = decomp.blocks.front().R.size();
    SpectrumLevel out;
    out.k = k;
    out.elements = decomp.blocks[0].L;
    IntMatrix P = IntMatrix::identity(n);  // R~_0^t ... R~_{j-1}^t
    for (std::size_t j = 1; j <= k; ++j) {
        P = P * decomp.blocks[j - 1].R.transposed();
        std::vector<IntVector> next;
        next.reserve(out.elements.size() * decomp.blocks[j].L.size());
        for (const auto& l : decomp.blocks[j].L) {
            IntVector shift = P * l;
            for (const auto& lam : out.elements) next.push_back(lam + shift);
        }
        out.elements = std::move(next);
    }

    std::unordered_set<IntVector, IntVectorHash> seen;
    seen.reserve(out.elements.size());
    for (const auto& lam : out.elements)
        if (!seen.insert(lam).second) throw CollisionDetected("spectrum level " + std::to_string(k) + " repeats " + vec_str(lam));

    P = P * decomp.blocks[k].R.transposed();
    ScaledInverse inv = scaled_inverse(P);
    Integer worst = 0;
    for (const auto& lam : out.elements) {
        IntVector y = inv.numerator * lam;
        for (const auto& x : y) worst = std::max(worst, Integer(abs(x)));
    }
    out.max_scaled_coordinate = Rational(worst, inv.denominator);
    out.max_scaled_coordinate.canonicalize();
    const Rational bound = Rational(1, 2) + decomp.delta / 4;
    out.containment = out.max_scaled_coordinate <= bound;
    if (!out.containment && decomp.guaranteed_K != 0 && decomp.K >= decomp.guaranteed_K)
        throw ContainmentViolation("scaled spectrum level " + std::to_string(k) + " reaches " +
                                   to_string(out.max_scaled_coordinate) + " > " + to_string(bound));
    return out;
}

}  // namespace moran

#include "moran/pairs.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <unordered_set>

#include "moran/cyclotomic.hpp"

namespace moran {
namespace {

void check_shapes(const IntMatrix& R, const DigitSet& D, const std::vector<IntVector>& L) {
    if (L.size() != D.size())
        throw SizeMismatch("label set has " + std::to_string(L.size()) + " elements, digit set " +
                           std::to_string(D.size()));
    if (D.dimension() != R.size()) throw DimensionMismatch("digit dimension differs from matrix size");
    for (const auto& l : L)
        if (l.size() != R.size()) throw DimensionMismatch("label dimension differs from matrix size");
}

// Exponent sums <d, w> mod q for all digits, w an integer vector.
class ResidueEvaluator {
public:
    ResidueEvaluator(const DigitSet& D, const Integer& q) : D_(D), q_(q) {
        small_ = q < (Integer(1) << 62);
        if (small_) {
            for (const auto& d : D) {
                std::vector<std::int64_t> row;
                for (const auto& x : d) row.push_back(mod(x, q).get_si());
                digits_.push_back(std::move(row));
            }
        }
    }

    bool vanishes(const IntVector& w) const {
        if (small_) {
            std::vector<std::int64_t> wr;
            wr.reserve(w.size());
            for (const auto& x : w) wr.push_back(mod(x, q_).get_si());
            const auto q = static_cast<__int128>(q_.get_si());
            std::vector<std::int64_t> exps;
            exps.reserve(digits_.size());
            for (const auto& d : digits_) {
                __int128 acc = 0;
                for (std::size_t i = 0; i < d.size(); ++i) acc = (acc + static_cast<__int128>(d[i]) * wr[i]) % q;
                exps.push_back(static_cast<std::int64_t>(acc));
            }
            return cyclotomic_vanishes(exps, q_.get_si());
        }
        std::vector<Integer> exps;
        for (const auto& d : D_) exps.push_back(dot(d, w));
        return cyclotomic_vanishes(exps, q_);
    }

private:
    const DigitSet& D_;
    Integer q_;
    bool small_ = false;
    std::vector<std::vector<std::int64_t>> digits_;
};

PairCheck exact_check(const IntMatrix& R, const DigitSet& D, const std::vector<IntVector>& L) {
    // <R^{-1} d, delta> = <d, R^{-t} delta> = <d, N delta> / q
    ScaledInverse inv = scaled_inverse(R.transposed());
    ResidueEvaluator eval(D, inv.denominator);
    std::unordered_set<IntVector, IntVectorHash> good;
    PairCheck out;
    for (std::size_t i = 1; i < L.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            IntVector delta = L[i] - L[j];
            if (good.count(delta)) continue;
            if (is_zero(delta) || !eval.vanishes(inv.numerator * delta)) {
                out.ok = false;
                out.witness = std::make_pair(L[i], L[j]);
                return out;
            }
            good.insert(delta);
            for (auto& x : delta) x = -x;
            good.insert(std::move(delta));
        }
    out.ok = true;
    return out;
}

PairCheck numeric_check(const IntMatrix& R, const DigitSet& D, const std::vector<IntVector>& L, double tol) {
    const std::size_t n = R.size();
    RationalMatrix inv = rational_inverse(R);
    std::vector<std::vector<double>> points;  // R^{-1} d in floating point
    for (const auto& d : D) {
        RationalVector p = inv * d;
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i) row[i] = p[i].get_d();
        points.push_back(std::move(row));
    }
    const double m = static_cast<double>(D.size());
    std::vector<std::vector<std::complex<double>>> H(L.size(), std::vector<std::complex<double>>(D.size()));
    for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t b = 0; b < D.size(); ++b) {
            double phase = 0.0;
            for (std::size_t i = 0; i < n; ++i) phase += points[b][i] * L[a][i].get_d();
            H[a][b] = std::polar(1.0 / std::sqrt(m), 2.0 * std::numbers::pi * phase);
        }
    PairCheck out;
    out.ok = true;
    for (std::size_t a = 0; a < L.size(); ++a)
        for (std::size_t c = 0; c <= a; ++c) {
            std::complex<double> acc = 0.0;
            for (std::size_t b = 0; b < D.size(); ++b) acc += H[a][b] * std::conj(H[c][b]);
            double dev = std::abs(acc - (a == c ? 1.0 : 0.0));
            out.max_deviation = std::max(out.max_deviation, dev);
            if (dev >= tol && out.ok) {
                out.ok = false;
                out.witness = std::make_pair(L[a], L[c]);
            }
        }
    return out;
}

}  // namespace

PairCheck is_compatible_pair(const IntMatrix& R, const DigitSet& D, const std::vector<IntVector>& L,
                             VerifyMode mode, double tol) {
    check_shapes(R, D, L);
    if (determinant(R) == 0) throw SingularMatrix();
    return mode == VerifyMode::Exact ? exact_check(R, D, L) : numeric_check(R, D, L, tol);
}

namespace {

std::string describe(const std::optional<std::pair<IntVector, IntVector>>& w) {
    if (!w) return "no witness";
    auto vec = [](const IntVector& v) {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
        return s + ")";
    };
    return vec(w->first) + " vs " + vec(w->second);
}

}  // namespace

CompatiblePair make_pair(IntMatrix R, DigitSet D, std::vector<IntVector> L, VerifyMode mode) {
    auto check = is_compatible_pair(R, D, L, mode);
    if (!check.ok) throw PairVerificationFailed(0, describe(check.witness));
    return {std::move(R), std::move(D), std::move(L), mode == VerifyMode::Exact ? PairStatus::Exact : PairStatus::Numeric};
}

CompatiblePair translate_pair(const CompatiblePair& P, const IntVector& s, const IntVector& d0) {
    std::vector<IntVector> digits;
    for (const auto& d : P.D) digits.push_back(d + d0);
    std::vector<IntVector> labels;
    for (const auto& l : P.L) labels.push_back(l + s);
    return {P.R, DigitSet(std::move(digits)), std::move(labels), P.status};
}

CompatiblePair reduce_pair_mod(const CompatiblePair& P, const DigitSet& D2, const std::vector<IntVector>& L2) {
    if (D2.size() != P.D.size() || L2.size() != P.L.size()) throw SizeMismatch("replacement sets differ in size");
    const IntMatrix Rt = P.R.transposed();
    for (std::size_t i = 0; i < D2.size(); ++i)
        if (!congruent_mod_lattice(P.R, D2[i], P.D[i]))
            throw CongruenceViolation("digit " + std::to_string(i) + " is not congruent modulo R");
    for (std::size_t i = 0; i < L2.size(); ++i)
        if (!congruent_mod_lattice(Rt, L2[i], P.L[i]))
            throw CongruenceViolation("label " + std::to_string(i) + " is not congruent modulo R^t");
    return {P.R, D2, L2, P.status};
}

DigitSet digit_tower(std::span<const IntMatrix> R, std::span<const DigitSet> D) {
    if (R.size() != D.size() || R.empty()) throw SizeMismatch("tower needs matching nonempty level lists");
    // Horner: T_1 = D_1, T_j = D_j + R_j T_{j-1}
    std::vector<IntVector> acc = D[0].digits();
    for (std::size_t j = 1; j < R.size(); ++j) {
        std::vector<IntVector> next;
        next.reserve(acc.size() * D[j].size());
        for (const auto& t : acc) {
            IntVector shifted = R[j] * t;
            for (const auto& d : D[j]) next.push_back(d + shifted);
        }
        acc = std::move(next);
    }
    return DigitSet(std::move(acc));
}

CompatiblePair tower_pair(std::span<const CompatiblePair> pairs, VerifyMode mode) {
    if (pairs.empty()) throw SizeMismatch("empty tower");
    const std::size_t n = pairs.front().R.size();
    for (const auto& p : pairs)
        if (p.R.size() != n || p.D.dimension() != n) throw DimensionMismatch("tower levels differ in dimension");
    if (pairs.size() == 1) return pairs.front();

    std::vector<IntMatrix> Rs;
    std::vector<DigitSet> Ds;
    for (const auto& p : pairs) {
        Rs.push_back(p.R);
        Ds.push_back(p.D);
    }
    DigitSet D = digit_tower(Rs, Ds);

    IntMatrix R = IntMatrix::identity(n);
    for (const auto& p : pairs) R = p.R * R;

    // L_1 + R_1^t L_2 + ... ; Horner from the top level down.
    std::vector<IntVector> labels = pairs.back().L;
    for (std::size_t j = pairs.size() - 1; j-- > 0;) {
        IntMatrix Rt = pairs[j].R.transposed();
        std::vector<IntVector> next;
        next.reserve(labels.size() * pairs[j].L.size());
        for (const auto& upper : labels) {
            IntVector shifted = Rt * upper;
            for (const auto& l : pairs[j].L) next.push_back(l + shifted);
        }
        labels = std::move(next);
    }

    auto check = is_compatible_pair(R, D, labels, mode);
    PairStatus status = !check.ok ? PairStatus::Failed : mode == VerifyMode::Exact ? PairStatus::Exact : PairStatus::Numeric;
    return {std::move(R), std::move(D), std::move(labels), status};
}

IntVector reduce_mod_lattice(const IntMatrix& M, const IntVector& v) {
    RationalVector y = rational_inverse(M) * v;
    IntVector z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = floor(y[i]);
    return v - M * z;
}

IntVector reduce_centered(const IntMatrix& M, const IntVector& v) {
    RationalVector y = rational_inverse(M) * v;
    IntVector z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = ceil(y[i] - Rational(1, 2));
    return v - M * z;
}

bool congruent_mod_lattice(const IntMatrix& M, const IntVector& a, const IntVector& b) {
    RationalVector y = rational_inverse(M) * (a - b);
    for (const auto& x : y)
        if (x.get_den() != 1) return false;
    return true;
}

bool distinct_mod_lattice(const IntMatrix& M, const std::vector<IntVector>& vs) {
    std::unordered_set<IntVector, IntVectorHash> seen;
    for (const auto& v : vs)
        if (!seen.insert(reduce_mod_lattice(M, v)).second) return false;
    return true;
}

}  // namespace moran

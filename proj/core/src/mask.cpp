#include "moran/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "moran/cyclotomic.hpp"

namespace moran {

DigitSet::DigitSet(std::vector<IntVector> digits) : digits_(std::move(digits)) {
    if (digits_.size() < 2) throw SizeMismatch("a digit set needs at least two digits");
    const std::size_t n = digits_.front().size();
    if (n == 0) throw DimensionMismatch("digits must have positive dimension");
    std::set<std::vector<std::string>> seen;
    for (const auto& d : digits_) {
        if (d.size() != n) throw DimensionMismatch("digits have different dimensions");
        std::vector<std::string> key;
        for (const auto& x : d) key.push_back(x.get_str());
        if (!seen.insert(key).second) throw ModelViolation("repeated digit in digit set");
    }
}

DigitSet DigitSet::of(std::initializer_list<std::initializer_list<long>> digits) {
    std::vector<IntVector> v;
    for (const auto& d : digits) v.push_back(make_int_vector(d));
    return DigitSet(std::move(v));
}

double DigitSet::max_norm() const {
    double best = 0.0;
    for (const auto& d : digits_) {
        double s = 0.0;
        for (const auto& x : d) s += x.get_d() * x.get_d();
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double DigitSet::diameter() const {
    double best = 0.0;
    for (std::size_t i = 0; i < digits_.size(); ++i)
        for (std::size_t j = i + 1; j < digits_.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < digits_[i].size(); ++k) {
                double t = Integer(digits_[i][k] - digits_[j][k]).get_d();
                s += t * t;
            }
            best = std::max(best, std::sqrt(s));
        }
    return best;
}

bool is_prime(long m) {
    if (m < 2) return false;
    for (long p = 2; p * p <= m; ++p)
        if (m % p == 0) return false;
    return true;
}

IntVector canonical_direction(const IntVector& v, long m) {
    IntVector out(v.size());
    const Integer M(m);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = mod(v[i], M);
    auto first = std::find_if(out.begin(), out.end(), [](const Integer& x) { return x != 0; });
    if (first == out.end()) return out;
    Integer inv;
    mpz_invert(inv.get_mpz_t(), first->get_mpz_t(), M.get_mpz_t());
    for (auto& x : out) x = mod(x * inv, M);
    return out;
}

std::optional<std::size_t> ZeroStructure::index_of(const IntVector& v, long m) const {
    IntVector c = canonical_direction(v, m);
    if (is_zero(c)) return std::nullopt;
    for (std::size_t i = 0; i < directions.size(); ++i)
        if (directions[i].nu == c) return i;
    return std::nullopt;
}

std::complex<double> mask_eval(const DigitSet& D, std::span<const double> xi) {
    if (xi.size() != D.dimension()) throw DimensionMismatch("point and digits have different dimensions");
    std::complex<double> acc = 0.0;
    for (const auto& d : D) {
        double phase = 0.0;
        for (std::size_t i = 0; i < xi.size(); ++i) phase += xi[i] * d[i].get_d();
        phase -= std::floor(phase);
        acc += std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
    return acc / static_cast<double>(D.size());
}

namespace {

std::vector<Rational> phases(const DigitSet& D, const RationalVector& xi) {
    if (xi.size() != D.dimension()) throw DimensionMismatch("point and digits have different dimensions");
    std::vector<Rational> out;
    out.reserve(D.size());
    for (const auto& d : D) {
        Rational t = dot(xi, d);
        t -= floor(t);
        out.push_back(t);
    }
    return out;
}

void require_model(const DigitSet& D, long m) {
    if (!is_prime(m)) throw ModelViolation(std::to_string(m) + " is not prime");
    if (D.size() != static_cast<std::size_t>(m))
        throw ModelViolation("digit set has " + std::to_string(D.size()) + " digits, expected " + std::to_string(m));
}

}  // namespace

std::complex<double> mask_eval(const DigitSet& D, const RationalVector& xi) {
    std::complex<double> acc = 0.0;
    for (const auto& t : phases(D, xi)) acc += std::polar(1.0, 2.0 * std::numbers::pi * t.get_d());
    return acc / static_cast<double>(D.size());
}

bool mask_vanishes(const DigitSet& D, const RationalVector& xi) {
    auto t = phases(D, xi);
    return root_sum_vanishes(t);
}

bool residue_vanishing_test(const DigitSet& D, const IntVector& nu, long m) {
    require_model(D, m);
    if (nu.size() != D.dimension()) throw DimensionMismatch("direction and digits have different dimensions");
    std::vector<bool> hit(static_cast<std::size_t>(m), false);
    const Integer M(m);
    for (const auto& d : D) {
        auto r = mod(dot(d, nu), M).get_ui();
        if (hit[r]) return false;
        hit[r] = true;
    }
    return true;
}

ZeroStructure find_zero_directions(const DigitSet& D, long m) {
    require_model(D, m);
    const std::size_t n = D.dimension();
    ZeroStructure Z;
    // Odometer over {0..m-1}^n in lexicographic order; keep canonical vectors only.
    std::vector<long> digits(n, 0);
    while (true) {
        std::size_t i = n;
        while (i > 0 && digits[i - 1] == m - 1) digits[--i] = 0;
        if (i == 0) break;
        ++digits[i - 1];

        auto first = std::find_if(digits.begin(), digits.end(), [](long x) { return x != 0; });
        if (*first != 1) continue;
        IntVector nu(n);
        for (std::size_t k = 0; k < n; ++k) nu[k] = digits[k];
        if (residue_vanishing_test(D, nu, m)) {
            bool compliant = std::all_of(digits.begin(), digits.end(), [](long x) { return x != 0; });
            Z.directions.push_back({std::move(nu), compliant});
        }
    }
    return Z;
}

ExactnessReport verify_zero_exactness(const DigitSet& D, const ZeroStructure& Z, std::size_t grid, double tol) {
    if (grid < 8) throw ParameterError("exactness grid must be at least 8");
    const std::size_t n = D.dimension();
    const long m = static_cast<long>(D.size());

    std::vector<std::vector<double>> cosets;
    for (const auto& z : Z.directions)
        for (long j = 1; j < m; ++j) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) c[i] = (j * z.nu[i].get_d()) / static_cast<double>(m);
            cosets.push_back(std::move(c));
        }

    auto near_coset = [&](const std::vector<double>& x) {
        for (const auto& c : cosets) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double t = x[i] - c[i];
                t -= std::round(t);
                s += t * t;
            }
            if (std::sqrt(s) < tol) return true;
        }
        return false;
    };

    ExactnessReport report;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(idx[i]) / static_cast<double>(grid);
        ++report.samples;
        if (near_coset(x)) {
            ++report.excluded;
        } else {
            double mod_value = std::abs(mask_eval(D, x));
            report.min_modulus = std::min(report.min_modulus, mod_value);
            if (mod_value < tol) report.suspected_zeros.push_back(x);
        }
        std::size_t i = n;
        while (i > 0 && idx[i - 1] == grid - 1) idx[--i] = 0;
        if (i == 0) break;
        ++idx[i - 1];
    }
    report.pass = report.suspected_zeros.empty();
    return report;
}

}  // namespace moran

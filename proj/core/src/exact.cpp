#include "moran/exact.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace moran {

Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw ParameterError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw ParameterError("empty rational literal");

    auto parse_int = [&](const std::string& part) {
        Integer z;
        if (part.empty() || z.set_str(part, 10) != 0) throw ParameterError("bad rational literal '" + s + "'");
        return z;
    };

    if (auto slash = s.find('/'); slash != std::string::npos)
        return make_rational(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));

    auto dotpos = s.find('.');
    if (dotpos == std::string::npos) return Rational(parse_int(s));

    std::string whole = s.substr(0, dotpos);
    std::string frac = s.substr(dotpos + 1);
    bool negative = !whole.empty() && whole[0] == '-';
    if (negative || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ParameterError("bad rational literal '" + s + "'");
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    Rational q = make_rational(parse_int(whole) * scale + parse_int(frac), scale);
    return negative ? Rational(-q) : q;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

Integer ceil(const Rational& q) {
    Integer out;
    mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Integer floor(const Rational& q) {
    Integer out;
    mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return out;
}

Integer mod(const Integer& z, const Integer& modulus) {
    Integer out;
    mpz_fdiv_r(out.get_mpz_t(), z.get_mpz_t(), modulus.get_mpz_t());
    if (out < 0) out += abs(modulus);
    return out;
}

IntVector make_int_vector(std::initializer_list<long> values) {
    IntVector v;
    v.reserve(values.size());
    for (long x : values) v.emplace_back(x);
    return v;
}

IntVector make_int_vector(std::span<const std::int64_t> values) {
    IntVector v;
    v.reserve(values.size());
    for (auto x : values) v.emplace_back(static_cast<long>(x));
    return v;
}

RationalVector to_rational(const IntVector& v) {
    RationalVector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

Rational dot(const RationalVector& a, const IntVector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
    Rational acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool is_zero(const IntVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
}

bool is_zero(const RationalVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

IntMatrix make_int_matrix(std::initializer_list<std::initializer_list<long>> rows) {
    IntMatrix m(rows.size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        if (r.size() != rows.size()) throw DimensionMismatch("matrix literal is not square");
        std::size_t j = 0;
        for (long x : r) m(i, j++) = x;
        ++i;
    }
    return m;
}

RationalMatrix to_rational(const IntMatrix& m) {
    RationalMatrix out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m(i, j);
    return out;
}

RationalVector operator*(const RationalMatrix& a, const IntVector& v) {
    if (a.size() != v.size()) throw DimensionMismatch("matrix/vector sizes differ");
    RationalVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational acc = 0;
        for (std::size_t j = 0; j < a.size(); ++j) acc += a(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

Integer determinant(const IntMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    IntMatrix a = m;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer t = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(a(i, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

RationalMatrix rational_inverse(const RationalMatrix& m) {
    const std::size_t n = m.size();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col) == 0) ++pivot;
        if (pivot == n) throw SingularMatrix();
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(pivot, j));
                std::swap(inv(col, j), inv(pivot, j));
            }
        Rational p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a(i, col) == 0) continue;
            Rational f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

RationalMatrix rational_inverse(const IntMatrix& m) { return rational_inverse(to_rational(m)); }

ScaledInverse scaled_inverse(const IntMatrix& m) {
    Integer det = determinant(m);
    if (det == 0) throw SingularMatrix();
    RationalMatrix inv = rational_inverse(m);
    ScaledInverse out{IntMatrix(m.size()), abs(det)};
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) {
            Rational scaled = inv(i, j) * out.denominator;
            out.numerator(i, j) = scaled.get_num();  // adj/det scaled by |det| is integral
        }
    return out;
}

bool is_positive_semidefinite(const RationalMatrix& s) {
    std::size_t n = s.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = s(i, j);

    std::vector<bool> alive(n, true);
    for (std::size_t step = 0; step < n; ++step) {
        std::optional<std::size_t> pivot;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            if (a[i][i] < 0) return false;
            if (a[i][i] > 0 && !pivot) pivot = i;
        }
        if (!pivot) {
            // Remaining block has a zero diagonal; semidefinite only if it is zero.
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (alive[i] && alive[j] && a[i][j] != 0) return false;
            return true;
        }
        std::size_t p = *pivot;
        alive[p] = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i] || a[i][p] == 0) continue;
            Rational f = a[i][p] / a[p][p];
            for (std::size_t j = 0; j < n; ++j)
                if (alive[j]) a[i][j] -= f * a[p][j];
        }
    }
    return true;
}

namespace {

RationalMatrix gram(const RationalMatrix& m) { return m.transposed() * m; }

bool certifies(const RationalMatrix& g, double s) {
    if (!(s >= 0) || !std::isfinite(s)) return false;
    Rational sq = Rational(s) * Rational(s);
    RationalMatrix d = RationalMatrix::scalar(g.size(), sq);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) d(i, j) -= g(i, j);
    return is_positive_semidefinite(d);
}

}  // namespace

double frobenius_norm_upper(const RationalMatrix& m) {
    Rational sum = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) sum += m(i, j) * m(i, j);
    double f = std::sqrt(sum.get_d());
    // Step up until f^2 >= sum holds exactly.
    while (Rational(f) * Rational(f) < sum) f = std::nextafter(f, std::numeric_limits<double>::infinity());
    return f;
}

double operator_norm_upper(const RationalMatrix& m) {
    const std::size_t n = m.size();
    if (n == 0) return 0.0;
    const double frob = frobenius_norm_upper(m);
    if (frob == 0.0) return 0.0;

    RationalMatrix g = gram(m);
    std::vector<double> gd(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gd[i * n + j] = g(i, j).get_d();

    std::vector<double> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
    double lambda = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += gd[i * n + j] * v[j];
            w[i] = acc;
            norm += acc * acc;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        double next = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            next += v[i] * w[i];
            v[i] = w[i] / norm;
        }
        double vn = 0.0;
        for (double x : v) vn += x * x;
        if (std::abs(next / vn - lambda) <= 1e-15 * std::abs(lambda) && iter > 10) {
            lambda = next / vn;
            break;
        }
        lambda = next / std::max(vn, 1e-300);
    }
    // Rayleigh quotient of the final iterate.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += gd[i * n + j] * v[j];
        num += v[i] * acc;
        den += v[i] * v[i];
    }
    if (den > 0) lambda = std::max(lambda, num / den);

    const double estimate = std::sqrt(std::max(lambda, 0.0));
    for (double candidate : {estimate, estimate * (1.0 + 1e-6)}) {
        if (candidate < frob && certifies(g, candidate)) return candidate;
    }
    return frob;
}

bool check_contraction(const IntMatrix& m, const Rational& r) {
    if (r < 0) return false;
    RationalMatrix inv = rational_inverse(m);
    RationalMatrix g = gram(inv);
    RationalMatrix d = RationalMatrix::scalar(m.size(), r * r);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) d(i, j) -= g(i, j);
    return is_positive_semidefinite(d);
}

std::size_t IntVectorHash::operator()(const IntVector& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& x : v) {
        const mpz_srcptr z = x.get_mpz_t();
        std::size_t limb = mpz_size(z) ? static_cast<std::size_t>(mpz_getlimbn(z, 0)) : 0;
        std::size_t e = limb ^ (static_cast<std::size_t>(mpz_sgn(z) + 1) << 61) ^ mpz_size(z);
        h ^= e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
}

}  // namespace moran

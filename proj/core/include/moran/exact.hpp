#pragma once

// Exact integer / rational linear algebra on small square matrices.
//
// Scalars are GMP integers and rationals. All matrices are n x n with n the
// ambient dimension of a Moran system (typically 1..4), so the algorithms here
// favour clarity over asymptotics: Bareiss for determinants, Gauss-Jordan for
// inverses, symmetric elimination for semidefiniteness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "moran/errors.hpp"

namespace moran {

using Integer = mpz_class;
using Rational = mpq_class;
using IntVector = std::vector<Integer>;
using RationalVector = std::vector<Rational>;

/// Reduced rational num/den. Throws ParameterError on a zero denominator.
Rational make_rational(const Integer& num, const Integer& den);

/// Parses "3", "-1/8" or a finite decimal such as "0.125" into an exact rational.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(const Integer& z) { return z.get_d(); }

/// Smallest integer >= q.
Integer ceil(const Rational& q);
/// Largest integer <= q.
Integer floor(const Rational& q);
/// Non-negative residue of z modulo a positive modulus.
Integer mod(const Integer& z, const Integer& modulus);

IntVector make_int_vector(std::initializer_list<long> values);
IntVector make_int_vector(std::span<const std::int64_t> values);
RationalVector to_rational(const IntVector& v);

template <typename T>
std::vector<T> operator+(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
    std::vector<T> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

template <typename T>
std::vector<T> operator-(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
    std::vector<T> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vector sizes differ");
    T acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

Rational dot(const RationalVector& a, const IntVector& b);

bool is_zero(const IntVector& v);
bool is_zero(const RationalVector& v);

/// Square matrix stored row-major.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), a_(n * n) {}
    Matrix(std::initializer_list<std::initializer_list<T>> rows);

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static Matrix scalar(std::size_t n, const T& value) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
        return m;
    }
    static Matrix diagonal(const std::vector<T>& entries) {
        Matrix m(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
        return m;
    }

    std::size_t size() const noexcept { return n_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::vector<T> row(std::size_t i) const {
        return std::vector<T>(a_.begin() + static_cast<std::ptrdiff_t>(i * n_),
                              a_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_));
    }

    Matrix transposed() const {
        Matrix t(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_diagonal() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i != j && (*this)(i, j) != 0) return false;
        return true;
    }

    std::vector<T> diagonal_entries() const {
        std::vector<T> d(n_);
        for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
        return d;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.n_ != b.n_) throw DimensionMismatch("matrix sizes differ");
        Matrix c(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i)
            for (std::size_t k = 0; k < a.n_; ++k) {
                if (a(i, k) == 0) continue;
                for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v) {
        if (a.n_ != v.size()) throw DimensionMismatch("matrix/vector sizes differ");
        std::vector<T> out(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            T acc = 0;
            for (std::size_t j = 0; j < a.n_; ++j) acc += a(i, j) * v[j];
            out[i] = acc;
        }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) { return a.n_ == b.n_ && a.a_ == b.a_; }

private:
    std::size_t n_ = 0;
    std::vector<T> a_;
};

template <typename T>
Matrix<T>::Matrix(std::initializer_list<std::initializer_list<T>> rows) : n_(rows.size()), a_() {
    a_.reserve(n_ * n_);
    for (const auto& r : rows) {
        if (r.size() != n_) throw DimensionMismatch("matrix literal is not square");
        for (const auto& x : r) a_.push_back(x);
    }
}

using IntMatrix = Matrix<Integer>;
using RationalMatrix = Matrix<Rational>;

IntMatrix make_int_matrix(std::initializer_list<std::initializer_list<long>> rows);
RationalMatrix to_rational(const IntMatrix& m);
RationalVector operator*(const RationalMatrix& a, const IntVector& v);

/// Bareiss fraction-free determinant.
Integer determinant(const IntMatrix& m);

/// Exact inverse; throws SingularMatrix when det(m) == 0.
RationalMatrix rational_inverse(const IntMatrix& m);
RationalMatrix rational_inverse(const RationalMatrix& m);

/// m^{-1} = adjugate / det with det > 0 (sign folded into the adjugate).
struct ScaledInverse {
    IntMatrix numerator;
    Integer denominator;
};
ScaledInverse scaled_inverse(const IntMatrix& m);

/// Exact test that a symmetric rational matrix is positive semidefinite.
bool is_positive_semidefinite(const RationalMatrix& s);

/// Frobenius norm, rounded upward to the next double.
double frobenius_norm_upper(const RationalMatrix& m);

/// Certified upper bound on the Euclidean operator norm. Never exceeds the
/// Frobenius bound; the power-iteration candidate is accepted only once
/// s^2 I - M^T M is shown to be positive semidefinite in exact arithmetic.
double operator_norm_upper(const RationalMatrix& m);

/// True iff the operator norm of m^{-1} is at most r (exact certificate).
bool check_contraction(const IntMatrix& m, const Rational& r);

struct IntVectorHash {
    std::size_t operator()(const IntVector& v) const noexcept;
};

}  // namespace moran

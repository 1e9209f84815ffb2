#include "moran/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>

namespace moran {
namespace {

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

int moebius(std::uint64_t n) {
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    if (n > 1) sign = -sign;
    return sign;
}

using Poly = std::vector<Integer>;

void multiply_xd_minus_one(Poly& p, std::uint64_t d) {
    Poly out(p.size() + d);
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i + d] += p[i];
        out[i] -= p[i];
    }
    p = std::move(out);
}

void divide_xd_minus_one(Poly& p, std::uint64_t d) {
    // p = (x^d - 1) h  =>  h_i = h_{i-d} - p_i
    std::size_t len = p.size() - d;
    Poly h(len);
    for (std::size_t i = 0; i < len; ++i) {
        h[i] = -p[i];
        if (i >= d) h[i] += h[i - d];
    }
    p = std::move(h);
}

Poly build_cyclotomic(std::uint64_t q) {
    if (q == 1) return {Integer(-1), Integer(1)};
    Poly p{Integer(1)};
    std::vector<std::uint64_t> divisors;
    for (std::uint64_t d = 1; d * d <= q; ++d)
        if (q % d == 0) {
            divisors.push_back(d);
            if (d * d != q) divisors.push_back(q / d);
        }
    std::sort(divisors.begin(), divisors.end());
    for (auto d : divisors)
        if (moebius(q / d) == 1) multiply_xd_minus_one(p, d);
    for (auto d : divisors)
        if (moebius(q / d) == -1) divide_xd_minus_one(p, d);
    return p;
}

// Counts of exponents (already reduced into [0, rad)) vanish at a primitive
// rad-th root of unity, rad squarefree.
bool squarefree_vanishes(const std::vector<std::int64_t>& counts, std::uint64_t rad) {
    if (rad == 1) return counts[0] == 0;
    auto primes = prime_factors(rad);
    if (primes.size() == 1)
        return std::all_of(counts.begin(), counts.end(), [&](std::int64_t c) { return c == counts[0]; });

    const Poly& phi = cyclotomic_polynomial(rad);
    const std::size_t deg = phi.size() - 1;
    Poly f(counts.begin(), counts.end());
    for (std::size_t i = f.size(); i-- > deg;) {
        if (f[i] == 0) continue;
        Integer c = f[i];
        for (std::size_t j = 0; j <= deg; ++j) f[i - deg + j] -= c * phi[j];
    }
    return std::all_of(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(deg),
                       [](const Integer& c) { return c == 0; });
}

}  // namespace

const std::vector<Integer>& cyclotomic_polynomial(std::uint64_t q) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::unique_ptr<Poly>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[q];
    if (!slot) slot = std::make_unique<Poly>(build_cyclotomic(q));
    return *slot;
}

bool cyclotomic_vanishes(std::span<const std::int64_t> exponents, std::int64_t q_signed) {
    if (q_signed < 1) throw ParameterError("cyclotomic order must be positive");
    if (exponents.empty()) return true;
    auto q = static_cast<std::uint64_t>(q_signed);
    if (q == 1) return false;

    auto reduce = [](std::int64_t e, std::uint64_t mod) {
        auto m = static_cast<std::int64_t>(mod);
        std::int64_t r = e % m;
        return static_cast<std::uint64_t>(r < 0 ? r + m : r);
    };

    // Factor out a common rotation and shrink q to the true order of the differences.
    std::vector<std::uint64_t> r(exponents.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = reduce(exponents[i], q);
    std::uint64_t g = q;
    for (auto x : r) g = std::gcd(g, (x + q - r[0]) % q);
    q /= g;
    if (q == 1) return false;
    const std::uint64_t base = r[0];
    for (auto& x : r) x = ((x + g * q - base) % (g * q)) / g;

    // q = s * rad with rad squarefree; {zeta_q^b : b < s} is a basis of
    // Q(zeta_q) over Q(zeta_rad), so each residue class mod s must vanish alone.
    std::uint64_t rad = 1;
    for (auto p : prime_factors(q)) rad *= p;
    const std::uint64_t s = q / rad;

    std::vector<std::vector<std::int64_t>> classes(s);
    for (auto x : r) {
        auto& counts = classes[x % s];
        if (counts.empty()) counts.assign(rad, 0);
        ++counts[(x / s) % rad];
    }
    for (const auto& counts : classes)
        if (!counts.empty() && !squarefree_vanishes(counts, rad)) return false;
    return true;
}

bool cyclotomic_vanishes(std::span<const Integer> exponents, const Integer& q) {
    if (q < 1) throw ParameterError("cyclotomic order must be positive");
    if (exponents.empty()) return true;
    Integer g = q;
    for (const auto& e : exponents) {
        Integer diff = e - exponents[0];
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), diff.get_mpz_t());
    }
    Integer order = q / g;
    if (!order.fits_slong_p() || order > (Integer(1) << 40))
        throw CapExceeded("root-of-unity order " + order.get_str() + " too large for exact test");
    std::vector<std::int64_t> reduced(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        Integer diff = (exponents[i] - exponents[0]) / g;
        reduced[i] = mod(diff, order).get_si();
    }
    return cyclotomic_vanishes(reduced, order.get_si());
}

bool root_sum_vanishes(std::span<const Rational> phases) {
    if (phases.empty()) return true;
    Integer q = 1;
    for (const auto& t : phases) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), t.get_den_mpz_t());
    std::vector<Integer> exps(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) exps[i] = phases[i].get_num() * (q / phases[i].get_den());
    return cyclotomic_vanishes(exps, q);
}

}  // namespace moran

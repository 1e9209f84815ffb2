#include "moran/system.hpp"

#include <algorithm>
#include <set>

namespace moran {

Level make_level(IntMatrix R, DigitSet D, long m, const std::vector<IntVector>& directions) {
    Level level{std::move(R), std::move(D), {}};
    if (directions.empty()) {
        if (is_prime(m) && level.D.size() == static_cast<std::size_t>(m)) level.Z = find_zero_directions(level.D, m);
        return level;
    }
    for (const auto& nu : directions) {
        if (nu.size() != level.D.dimension()) throw DimensionMismatch("zero direction has wrong dimension");
        IntVector c = canonical_direction(nu, m);
        bool compliant = !is_zero(c) && std::all_of(c.begin(), c.end(), [](const Integer& x) { return x != 0; });
        level.Z.directions.push_back({std::move(c), compliant});
    }
    return level;
}

std::string format(const Diagnostic& d) {
    std::string s = "[" + d.code + "]";
    if (d.level) s += " level " + std::to_string(*d.level) + ":";
    return s + " " + d.message;
}

MoranSystem::MoranSystem(std::size_t n, long m, std::vector<Level> preamble, std::vector<Level> cycle, Params params)
    : n_(n), m_(m), preamble_(std::move(preamble)), cycle_(std::move(cycle)), params_(std::move(params)) {
    if (cycle_.empty()) throw SizeMismatch("the cycle must contain at least one level");
    auto check = [&](const Level& L) {
        if (L.R.size() != n_ || L.D.dimension() != n_)
            throw DimensionMismatch("level does not match system dimension " + std::to_string(n_));
    };
    for (const auto& L : preamble_) check(L);
    for (const auto& L : cycle_) check(L);
}

Rational inverse_norm_bound(const IntMatrix& R) {
    if (R.is_diagonal()) {
        Rational best = 0;
        for (const auto& p : R.diagonal_entries()) {
            if (p == 0) throw SingularMatrix();
            best = std::max(best, Rational(Rational(1) / Rational(abs(p))));
        }
        return best;
    }
    return Rational(operator_norm_upper(rational_inverse(R)));
}

MoranSystem MoranSystem::with_default_params(std::size_t n, long m, std::vector<Level> preamble,
                                             std::vector<Level> cycle, std::optional<Rational> r,
                                             std::optional<Rational> delta, std::optional<Rational> beta, Rational c) {
    Params p;
    if (r) {
        p.r = *r;
    } else {
        p.r = 0;
        for (const auto* group : {&preamble, &cycle})
            for (const auto& L : *group)
                if (determinant(L.R) != 0) p.r = std::max(p.r, inverse_norm_bound(L.R));
    }
    p.delta = delta.value_or(Rational(1, 8));
    p.beta = beta.value_or(Rational(1, 8 * std::max(m, 1L)));
    p.c = std::move(c);
    return MoranSystem(n, m, std::move(preamble), std::move(cycle), std::move(p));
}

const Level& MoranSystem::level(std::size_t k) const {
    if (k == 0) throw ParameterError("levels are numbered from 1");
    if (k <= preamble_.size()) return preamble_[k - 1];
    return cycle_[(k - preamble_.size() - 1) % cycle_.size()];
}

std::vector<std::size_t> MoranSystem::tail_levels() const {
    std::vector<std::size_t> ks;
    const std::size_t last = std::max<std::size_t>(preamble_.size(), 1) + cycle_.size();
    for (std::size_t k = 2; k <= last; ++k) ks.push_back(k);
    return ks;
}

std::vector<std::size_t> MoranSystem::distinct_levels() const {
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= preamble_.size() + cycle_.size(); ++k) ks.push_back(k);
    return ks;
}

double MoranSystem::max_digit_norm() const {
    double s = 0.0;
    for (const auto* group : {&preamble_, &cycle_})
        for (const auto& L : *group) s = std::max(s, L.D.max_norm());
    return s;
}

double MoranSystem::max_digit_diameter() const {
    double s = 0.0;
    for (const auto* group : {&preamble_, &cycle_})
        for (const auto& L : *group) s = std::max(s, L.D.diameter());
    return s;
}

std::vector<Diagnostic> MoranSystem::validate() const {
    std::vector<Diagnostic> out;
    if (n_ == 0) out.push_back({"dimension", "dimension must be positive", std::nullopt});
    if (!is_prime(m_)) out.push_back({"prime", std::to_string(m_) + " is not prime", std::nullopt});

    const Rational quarter(1, 4);
    if (!(params_.delta > 0 && params_.delta < quarter))
        out.push_back({"parameters", "delta = " + to_string(params_.delta) + " must lie in (0, 1/4)", std::nullopt});
    if (!(params_.beta > 0 && params_.beta < quarter))
        out.push_back({"parameters", "beta = " + to_string(params_.beta) + " must lie in (0, 1/4)", std::nullopt});
    if (!(params_.r > 0 && params_.r < 1))
        out.push_back({"contraction", "contraction bound r = " + to_string(params_.r) + " must lie in (0, 1)",
                       std::nullopt});
    if (params_.c < 1) out.push_back({"parameters", "norm constant c must be at least 1", std::nullopt});

    for (std::size_t k : distinct_levels()) {
        const Level& L = level(k);
        if (determinant(L.R) == 0) {
            out.push_back({"expansion", "matrix is singular (det R = 0)", k});
            continue;
        }
        if (params_.r > 0 && params_.r < 1 && !check_contraction(L.R, params_.r))
            out.push_back({"contraction", "||R^-1|| exceeds r = " + to_string(params_.r), k});
        else if (!(params_.r > 0 && params_.r < 1) && !check_contraction(L.R, Rational(1)))
            out.push_back({"contraction", "||R^-1|| exceeds 1", k});
        if (L.D.size() != static_cast<std::size_t>(m_)) {
            out.push_back({"digit-count",
                           "digit set has " + std::to_string(L.D.size()) + " elements, expected " + std::to_string(m_),
                           k});
            continue;
        }
        if (!is_prime(m_)) continue;
        if (L.Z.empty()) {
            out.push_back({"zero-set-model", "mask polynomial has no coset-line zero direction", k});
            continue;
        }
        for (const auto& z : L.Z.directions) {
            if (is_zero(z.nu) || !residue_vanishing_test(L.D, z.nu, m_))
                out.push_back({"zero-set-model", "supplied direction does not annihilate the mask polynomial", k});
            else if (!z.model_compliant)
                out.push_back({"zero-set-model", "zero direction has an entry divisible by m", k});
        }
        // Extra zeros outside the claimed cosets break the model; sampled in low dimension only.
        if (n_ <= 3) {
            auto report = verify_zero_exactness(L.D, L.Z, n_ == 3 ? 16 : 64, 1e-3);
            if (!report.pass)
                out.push_back({"zero-set-model", "sampled zeros outside the claimed coset lines", k});
        }
    }
    return out;
}

void MoranSystem::require_valid() const {
    auto diags = validate();
    if (diags.empty()) return;
    std::string msg = "system fails validation:";
    for (const auto& d : diags) msg += "\n  " + format(d);
    throw HypothesisViolation(msg);
}

MoranSystem MoranSystem::with_first_level(Level first, Params params) const {
    std::vector<Level> pre = preamble_;
    std::vector<Level> cyc = cycle_;
    if (!pre.empty()) {
        pre.front() = std::move(first);
    } else {
        // Level 1 is the first cycle entry; split it off so the cycle itself is untouched.
        pre.push_back(std::move(first));
        std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
    }
    return MoranSystem(n_, m_, std::move(pre), std::move(cyc), std::move(params));
}

}  // namespace moran

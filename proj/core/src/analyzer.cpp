#include "moran/analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "moran/cyclotomic.hpp"

namespace moran {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Neumaier's compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

Integer lcm_of_denominators(const RationalMatrix& A) {
    Integer q = 1;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j)
            mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), A(i, j).get_den_mpz_t());
    return q;
}

std::string vec_str(const IntVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s + ")";
}

}  // namespace

FactorPlan::FactorPlan(const MoranSystem& system, std::size_t N)
    : N_(N),
      n_(system.dimension()),
      m_(system.prime()),
      s_(system.max_digit_norm()),
      t_(system.max_digit_diameter()),
      r_(system.params().r.get_d()),
      c_(system.params().c.get_d()) {
    if (N == 0) throw ParameterError("truncation depth must be at least 1");
    const Integer limit = Integer(1) << 62;
    IntMatrix M = IntMatrix::identity(n_);
    RationalMatrix inv;
    for (std::size_t k = 1; k <= N; ++k) {
        const Level& L = system.level(k);
        M = L.R * M;
        inv = rational_inverse(M);
        Integer q = lcm_of_denominators(inv);
        IntMatrix A(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) {
                Rational scaled = inv(i, j) * q;
                A(i, j) = scaled.get_num();
            }
        std::vector<IntVector> nums;
        std::vector<std::vector<double>> ws;
        std::vector<std::vector<std::int64_t>> n64;
        bool small = q < limit;
        for (const auto& d : L.D) {
            IntVector num = A * d;
            std::vector<double> w(n_);
            std::vector<std::int64_t> w64(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                w[i] = Rational(num[i], q).get_d();
                if (small) w64[i] = mod(num[i], q).get_si();
            }
            nums.push_back(std::move(num));
            ws.push_back(std::move(w));
            n64.push_back(std::move(w64));
        }
        q_.push_back(q);
        numer_.push_back(std::move(nums));
        w_.push_back(std::move(ws));
        small_.push_back(small);
        numer64_.push_back(std::move(n64));
    }
    final_map_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) final_map_[i * n_ + j] = inv(j, i).get_d();
}

std::complex<double> FactorPlan::evaluate(std::span<const double> xi) const {
    if (xi.size() != n_) throw DimensionMismatch("point has wrong dimension");
    std::complex<double> value = 1.0;
    for (std::size_t k = 0; k < N_; ++k) {
        std::complex<double> acc = 0.0;
        for (const auto& w : w_[k]) {
            double phase = 0.0;
            for (std::size_t i = 0; i < n_; ++i) phase += xi[i] * w[i];
            phase -= std::floor(phase);
            acc += std::polar(1.0, two_pi * phase);
        }
        value *= acc / static_cast<double>(m_);
    }
    return value;
}

void FactorPlan::fill_tail(TruncatedTransform& t, double eta_norm) const {
    const double v = std::abs(t.value);
    const double lead = two_pi * s_ * c_ * c_ * eta_norm;
    const double b1 = lead * r_ / (1.0 - r_);
    const double b2 = 2.0 * std::numbers::pi * std::numbers::pi * t_ * t_ * std::pow(c_, 4) * eta_norm * eta_norm * r_ *
                      r_ / (1.0 - r_ * r_);
    t.certified = lead * r_ <= 0.5;
    t.tail_bound = v * std::min(2.0, b1);
    const double lin = 1.0 - std::pow(std::max(0.0, 1.0 - b1), 2);
    t.q_tail = v * v * std::min({1.0, b2, lin});
}

TruncatedTransform FactorPlan::truncated(std::span<const double> xi) const {
    TruncatedTransform t;
    t.level = N_;
    t.value = evaluate(xi);
    double eta = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += final_map_[i * n_ + j] * xi[j];
        eta += acc * acc;
    }
    fill_tail(t, std::sqrt(eta));
    return t;
}

TruncatedTransform FactorPlan::truncated(const RationalVector& xi) const {
    if (xi.size() != n_) throw DimensionMismatch("point has wrong dimension");
    TruncatedTransform t;
    t.level = N_;
    std::complex<double> value = 1.0;
    for (std::size_t k = 0; k < N_; ++k) {
        std::vector<Rational> phases;
        for (const auto& num : numer_[k]) {
            Rational p = dot(xi, num) / q_[k];
            p -= floor(p);
            phases.push_back(std::move(p));
        }
        if (root_sum_vanishes(phases)) {
            t.value = 0.0;
            t.exact_zero = true;
            t.certified = true;
            return t;
        }
        std::complex<double> acc = 0.0;
        for (const auto& p : phases) acc += std::polar(1.0, two_pi * p.get_d());
        value *= acc / static_cast<double>(m_);
    }
    t.value = value;
    std::vector<double> xd(n_);
    for (std::size_t i = 0; i < n_; ++i) xd[i] = xi[i].get_d();
    double eta = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += final_map_[i * n_ + j] * xd[j];
        eta += acc * acc;
    }
    fill_tail(t, std::sqrt(eta));
    return t;
}

void FactorPlan::lattice_phases(const IntVector& lambda, std::vector<std::complex<double>>& out) const {
    out.resize(N_ * static_cast<std::size_t>(m_));
    std::size_t pos = 0;
    for (std::size_t k = 0; k < N_; ++k) {
        if (small_[k]) {
            const std::int64_t q = q_[k].get_si();
            std::vector<std::int64_t> lam(n_);
            for (std::size_t i = 0; i < n_; ++i)
                lam[i] = lambda[i].fits_slong_p() ? ((lambda[i].get_si() % q) + q) % q : mod(lambda[i], q_[k]).get_si();
            for (const auto& num : numer64_[k]) {
                __int128 acc = 0;
                for (std::size_t i = 0; i < n_; ++i) acc = (acc + static_cast<__int128>(lam[i]) * num[i]) % q;
                out[pos++] = std::polar(1.0, two_pi * static_cast<double>(acc) / static_cast<double>(q));
            }
        } else {
            for (const auto& num : numer_[k]) {
                Integer acc = mod(dot(lambda, num), q_[k]);
                out[pos++] = std::polar(1.0, two_pi * Rational(acc, q_[k]).get_d());
            }
        }
    }
}

void FactorPlan::point_phases(std::span<const double> x, std::vector<std::complex<double>>& out) const {
    out.resize(N_ * static_cast<std::size_t>(m_));
    std::size_t pos = 0;
    for (std::size_t k = 0; k < N_; ++k)
        for (const auto& w : w_[k]) {
            double phase = 0.0;
            for (std::size_t i = 0; i < n_; ++i) phase += x[i] * w[i];
            phase -= std::floor(phase);
            out[pos++] = std::polar(1.0, two_pi * phase);
        }
}

TruncatedTransform muhat_truncated(const MoranSystem& system, std::span<const double> xi, std::size_t N) {
    return FactorPlan(system, N).truncated(xi);
}

namespace {

// Iterates eta_k = R_k^{-t} eta_{k-1} through the distinct levels of the system.
class ZeroSetWalker {
public:
    explicit ZeroSetWalker(const MoranSystem& system) : system_(system) {
        for (std::size_t k : system.distinct_levels()) {
            inverses_t_.push_back(rational_inverse(system.level(k).R.transposed()));
            contracting_ = contracting_ && check_contraction(system.level(k).R, Rational(1));
        }
    }

    std::optional<std::size_t> walk(RationalVector eta, std::size_t max_levels) const {
        if (is_zero(eta)) return std::nullopt;
        const long m = system_.prime();
        const Rational floor_sq(1, m * m);
        const std::size_t P = system_.preamble().size();
        const std::size_t C = system_.cycle().size();
        for (std::size_t k = 1;; ++k) {
            if (k > max_levels) throw CapExceeded("zero-set search exceeded " + std::to_string(max_levels) + " levels");
            std::size_t idx = k <= P ? k - 1 : P + (k - P - 1) % C;
            eta = inverses_t_[idx] * eta;

            IntVector u(eta.size());
            bool integral = true;
            for (std::size_t i = 0; i < eta.size(); ++i) {
                Rational v = eta[i] * m;
                if (v.get_den() != 1) {
                    integral = false;
                    break;
                }
                u[i] = v.get_num();
            }
            if (integral && system_.level(k).Z.index_of(u, m)) return k;

            // Coset points have a coordinate in (1/m) Z \ {0}; once ||eta|| < 1/m
            // and every later map is non-expanding, no level can match.
            if (contracting_) {
                Rational norm_sq = 0;
                for (const auto& x : eta) norm_sq += x * x;
                if (norm_sq < floor_sq) return std::nullopt;
            }
        }
    }

private:
    const MoranSystem& system_;
    std::vector<RationalMatrix> inverses_t_;
    bool contracting_ = true;
};

}  // namespace

std::optional<std::size_t> in_zero_set(const MoranSystem& system, const RationalVector& xi, std::size_t max_levels) {
    if (xi.size() != system.dimension()) throw DimensionMismatch("point has wrong dimension");
    return ZeroSetWalker(system).walk(xi, max_levels);
}

std::optional<std::size_t> in_zero_set(const MoranSystem& system, const IntVector& xi) {
    return in_zero_set(system, to_rational(xi));
}

VerificationReport verify_orthogonality(const MoranSystem& system, const std::vector<IntVector>& Lambda,
                                        std::size_t max_witnesses) {
    VerificationReport report;
    report.kind = ReportKind::Orthogonality;
    ZeroSetWalker walker(system);
    std::unordered_map<IntVector, bool, IntVectorHash> cache;
    std::size_t failures = 0, checked = 0;
    std::size_t deepest = 0;
    for (std::size_t i = 1; i < Lambda.size(); ++i)
        for (std::size_t j = 0; j < i; ++j) {
            IntVector diff = Lambda[i] - Lambda[j];
            ++checked;
            bool ok;
            std::string note;
            if (is_zero(diff)) {
                ok = false;
                note = "duplicate element";
            } else if (auto it = cache.find(diff); it != cache.end()) {
                ok = it->second;
            } else {
                auto level = walker.walk(to_rational(diff), 100000);
                ok = level.has_value();
                if (level) deepest = std::max(deepest, *level);
                cache.emplace(diff, ok);
                IntVector neg = diff;
                for (auto& x : neg) x = -x;
                cache.emplace(std::move(neg), ok);
            }
            if (!ok) {
                ++failures;
                if (report.witnesses.size() < max_witnesses)
                    report.add({{Lambda[i], Lambda[j]}, {}, note.empty() ? "difference " + vec_str(diff) + " misses the zero set" : note});
                report.pass = false;
            }
        }
    report.margins["pairs"] = static_cast<double>(checked);
    report.margins["distinct_differences"] = static_cast<double>(cache.size() / 2);
    report.margins["failures"] = static_cast<double>(failures);
    report.margins["deepest_zero_level"] = static_cast<double>(deepest);
    return report;
}

double q_value(const FactorPlan& plan, const std::vector<IntVector>& Lambda, std::span<const double> xi) {
    const std::size_t N = plan.depth();
    const std::size_t m = static_cast<std::size_t>(plan.digits_per_level());
    std::vector<std::complex<double>> base, lat;
    plan.point_phases(xi, base);
    CompensatedSum sum;
    for (const auto& lam : Lambda) {
        plan.lattice_phases(lam, lat);
        std::complex<double> v = 1.0;
        for (std::size_t k = 0; k < N; ++k) {
            std::complex<double> acc = 0.0;
            for (std::size_t d = 0; d < m; ++d) acc += base[k * m + d] * lat[k * m + d];
            v *= acc;
        }
        v /= std::pow(static_cast<double>(m), static_cast<double>(N));
        sum.add(std::norm(v));
    }
    return sum.value();
}

QScanResult q_function_scan(const MoranSystem& system, const std::vector<SpectrumLevel>& levels, std::size_t N,
                            const QScanOptions& options) {
    if (levels.empty()) throw ParameterError("q-function scan needs at least one spectrum level");
    if (options.grid < 1) throw ParameterError("grid must be positive");
    const std::size_t n = system.dimension();
    FactorPlan plan(system, N);

    QScanResult out;
    out.depth = N;
    out.report.kind = ReportKind::Completeness;

    // Sample points: uniform lattice, then seeded uniform extras.
    {
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(idx[i]) / static_cast<double>(options.grid);
            out.points.push_back(std::move(x));
            std::size_t i = n;
            while (i > 0 && idx[i - 1] == options.grid - 1) idx[--i] = 0;
            if (i == 0) break;
            ++idx[i - 1];
        }
        std::mt19937_64 rng(options.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t p = 0; p < options.random_points; ++p) {
            std::vector<double> x(n);
            for (auto& v : x) v = unit(rng);
            out.points.push_back(std::move(x));
        }
    }

    // First level containing each element of the largest level.
    const auto& top = levels.back().elements;
    std::vector<std::unordered_set<IntVector, IntVectorHash>> sets;
    for (std::size_t k = 0; k + 1 < levels.size(); ++k)
        sets.emplace_back(levels[k].elements.begin(), levels[k].elements.end());
    std::vector<std::size_t> first(top.size(), levels.size() - 1);
    std::vector<std::size_t> counts(levels.size(), 0);
    for (std::size_t e = 0; e < top.size(); ++e) {
        for (std::size_t k = 0; k < sets.size(); ++k)
            if (sets[k].count(top[e])) {
                first[e] = k;
                break;
            }
        ++counts[first[e]];
    }
    std::size_t cumulative = 0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        cumulative += counts[k];
        if (cumulative != levels[k].elements.size()) throw ParameterError("spectrum levels are not nested");
    }
    sets.clear();

    const std::size_t P = out.points.size();
    const std::size_t m = static_cast<std::size_t>(system.prime());
    const double norm = std::pow(static_cast<double>(m), -static_cast<double>(N));
    const auto& F = plan.final_map();

    std::vector<std::vector<std::complex<double>>> base(P);
    std::vector<std::vector<double>> eta_base(P, std::vector<double>(n));
    for (std::size_t p = 0; p < P; ++p) {
        plan.point_phases(out.points[p], base[p]);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) eta_base[p][i] += F[i * n + j] * out.points[p][j];
    }

    std::vector<std::vector<CompensatedSum>> sums(P, std::vector<CompensatedSum>(levels.size()));
    std::vector<CompensatedSum> tails(P);
    std::vector<std::complex<double>> lat;
    std::vector<double> eta_lam(n);
    for (std::size_t e = 0; e < top.size(); ++e) {
        const IntVector& lam = top[e];
        plan.lattice_phases(lam, lat);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += F[i * n + j] * lam[j].get_d();
            eta_lam[i] = acc;
        }
        for (std::size_t p = 0; p < P; ++p) {
            const auto& b = base[p];
            std::complex<double> v = 1.0;
            for (std::size_t k = 0; k < N; ++k) {
                std::complex<double> acc = 0.0;
                for (std::size_t d = 0; d < m; ++d) acc += b[k * m + d] * lat[k * m + d];
                v *= acc;
            }
            v *= norm;
            sums[p][first[e]].add(std::norm(v));

            double eta = 0.0;
            for (std::size_t i = 0; i < n; ++i) eta += (eta_base[p][i] + eta_lam[i]) * (eta_base[p][i] + eta_lam[i]);
            TruncatedTransform t;
            t.value = v;
            plan.fill_tail(t, std::sqrt(eta));
            tails[p].add(t.q_tail);
            if (!t.certified && std::norm(v) > 0.0) out.tail_regime_certified = false;
        }
    }

    out.max_gap.assign(levels.size(), 0.0);
    double max_q = 0.0;
    out.q_hat.assign(P, std::vector<double>(levels.size()));
    for (std::size_t p = 0; p < P; ++p) {
        CompensatedSum running;
        double prev = 0.0;
        for (std::size_t k = 0; k < levels.size(); ++k) {
            running.add(sums[p][k].value());
            const double q = running.value();
            out.q_hat[p][k] = q;
            out.max_gap[k] = std::max(out.max_gap[k], std::abs(1.0 - q));
            max_q = std::max(max_q, q);
            if (q + 1e-15 < prev) {
                out.monotone = false;
                out.report.add({{}, out.points[p], "Q decreases at level " + std::to_string(k)});
            }
            if (q > 1.0 + options.bessel_tolerance) {
                out.bessel = false;
                out.report.add({{}, out.points[p], "Q exceeds 1 at level " + std::to_string(k)});
            }
            prev = q;
        }
        out.certified_tail = std::max(out.certified_tail, tails[p].value());
    }
    out.report.margins["max_gap"] = out.max_gap.back();
    out.report.margins["certified_tail"] = out.certified_tail;
    out.report.margins["max_q"] = max_q;
    out.report.margins["points"] = static_cast<double>(P);
    out.report.margins["depth"] = static_cast<double>(N);
    return out;
}

}  // namespace moran

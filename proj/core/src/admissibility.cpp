#include "moran/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moran/mask.hpp"

namespace moran {

std::string to_string(ScanOutcome o) {
    switch (o) {
        case ScanOutcome::Certified: return "certified";
        case ScanOutcome::Violation: return "violation";
        case ScanOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Rational norm_sq(const RationalVector& v) {
    Rational s = 0;
    for (const auto& x : v) s += x * x;
    return s;
}

// True when the support-function bound along u separates z from E by at least beta:
// dist >= (<u, z> - h ||A^{-t} u||_1) / ||u||.
bool support_certifies(const RationalMatrix& Ainv, const Rational& h, const RationalVector& u, const RationalVector& z,
                       const Rational& beta) {
    if (is_zero(u)) return false;
    const std::size_t n = u.size();
    Rational support = 0;
    for (std::size_t j = 0; j < n; ++j) {
        Rational acc = 0;
        for (std::size_t i = 0; i < n; ++i) acc += Ainv(i, j) * u[i];
        support += abs_q(acc);
    }
    Rational lower = dot(u, z) - h * support;
    return lower >= 0 && lower * lower >= beta * beta * norm_sq(u);
}

// Approximate projection of z onto E = Ainv [-h, h]^n by cyclic coordinate descent.
std::vector<double> project(const std::vector<std::vector<double>>& Ad, double h, const std::vector<double>& z) {
    const std::size_t n = z.size();
    std::vector<double> y(n, 0.0), res(n);
    for (std::size_t i = 0; i < n; ++i) res[i] = -z[i];
    std::vector<double> col_sq(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) col_sq[j] += Ad[i][j] * Ad[i][j];
    for (int sweep = 0; sweep < 2000; ++sweep) {
        double moved = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i) g += Ad[i][j] * res[i];
            double next = std::clamp(y[j] - g / col_sq[j], -h, h);
            double step = next - y[j];
            if (step != 0.0) {
                for (std::size_t i = 0; i < n; ++i) res[i] += Ad[i][j] * step;
                y[j] = next;
                moved = std::max(moved, std::abs(step));
            }
        }
        if (moved < 1e-15) break;
    }
    return y;
}

}  // namespace

AdmissibilityResult check_product(const IntMatrix& A, const std::vector<IntVector>& directions, long m,
                                  const Rational& delta, const Rational& beta, std::size_t point_cap) {
    const std::size_t n = A.size();
    const Rational h = Rational(1, 2) + delta;
    const RationalMatrix Ainv = rational_inverse(A);
    const bool diagonal = A.is_diagonal();

    AdmissibilityResult out;
    out.outcome = ScanOutcome::Certified;
    out.products_checked = 1;
    out.min_margin = std::numeric_limits<double>::infinity();

    // Half-widths of the bounding box of E.
    RationalVector w(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational acc = 0;
        for (std::size_t j = 0; j < n; ++j) acc += abs_q(Ainv(i, j));
        w[i] = h * acc;
    }

    std::vector<std::vector<double>> Ad(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Ad[i][j] = Ainv(i, j).get_d();

    // Enumerate coset points in the inflated box; count first so the cap is honoured.
    struct Range {
        RationalVector offset;
        std::vector<Integer> lo, hi;
    };
    std::vector<Range> ranges;
    double total = 0.0;
    const Integer M(m);
    for (const auto& nu : directions)
        for (long j = 1; j < m; ++j) {
            Range r{RationalVector(n), std::vector<Integer>(n), std::vector<Integer>(n)};
            double count = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                r.offset[i] = Rational(mod(nu[i] * j, M), M);
                r.lo[i] = ceil(-w[i] - beta - r.offset[i]);
                r.hi[i] = floor(w[i] + beta - r.offset[i]);
                count *= r.hi[i] < r.lo[i] ? 0.0 : Integer(r.hi[i] - r.lo[i] + 1).get_d();
            }
            total += count;
            if (count > 0) ranges.push_back(std::move(r));
        }
    if (total > static_cast<double>(point_cap)) {
        out.outcome = ScanOutcome::Inconclusive;
        out.caveat = "coset point count " + std::to_string(total) + " exceeds cap";
        return out;
    }

    const Rational beta_sq = beta * beta;
    for (const auto& r : ranges) {
        std::vector<Integer> t = r.lo;
        while (true) {
            RationalVector z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = r.offset[i] + t[i];
            ++out.points_checked;

            bool certified = false;
            if (diagonal) {
                Rational d2 = 0;
                RationalVector nearest(n);
                for (std::size_t i = 0; i < n; ++i) {
                    Rational gap = abs_q(z[i]) - w[i];
                    nearest[i] = gap > 0 ? (z[i] > 0 ? w[i] : Rational(-w[i])) : z[i];
                    if (gap > 0) d2 += gap * gap;
                }
                double dist = std::sqrt(d2.get_d());
                out.min_margin = std::min(out.min_margin, dist - beta.get_d());
                if (d2 < beta_sq) {
                    out.outcome = ScanOutcome::Violation;
                    out.witness = AdmissibilityWitness{0, 0, z, nearest, dist};
                    return out;
                }
                certified = true;
            } else {
                for (std::size_t i = 0; i < n && !certified; ++i) {
                    Rational gap = abs_q(z[i]) - w[i];
                    if (gap >= beta) {
                        certified = true;
                        out.min_margin = std::min(out.min_margin, gap.get_d() - beta.get_d());
                    }
                }
                if (!certified) {
                    std::vector<double> zd(n);
                    for (std::size_t i = 0; i < n; ++i) zd[i] = z[i].get_d();
                    std::vector<double> y = project(Ad, h.get_d(), zd);
                    RationalVector yq(n);
                    for (std::size_t i = 0; i < n; ++i) {
                        Rational v(y[i]);
                        if (v > h) v = h;
                        if (v < -h) v = -h;
                        yq[i] = v;
                    }
                    RationalVector p = Ainv * yq;
                    RationalVector u = z - p;
                    Rational d2 = norm_sq(u);
                    double dist = std::sqrt(d2.get_d());
                    if (d2 < beta_sq) {
                        out.outcome = ScanOutcome::Violation;
                        out.witness = AdmissibilityWitness{0, 0, z, p, dist};
                        return out;
                    }
                    if (support_certifies(Ainv, h, u, z, beta) || support_certifies(Ainv, h, z, z, beta)) {
                        certified = true;
                        out.min_margin = std::min(out.min_margin, dist - beta.get_d());
                    }
                }
                if (!certified) {
                    out.outcome = ScanOutcome::Inconclusive;
                    out.caveat = "could not separate a coset point from the image box";
                }
            }

            std::size_t i = n;
            while (i > 0 && t[i - 1] == r.hi[i - 1]) {
                t[i - 1] = r.lo[i - 1];
                --i;
            }
            if (i == 0) break;
            ++t[i - 1];
        }
    }
    return out;
}

AdmissibilityResult admissibility_scan(const MoranSystem& system, const AdmissibilityOptions& options) {
    const Params& prm = system.params();
    const Rational quarter(1, 4);
    if (!(prm.delta > 0 && prm.delta < quarter) || !(prm.beta > 0 && prm.beta < quarter))
        throw ParameterError("delta and beta must lie in (0, 1/4)");
    const long m = system.prime();
    const std::size_t n = system.dimension();
    const std::size_t N0 = std::max<std::size_t>(options.first_k, 1);
    const std::size_t H = options.horizon ? options.horizon : 3 * system.cycle().size();

    std::vector<IntVector> directions;
    for (std::size_t k : system.distinct_levels())
        for (const auto& z : system.level(k).Z.directions)
            if (std::find(directions.begin(), directions.end(), z.nu) == directions.end()) directions.push_back(z.nu);

    // Levels that can appear as a factor: everything after N0, once per distinct matrix position.
    std::vector<std::size_t> factor_levels;
    const std::size_t last = std::max(system.preamble().size(), N0) + system.cycle().size();
    for (std::size_t k = N0 + 1; k <= last; ++k) factor_levels.push_back(k);

    AdmissibilityResult total;
    total.min_margin = std::numeric_limits<double>::infinity();
    auto absorb = [&](const AdmissibilityResult& r) {
        total.products_checked += r.products_checked;
        total.points_checked += r.points_checked;
        total.min_margin = std::min(total.min_margin, r.min_margin);
    };

    // Closed-form upgrade 1: every factor diagonal. Products shrink each box coordinate,
    // so single-factor certificates cover every product.
    bool all_diagonal = std::all_of(factor_levels.begin(), factor_levels.end(),
                                    [&](std::size_t k) { return system.level(k).R.is_diagonal(); });
    if (all_diagonal) {
        bool ok = true;
        for (std::size_t k : factor_levels) {
            auto r = check_product(system.level(k).R.transposed(), directions, m, prm.delta, prm.beta, options.point_cap);
            absorb(r);
            if (r.outcome != ScanOutcome::Certified) {
                ok = false;
                break;
            }
        }
        if (ok) {
            total.outcome = ScanOutcome::Certified;
            total.unconditional = true;
            total.method = "diagonal-levels";
            return total;
        }
    }

    // Closed-form upgrade 2: some column i of every factor is a e_i. Then row i of
    // every product is (prod a) e_i^t, E lies in the slab |x_i| <= h / |a|, and every
    // coset point with nu_i != 0 mod m has |z_i| >= 1/m.
    const Rational h = Rational(1, 2) + prm.delta;
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = std::all_of(directions.begin(), directions.end(),
                              [&](const IntVector& nu) { return mod(nu[i], Integer(m)) != 0; });
        Rational margin = 1;
        for (std::size_t k : factor_levels) {
            if (!ok) break;
            const IntMatrix& R = system.level(k).R;
            for (std::size_t r = 0; r < n; ++r)
                if (r != i && R(r, i) != 0) ok = false;
            if (!ok || R(i, i) == 0) {
                ok = false;
                break;
            }
            Rational gap = Rational(1, m) - h / Rational(abs(R(i, i)));
            margin = std::min(margin, Rational(gap - prm.beta));
            if (gap < prm.beta) ok = false;
        }
        if (ok) {
            total.outcome = ScanOutcome::Certified;
            total.unconditional = true;
            total.method = "slab";
            total.min_margin = margin.get_d();
            total.caveat = "coordinate " + std::to_string(i + 1);
            return total;
        }
    }

    // Finite horizon scan.
    total.method = "horizon";
    total.outcome = ScanOutcome::Certified;
    std::vector<IntMatrix> seen;
    for (std::size_t k = N0; k <= N0 + H; ++k) {
        IntMatrix A = IntMatrix::identity(n);
        for (std::size_t p = 1; p <= H; ++p) {
            A = A * system.level(k + p).R.transposed();
            if (std::find(seen.begin(), seen.end(), A) != seen.end()) continue;
            seen.push_back(A);
            auto r = check_product(A, directions, m, prm.delta, prm.beta, options.point_cap);
            absorb(r);
            if (r.outcome == ScanOutcome::Violation) {
                total.outcome = ScanOutcome::Violation;
                total.witness = r.witness;
                total.witness->k = k;
                total.witness->p = p;
                return total;
            }
            if (r.outcome == ScanOutcome::Inconclusive && total.outcome == ScanOutcome::Certified) {
                total.outcome = ScanOutcome::Inconclusive;
                total.caveat = "k=" + std::to_string(k) + ", p=" + std::to_string(p) + ": " + r.caveat;
            }
        }
    }
    if (total.outcome == ScanOutcome::Certified)
        total.caveat = "checked k in [" + std::to_string(N0) + ", " + std::to_string(N0 + H) + "], p in [1, " +
                       std::to_string(H) + "] only";
    return total;
}

}  // namespace moran

#include "moran/decider.hpp"

#include <algorithm>

#include "moran/errors.hpp"
#include "moran/spectrum.hpp"

namespace moran {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Spectral: return "spectral";
        case Outcome::NotSpectral: return "not-spectral";
        case Outcome::Unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(TriangularTemplate t) {
    switch (t) {
        case TriangularTemplate::Upper: return "upper";
        case TriangularTemplate::UpperColumn: return "upper-column";
        case TriangularTemplate::LowerColumn: return "lower-column";
        case TriangularTemplate::LowerRow: return "lower-row";
    }
    return "upper";
}

std::string to_string(GammaClass g) {
    switch (g) {
        case GammaClass::Gamma1: return "gamma1";
        case GammaClass::Gamma2: return "gamma2";
        case GammaClass::Neither: return "neither";
    }
    return "neither";
}

namespace {

std::string vec_str(const IntVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s + ")";
}

// 0-based index of the first entry not divisible by m.
std::optional<std::size_t> first_nondivisible(const IntVector& v, long m) {
    const Integer M(m);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (mod(v[i], M) != 0) return i;
    return std::nullopt;
}

IntVector row_times(const IntVector& nu, const IntMatrix& R) { return R.transposed() * nu; }

void require_prime_above_two(const MoranSystem& system) {
    if (system.prime() <= 2) throw HypothesisViolation("criterion needs a prime m > 2, got m = " + std::to_string(system.prime()));
}

void require_phi_one(const MoranSystem& system) {
    for (std::size_t k : system.distinct_levels())
        if (system.level(k).Z.size() != 1)
            throw HypothesisViolation("level " + std::to_string(k) + " has " +
                                      std::to_string(system.level(k).Z.size()) + " zero directions, expected one");
}

// Runs the admissibility scan from the end of the preamble; returns true when certified.
bool gate_condition_a(const MoranSystem& system, AdmissibilityOptions opt, Verdict& v) {
    opt.first_k = std::max(opt.first_k, system.preamble().size());
    auto res = admissibility_scan(system, opt);
    std::string line = "admissibility: " + to_string(res.outcome) + " via " + res.method;
    v.certificate.push_back(line);
    if (res.outcome != ScanOutcome::Certified) {
        std::string why = res.outcome == ScanOutcome::Violation ? "admissibility fails" : "admissibility not certified";
        if (res.witness)
            why += " at k=" + std::to_string(res.witness->k) + ", p=" + std::to_string(res.witness->p);
        if (!res.caveat.empty()) why += " (" + res.caveat + ")";
        v.caveats.push_back(why + "; the criterion does not apply");
        return false;
    }
    if (!res.unconditional) v.caveats.push_back("the admissibility condition verified on a finite horizon only: " + res.caveat);
    return true;
}

// Shared tail check: m | nu_k^t R_k for every tail level.
void divisibility_verdict(const MoranSystem& system, Verdict& v) {
    const long m = system.prime();
    for (std::size_t k : system.tail_levels()) {
        const Level& L = system.level(k);
        IntVector row = row_times(L.Z.directions.front().nu, L.R);
        if (auto i = first_nondivisible(row, m)) {
            v.outcome = Outcome::NotSpectral;
            v.witness = std::make_pair(k, *i + 1);
            v.certificate.push_back("level " + std::to_string(k) + ": nu^t R = " + vec_str(row) + ", entry " +
                                    std::to_string(*i + 1) + " not divisible by " + std::to_string(m));
            return;
        }
    }
    v.outcome = Outcome::Spectral;
    v.certificate.push_back("m | nu_k^t R_k for every level k >= 2 (checked levels 2.." +
                            std::to_string(system.tail_levels().back()) + ")");
}

// Position of level k in distinct_levels() order.
std::size_t distinct_index(const MoranSystem& system, std::size_t k) {
    const std::size_t P = system.preamble().size();
    return k <= P ? k - 1 : P + (k - P - 1) % system.cycle().size();
}

bool all_diagonal(const MoranSystem& system) {
    for (std::size_t k : system.distinct_levels())
        if (!system.level(k).R.is_diagonal()) return false;
    return true;
}

bool phi_is_one(const MoranSystem& system) {
    for (std::size_t k : system.distinct_levels())
        if (system.level(k).Z.size() != 1) return false;
    return true;
}

bool gamma_shaped(const MoranSystem& system) {
    if (system.dimension() != 2 || system.prime() != 3) return false;
    for (std::size_t k : system.distinct_levels()) {
        try {
            if (classify_gamma(system.level(k).D).cls == GammaClass::Neither) return false;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

}  // namespace

Verdict decide_diagonal(const MoranSystem& system) {
    if (!all_diagonal(system)) throw HypothesisViolation("diagonal criterion needs every R_k diagonal");
    require_prime_above_two(system);
    system.require_valid();

    Verdict v;
    v.theorem = criterion::diagonal;
    const Integer M(system.prime());
    for (std::size_t k : system.tail_levels()) {
        auto p = system.level(k).R.diagonal_entries();
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (mod(p[i], M) != 0) {
                v.outcome = Outcome::NotSpectral;
                v.witness = std::make_pair(k, i + 1);
                v.certificate.push_back("level " + std::to_string(k) + ": p_" + std::to_string(i + 1) + " = " +
                                        p[i].get_str() + " not divisible by " + M.get_str());
                return v;
            }
        }
    }
    v.outcome = Outcome::Spectral;
    v.certificate.push_back("m | p_{k,i} for every level k >= 2 and every i (checked levels 2.." +
                            std::to_string(system.tail_levels().back()) + ")");
    return v;
}

Verdict decide_phi1(const MoranSystem& system, const AdmissibilityOptions& scan) {
    require_prime_above_two(system);
    system.require_valid();
    require_phi_one(system);

    Verdict v;
    v.theorem = criterion::single_direction;
    if (!gate_condition_a(system, scan, v)) return v;
    divisibility_verdict(system, v);
    return v;
}

std::optional<std::pair<TriangularTemplate, std::vector<Integer>>> match_triangular(const IntMatrix& R) {
    const std::size_t n = R.size();
    auto fits = [&](TriangularTemplate t, const std::vector<Integer>& a) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Integer want = 0;
                switch (t) {
                    case TriangularTemplate::Upper: want = j >= i ? a[i] : Integer(0); break;
                    case TriangularTemplate::UpperColumn: want = j >= i ? a[j] : Integer(0); break;
                    case TriangularTemplate::LowerColumn: want = j <= i ? a[j] : Integer(0); break;
                    case TriangularTemplate::LowerRow: want = j <= i ? a[i] : Integer(0); break;
                }
                if (R(i, j) != want) return false;
            }
        return true;
    };
    std::vector<Integer> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = R(i, i);
    for (auto t : {TriangularTemplate::Upper, TriangularTemplate::UpperColumn, TriangularTemplate::LowerColumn,
                   TriangularTemplate::LowerRow})
        if (fits(t, a)) return std::make_pair(t, a);
    return std::nullopt;
}

Verdict decide_triangular(const MoranSystem& system) {
    std::vector<std::pair<TriangularTemplate, std::vector<Integer>>> matched;
    for (std::size_t k : system.distinct_levels()) {
        auto t = match_triangular(system.level(k).R);
        if (!t) throw TemplateMismatch("level " + std::to_string(k) + " matches no triangular template");
        matched.push_back(*t);
    }
    require_prime_above_two(system);
    system.require_valid();
    require_phi_one(system);

    Verdict v;
    v.theorem = criterion::triangular;
    v.caveats.push_back("the admissibility condition is implied by the template and not scanned");
    const Integer M(system.prime());
    for (std::size_t k : system.tail_levels()) {
        const auto& [tmpl, a] = matched[distinct_index(system, k)];
        for (std::size_t i = 0; i < a.size() && !v.witness; ++i)
            if (mod(a[i], M) != 0) {
                v.outcome = Outcome::NotSpectral;
                v.witness = std::make_pair(k, i + 1);
                v.certificate.push_back("level " + std::to_string(k) + " (" + to_string(tmpl) + "): a_" +
                                        std::to_string(i + 1) + " = " + a[i].get_str() + " not divisible by " +
                                        M.get_str());
            }
        if (v.witness) break;
    }
    if (!v.witness) {
        v.outcome = Outcome::Spectral;
        v.certificate.push_back("m | a_i^(k) for every level k >= 2 and every i");
    }

    // The single-direction divisibility must tell the same story; if not, refuse to decide.
    Verdict cross;
    divisibility_verdict(system, cross);
    if (cross.outcome != v.outcome) {
        v.caveats.push_back("template divisibility and m | nu^t R disagree (" + to_string(v.outcome) + " vs " +
                            to_string(cross.outcome) + ")");
        v.outcome = Outcome::Unknown;
        v.witness.reset();
    }
    return v;
}

GammaResult classify_gamma(const DigitSet& D) {
    if (D.dimension() != 2 || D.size() != 3) throw ModelViolation("gamma classes need three digits in Z^2");
    std::vector<IntVector> rest;
    bool has_zero = false;
    for (const auto& d : D) {
        if (is_zero(d))
            has_zero = true;
        else
            rest.push_back(d);
    }
    if (!has_zero) throw ModelViolation("gamma classes need 0 in the digit set");
    const Integer &a = rest[0][0], &b = rest[0][1], &c = rest[1][0], &d = rest[1][1];
    Integer det = a * d - b * c;
    if (abs(det) != 1) throw DeterminantViolation("|ad - bc| = " + Integer(abs(det)).get_str() + ", expected 1");

    const Integer three(3);
    GammaResult out;
    if (mod(Integer(-d - c), three) == mod(Integer(a + b), three)) {
        out.cls = GammaClass::Gamma1;
        out.nu = make_int_vector({1, 1});
    } else if (mod(Integer(d - c), three) == mod(Integer(a - b), three)) {
        out.cls = GammaClass::Gamma2;
        out.nu = make_int_vector({1, 2});
    }

    auto Z = find_zero_directions(D, 3);
    if (out.cls == GammaClass::Neither) {
        if (Z.size() == 1) out.nu = Z.directions.front().nu;
        return out;
    }
    if (Z.size() != 1 || Z.directions.front().nu != out.nu)
        throw ModelViolation("gamma class of " + vec_str(rest[0]) + ", " + vec_str(rest[1]) +
                             " disagrees with the residue zero directions");
    return out;
}

Verdict decide_gamma(const MoranSystem& system, const AdmissibilityOptions& scan) {
    if (system.dimension() != 2 || system.prime() != 3)
        throw HypothesisViolation("gamma criterion needs n = 2 and m = 3");
    std::vector<GammaResult> cls;
    for (std::size_t k : system.distinct_levels()) {
        auto g = classify_gamma(system.level(k).D);
        if (g.cls == GammaClass::Neither)
            throw HypothesisViolation("level " + std::to_string(k) + " digit set is in neither gamma class");
        cls.push_back(std::move(g));
    }
    system.require_valid();

    Verdict v;
    v.theorem = criterion::gamma;
    if (!gate_condition_a(system, scan, v)) return v;
    for (std::size_t k : system.tail_levels()) {
        const auto& g = cls[distinct_index(system, k)];
        IntVector row = row_times(g.nu, system.level(k).R);
        if (auto i = first_nondivisible(row, 3)) {
            v.outcome = Outcome::NotSpectral;
            v.witness = std::make_pair(k, *i + 1);
            v.certificate.push_back("level " + std::to_string(k) + " (" + to_string(g.cls) + "): " + vec_str(g.nu) +
                                    "^t R / 3 = " + vec_str(row) + "/3 not integral");
            return v;
        }
    }
    v.outcome = Outcome::Spectral;
    v.certificate.push_back("(1,i)^t R_k / 3 integral for every level k >= 2");
    return v;
}

bool has_infinite_orthogonal_set(const MoranSystem& system) {
    if (!all_diagonal(system)) throw HypothesisViolation("infinite orthogonal set test needs diagonal levels");
    const Integer M(system.prime());
    for (std::size_t i = 0; i < system.dimension(); ++i) {
        bool hit = std::any_of(system.cycle().begin(), system.cycle().end(),
                               [&](const Level& L) { return mod(L.R(i, i), M) == 0; });
        if (!hit) return false;
    }
    return true;
}

Verdict decide_sufficiency(const MoranSystem& system, const AdmissibilityOptions& scan) {
    system.require_valid();
    Verdict v;
    v.theorem = criterion::admissible_direction;
    v.outcome = Outcome::Unknown;
    if (!gate_condition_a(system, scan, v)) return v;
    for (std::size_t k : system.tail_levels()) {
        auto i = find_admissible_direction(system, k);
        if (!i) {
            v.caveats.push_back("level " + std::to_string(k) +
                                " has no zero direction with m | nu^t R; only sufficiency is known here");
            return v;
        }
        v.certificate.push_back("level " + std::to_string(k) + ": direction " +
                                vec_str(system.level(k).Z.directions[*i].nu) + " admissible");
    }
    v.outcome = Outcome::Spectral;
    return v;
}

Verdict decide(const MoranSystem& system, const AdmissibilityOptions& scan) {
    system.require_valid();
    const bool m_ok = system.prime() > 2;
    if (m_ok && all_diagonal(system)) return decide_diagonal(system);
    if (m_ok && phi_is_one(system)) {
        bool triangular = true;
        for (std::size_t k : system.distinct_levels())
            if (!match_triangular(system.level(k).R)) triangular = false;
        if (triangular) return decide_triangular(system);
        if (gamma_shaped(system)) return decide_gamma(system, scan);
        return decide_phi1(system, scan);
    }
    Verdict v = decide_sufficiency(system, scan);
    if (!m_ok) v.caveats.push_back("m = 2 lies outside the iff criteria");
    else v.caveats.push_back("more than one zero direction at some level; only sufficiency is known");
    return v;
}

}  // namespace moran

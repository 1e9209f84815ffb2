#pragma once

// Spectrality verdicts from the divisibility criteria. "For all k >= 2" is
// decided on the eventually periodic description: preamble tail plus one cycle.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moran/admissibility.hpp"
#include "moran/mask.hpp"
#include "moran/system.hpp"

namespace moran {

enum class Outcome { Spectral, NotSpectral, Unknown };
std::string to_string(Outcome o);

struct Verdict {
    Outcome outcome = Outcome::Unknown;
    std::string theorem;                   // descriptive criterion name
    std::vector<std::string> certificate;  // human-readable facts that decided the verdict
    std::optional<std::pair<std::size_t, std::size_t>> witness;  // (level k, coordinate i), 1-based
    std::vector<std::string> caveats;
};

namespace criterion {
inline constexpr const char* diagonal = "diagonal-divisibility";
inline constexpr const char* single_direction = "single-direction-divisibility";
inline constexpr const char* triangular = "triangular-template-divisibility";
inline constexpr const char* gamma = "gamma-class-divisibility";
inline constexpr const char* admissible_direction = "admissible-direction-sufficiency";
}  // namespace criterion

/// Every R_k diagonal, m > 2: spectral iff m | p_{k,i} for all k >= 2, i.
/// HypothesisViolation for non-diagonal levels, m = 2 or an invalid system.
Verdict decide_diagonal(const MoranSystem& system);

/// One zero direction per level, m > 2: spectral iff m | nu_k^t R_k for k >= 2,
/// provided the admissibility condition is certified; Unknown otherwise.
Verdict decide_phi1(const MoranSystem& system, const AdmissibilityOptions& scan = {});

// Upper: row i carries a_i from column i on. UpperColumn: column j carries a_j on and
// above the diagonal. LowerColumn / LowerRow: the lower-triangular analogues.
enum class TriangularTemplate { Upper, UpperColumn, LowerColumn, LowerRow };
std::string to_string(TriangularTemplate t);
/// Template matched by R with its a_1..a_n, if any. A matrix matching several
/// templates (all a_i equal) reports the first in enum order.
std::optional<std::pair<TriangularTemplate, std::vector<Integer>>> match_triangular(const IntMatrix& R);

/// Triangular templates, phi = 1, m > 2: spectral iff m | a_i^{(k)} for k >= 2.
/// TemplateMismatch when a level fits no template.
Verdict decide_triangular(const MoranSystem& system);

enum class GammaClass { Gamma1, Gamma2, Neither };
std::string to_string(GammaClass g);

struct GammaResult {
    GammaClass cls = GammaClass::Neither;
    IntVector nu;  // implied zero direction (canonical); for Neither the residue-derived one, if any
};

/// D = {0, (a,b), (c,d)} in Z^2 with |ad - bc| = 1 (DeterminantViolation otherwise;
/// ModelViolation when D is not of that shape).
GammaResult classify_gamma(const DigitSet& D);

/// Planar m = 3 systems whose digit sets are all {0, (a,b), (c,d)} with |ad - bc| = 1
/// and lie in the two classes: spectral iff (1/3)(1, i)^t R_k is integral for D_k in class i.
Verdict decide_gamma(const MoranSystem& system, const AdmissibilityOptions& scan = {});

/// Diagonal levels: for every coordinate i some cycle level has m | p_{k,i}.
bool has_infinite_orthogonal_set(const MoranSystem& system);

/// Sufficiency only: spectral when admissibility is certified and every level k >= 2 has an
/// admissible direction; Unknown otherwise (never NotSpectral).
Verdict decide_sufficiency(const MoranSystem& system, const AdmissibilityOptions& scan = {});

/// Routes by structure: diagonal, triangular, gamma, single direction, sufficiency.
Verdict decide(const MoranSystem& system, const AdmissibilityOptions& scan = {});

}  // namespace moran

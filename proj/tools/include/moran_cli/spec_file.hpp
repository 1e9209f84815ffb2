#pragma once

// JSON system description:
//   { "dimension": 2, "prime": 3,
//     "preamble": [ { "R": [[3,0],[0,3]], "D": [[0,0],[1,0],[0,1]], "nu": [[1,2]] } ],
//     "cycle":    [ ... at least one level ... ],
//     "params":   { "r": "1/3", "delta": 0.125, "beta": "1/24", "c": 1 } }
// "nu" and every params key are optional. Rationals may be numbers or "a/b" strings.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "moran/errors.hpp"
#include "moran/system.hpp"

namespace moran::cli {

/// Malformed or out-of-model input, carrying a diagnostic for the report.
class SpecError : public Error {
public:
    explicit SpecError(Diagnostic d) : Error(format(d)), diag_(std::move(d)) {}
    const Diagnostic& diagnostic() const noexcept { return diag_; }

private:
    Diagnostic diag_;
};

MoranSystem parse_system(const nlohmann::json& doc);
MoranSystem load_system(const std::filesystem::path& path);

Rational parse_rational_field(const nlohmann::json& v, const std::string& what);

}  // namespace moran::cli

#include "moran_cli/spec_file.hpp"

#include <fstream>
#include <optional>

namespace moran::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& code, const std::string& msg, std::optional<std::size_t> level = {}) {
    throw SpecError({code, msg, level});
}

Integer parse_integer(const json& v, const std::string& what) {
    if (v.is_number_integer()) return Integer(std::to_string(v.get<long long>()));
    if (v.is_string()) {
        try {
            return Integer(v.get<std::string>());
        } catch (const std::exception&) {
        }
    }
    fail("syntax", what + " must be an integer");
}

IntVector parse_vector(const json& v, std::size_t n, const std::string& what) {
    if (!v.is_array() || v.size() != n) fail("dimension", what + " must be a list of " + std::to_string(n) + " integers");
    IntVector out;
    for (const auto& x : v) out.push_back(parse_integer(x, what));
    return out;
}

Level parse_level(const json& j, std::size_t n, long m, std::size_t k) {
    if (!j.is_object() || !j.contains("R") || !j.contains("D"))
        fail("syntax", "each level needs keys R and D", k);
    const json& R = j["R"];
    if (!R.is_array() || R.size() != n) fail("dimension", "R must have " + std::to_string(n) + " rows", k);
    IntMatrix M(n);
    for (std::size_t i = 0; i < n; ++i) {
        IntVector row = parse_vector(R[i], n, "row of R");
        for (std::size_t c = 0; c < n; ++c) M(i, c) = row[c];
    }
    const json& D = j["D"];
    if (!D.is_array()) fail("syntax", "D must be a list of digits", k);
    std::vector<IntVector> digits;
    for (const auto& d : D) digits.push_back(parse_vector(d, n, "digit"));
    DigitSet ds;
    try {
        ds = DigitSet(std::move(digits));
    } catch (const Error& e) {
        fail("digit-count", e.what(), k);
    }
    std::vector<IntVector> nus;
    if (j.contains("nu")) {
        const json& nu = j["nu"];
        if (nu.is_array() && !nu.empty() && !nu.front().is_array())
            nus.push_back(parse_vector(nu, n, "nu"));
        else
            for (const auto& v : nu) nus.push_back(parse_vector(v, n, "nu"));
    }
    try {
        return make_level(std::move(M), std::move(ds), m, nus);
    } catch (const Error& e) {
        fail("zero-set-model", e.what(), k);
    }
}

}  // namespace

Rational parse_rational_field(const json& v, const std::string& what) {
    try {
        if (v.is_number_integer()) return Rational(Integer(std::to_string(v.get<long long>())));
        if (v.is_number()) return parse_rational(v.dump());
        if (v.is_string()) return parse_rational(v.get<std::string>());
    } catch (const std::exception&) {
    }
    fail("parameters", what + " must be a number or an \"a/b\" string");
}

MoranSystem parse_system(const json& doc) {
    if (!doc.is_object()) fail("syntax", "system description must be a JSON object");
    if (doc.contains("growth"))
        fail("bounded-growth",
             "growth specifications describe unbounded digits or entries; the contraction and bounded-digit "
             "condition (limsup ||R_k^-1|| <= r < 1, sup ||d|| < infinity) cannot hold, and such systems are not "
             "eventually periodic");
    if (!doc.contains("dimension") || !doc["dimension"].is_number_integer() || doc["dimension"].get<long>() < 1)
        fail("dimension", "dimension must be a positive integer");
    if (!doc.contains("prime") || !doc["prime"].is_number_integer()) fail("prime", "prime must be an integer");
    const auto n = static_cast<std::size_t>(doc["dimension"].get<long>());
    const long m = doc["prime"].get<long>();
    if (!is_prime(m)) fail("prime", std::to_string(m) + " is not prime");

    std::vector<Level> pre, cyc;
    std::size_t k = 1;
    if (doc.contains("preamble")) {
        if (!doc["preamble"].is_array()) fail("syntax", "preamble must be a list of levels");
        for (const auto& L : doc["preamble"]) pre.push_back(parse_level(L, n, m, k++));
    }
    if (!doc.contains("cycle") || !doc["cycle"].is_array() || doc["cycle"].empty())
        fail("syntax", "cycle must be a non-empty list of levels");
    for (const auto& L : doc["cycle"]) cyc.push_back(parse_level(L, n, m, k++));

    std::optional<Rational> r, delta, beta;
    Rational c = 1;
    if (doc.contains("params")) {
        const json& p = doc["params"];
        if (!p.is_object()) fail("syntax", "params must be an object");
        if (p.contains("r")) r = parse_rational_field(p["r"], "r");
        if (p.contains("delta")) delta = parse_rational_field(p["delta"], "delta");
        if (p.contains("beta")) beta = parse_rational_field(p["beta"], "beta");
        if (p.contains("c")) c = parse_rational_field(p["c"], "c");
    }
    try {
        return MoranSystem::with_default_params(n, m, std::move(pre), std::move(cyc), r, delta, beta, c);
    } catch (const SingularMatrix&) {
        fail("expansion", "a matrix is singular (det R = 0)");
    } catch (const Error& e) {
        fail("dimension", e.what());
    }
}

MoranSystem load_system(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot read " + path.string());
    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        fail("syntax", path.string() + ": " + e.what());
    }
    return parse_system(doc);
}

}  // namespace moran::cli

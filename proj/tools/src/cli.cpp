#include "moran_cli/cli.hpp"

#include <chrono>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moran/admissibility.hpp"
#include "moran/analyzer.hpp"
#include "moran/decider.hpp"
#include "moran/render.hpp"
#include "moran/spectrum.hpp"
#include "moran_cli/spec_file.hpp"

namespace moran::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string vec_str(const IntVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].get_str();
    return s + ")";
}

ojson vec_json(const IntVector& v) {
    ojson a = ojson::array();
    for (const auto& x : v) a.push_back(x.fits_slong_p() ? ojson(x.get_si()) : ojson(x.get_str()));
    return a;
}

std::string mat_str(const RationalMatrix& M) {
    std::string s = "[";
    for (std::size_t i = 0; i < M.size(); ++i) {
        s += i ? "; " : "";
        for (std::size_t j = 0; j < M.size(); ++j) s += (j ? " " : "") + to_string(M(i, j));
    }
    return s + "]";
}

ojson params_json(const Params& p) {
    return {{"r", to_string(p.r)}, {"delta", to_string(p.delta)}, {"beta", to_string(p.beta)}, {"c", to_string(p.c)}};
}

ojson diag_json(const Diagnostic& d) {
    ojson j{{"code", d.code}, {"message", d.message}};
    if (d.level) j["level"] = *d.level;
    return j;
}

// Codes describing malformed input rather than a system outside the hypotheses.
bool is_input_code(const std::string& code) {
    static const std::set<std::string> codes{"syntax", "dimension", "prime", "digit-count", "expansion", "parameters",
                                             "bounded-growth"};
    return codes.count(code) > 0;
}

struct Common {
    std::string spec;
    bool json = false;
    bool timings = false;
};

// Per-command state shared by the handlers.
struct Run {
    Common& common;
    std::ostream& out;
    std::ostream& err;
    std::string command;
    ojson report;
    std::ostringstream text;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    int finish(int code) {
        if (common.json) {
            ojson doc{{"schema", 1}, {"command", command}, {"exit_code", code}};
            for (auto& [k, v] : report.items()) doc[k] = v;
            if (common.timings)
                doc["timings"] = {{"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
            out << doc.dump(2) << '\n';
        } else {
            out << text.str();
            if (common.timings)
                out << "time: " << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                    << " s\n";
        }
        return code;
    }
};

struct Built {
    NormalizedSystem ns;
    BlockSize estimate;
    BlockDecomposition decomp;
    std::vector<SpectrumLevel> levels;
};

Built build_levels(const MoranSystem& system, std::size_t top, std::size_t block, std::size_t cap) {
    system.require_valid();
    NormalizedSystem ns = normalize_first(system);
    BlockSize bs = choose_block_size(ns.system);
    const std::size_t K = block ? block : bs.K;
    BlockDecomposition decomp = build_blocks(ns.system, K, top + 1, bs.K);
    std::vector<SpectrumLevel> levels;
    for (std::size_t k = 0; k <= top; ++k) levels.push_back(build_spectrum_level(decomp, k, cap));
    return {std::move(ns), bs, std::move(decomp), std::move(levels)};
}

void describe_build(Run& run, const Built& b) {
    run.text << "block size: K = " << b.decomp.K << " (contraction estimate M = " << b.estimate.M
             << ", K = " << b.estimate.K << ")\n";
    if (!b.ns.transform.identity)
        run.text << "first matrix normalized to m I; spectrum of the original = " << mat_str(b.ns.transform.pullback)
                 << " * Lambda\n";
    run.report["block"] = {{"K", b.decomp.K}, {"estimate_M", b.estimate.M}, {"guaranteed_K", b.estimate.K}};
    run.report["normalized"] = !b.ns.transform.identity;
    if (!b.ns.transform.identity) run.report["pullback"] = mat_str(b.ns.transform.pullback);
    bool literal = false;
    for (const auto& blk : b.decomp.blocks) literal = literal || blk.literal_index_reading;
    if (literal) {
        run.text << "note: a block needed the literal label-index reading\n";
        run.report["literal_index_reading"] = true;
    }
}

int cmd_validate(Run& run, const MoranSystem& system) {
    auto diags = system.validate();
    run.report["params"] = params_json(system.params());
    ojson list = ojson::array();
    bool input = false;
    for (const auto& d : diags) {
        run.text << format(d) << '\n';
        list.push_back(diag_json(d));
        input = input || is_input_code(d.code);
    }
    run.report["diagnostics"] = list;
    if (diags.empty()) run.text << "valid: dimension " << system.dimension() << ", m = " << system.prime()
                                << ", " << system.preamble().size() << " preamble + " << system.cycle().size()
                                << " cycle levels, r = " << to_string(system.params().r) << '\n';
    run.report["valid"] = diags.empty();
    return run.finish(diags.empty() ? Pass : input ? InputError : Fail);
}

int cmd_zeros(Run& run, const MoranSystem& system) {
    ojson levels = ojson::array();
    bool all = true;
    for (std::size_t k : system.distinct_levels()) {
        const Level& L = system.level(k);
        ojson dirs = ojson::array();
        run.text << "level " << k << ":";
        if (L.Z.empty()) {
            run.text << " none";
            all = false;
        }
        for (const auto& z : L.Z.directions) {
            run.text << ' ' << vec_str(z.nu) << (z.model_compliant ? "" : "*");
            dirs.push_back({{"nu", vec_json(z.nu)}, {"model_compliant", z.model_compliant}});
        }
        run.text << '\n';
        levels.push_back({{"level", k}, {"directions", dirs}});
    }
    run.report["levels"] = levels;
    return run.finish(all ? Pass : Fail);
}

int cmd_decide(Run& run, const MoranSystem& system, const AdmissibilityOptions& scan) {
    Verdict v = decide(system, scan);
    run.text << "verdict: " << to_string(v.outcome) << "\ncriterion: " << v.theorem << '\n';
    for (const auto& c : v.certificate) run.text << "  " << c << '\n';
    if (v.witness) run.text << "witness: level " << v.witness->first << ", coordinate " << v.witness->second << '\n';
    for (const auto& c : v.caveats) run.text << "caveat: " << c << '\n';
    ojson jv{{"outcome", to_string(v.outcome)}, {"criterion", v.theorem}, {"certificate", v.certificate},
             {"caveats", v.caveats}};
    jv["witness"] = v.witness ? ojson{{"level", v.witness->first}, {"coordinate", v.witness->second}} : ojson();
    run.report["params"] = params_json(system.params());
    run.report["verdict"] = jv;
    return run.finish(v.outcome == Outcome::Spectral ? Pass : v.outcome == Outcome::NotSpectral ? Fail : Undecided);
}

int cmd_spectrum(Run& run, const MoranSystem& system, std::size_t top, std::size_t block, std::size_t cap, bool print) {
    Built b = build_levels(system, top, block, cap);
    describe_build(run, b);
    ojson levels = ojson::array();
    bool contained = true;
    for (const auto& L : b.levels) {
        run.text << "Lambda_" << L.k << ": " << L.elements.size() << " elements, containment "
                 << (L.containment ? "ok" : "FAILED") << " (max scaled coordinate " << to_string(L.max_scaled_coordinate)
                 << ")\n";
        contained = contained && L.containment;
        ojson j{{"k", L.k}, {"size", L.elements.size()}, {"containment", L.containment},
                {"max_scaled_coordinate", to_string(L.max_scaled_coordinate)}};
        if (print) {
            ojson els = ojson::array();
            for (const auto& e : L.elements) els.push_back(vec_json(e));
            j["elements"] = els;
            for (const auto& e : L.elements) run.text << "  " << vec_str(e) << '\n';
        }
        levels.push_back(j);
    }
    run.report["levels"] = levels;
    return run.finish(contained ? Pass : Fail);
}

ojson witnesses_json(const VerificationReport& r) {
    ojson a = ojson::array();
    for (const auto& w : r.witnesses) {
        ojson vs = ojson::array();
        for (const auto& v : w.vectors) vs.push_back(vec_json(v));
        a.push_back({{"vectors", vs}, {"point", w.point}, {"note", w.note}});
    }
    return a;
}

ojson margins_json(const VerificationReport& r) {
    ojson j = ojson::object();
    for (const auto& [k, v] : r.margins) j[k] = v;
    return j;
}

int cmd_verify_orth(Run& run, const MoranSystem& system, std::size_t level, std::size_t block, std::size_t cap) {
    Built b = build_levels(system, level, block, cap);
    describe_build(run, b);
    const auto& Lambda = b.levels.back().elements;
    VerificationReport r = verify_orthogonality(b.ns.system, Lambda);
    run.text << "orthogonality of Lambda_" << level << " (" << Lambda.size() << " elements): "
             << (r.pass ? "pass" : "FAIL") << '\n';
    for (const auto& [k, v] : r.margins) run.text << "  " << k << ": " << v << '\n';
    for (const auto& w : r.witnesses) {
        run.text << "  witness:";
        for (const auto& v : w.vectors) run.text << ' ' << vec_str(v);
        run.text << "  " << w.note << '\n';
    }
    run.report["report"] = {{"pass", r.pass}, {"level", level}, {"size", Lambda.size()}, {"margins", margins_json(r)}};
    run.report["witnesses"] = witnesses_json(r);
    return run.finish(r.pass ? Pass : Fail);
}

struct CompleteOptions {
    std::size_t levels = 3, depth = 12, block = 0, cap = 1000000;
    QScanOptions scan;
    double gap_tol = 0.02, tail_tol = 1e-3;
};

int cmd_verify_complete(Run& run, const MoranSystem& system, const CompleteOptions& o) {
    Built b = build_levels(system, o.levels, o.block, o.cap);
    describe_build(run, b);
    QScanResult q = q_function_scan(b.ns.system, b.levels, o.depth, o.scan);
    const double gap = q.max_gap.back();
    const bool ok = q.report.pass && gap <= o.gap_tol && q.certified_tail <= o.tail_tol;
    run.text << "Q scan: depth " << o.depth << ", " << q.points.size() << " points, levels 0.." << o.levels << '\n';
    for (std::size_t k = 0; k < q.max_gap.size(); ++k)
        run.text << "  max |1 - Q| over Lambda_" << k << ": " << q.max_gap[k] << '\n';
    run.text << "  certified tail: " << q.certified_tail << (q.tail_regime_certified ? "" : " (uncertified terms)")
             << "\n  monotone: " << (q.monotone ? "yes" : "no") << ", bounded by 1: " << (q.bessel ? "yes" : "no")
             << '\n';
    const bool failed = !q.report.pass;
    run.text << (failed ? "completeness evidence: FAIL\n" : ok ? "completeness evidence: pass\n"
                                                                : "completeness evidence: inconclusive\n");
    run.report["report"] = {{"pass", ok},
                            {"depth", o.depth},
                            {"points", q.points.size()},
                            {"max_gap", q.max_gap},
                            {"certified_tail", q.certified_tail},
                            {"tail_regime_certified", q.tail_regime_certified},
                            {"monotone", q.monotone},
                            {"bounded", q.bessel}};
    run.report["witnesses"] = witnesses_json(q.report);
    return run.finish(failed ? Fail : ok ? Pass : Undecided);
}

int cmd_admissible(Run& run, const MoranSystem& system, const AdmissibilityOptions& o) {
    AdmissibilityResult r = admissibility_scan(system, o);
    run.text << "admissibility: " << to_string(r.outcome) << " via " << r.method
             << (r.unconditional ? " (all k, p)" : "") << '\n';
    if (!r.caveat.empty()) run.text << "  " << r.caveat << '\n';
    run.text << "  products checked: " << r.products_checked << ", coset points: " << r.points_checked << '\n';
    ojson j{{"outcome", to_string(r.outcome)}, {"method", r.method}, {"unconditional", r.unconditional},
            {"caveat", r.caveat}, {"products_checked", r.products_checked}, {"points_checked", r.points_checked},
            {"min_margin", r.min_margin}};
    if (r.witness) {
        std::ostringstream w;
        w << "k = " << r.witness->k << ", p = " << r.witness->p << ", distance " << r.witness->distance;
        run.text << "  witness: " << w.str() << '\n';
        ojson zp = ojson::array(), ip = ojson::array();
        for (const auto& x : r.witness->zero_point) zp.push_back(to_string(x));
        for (const auto& x : r.witness->image_point) ip.push_back(to_string(x));
        j["witness"] = {{"k", r.witness->k}, {"p", r.witness->p}, {"zero_point", zp}, {"image_point", ip},
                        {"distance", r.witness->distance}};
    }
    run.report["params"] = params_json(system.params());
    run.report["report"] = j;
    return run.finish(r.outcome == ScanOutcome::Certified ? Pass
                      : r.outcome == ScanOutcome::Violation ? Fail
                                                            : Undecided);
}

int cmd_render(Run& run, const MoranSystem& system, std::size_t level, const std::string& fmt, std::size_t size,
               const std::string& path, std::size_t cap) {
    PointCloud cloud = support_points(system, level, cap);
    render(cloud, parse_image_format(fmt), size, path);
    run.text << "wrote " << cloud.points.size() << " points (level " << level << ") to " << path << '\n';
    run.report["report"] = {{"points", cloud.points.size()}, {"level", level}, {"format", fmt}, {"out", path},
                            {"lower", cloud.lower}, {"upper", cloud.upper}};
    return run.finish(Pass);
}

int error_exit(Run& run, const std::string& code, const std::string& message, int exit_code) {
    run.err << "error [" << code << "]: " << message << '\n';
    run.report = ojson{{"error", {{"code", code}, {"message", message}}}};
    run.text.str("");
    if (run.common.json) return run.finish(exit_code);
    return exit_code;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectrality checks for Moran measures with prime-size digit sets"};
    app.require_subcommand(1);
    Common common;
    app.add_flag("--json", common.json, "Machine-readable report on stdout");
    app.add_flag("--timings", common.timings, "Include wall-clock timings");

    std::size_t horizon = 0, first = 1, levels = 2, block = 0, cap = 1000000, level = 2, size = 512;
    std::string fmt = "csv", path;
    bool print = false;
    CompleteOptions complete;

    auto add = [&](const std::string& name, const std::string& help) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("spec", common.spec, "System description (JSON)")->required();
        return sc;
    };
    auto* validate = add("validate", "Check the model hypotheses");
    auto* zeros = add("zeros", "List the zero directions of every level");
    auto* dec = add("decide", "Spectrality verdict");
    dec->add_option("--horizon", horizon, "Admissibility horizon (0: three cycle lengths)");
    auto* spectrum = add("spectrum", "Build Lambda_0 .. Lambda_L");
    spectrum->add_option("--levels", levels, "Largest level L");
    spectrum->add_option("--block", block, "Block size K (0: from the contraction estimate)");
    spectrum->add_option("--cap", cap, "Element cap per level");
    spectrum->add_flag("--print", print, "List the elements");
    auto* orth = add("verify-orth", "Exact orthogonality of Lambda_L");
    orth->add_option("--level", level, "Level L");
    orth->add_option("--block", block, "Block size K");
    orth->add_option("--cap", cap, "Element cap");
    auto* comp = add("verify-complete", "Sampled Q-function evidence");
    comp->add_option("--levels", complete.levels, "Largest level L");
    comp->add_option("--depth", complete.depth, "Truncation depth N");
    comp->add_option("--grid", complete.scan.grid, "Grid points per axis");
    comp->add_option("--random", complete.scan.random_points, "Extra random points");
    comp->add_option("--seed", complete.scan.seed, "Seed for the random points");
    comp->add_option("--block", complete.block, "Block size K");
    comp->add_option("--gap-tol", complete.gap_tol, "Accepted max |1 - Q|");
    comp->add_option("--tail-tol", complete.tail_tol, "Accepted certified tail");
    auto* adm = add("admissible", "Admissibility scan of the matrix products");
    adm->add_option("--horizon", horizon, "Horizon H (0: three cycle lengths)");
    adm->add_option("--first", first, "First k");
    auto* rend = add("render", "Truncated support as csv, svg or ppm");
    rend->add_option("--level", level, "Level N");
    rend->add_option("--format", fmt, "csv | svg | ppm");
    rend->add_option("--out", path, "Output file")->required();
    rend->add_option("--size", size, "Image size in pixels");
    rend->add_option("--cap", cap, "Point cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Pass : InputError;
    }

    Run run{common, out, err, app.get_subcommands().front()->get_name(), ojson::object(), {}};
    try {
        MoranSystem system = load_system(common.spec);
        AdmissibilityOptions scan;
        scan.horizon = horizon;
        scan.first_k = first;
        if (*validate) return cmd_validate(run, system);
        if (*zeros) return cmd_zeros(run, system);
        if (*dec) return cmd_decide(run, system, scan);
        if (*spectrum) return cmd_spectrum(run, system, levels, block, cap, print);
        if (*orth) return cmd_verify_orth(run, system, level, block, cap);
        if (*comp) return cmd_verify_complete(run, system, complete);
        if (*adm) return cmd_admissible(run, system, scan);
        if (*rend) return cmd_render(run, system, level, fmt, size, path, cap);
    } catch (const SpecError& e) {
        const auto& d = e.diagnostic();
        return error_exit(run, d.code, e.what(), InputError);
    } catch (const NoAdmissibleDirection& e) {
        return error_exit(run, "no-admissible-direction", e.what(), Undecided);
    } catch (const CapExceeded& e) {
        return error_exit(run, "cap-exceeded", e.what(), Undecided);
    } catch (const PairVerificationFailed& e) {
        return error_exit(run, "pair-verification", e.what(), Fail);
    } catch (const CollisionDetected& e) {
        return error_exit(run, "collision", e.what(), Fail);
    } catch (const ContainmentViolation& e) {
        return error_exit(run, "containment", e.what(), Fail);
    } catch (const HypothesisViolation& e) {
        return error_exit(run, "hypothesis", e.what(), InputError);
    } catch (const TemplateMismatch& e) {
        return error_exit(run, "template", e.what(), InputError);
    } catch (const IoFailure& e) {
        return error_exit(run, "io", e.what(), InputError);
    } catch (const Error& e) {
        return error_exit(run, "input", e.what(), InputError);
    }
    return InputError;
}

}  // namespace moran::cli

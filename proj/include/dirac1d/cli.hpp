#pragma once

// Run configuration and the four subcommands behind the dirac1d tool. Each
// command computes everything first and then writes its files in one pass.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "io.hpp"
#include "levinson.hpp"
#include "model.hpp"
#include "potentials.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"

namespace dirac1d {

inline constexpr const char* tool_version = "1.0.0";

struct GridConfig {
    double min = 1e-3;
    double max = 50.0;
    std::size_t count = 2000;
    std::string spacing = "log";

    std::vector<double> build() const {
        if (!(min > 0.0) || !(max > min)) throw ValidationError("grid: need 0 < min < max");
        if (count < 3) throw ValidationError("grid: need at least 3 points");
        if (spacing == "log") return log_grid(min, max, count);
        if (spacing == "lin") return uniform_grid(min, max, count);
        throw ValidationError("grid: spacing must be log or lin");
    }
};

struct SweepConfig {
    std::string param;  // parameter name inside "params", or "scale"
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 0;

    std::vector<double> build() const {
        if (count == 0) return {};
        if (count == 1) return {min};
        if (!(max > min)) throw ValidationError("sweep: need max > min");
        return uniform_grid(min, max, count);
    }
};

inline std::vector<Channel> all_channels() {
    const auto all = channel_enumerate();
    return {all.begin(), all.end()};
}

struct RunConfig {
    std::string command;
    nlohmann::json potential;  // inline description (files are read into it)
    GridConfig k;
    std::size_t e_resolution = 4000;
    double mass = 1.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double tol_levinson = 1e-6 * pi;
    double tol_half = 1e-9;
    double snap_max = 0.05;
    double k_anchor = 50.0;
    std::size_t theta_count = 101;
    std::string anchor = "automatic";
    std::vector<Channel> channels = all_channels();
    std::string out_dir = ".";
    bool emit_oracle = false;
    SweepConfig sweep;

    void validate() const {
        if (command != "phase-curve" && command != "bound" && command != "verify" && command != "sweep")
            throw ValidationError("unknown command '" + command + "'");
        if (potential.is_null()) throw ValidationError("no potential given (--potential, --inline or --family)");
        potential_from_json(potential);
        k.build();
        if (e_resolution < 2) throw ValidationError("E-grid resolution must be >= 2");
        Units{mass}.validate();
        StepControl{rel_tol, abs_tol}.validate();
        if (!(tol_levinson > 0.0) || !(tol_half > 0.0) || !(snap_max > 0.0))
            throw ValidationError("tolerances must be > 0");
        if (theta_count < 2) throw ValidationError("theta grid needs at least 2 points");
        parse_anchor();
        solver().continuation.validate();
        if (channels.empty()) throw ValidationError("no channels selected");
        if (out_dir.empty()) throw ValidationError("output directory is empty");
        if (command == "sweep") {
            if (sweep.param.empty()) throw ValidationError("sweep: parameter name missing (--param)");
            sweep.build();
        }
    }

    AnchorMethod parse_anchor() const {
        if (anchor == "automatic") return AnchorMethod::automatic;
        if (anchor == "asymptotic_integral") return AnchorMethod::asymptotic_integral;
        if (anchor == "theta_continuation") return AnchorMethod::theta_continuation;
        throw ValidationError("anchor must be automatic, asymptotic_integral or theta_continuation");
    }

    SolverOptions solver() const {
        SolverOptions o;
        o.units.mass = mass;
        o.step.rel_tol = rel_tol;
        o.step.abs_tol = abs_tol;
        o.continuation.k_anchor = k_anchor;
        o.continuation.theta_grid = uniform_grid(0.0, 1.0, theta_count);
        o.continuation.method = parse_anchor();
        return o;
    }

    AnalysisOptions analysis() const {
        AnalysisOptions a;
        a.solver = solver();
        a.spectrum.resolution = e_resolution;
        a.tolerances.residual = tol_levinson;
        a.tolerances.tol_half = tol_half;
        a.tolerances.snap_max = snap_max;
        a.k_grid = k.build();
        return a;
    }

    bool wants(Channel c) const { return std::find(channels.begin(), channels.end(), c) != channels.end(); }
    bool wants(Parity p) const {
        return std::any_of(channels.begin(), channels.end(), [p](Channel c) { return c.parity == p; });
    }
};

inline std::vector<Channel> parse_channel_list(const std::string& text) {
    std::vector<Channel> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find(',', start), text.size());
        const Channel c = parse_channel(text.substr(start, end - start));
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        start = end + 1;
    }
    // Canonical order keeps outputs independent of how the list was typed.
    std::vector<Channel> sorted;
    for (Channel c : channel_enumerate())
        if (std::find(out.begin(), out.end(), c) != out.end()) sorted.push_back(c);
    return sorted;
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["command"] = c.command;
    j["potential"] = c.potential;
    j["k"] = {{"min", c.k.min}, {"max", c.k.max}, {"count", c.k.count}, {"spacing", c.k.spacing}};
    j["e_resolution"] = c.e_resolution;
    j["mass"] = c.mass;
    j["rel_tol"] = c.rel_tol;
    j["abs_tol"] = c.abs_tol;
    j["tol_levinson"] = c.tol_levinson;
    j["tol_half"] = c.tol_half;
    j["snap_max"] = c.snap_max;
    j["k_anchor"] = c.k_anchor;
    j["theta_count"] = c.theta_count;
    j["anchor"] = c.anchor;
    std::vector<std::string> ch;
    for (Channel x : c.channels) ch.push_back(to_string(x));
    j["channels"] = ch;
    j["out"] = c.out_dir;
    j["emit_oracle"] = c.emit_oracle;
    if (c.command == "sweep")
        j["sweep"] = {{"param", c.sweep.param}, {"min", c.sweep.min}, {"max", c.sweep.max}, {"count", c.sweep.count}};
    return j;
}

/// Reads a config object, or the "config" member of a manifest written by a previous run.
inline RunConfig config_from_json(const nlohmann::json& in) {
    const nlohmann::json& j = in.contains("config") && in.at("config").is_object() ? in.at("config") : in;
    if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        if (j.contains("potential")) c.potential = j.at("potential");
        if (j.contains("k")) {
            const auto& k = j.at("k");
            c.k.min = k.value("min", c.k.min);
            c.k.max = k.value("max", c.k.max);
            c.k.count = k.value("count", c.k.count);
            c.k.spacing = k.value("spacing", c.k.spacing);
        }
        c.e_resolution = j.value("e_resolution", c.e_resolution);
        c.mass = j.value("mass", c.mass);
        c.rel_tol = j.value("rel_tol", c.rel_tol);
        c.abs_tol = j.value("abs_tol", c.abs_tol);
        c.tol_levinson = j.value("tol_levinson", c.tol_levinson);
        c.tol_half = j.value("tol_half", c.tol_half);
        c.snap_max = j.value("snap_max", c.snap_max);
        c.k_anchor = j.value("k_anchor", c.k_anchor);
        c.theta_count = j.value("theta_count", c.theta_count);
        c.anchor = j.value("anchor", c.anchor);
        if (j.contains("channels")) {
            std::string list;
            for (const auto& x : j.at("channels")) list += (list.empty() ? "" : ",") + x.get<std::string>();
            c.channels = parse_channel_list(list);
        }
        c.out_dir = j.value("out", c.out_dir);
        c.emit_oracle = j.value("emit_oracle", c.emit_oracle);
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            c.sweep.param = s.value("param", c.sweep.param);
            c.sweep.min = s.value("min", c.sweep.min);
            c.sweep.max = s.value("max", c.sweep.max);
            c.sweep.count = s.value("count", c.sweep.count);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return c;
}

/// Base potential for a named sweep family; the swept parameter is overwritten per point.
inline nlohmann::json family_template(const std::string& family) {
    if (family == "square_well") return {{"kind", "square_well"}, {"params", {{"V0", 0.0}, {"a", 1.0}}}};
    if (family == "delta") return {{"kind", "delta"}, {"params", {{"U0", 1.0}, {"sign", "well"}}}};
    if (family == "double_delta_well") return {{"kind", "double_delta_well"}, {"params", {{"U0", 1.0}, {"a", 1.0}}}};
    if (family == "delta_pair") return {{"kind", "delta_pair"}, {"params", {{"g", -1.0}, {"x0", 0.5}}}};
    throw ValidationError("unknown family '" + family + "' (square_well, delta, double_delta_well, delta_pair)");
}

inline std::string default_sweep_param(const std::string& family) {
    if (family == "square_well") return "V0";
    if (family == "delta" || family == "double_delta_well") return "U0";
    if (family == "delta_pair") return "g";
    return "";
}

inline PotentialFamily family_from_template(const nlohmann::json& base, const std::string& param) {
    return [base, param](double value) {
        nlohmann::json j = base;
        if (param == "scale")
            j["scale"] = value;
        else
            j["params"][param] = value;
        return potential_from_json(j);
    };
}

struct CommandResult {
    int exit_code = 0;
    std::map<std::string, std::string> files;  // name -> contents
    nlohmann::json manifest_extra = nlohmann::json::object();
    std::vector<std::string> diagnostics;
};

namespace detail {

inline std::string sign_suffix(EnergySign s) { return s == EnergySign::positive ? "plus" : "minus"; }

inline std::string file_tag(Channel c) { return to_string(c.parity) + "_" + sign_suffix(c.sign); }

inline std::array<PhaseShiftCurve, 4> all_curves(const PotentialSpec& pot, const RunConfig& cfg,
                                                 const std::vector<double>& ks, const SolverOptions& opts) {
    std::array<PhaseShiftCurve, 4> curves;
    const auto channels = channel_enumerate();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        // R and T need both parities of each requested sign.
        const Channel partner{channels[i].parity == Parity::even ? Parity::odd : Parity::even, channels[i].sign};
        if (cfg.wants(channels[i]) || cfg.wants(partner)) curves[i] = unwrap_curve(pot, channels[i], ks, opts);
    }
    return curves;
}

inline std::size_t channel_index(Channel c) {
    const auto all = channel_enumerate();
    return static_cast<std::size_t>(std::find(all.begin(), all.end(), c) - all.begin());
}

}  // namespace detail

inline CommandResult cmd_phase_curve(const RunConfig& cfg) {
    const auto pot = potential_from_json(cfg.potential);
    const auto opts = cfg.solver();
    const auto ks = cfg.k.build();
    const auto curves = detail::all_curves(pot, cfg, ks, opts);

    CommandResult r;
    nlohmann::json anchors = nlohmann::json::object();
    for (Channel c : cfg.channels) {
        const auto& curve = curves[detail::channel_index(c)];
        const Channel partner{c.parity == Parity::even ? Parity::odd : Parity::even, c.sign};
        r.files["phase_" + detail::file_tag(c) + ".csv"] =
            phase_curve_csv(curve, curves[detail::channel_index(partner)], cfg.mass);
        anchors[to_string(c)] = {{"method", to_string(curve.anchor)},
                                 {"k_anchor", curve.k_anchor},
                                 {"eta_at_anchor", curve.eta_at_anchor},
                                 {"eta_infinity", curve.eta_infinity}};
        if (cfg.emit_oracle) {
            std::function<double(double)> oracle;
            const auto& d = pot.description();
            const double scale = d.value("scale", 1.0);
            if (pot.kind() == PotentialKind::square_well) {
                const double depth = scale * d.at("params").at("V0").get<double>();
                const double a = d.at("params").at("a").get<double>();
                oracle = [=](double k) { return square_well_oracle_phase(depth, a, c, k, cfg.mass); };
            } else if (pot.kind() == PotentialKind::delta_origin) {
                const double g = pot.origin_strength().value_or(0.0);
                oracle = [=](double k) { return origin_delta_oracle_phase(g, c, k, cfg.mass); };
            } else {
                throw ValidationError("--emit-oracle supports square_well and delta potentials only");
            }
            std::string csv = csv_row({"k", "eta_mod_pi_oracle", "eta_mod_pi", "difference"});
            for (std::size_t i = 0; i < ks.size(); ++i) {
                const double o = oracle(ks[i]);
                csv += csv_row({format_double(ks[i]), format_double(o), format_double(curve.eta_mod_pi[i]),
                                format_double(reduce_mod_pi(curve.eta_mod_pi[i] - o))});
            }
            r.files["oracle_" + detail::file_tag(c) + ".csv"] = csv;
        }
    }
    r.manifest_extra["anchors"] = anchors;
    return r;
}

inline CommandResult cmd_bound(const RunConfig& cfg) {
    const auto pot = potential_from_json(cfg.potential);
    const auto opts = cfg.solver();
    const auto a = cfg.analysis();
    std::vector<BoundSpectrum> spectra;
    for (Parity p : {Parity::even, Parity::odd})
        if (cfg.wants(p)) spectra.push_back(bound_spectrum(pot, p, a.spectrum, opts));
    std::vector<HalfBoundEntry> entries;
    for (EnergySign s : {EnergySign::positive, EnergySign::negative})
        for (Parity p : {Parity::even, Parity::odd})
            if (cfg.wants(p)) entries.push_back({p, s, half_bound_detect(pot, p, s, cfg.tol_half, opts)});

    CommandResult r;
    r.files["spectrum.csv"] = spectrum_csv(spectra);
    r.files["half_bound.txt"] = half_bound_report(entries, cfg.tol_half);
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& s : spectra) {
        counts[to_string(s.parity)] = s.count();
        if (s.edge_root_low || s.edge_root_high)
            r.diagnostics.push_back(to_string(s.parity) + ": root in an edge cell of the E grid (state near +-mu)");
    }
    r.manifest_extra["bound_counts"] = counts;
    return r;
}

inline CommandResult cmd_verify(const RunConfig& cfg) {
    const auto pot = potential_from_json(cfg.potential);
    const auto a = cfg.analysis();
    const auto ks = cfg.k.build();
    const auto flags = detect_half_bound_flags(pot, cfg.tol_half, a.solver);

    std::vector<LevinsonReport> reports;
    for (Parity p : {Parity::even, Parity::odd}) {
        if (!cfg.wants(p)) continue;
        const auto plus = unwrap_curve(pot, {p, EnergySign::positive}, ks, a.solver);
        const auto minus = unwrap_curve(pot, {p, EnergySign::negative}, ks, a.solver);
        const auto spec = bound_spectrum(pot, p, a.spectrum, a.solver);
        reports.push_back(verify(plus, minus, static_cast<int>(spec.count()), flags, a.tolerances));
    }

    CommandResult r;
    r.files["levinson_report.txt"] = levinson_report_text(reports, cfg.tol_levinson);
    nlohmann::json status = nlohmann::json::object();
    for (const auto& rep : reports) {
        status[to_string(rep.parity)] = rep.passed ? "pass" : "fail";
        if (!rep.passed) {
            r.exit_code = 2;
            r.diagnostics.push_back("Levinson identity violated for " + to_string(rep.parity) + " parity: lhs " +
                                    format_double(rep.lhs_full) + ", n = " + std::to_string(rep.n) + ", residual " +
                                    format_double(rep.residual_full));
        }
        if (!rep.classifier_consistent)
            r.diagnostics.push_back("threshold classifier disagrees with half-bound detection for " +
                                    to_string(rep.parity) + " parity");
    }
    r.manifest_extra["levinson"] = status;
    return r;
}

inline CommandResult cmd_sweep(const RunConfig& cfg) {
    const auto grid = cfg.sweep.build();
    const auto family = family_from_template(cfg.potential, cfg.sweep.param);
    const auto result = sweep(cfg.sweep.param, family, grid, cfg.analysis());

    CommandResult r;
    r.files["sweep.csv"] = sweep_csv(result);
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& c : result.critical)
        crit.push_back({{"param", c.param},
                        {"parity", to_string(c.parity)},
                        {"threshold", c.sign == EnergySign::positive ? "+mu" : "-mu"}});
    r.manifest_extra["critical_couplings"] = crit;
    r.manifest_extra["dead_zone"] = result.dead_zone;

    // Failures are expected only within one grid step of a critical coupling.
    const double step = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
    auto excused = [&](double param) {
        return std::any_of(result.critical.begin(), result.critical.end(),
                           [&](const CriticalCoupling& c) { return std::abs(c.param - param) <= step; });
    };
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& p : result.points) {
        if (!p.flagged) continue;
        const bool ok = excused(p.param);
        if (!p.error.empty()) {
            errors.push_back(p.error);
            if (!ok) r.exit_code = std::max(r.exit_code, 3);
        } else if (!ok) {
            r.exit_code = std::max(r.exit_code, 2);
        }
        r.diagnostics.push_back(cfg.sweep.param + " = " + format_double(p.param) + ": " +
                                (p.error.empty() ? "residual above tolerance" : p.error) +
                                (ok ? " (near a critical coupling)" : ""));
    }
    r.manifest_extra["point_errors"] = errors;
    return r;
}

inline nlohmann::json make_manifest(const RunConfig& cfg, const CommandResult& res) {
    nlohmann::json m;
    m["tool"] = "dirac1d";
    m["version"] = tool_version;
    m["config"] = to_json(cfg);
    const auto pot = potential_from_json(cfg.potential);
    m["anchor_method"] = to_string(resolve_anchor(pot, cfg.parse_anchor()));
    std::vector<std::string> names;
    for (const auto& [name, _] : res.files) names.push_back(name);
    m["outputs"] = names;
    m["exit_code"] = res.exit_code;
    for (const auto& [key, value] : res.manifest_extra.items()) m[key] = value;
    return m;
}

inline CommandResult run_command(const RunConfig& cfg) {
    cfg.validate();
    CommandResult res;
    if (cfg.command == "phase-curve")
        res = cmd_phase_curve(cfg);
    else if (cfg.command == "bound")
        res = cmd_bound(cfg);
    else if (cfg.command == "verify")
        res = cmd_verify(cfg);
    else
        res = cmd_sweep(cfg);
    res.files["manifest.json"] = make_manifest(cfg, res).dump(2) + "\n";
    return res;
}

/// Single writer: creates the output directory and writes every file.
inline void write_outputs(const std::string& dir, const CommandResult& res) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& [name, contents] : res.files) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot open '" + path.string() + "' for writing");
        f << contents;
        if (!f) throw Error("write failed for '" + path.string() + "'");
    }
}

}  // namespace dirac1d

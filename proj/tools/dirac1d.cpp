#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dirac1d/cli.hpp"

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw dirac1d::ValidationError("cannot read '" + path + "'");
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw dirac1d::ValidationError("'" + path + "': " + e.what());
    }
}

nlohmann::json parse_inline(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw dirac1d::ValidationError(std::string("--inline: ") + e.what());
    }
}

struct Flags {
    std::string config, potential, inline_json, kspacing, out, channels, anchor, family, param;
    double kmin = 0, kmax = 0, tol_levinson = 0, tol_half = 0, mass = 0, k_anchor = 0, pmin = 0, pmax = 0;
    std::size_t kcount = 0, eres = 0, pcount = 0, theta_count = 0;
    bool emit_oracle = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON config or a manifest from an earlier run");
    auto* pot = sub->add_option("--potential", f.potential, "potential description file (JSON)");
    sub->add_option("--inline", f.inline_json, "potential description as a JSON string")->excludes(pot);
    sub->add_option("--kmin", f.kmin, "smallest momentum (units of mu)");
    sub->add_option("--kmax", f.kmax, "largest momentum (units of mu)");
    sub->add_option("--kcount", f.kcount, "number of momenta");
    sub->add_option("--kspacing", f.kspacing, "log or lin")->check(CLI::IsMember({"log", "lin"}));
    sub->add_option("--eres", f.eres, "E-grid resolution for the bound-state scan");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--channels", f.channels, "comma list of even+,even-,odd+,odd-");
    sub->add_option("--tol-levinson", f.tol_levinson, "Levinson residual tolerance (radians)");
    sub->add_option("--tol-half", f.tol_half, "half-bound detection tolerance");
    sub->add_option("--mass", f.mass, "particle mass mu");
    sub->add_option("--k-anchor", f.k_anchor, "momentum where the absolute branch is fixed");
    sub->add_option("--theta-count", f.theta_count, "points on the coupling-continuation grid");
    sub->add_option("--anchor", f.anchor, "automatic, asymptotic_integral or theta_continuation")
        ->check(CLI::IsMember({"automatic", "asymptotic_integral", "theta_continuation"}));
}

// Config file first, then flags on top.
dirac1d::RunConfig build_config(const std::string& command, const Flags& f, CLI::App* sub) {
    dirac1d::RunConfig c;
    if (!f.config.empty()) c = dirac1d::config_from_json(read_json_file(f.config));
    c.command = command;
    auto given = [&](const char* name) {
        const auto* o = sub->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    };
    if (given("--family")) {
        if (!given("--potential") && !given("--inline")) c.potential = dirac1d::family_template(f.family);
        if (!given("--param") && c.sweep.param.empty()) c.sweep.param = dirac1d::default_sweep_param(f.family);
    }
    if (given("--potential")) c.potential = read_json_file(f.potential);
    if (given("--inline")) c.potential = parse_inline(f.inline_json);
    if (given("--kmin")) c.k.min = f.kmin;
    if (given("--kmax")) c.k.max = f.kmax;
    if (given("--kcount")) c.k.count = f.kcount;
    if (given("--kspacing")) c.k.spacing = f.kspacing;
    if (given("--eres")) c.e_resolution = f.eres;
    if (given("--out")) c.out_dir = f.out;
    if (given("--channels")) c.channels = dirac1d::parse_channel_list(f.channels);
    if (given("--tol-levinson")) c.tol_levinson = f.tol_levinson;
    if (given("--tol-half")) c.tol_half = f.tol_half;
    if (given("--mass")) c.mass = f.mass;
    if (given("--k-anchor")) c.k_anchor = f.k_anchor;
    if (given("--theta-count")) c.theta_count = f.theta_count;
    if (given("--anchor")) c.anchor = f.anchor;
    if (given("--emit-oracle")) c.emit_oracle = f.emit_oracle;
    if (given("--param")) c.sweep.param = f.param;
    if (given("--pmin")) c.sweep.min = f.pmin;
    if (given("--pmax")) c.sweep.max = f.pmax;
    if (given("--pcount")) c.sweep.count = f.pcount;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dirac1d: 1D Dirac scattering, bound states and Levinson checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dirac1d::tool_version);
    Flags f;

    auto* phase = app.add_subcommand("phase-curve", "phase shifts and R/T per channel");
    add_common(phase, f);
    phase->add_flag("--emit-oracle", f.emit_oracle, "also write closed-form phases (square well, delta)");
    auto* bound = app.add_subcommand("bound", "bound spectrum and half-bound states");
    add_common(bound, f);
    auto* verify = app.add_subcommand("verify", "Levinson identity per parity");
    add_common(verify, f);
    auto* sweep = app.add_subcommand("sweep", "Levinson identity over a parameter grid");
    add_common(sweep, f);
    sweep->add_option("--family", f.family, "square_well, delta, double_delta_well or delta_pair");
    sweep->add_option("--param", f.param, "swept parameter (a key of params, or scale)");
    sweep->add_option("--pmin", f.pmin, "first parameter value");
    sweep->add_option("--pmax", f.pmax, "last parameter value");
    sweep->add_option("--pcount", f.pcount, "number of parameter values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        const auto cfg = build_config(sub->get_name(), f, sub);
        const auto result = dirac1d::run_command(cfg);
        dirac1d::write_outputs(cfg.out_dir, result);
        for (const auto& d : result.diagnostics) std::cerr << "dirac1d: " << d << "\n";
        return result.exit_code;
    } catch (const dirac1d::ValidationError& e) {
        std::cerr << "dirac1d: invalid input: " << e.what() << "\n";
        return 1;
    } catch (const dirac1d::TheoremViolation& e) {
        std::cerr << "dirac1d: theorem violation: " << e.what() << "\n";
        return 2;
    } catch (const dirac1d::NumericalError& e) {
        std::cerr << "dirac1d: numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "dirac1d: " << e.what() << "\n";
        return 1;
    }
}

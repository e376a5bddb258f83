#pragma once

// Text and CSV renderings. Floats use the shortest decimal that round-trips,
// so identical results give identical bytes.

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "levinson.hpp"
#include "model.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"

namespace dirac1d {

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) x = 0.0;  // drop the sign of -0
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc()) throw Error("float formatting failed");
    return std::string(buf.data(), end);
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

/// One channel's curve; R and T need the opposite-parity curve of the same energy sign.
inline std::string phase_curve_csv(const PhaseShiftCurve& curve, const PhaseShiftCurve& partner, double mass = 1.0) {
    if (partner.channel.sign != curve.channel.sign || partner.channel.parity == curve.channel.parity ||
        partner.k_grid != curve.k_grid)
        throw ValidationError("phase curve export: partner must be the other parity on the same grid");
    const bool even = curve.channel.parity == Parity::even;
    std::string out = csv_row({"k", "E", "eta", "eta_mod_pi", "R_re", "R_im", "T_re", "T_im"});
    for (std::size_t i = 0; i < curve.k_grid.size(); ++i) {
        const double k = curve.k_grid[i];
        const auto rt = even ? reflection_transmission(curve.eta[i], partner.eta[i])
                             : reflection_transmission(partner.eta[i], curve.eta[i]);
        out += csv_row({format_double(k), format_double(channel_energy(curve.channel.sign, k, mass)),
                        format_double(curve.eta[i]), format_double(curve.eta_mod_pi[i]), format_double(rt.R.real()),
                        format_double(rt.R.imag()), format_double(rt.T.real()), format_double(rt.T.imag())});
    }
    return out;
}

inline std::string spectrum_csv(const std::vector<BoundSpectrum>& spectra) {
    std::string out = csv_row({"parity", "index", "E", "lambda", "nodes"});
    for (const auto& s : spectra)
        for (std::size_t i = 0; i < s.states.size(); ++i) {
            const auto& b = s.states[i];
            out += csv_row({to_string(b.parity), std::to_string(i), format_double(b.E), format_double(b.lambda),
                            std::to_string(b.node_count)});
        }
    return out;
}

inline std::string half_bound_flags_string(const HalfBoundFlags& f) {
    std::vector<std::string> on;
    if (f.at_plus_mu_even) on.emplace_back("even@+mu");
    if (f.at_plus_mu_odd) on.emplace_back("odd@+mu");
    if (f.at_minus_mu_even) on.emplace_back("even@-mu");
    if (f.at_minus_mu_odd) on.emplace_back("odd@-mu");
    if (on.empty()) return "none";
    std::string s;
    for (std::size_t i = 0; i < on.size(); ++i) s += (i ? ";" : "") + on[i];
    return s;
}

struct HalfBoundEntry {
    Parity parity;
    EnergySign sign;
    HalfBoundResult result;
};

inline std::string half_bound_report(const std::vector<HalfBoundEntry>& entries, double tol_half) {
    std::ostringstream out;
    out << "tolerance: " << format_double(tol_half) << "\n";
    for (const auto& e : entries) {
        out << "[" << to_string(e.parity) << (e.sign == EnergySign::positive ? "@+mu" : "@-mu") << "]\n";
        out << "present: " << (e.result.present ? "true" : "false") << "\n";
        out << "residual: " << format_double(e.result.residual) << "\n";
    }
    return out.str();
}

inline std::string levinson_report_text(const std::vector<LevinsonReport>& reports, double tolerance) {
    std::ostringstream out;
    out << "tolerance: " << format_double(tolerance) << "\n";
    for (const auto& r : reports) {
        out << "[" << to_string(r.parity) << "]\n";
        out << "status: " << (r.passed ? "pass" : "FAIL") << "\n";
        out << "n: " << r.n << "\n";
        out << "eta_plus_mu: " << format_double(r.eta_plus_mu) << " (extrapolated "
            << format_double(r.eta_plus_mu_extrapolated) << ", snap " << format_double(r.snap_distance_plus) << ", "
            << to_string(r.kind_plus) << ")\n";
        out << "eta_minus_mu: " << format_double(r.eta_minus_mu) << " (extrapolated "
            << format_double(r.eta_minus_mu_extrapolated) << ", snap " << format_double(r.snap_distance_minus) << ", "
            << to_string(r.kind_minus) << ")\n";
        out << "eta_plus_inf: " << format_double(r.eta_plus_inf) << "\n";
        out << "eta_minus_inf: " << format_double(r.eta_minus_inf) << "\n";
        out << "anchor: " << to_string(r.anchor) << " (eta at k_anchor: +E " << format_double(r.eta_plus_anchor)
            << ", -E " << format_double(r.eta_minus_anchor) << ")\n";
        out << "lhs_full: " << format_double(r.lhs_full) << "\n";
        out << "lhs_reduced: " << format_double(r.lhs_reduced) << "\n";
        out << "residual_full: " << format_double(r.residual_full) << "\n";
        out << "residual_reduced: " << format_double(r.residual_reduced) << "\n";
        out << "half_bound: " << half_bound_flags_string(r.half_bound) << "\n";
        out << "classifier_consistent: " << (r.classifier_consistent ? "true" : "false") << "\n";
    }
    return out.str();
}

/// Columns: param, parity, n, eta_mu, eta_minus_mu, lhs, residual, half_bound_flags.
/// Points that failed carry empty numeric cells; their messages go to the manifest.
inline std::string sweep_csv(const SweepResult& r) {
    std::string out = csv_row({"param", "parity", "n", "eta_mu", "eta_minus_mu", "lhs", "residual", "half_bound_flags"});
    for (const auto& p : r.points) {
        for (Parity parity : {Parity::even, Parity::odd}) {
            const auto& rep = parity == Parity::even ? p.even : p.odd;
            if (!rep) {
                out += csv_row({format_double(p.param), to_string(parity), "", "", "", "", "", ""});
                continue;
            }
            out += csv_row({format_double(p.param), to_string(parity), std::to_string(rep->n),
                            format_double(rep->eta_plus_mu), format_double(rep->eta_minus_mu),
                            format_double(rep->lhs_full), format_double(rep->residual_full),
                            half_bound_flags_string(rep->half_bound)});
        }
    }
    return out;
}

}  // namespace dirac1d

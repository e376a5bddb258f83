#pragma once

// Per-parity assembly of the Levinson identity
//
//   [eta(mu) - eta(+inf)] + [eta(-mu) - eta(-inf)]
//       +- (pi/2) [sin^2 eta(mu) - sin^2 eta(-mu)] = n pi
//
// from precomputed phase-shift curves, spectra and half-bound flags, and
// parameter sweeps over potential families.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "model.hpp"
#include "parallel.hpp"
#include "potentials.hpp"
#include "scattering.hpp"
#include "spectrum.hpp"

namespace dirac1d {

struct LevinsonTolerances {
    double residual = 1e-6 * pi;
    double snap_max = 0.05;
    double tol_half = 1e-9;
};

struct ThresholdEstimate {
    double extrapolated = 0.0;
    double snapped = 0.0;
    double snap_distance = 0.0;
    ThresholdClass cls;
};

struct LevinsonReport {
    Parity parity = Parity::even;
    double eta_plus_mu = 0.0;   // snapped threshold phase at E = +mu
    double eta_minus_mu = 0.0;  // snapped threshold phase at E = -mu
    double eta_plus_mu_extrapolated = 0.0;
    double eta_minus_mu_extrapolated = 0.0;
    double snap_distance_plus = 0.0;
    double snap_distance_minus = 0.0;
    ThresholdKind kind_plus = ThresholdKind::integer;
    ThresholdKind kind_minus = ThresholdKind::integer;
    double eta_plus_inf = 0.0;
    double eta_minus_inf = 0.0;
    double eta_plus_anchor = 0.0;  // absolute phase at k_anchor
    double eta_minus_anchor = 0.0;
    AnchorMethod anchor = AnchorMethod::asymptotic_integral;
    double lhs_full = 0.0;
    double lhs_reduced = 0.0;
    int n = 0;
    double residual_full = 0.0;
    double residual_reduced = 0.0;
    HalfBoundFlags half_bound;
    bool classifier_consistent = true;
    bool passed = false;
};

/// Extrapolates eta(k) -> k = 0 from the three smallest momenta assuming
/// eta = eta0 + c1 k + c3 k^3 (eta - eta0 is odd in k near threshold).
inline double richardson_threshold(const PhaseShiftCurve& curve) {
    if (curve.k_grid.size() < 3) throw ValidationError("threshold extrapolation needs at least 3 points");
    const double k1 = curve.k_grid[0], k2 = curve.k_grid[1], k3 = curve.k_grid[2];
    const double e1 = curve.eta[0], e2 = curve.eta[1], e3 = curve.eta[2];
    // Weights w with sum w = 1, sum w k = 0, sum w k^3 = 0.
    const double w1 = k2 * k3 * (k3 * k3 - k2 * k2);
    const double w2 = k3 * k1 * (k1 * k1 - k3 * k3);
    const double w3 = k1 * k2 * (k2 * k2 - k1 * k1);
    return (w1 * e1 + w2 * e2 + w3 * e3) / (w1 + w2 + w3);
}

inline ThresholdEstimate estimate_threshold(const PhaseShiftCurve& curve) {
    ThresholdEstimate t;
    t.cls = threshold_classify(curve);
    t.extrapolated = richardson_threshold(curve);
    const double offset = t.cls.kind == ThresholdKind::integer ? 0.0 : 0.5;
    t.snapped = (std::round(t.extrapolated / pi - offset) + offset) * pi;
    t.snap_distance = std::abs(t.extrapolated - t.snapped);
    return t;
}

/// Evaluates the identity for one parity from the positive- and negative-energy
/// curves of that parity. Throws NumericalError when a threshold phase cannot
/// be placed on the pi/2 lattice within tol.snap_max.
inline LevinsonReport verify(const PhaseShiftCurve& plus, const PhaseShiftCurve& minus, int n,
                             const HalfBoundFlags& flags, const LevinsonTolerances& tol = {}) {
    if (plus.channel.parity != minus.channel.parity || plus.channel.sign != EnergySign::positive ||
        minus.channel.sign != EnergySign::negative)
        throw ValidationError("verify: need the +E and -E curves of one parity");
    const Parity parity = plus.channel.parity;
    const auto tp = estimate_threshold(plus);
    const auto tm = estimate_threshold(minus);
    for (const auto* t : {&tp, &tm}) {
        if (t->snap_distance > tol.snap_max) {
            std::ostringstream msg;
            msg << "threshold extrapolation failed for " << to_string(t->cls.channel) << ": extrapolated "
                << t->extrapolated << ", snap distance " << t->snap_distance;
            throw NumericalError(msg.str());
        }
    }

    LevinsonReport r;
    r.parity = parity;
    r.eta_plus_mu = tp.snapped;
    r.eta_minus_mu = tm.snapped;
    r.eta_plus_mu_extrapolated = tp.extrapolated;
    r.eta_minus_mu_extrapolated = tm.extrapolated;
    r.snap_distance_plus = tp.snap_distance;
    r.snap_distance_minus = tm.snap_distance;
    r.kind_plus = tp.cls.kind;
    r.kind_minus = tm.cls.kind;
    r.eta_plus_inf = plus.eta_infinity;
    r.eta_minus_inf = minus.eta_infinity;
    r.eta_plus_anchor = plus.eta_at_anchor;
    r.eta_minus_anchor = minus.eta_at_anchor;
    r.anchor = plus.anchor;
    r.n = n;
    r.half_bound = flags;

    // Snapped phases sit on the pi/2 lattice, so sin^2 is exactly 0 or 1.
    const double s2_plus = tp.cls.kind == ThresholdKind::half_integer ? 1.0 : 0.0;
    const double s2_minus = tm.cls.kind == ThresholdKind::half_integer ? 1.0 : 0.0;
    const double correction = parity_sign(parity) * (pi / 2) * (s2_plus - s2_minus);
    r.lhs_full = (r.eta_plus_mu - r.eta_plus_inf) + (r.eta_minus_mu - r.eta_minus_inf) + correction;
    r.lhs_reduced = r.eta_plus_mu + r.eta_minus_mu + correction;
    r.residual_full = r.lhs_full - n * pi;
    r.residual_reduced = r.lhs_reduced - n * pi;
    r.classifier_consistent =
        tp.cls.kind == expected_threshold_kind(plus.channel, flags.get(parity, EnergySign::positive)) &&
        tm.cls.kind == expected_threshold_kind(minus.channel, flags.get(parity, EnergySign::negative));
    r.passed = std::abs(r.residual_full) < tol.residual;
    return r;
}

/// Throws TheoremViolation when a report did not pass.
inline void enforce(const LevinsonReport& r, const LevinsonTolerances& tol = {}) {
    if (r.passed) return;
    std::ostringstream msg;
    msg << "Levinson identity violated for " << to_string(r.parity) << " parity: lhs " << r.lhs_full << ", n " << r.n
        << ", residual " << r.residual_full << " (tolerance " << tol.residual << ")";
    throw TheoremViolation(msg.str());
}

struct AnalysisOptions {
    SolverOptions solver;
    SpectrumOptions spectrum;
    LevinsonTolerances tolerances;
    std::vector<double> k_grid = default_k_grid();
};

/// Everything computed for one potential: four curves, two spectra, flags, two reports.
struct PotentialAnalysis {
    std::array<PhaseShiftCurve, 4> curves;  // channel_enumerate() order
    std::array<BoundSpectrum, 2> spectra;   // even, odd
    HalfBoundFlags half_bound;
    std::array<LevinsonReport, 2> reports;  // even, odd

    const PhaseShiftCurve& curve(Channel c) const {
        const auto all = channel_enumerate();
        return curves[static_cast<std::size_t>(std::find(all.begin(), all.end(), c) - all.begin())];
    }
};

inline PotentialAnalysis analyze(const PotentialSpec& pot, const AnalysisOptions& opts = {}) {
    PotentialAnalysis out;
    const auto channels = channel_enumerate();
    for (std::size_t i = 0; i < channels.size(); ++i)
        out.curves[i] = unwrap_curve(pot, channels[i], opts.k_grid, opts.solver);
    out.spectra[0] = bound_spectrum(pot, Parity::even, opts.spectrum, opts.solver);
    out.spectra[1] = bound_spectrum(pot, Parity::odd, opts.spectrum, opts.solver);
    out.half_bound = detect_half_bound_flags(pot, opts.tolerances.tol_half, opts.solver);
    out.reports[0] = verify(out.curves[0], out.curves[1], static_cast<int>(out.spectra[0].count()), out.half_bound,
                            opts.tolerances);
    out.reports[1] = verify(out.curves[2], out.curves[3], static_cast<int>(out.spectra[1].count()), out.half_bound,
                            opts.tolerances);
    return out;
}

struct CriticalCoupling {
    double param = 0.0;
    Parity parity = Parity::even;
    EnergySign sign = EnergySign::positive;  // half-bound state at E = +mu or -mu
};

struct SweepPoint {
    double param = 0.0;
    std::optional<LevinsonReport> even;
    std::optional<LevinsonReport> odd;
    std::string error;     // verify/numerical failure, annotated with the parameter
    bool flagged = false;  // error or residual above tolerance
    bool near_critical = false;
};

struct SweepResult {
    std::string parameter;
    std::vector<double> grid;
    std::vector<SweepPoint> points;
    std::vector<CriticalCoupling> critical;  // sorted by parameter
    double dead_zone = 0.0;                  // half-width around each critical coupling
};

using PotentialFamily = std::function<PotentialSpec(double)>;

/// Runs the identity for both parities over a parameter grid and locates the
/// couplings where a half-bound state appears (n jumps there).
inline SweepResult sweep(const std::string& parameter, const PotentialFamily& family, const std::vector<double>& grid,
                         const AnalysisOptions& opts = {}, double bisection_tol = 1e-10) {
    SweepResult out;
    out.parameter = parameter;
    out.grid = grid;
    out.dead_zone = 2.0 * bisection_tol;
    if (grid.empty()) return out;

    // Parallelism goes over sweep points; inner solves run serially.
    AnalysisOptions inner = opts;
    inner.solver.threads = 1;
    out.points = parallel_map<SweepPoint>(grid.size(), opts.solver.threads, [&](std::size_t i) {
        SweepPoint p;
        p.param = grid[i];
        try {
            const auto a = analyze(family(grid[i]), inner);
            p.even = a.reports[0];
            p.odd = a.reports[1];
            p.flagged = !a.reports[0].passed || !a.reports[1].passed;
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << parameter << " = " << grid[i] << ": " << e.what();
            p.error = msg.str();
            p.flagged = true;
        }
        return p;
    });

    // Signed half-bound residuals change sign exactly at critical couplings.
    struct Probe {
        Parity parity;
        EnergySign sign;
    };
    const std::array<Probe, 4> probes{{{Parity::even, EnergySign::positive},
                                       {Parity::odd, EnergySign::positive},
                                       {Parity::even, EnergySign::negative},
                                       {Parity::odd, EnergySign::negative}}};
    auto residual = [&](double param, const Probe& pr) {
        return half_bound_detect(family(param), pr.parity, pr.sign, opts.tolerances.tol_half, inner.solver).residual;
    };
    // Points whose potential cannot be built or solved give NaN and bracket nothing.
    const auto values = parallel_map<std::array<double, 4>>(grid.size(), opts.solver.threads, [&](std::size_t i) {
        std::array<double, 4> v{};
        for (std::size_t j = 0; j < probes.size(); ++j) {
            try {
                v[j] = residual(grid[i], probes[j]);
            } catch (const Error&) {
                v[j] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        return v;
    });
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        for (std::size_t j = 0; j < probes.size(); ++j) {
            double lo = grid[i], hi = grid[i + 1];
            double rlo = values[i][j];
            const double rhi = values[i + 1][j];
            if (rlo == 0.0) {
                out.critical.push_back({lo, probes[j].parity, probes[j].sign});
                continue;
            }
            if (std::isnan(rlo) || std::isnan(rhi) || (rlo < 0.0) == (rhi < 0.0) || rhi == 0.0) continue;
            bool failed = false;
            while (hi - lo > bisection_tol) {
                const double mid = 0.5 * (lo + hi);
                double rm;
                try {
                    rm = residual(mid, probes[j]);
                } catch (const Error&) {
                    failed = true;
                    break;
                }
                if ((rm < 0.0) == (rlo < 0.0)) {
                    lo = mid;
                    rlo = rm;
                } else {
                    hi = mid;
                }
            }
            if (!failed) out.critical.push_back({0.5 * (lo + hi), probes[j].parity, probes[j].sign});
        }
    }
    for (std::size_t j = 0; j < probes.size(); ++j)
        if (values.back()[j] == 0.0) out.critical.push_back({grid.back(), probes[j].parity, probes[j].sign});
    std::sort(out.critical.begin(), out.critical.end(),
              [](const CriticalCoupling& a, const CriticalCoupling& b) { return a.param < b.param; });
    for (auto& p : out.points)
        for (const auto& c : out.critical)
            if (std::abs(p.param - c.param) <= out.dead_zone) p.near_critical = true;
    return out;
}

}  // namespace dirac1d

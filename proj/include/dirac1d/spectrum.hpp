#pragma once

// Bound states in the mass gap, half-bound states at E = +-mu, and the
// threshold classification of phase shifts.

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "integrator.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "potentials.hpp"
#include "scattering.hpp"

namespace dirac1d {

struct BoundState {
    double E = 0.0;
    Parity parity = Parity::even;
    double lambda = 0.0;  // decay constant sqrt(mu^2 - E^2)
    int node_count = 0;
};

struct BoundSpectrum {
    Parity parity = Parity::even;
    std::vector<BoundState> states;  // sorted by E
    // A root in the first/last grid cell: a state may be merging into a continuum.
    bool edge_root_low = false;
    bool edge_root_high = false;

    std::size_t count() const { return states.size(); }
};

struct SpectrumOptions {
    std::size_t resolution = 4000;
    double edge_eps = 1e-9;     // grid spans (-mu + eps, mu - eps), in units of mu
    double energy_tol = 1e-12;  // bisection width, in units of mu

    void validate() const {
        if (resolution < 2) throw ValidationError("spectrum: resolution must be >= 2");
        if (!(edge_eps > 0.0 && edge_eps < 1.0)) throw ValidationError("spectrum: edge eps must lie in (0, 1)");
        if (!(energy_tol > 0.0)) throw ValidationError("spectrum: energy tolerance must be > 0");
    }
};

/// Mismatch between the interior solution and the decaying exterior solution
/// at x = a, for E in the gap.
///
/// Outside the cutoff u = e^{-lambda x}, v = lambda u / (E + mu); the returned
/// value is the Wronskian of the two, normalized by both spinor lengths.
inline double bound_matching_residual(const PotentialSpec& pot, double E, Parity parity, const SolverOptions& opts = {}) {
    const double mu = opts.units.mass;
    if (!(std::abs(E) < mu)) throw ValidationError("bound residual: |E| must be < mu");
    const double lambda = std::sqrt((mu - E) * (mu + E));
    const Spinor in = propagate(pot, E, parity, opts.step, opts.units).spinor_at_a;
    const Spinor out{E + mu, lambda};
    return wronskian(in, out) / (in.norm() * out.norm());
}

inline BoundSpectrum bound_spectrum(const PotentialSpec& pot, Parity parity, const SpectrumOptions& sopts = {},
                                    const SolverOptions& opts = {}) {
    sopts.validate();
    const double mu = opts.units.mass;
    const double eps = sopts.edge_eps * mu;
    const auto grid = uniform_grid(-mu + eps, mu - eps, sopts.resolution);
    const auto res = parallel_map<double>(grid.size(), opts.threads, [&](std::size_t i) {
        return bound_matching_residual(pot, grid[i], parity, opts);
    });

    BoundSpectrum spec;
    spec.parity = parity;
    std::vector<std::pair<double, double>> brackets;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const bool sign_change = (res[i] < 0.0 && res[i + 1] > 0.0) || (res[i] > 0.0 && res[i + 1] < 0.0);
        const bool exact = res[i] == 0.0 && i > 0;
        if (!sign_change && !exact) continue;
        if (i == 0) spec.edge_root_low = true;
        if (i + 2 == grid.size()) spec.edge_root_high = true;
        brackets.emplace_back(grid[i], grid[i + 1]);
    }
    const auto states = parallel_map<BoundState>(brackets.size(), opts.threads, [&](std::size_t b) {
        auto [lo, hi] = brackets[b];
        double rlo = bound_matching_residual(pot, lo, parity, opts);
        while (hi - lo > sopts.energy_tol * mu) {
            const double mid = 0.5 * (lo + hi);
            const double rm = bound_matching_residual(pot, mid, parity, opts);
            if (rm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((rm < 0.0) == (rlo < 0.0)) {
                lo = mid;
                rlo = rm;
            } else {
                hi = mid;
            }
        }
        BoundState s;
        s.E = 0.5 * (lo + hi);
        s.parity = parity;
        s.lambda = std::sqrt((mu - s.E) * (mu + s.E));
        s.node_count = propagate(pot, s.E, parity, opts.step, opts.units).node_count;
        return s;
    });
    spec.states = states;
    return spec;
}

struct HalfBoundResult {
    bool present = false;
    double residual = 0.0;  // signed v(a)/|psi| at +mu, u(a)/|psi| at -mu
};

/// Critical solution at E = +mu (exterior u = 1, v = 0: needs v(a) = 0) or
/// E = -mu (exterior u = 0, v = 1: needs u(a) = 0).
inline HalfBoundResult half_bound_detect(const PotentialSpec& pot, Parity parity, EnergySign sign,
                                         double tol_half = 1e-9, const SolverOptions& opts = {}) {
    const double E = energy_sign(sign) * opts.units.mass;
    const Spinor s = propagate(pot, E, parity, opts.step, opts.units).spinor_at_a;
    const double r = (sign == EnergySign::positive ? s.v : s.u) / s.norm();
    return {std::abs(r) < tol_half, r};
}

struct HalfBoundFlags {
    bool at_plus_mu_even = false;
    bool at_plus_mu_odd = false;
    bool at_minus_mu_even = false;
    bool at_minus_mu_odd = false;

    bool get(Parity p, EnergySign s) const {
        if (s == EnergySign::positive) return p == Parity::even ? at_plus_mu_even : at_plus_mu_odd;
        return p == Parity::even ? at_minus_mu_even : at_minus_mu_odd;
    }

    friend bool operator==(const HalfBoundFlags&, const HalfBoundFlags&) = default;
};

inline HalfBoundFlags detect_half_bound_flags(const PotentialSpec& pot, double tol_half = 1e-9,
                                              const SolverOptions& opts = {}) {
    HalfBoundFlags f;
    f.at_plus_mu_even = half_bound_detect(pot, Parity::even, EnergySign::positive, tol_half, opts).present;
    f.at_plus_mu_odd = half_bound_detect(pot, Parity::odd, EnergySign::positive, tol_half, opts).present;
    f.at_minus_mu_even = half_bound_detect(pot, Parity::even, EnergySign::negative, tol_half, opts).present;
    f.at_minus_mu_odd = half_bound_detect(pot, Parity::odd, EnergySign::negative, tol_half, opts).present;
    return f;
}

enum class ThresholdKind { integer, half_integer };

inline std::string to_string(ThresholdKind k) { return k == ThresholdKind::integer ? "integer" : "half_integer"; }

struct ThresholdClass {
    Channel channel;
    ThresholdKind kind = ThresholdKind::integer;  // threshold phase / pi
    int leading_exponent = 0;                     // odd; 0 when tan(eta) vanishes identically
    bool vanishing = true;                        // tan(eta) -> 0 (else diverges)
    double slope = 0.0;                           // fitted d log|tan eta| / d log xi
    bool degenerate = false;
};

/// Threshold kind implied by the presence of a half-bound state in the channel.
inline ThresholdKind expected_threshold_kind(Channel c, bool half_bound) {
    const bool integer_when_present = (c.parity == Parity::even) == (c.sign == EnergySign::positive);
    return (half_bound == integer_when_present) ? ThresholdKind::integer : ThresholdKind::half_integer;
}

/// Fits log|tan eta| against log(k a) over the smallest decade of the curve.
/// Throws NumericalError when the slope is not within `exponent_tol` of an odd integer.
inline ThresholdClass threshold_classify(const PhaseShiftCurve& curve, double exponent_tol = 0.2,
                                         double vanishing_floor = 1e-12) {
    if (curve.k_grid.size() < 3) throw ValidationError("threshold classification needs at least 3 points");
    const double k0 = curve.k_grid.front();
    std::vector<double> lx, ly;
    double max_tan = 0.0;
    for (std::size_t i = 0; i < curve.k_grid.size() && curve.k_grid[i] <= 10.0 * k0 * (1 + 1e-12); ++i) {
        const double t = std::abs(std::tan(curve.eta_mod_pi[i]));
        max_tan = std::max(max_tan, t);
        lx.push_back(std::log(curve.k_grid[i]));
        ly.push_back(std::log(t));
    }
    ThresholdClass out;
    out.channel = curve.channel;
    if (max_tan < vanishing_floor) {
        out.degenerate = true;
        return out;
    }
    if (lx.size() < 3) throw ValidationError("threshold classification: fewer than 3 points in the smallest decade");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(lx.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    out.slope = sxy / sxx;
    const double mag = std::abs(out.slope);
    const long n = std::lround(mag);
    if (n % 2 == 0 || std::abs(mag - static_cast<double>(n)) > exponent_tol) {
        std::ostringstream msg;
        msg << "classification unstable for " << to_string(curve.channel) << ": fitted slope " << out.slope;
        throw NumericalError(msg.str());
    }
    out.leading_exponent = static_cast<int>(n);
    out.vanishing = out.slope > 0.0;
    out.kind = out.vanishing ? ThresholdKind::integer : ThresholdKind::half_integer;
    return out;
}

}  // namespace dirac1d

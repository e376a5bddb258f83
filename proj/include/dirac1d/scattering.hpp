#pragma once

// Phase shifts from matching the interior solution to the free exterior forms,
// branch unwrapping in k, coupling-constant (theta) continuation, asymptotic
// anchors, and reflection/transmission amplitudes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "integrator.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "potentials.hpp"

namespace dirac1d {

enum class AnchorMethod { automatic, asymptotic_integral, theta_continuation };

inline std::string to_string(AnchorMethod m) {
    switch (m) {
        case AnchorMethod::automatic: return "automatic";
        case AnchorMethod::asymptotic_integral: return "asymptotic_integral";
        case AnchorMethod::theta_continuation: return "theta_continuation";
    }
    return "unknown";
}

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 1) g.back() = hi;
    return g;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo)) throw ValidationError("log grid needs 0 < lo <= hi");
    std::vector<double> g(n);
    const double r = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = n == 1 ? lo : lo * std::exp(r * static_cast<double>(i) / static_cast<double>(n - 1));
    if (n > 1) {
        g.front() = lo;
        g.back() = hi;
    }
    return g;
}

/// Default momentum grid: 2000 log-spaced points over [1e-3, 50] mu.
inline std::vector<double> default_k_grid(double mass = 1.0) { return log_grid(1e-3 * mass, 50.0 * mass, 2000); }

struct ContinuationConfig {
    std::vector<double> theta_grid = uniform_grid(0.0, 1.0, 101);
    double k_anchor = 50.0;
    double anchor_tol = 0.02;
    // Largest adjacent phase change accepted while unwrapping; beyond this the
    // branch choice is ambiguous and the grid is reported as too coarse.
    double max_jump = 0.45 * pi;
    AnchorMethod method = AnchorMethod::automatic;

    void validate() const {
        if (theta_grid.size() < 2 || theta_grid.front() != 0.0 || theta_grid.back() != 1.0)
            throw ValidationError("theta grid must start at 0 and end at 1");
        for (std::size_t i = 1; i < theta_grid.size(); ++i)
            if (!(theta_grid[i] > theta_grid[i - 1])) throw ValidationError("theta grid must be increasing");
        if (!(k_anchor > 0.0)) throw ValidationError("k_anchor must be > 0");
        if (!(max_jump > 0.0 && max_jump < pi / 2)) throw ValidationError("max_jump must lie in (0, pi/2)");
    }
};

struct SolverOptions {
    Units units;
    StepControl step;
    ContinuationConfig continuation;
    int threads = 0;  // 0: default_thread_count()
};

struct PhaseShiftCurve {
    Channel channel;
    std::vector<double> k_grid;
    std::vector<double> eta;         // unwrapped, absolute branch
    std::vector<double> eta_mod_pi;  // in (-pi/2, pi/2]
    AnchorMethod anchor = AnchorMethod::asymptotic_integral;
    double k_anchor = 0.0;
    double eta_at_anchor = 0.0;  // absolute phase at k_anchor
    double eta_infinity = 0.0;   // eta(+-infinity)
};

struct RTAmplitudes {
    std::complex<double> R;
    std::complex<double> T;
};

/// beta(xi) = sqrt((E_k + mu)/(E_k - mu)) v(a)/u(a) for a positive-energy channel.
/// u(a) = 0 yields +-infinity.
inline double beta(Channel channel, double k, Spinor at_a, double mass = 1.0) {
    if (channel.sign != EnergySign::positive) throw ValidationError("beta: positive-energy channel required");
    if (!(k > 0.0)) throw ValidationError("beta: k must be > 0");
    const double ratio = (energy_from_k2(k * k, mass) + mass) / k;
    return ratio * at_a.v / at_a.u;
}

/// Phase shift mod pi from the spinor at the cutoff, using homogeneous
/// coordinates so that u(a) = 0 or tan(ka) = infinity need no special cases.
inline double matching_phase(Channel channel, double k, double a, Spinor at_a, double mass = 1.0) {
    const double ep = std::sqrt(energy_from_k2(k * k, mass) + mass);  // sqrt(E_k + mu)
    const double em = k / ep;                                        // sqrt(E_k - mu)
    const double u = at_a.u, v = at_a.v;
    double phase;  // = k a + eta (mod pi)
    if (channel.sign == EnergySign::positive)
        phase = channel.parity == Parity::even ? std::atan2(ep * v, em * u) : std::atan2(-em * u, ep * v);
    else
        phase = channel.parity == Parity::even ? std::atan2(-em * v, ep * u) : std::atan2(ep * u, em * v);
    return reduce_mod_pi(phase - k * a);
}

inline double phase_shift_mod_pi(const PotentialSpec& pot, Channel channel, double k, const SolverOptions& opts = {}) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("phase shift: k must be > 0 (thresholds come from limits)");
    if (pot.is_free()) return 0.0;  // the free solution continues unchanged to the origin
    const auto res = propagate_momentum(pot, channel.sign, k, channel.parity, opts.step, opts.units);
    return matching_phase(channel, k, pot.cutoff(), res.spinor_at_a, opts.units.mass);
}

/// High-momentum limit of the phase shift.
///
/// Regular part: eta(+-inf) = -+ integral_0^inf V dx. A point term acts at high
/// energy as a rotation of the spinor by 2 atan(g/2); an origin term carries
/// half of it. Reduces to -+ integral V without point terms and to
/// +-atan(U0/2) for the origin delta well.
inline double asymptotic_phase(const PotentialSpec& pot, EnergySign sign) {
    double total = pot.regular_integral();
    for (const auto& p : pot.point_terms())
        total += p.position == 0.0 ? std::atan(0.5 * p.strength) : 2.0 * std::atan(0.5 * p.strength);
    return sign == EnergySign::positive ? -total : total;
}

inline AnchorMethod resolve_anchor(const PotentialSpec& pot, AnchorMethod requested) {
    if (requested != AnchorMethod::automatic) return requested;
    return pot.has_point_terms() ? AnchorMethod::theta_continuation : AnchorMethod::asymptotic_integral;
}

namespace detail {

// Continuous branch through mod-pi samples, starting from an absolute value at index `start`.
inline std::vector<double> unwrap_from(const std::vector<double>& mod, std::size_t start, double start_value,
                                       double max_jump, const std::vector<double>& abscissa, const char* what) {
    std::vector<double> out(mod.size());
    out[start] = start_value;
    auto step = [&](std::size_t from, std::size_t to) {
        const double jump = reduce_mod_pi(mod[to] - out[from]);
        if (std::abs(jump) > max_jump) {
            std::ostringstream msg;
            msg << what << " grid too coarse: phase jump " << jump << " between " << abscissa[std::min(from, to)]
                << " and " << abscissa[std::max(from, to)];
            throw NumericalError(msg.str());
        }
        out[to] = out[from] + jump;
    };
    for (std::size_t i = start; i > 0; --i) step(i, i - 1);
    for (std::size_t i = start; i + 1 < mod.size(); ++i) step(i, i + 1);
    return out;
}

}  // namespace detail

/// Absolute phase at momentum k obtained by following eta(k, theta) for the
/// potential theta V from theta = 0 (eta = 0) to theta = 1.
inline double theta_continuation(const PotentialSpec& pot, Channel channel, double k, const SolverOptions& opts = {}) {
    const auto& cfg = opts.continuation;
    cfg.validate();
    const auto& grid = cfg.theta_grid;
    std::vector<double> mod = parallel_map<double>(grid.size(), opts.threads, [&](std::size_t i) {
        return grid[i] == 0.0 ? 0.0 : phase_shift_mod_pi(pot.scaled(grid[i]), channel, k, opts);
    });
    return detail::unwrap_from(mod, 0, 0.0, cfg.max_jump, grid, "theta").back();
}

/// Phase-shift curve on a momentum grid with the absolute branch fixed at k_anchor.
inline PhaseShiftCurve unwrap_curve(const PotentialSpec& pot, Channel channel, const std::vector<double>& k_grid,
                                    const SolverOptions& opts = {}) {
    const auto& cfg = opts.continuation;
    cfg.validate();
    if (k_grid.empty()) throw ValidationError("k grid is empty");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (!(k_grid[i] > 0.0) || !std::isfinite(k_grid[i])) throw ValidationError("k grid values must be > 0");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1])) throw ValidationError("k grid must be strictly increasing");
    }

    // Grid plus the anchor, bridged by log-spaced points when the anchor lies outside.
    std::vector<double> ks = k_grid;
    const double ka = cfg.k_anchor;
    auto bridge = [&](double lo, double hi) {
        const auto n = static_cast<std::size_t>(std::ceil(200.0 * std::log10(hi / lo))) + 2;
        auto b = log_grid(lo, hi, n);
        ks.insert(ks.end(), b.begin() + 1, b.end() - 1);
    };
    if (ka > k_grid.back()) bridge(k_grid.back(), ka);
    if (ka < k_grid.front()) bridge(ka, k_grid.front());
    ks.push_back(ka);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    std::vector<double> mod = parallel_map<double>(
        ks.size(), opts.threads, [&](std::size_t i) { return phase_shift_mod_pi(pot, channel, ks[i], opts); });
    const std::size_t ia = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), ka) - ks.begin());

    PhaseShiftCurve curve;
    curve.channel = channel;
    curve.anchor = resolve_anchor(pot, cfg.method);
    curve.k_anchor = ka;
    curve.eta_infinity = asymptotic_phase(pot, channel.sign);
    double anchor_value;
    if (curve.anchor == AnchorMethod::asymptotic_integral) {
        anchor_value = curve.eta_infinity + reduce_mod_pi(mod[ia] - curve.eta_infinity);
    } else {
        const double theta_value = theta_continuation(pot, channel, ka, opts);
        anchor_value = mod[ia] + pi * std::round((theta_value - mod[ia]) / pi);
    }
    curve.eta_at_anchor = anchor_value;

    const auto eta = detail::unwrap_from(mod, ia, anchor_value, cfg.max_jump, ks, "momentum");
    curve.k_grid = k_grid;
    curve.eta.reserve(k_grid.size());
    curve.eta_mod_pi.reserve(k_grid.size());
    for (double k : k_grid) {
        const auto i = static_cast<std::size_t>(std::lower_bound(ks.begin(), ks.end(), k) - ks.begin());
        curve.eta.push_back(eta[i]);
        curve.eta_mod_pi.push_back(mod[i]);
    }
    return curve;
}

/// R = i e^{i(eta+ + eta-)} sin(eta+ - eta-), T = e^{i(eta+ + eta-)} cos(eta+ - eta-).
inline RTAmplitudes reflection_transmission(double eta_even, double eta_odd) {
    const std::complex<double> phase = std::polar(1.0, eta_even + eta_odd);
    const double d = eta_even - eta_odd;
    return {std::complex<double>(0.0, 1.0) * phase * std::sin(d), phase * std::cos(d)};
}

}  // namespace dirac1d

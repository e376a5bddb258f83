#pragma once

// Propagation of the stationary Dirac system
//
//     u' + (E + mu - V) v = 0,    v' - (E - mu - V) u = 0
//
// from the origin to the cutoff with parity boundary conditions and point
// interactions. Written generically as u' = -(a0 - V) v, v' = (b0 - V) u so
// the small-momentum reduced system shares the same machinery.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "model.hpp"
#include "potentials.hpp"

namespace dirac1d {

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 0.0;  // 0 selects cutoff / 8
    double min_step = 1e-13;
    // Segments with V == 0 are propagated by the exact free transfer matrix.
    bool analytic_free_segments = true;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ValidationError("step control: tolerances must be > 0");
        if (!(min_step > 0.0)) throw ValidationError("step control: min_step must be > 0");
        if (max_step != 0.0 && !(min_step < max_step)) throw ValidationError("step control: min_step >= max_step");
    }
};

struct TrajectoryPoint {
    double x = 0.0;
    Spinor psi;
};

struct Sampling {
    bool record_steps = false;         // every accepted step endpoint
    std::vector<double> sample_points;  // exact stops, sorted
};

struct PropagationResult {
    Spinor spinor_at_a;
    std::vector<TrajectoryPoint> trajectory;
    int node_count = 0;               // sign changes of u on (0, a)
    std::vector<double> node_positions;
};

/// Coefficients of u' = -(a0 - V) v, v' = (b0 - V) u.
struct LinearSystem {
    double a0 = 0.0;
    double b0 = 0.0;

    static LinearSystem at_energy(double E, double mass) { return {E + mass, E - mass}; }

    // Continuum energy +-E_k built from k^2 without cancellation in E_k - mu.
    static LinearSystem at_momentum(EnergySign sign, double k2, double mass) {
        const double Ek = energy_from_k2(k2, mass);
        const double kin = k2 / (Ek + mass);
        if (sign == EnergySign::positive) return {Ek + mass, kin};
        return {-kin, -(Ek + mass)};
    }

    // First order in k^2 around E = mu.
    static LinearSystem reduced(double k2, double mass) { return {2.0 * mass + k2 / (2.0 * mass), k2 / (2.0 * mass)}; }
};

enum class JumpLocation { origin, interior };

/// Spinor just after a point term g * delta(x - x0).
///
/// Interior: symmetric-average jump u+ - u- = g (v+ + v-)/2,
/// v+ - v- = -g (u+ + u-)/2, i.e. a rotation by 2 atan(g/2).
/// Origin: the same rule combined with the parity relations at x = 0 maps the
/// regular-side boundary value to the starting spinor at 0+.
inline Spinor delta_jump(Spinor before, double g, JumpLocation location, Parity parity) {
    const double h = 0.5 * g;
    if (location == JumpLocation::origin) {
        if (parity == Parity::even) return {before.u, -h * before.u};
        return {h * before.v, before.v};
    }
    const double d = 1.0 + h * h;
    const double c = (1.0 - h * h) / d;
    const double s = 2.0 * h / d;
    return {c * before.u + s * before.v, -s * before.u + c * before.v};
}

inline double wronskian(Spinor s1, Spinor s2) { return s1.u * s2.v - s2.u * s1.v; }

/// Boundary value at the origin: (1, 0) for even parity, (0, 1) for odd.
constexpr Spinor parity_boundary(Parity p) { return p == Parity::even ? Spinor{1.0, 0.0} : Spinor{0.0, 1.0}; }

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP54 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class Propagator {
public:
    Propagator(const PotentialSpec& pot, LinearSystem sys, const StepControl& ctrl, const Sampling& sampling,
               PropagationResult& out)
        : pot_(pot), sys_(sys), ctrl_(ctrl), sampling_(sampling), out_(out) {
        max_step_ = ctrl.max_step > 0.0 ? ctrl.max_step : pot.cutoff() / 8.0;
    }

    Spinor run(Spinor start, double x0) {
        const double a = pot_.cutoff();
        std::vector<double> stops = pot_.regular_is_zero() ? std::vector<double>{} : pot_.breakpoints();
        for (const auto& p : pot_.point_terms())
            if (p.position > 0.0) stops.push_back(p.position);
        stops.push_back(a);
        std::sort(stops.begin(), stops.end());
        stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

        x_ = x0;
        psi_ = start;
        last_sign_ = sign_of(psi_.u);
        next_sample_ = std::lower_bound(sampling_.sample_points.begin(), sampling_.sample_points.end(), x0) -
                       sampling_.sample_points.begin();
        record(x_, psi_, true);

        const auto& points = pot_.point_terms();
        std::size_t next_point = 0;
        while (next_point < points.size() && points[next_point].position <= x0) ++next_point;

        for (double stop : stops) {
            if (stop <= x_) continue;
            if (pot_.regular_is_zero() && ctrl_.analytic_free_segments)
                free_segment(stop);
            else
                rk_segment(stop);
            x_ = stop;
            while (next_point < points.size() && points[next_point].position == stop) {
                psi_ = delta_jump(psi_, points[next_point].strength, JumpLocation::interior, Parity::even);
                if (stop < a) note_jump(psi_.u, stop);
                record(stop, psi_, true);
                ++next_point;
            }
        }
        return psi_;
    }

private:
    static int sign_of(double u) { return u > 0.0 ? 1 : (u < 0.0 ? -1 : 0); }

    double potential(double x, double lo, double hi) const {
        return pot_.regular(std::clamp(x, std::nextafter(lo, hi), std::nextafter(hi, lo)));
    }

    std::array<double, 2> rhs(double x, const std::array<double, 2>& y, double lo, double hi) const {
        const double V = potential(x, lo, hi);
        return {-(sys_.a0 - V) * y[1], (sys_.b0 - V) * y[0]};
    }

    void record(double x, Spinor psi, bool step_point) {
        if (sampling_.record_steps && step_point) out_.trajectory.push_back({x, psi});
        while (next_sample_ < sampling_.sample_points.size() && sampling_.sample_points[next_sample_] == x) {
            if (!(sampling_.record_steps && step_point)) out_.trajectory.push_back({x, psi});
            ++next_sample_;
        }
    }

    // Sign flip of u across a point term.
    void note_jump(double after, double x) {
        const int s = sign_of(after);
        if (s != 0 && last_sign_ != 0 && s != last_sign_) add_node(x);
        if (s != 0) last_sign_ = s;
    }

    // Exact transfer for V = 0: u'' = -a0 b0 u.
    Spinor free_transfer(Spinor p, double L) const {
        const double A = sys_.a0, B = sys_.b0;
        const double w2 = A * B;
        double c, sn;
        if (w2 > 0.0) {
            const double w = std::sqrt(w2);
            c = std::cos(w * L);
            sn = std::sin(w * L) / w;
        } else if (w2 < 0.0) {
            const double kap = std::sqrt(-w2);
            c = std::cosh(kap * L);
            sn = std::sinh(kap * L) / kap;
        } else {
            c = 1.0;
            sn = L;
        }
        return {p.u * c - A * p.v * sn, p.v * c + B * p.u * sn};
    }

    void free_segment(double stop) {
        const double L = stop - x_;
        const Spinor p0 = psi_;
        const double A = sys_.a0, B = sys_.b0;
        const double w2 = A * B;
        // Simple zeros of u(x) = u0 C(x) - A v0 S(x) strictly inside (0, L).
        if (w2 > 0.0) {
            const double w = std::sqrt(w2);
            const double phi = std::atan2(A * p0.v / w, p0.u);  // u = R cos(w x + phi)
            for (double n = std::floor((phi - pi / 2) / pi);; n += 1.0) {
                const double z = (pi / 2 + n * pi - phi) / w;
                if (z <= 0.0) continue;
                if (z >= L) break;
                add_node(x_ + z);
            }
        } else if (w2 < 0.0 && A * p0.v != 0.0) {
            const double kap = std::sqrt(-w2);
            const double t = p0.u * kap / (A * p0.v);  // tanh(kap x) = t
            if (t > 0.0 && t < 1.0 && std::atanh(t) / kap < L) add_node(x_ + std::atanh(t) / kap);
        } else if (w2 == 0.0 && A * p0.v != 0.0) {
            const double z = p0.u / (A * p0.v);
            if (z > 0.0 && z < L) add_node(x_ + z);
        }
        while (next_sample_ < sampling_.sample_points.size() && sampling_.sample_points[next_sample_] < stop) {
            const double xs = sampling_.sample_points[next_sample_];
            if (xs > x_) out_.trajectory.push_back({xs, free_transfer(p0, xs - x_)});
            ++next_sample_;
        }
        psi_ = free_transfer(p0, L);
        if (psi_.u != 0.0) last_sign_ = sign_of(psi_.u);
        record(stop, psi_, true);
    }

    void add_node(double x) {
        ++out_.node_count;
        out_.node_positions.push_back(x);
    }

    void rk_segment(double stop) {
        using D = DP54;
        const double lo = x_, hi = stop;
        std::array<double, 2> y{psi_.u, psi_.v};
        double x = x_;
        double h = h_ > 0.0 ? h_ : initial_step(lo, hi);
        auto k1 = rhs(x, y, lo, hi);
        while (x < stop) {
            double target = stop;
            if (next_sample_ < sampling_.sample_points.size() && sampling_.sample_points[next_sample_] > x &&
                sampling_.sample_points[next_sample_] < stop)
                target = sampling_.sample_points[next_sample_];
            bool clipped = false;
            double hstep = std::min(h, max_step_);
            if (x + hstep >= target) {
                hstep = target - x;
                clipped = true;
            }
            if (hstep < ctrl_.min_step && !clipped) {
                std::ostringstream msg;
                msg << "step-size underflow at x = " << x << " (h = " << hstep << ")";
                throw NumericalError(msg.str());
            }
            std::array<double, 2> y2, y3, y4, y5, y6, y7;
            for (int i = 0; i < 2; ++i) y2[i] = y[i] + hstep * D::a21 * k1[i];
            auto k2 = rhs(x + D::c2 * hstep, y2, lo, hi);
            for (int i = 0; i < 2; ++i) y3[i] = y[i] + hstep * (D::a31 * k1[i] + D::a32 * k2[i]);
            auto k3 = rhs(x + D::c3 * hstep, y3, lo, hi);
            for (int i = 0; i < 2; ++i) y4[i] = y[i] + hstep * (D::a41 * k1[i] + D::a42 * k2[i] + D::a43 * k3[i]);
            auto k4 = rhs(x + D::c4 * hstep, y4, lo, hi);
            for (int i = 0; i < 2; ++i)
                y5[i] = y[i] + hstep * (D::a51 * k1[i] + D::a52 * k2[i] + D::a53 * k3[i] + D::a54 * k4[i]);
            auto k5 = rhs(x + D::c5 * hstep, y5, lo, hi);
            for (int i = 0; i < 2; ++i)
                y6[i] = y[i] + hstep * (D::a61 * k1[i] + D::a62 * k2[i] + D::a63 * k3[i] + D::a64 * k4[i] +
                                        D::a65 * k5[i]);
            const double xnew = clipped ? target : x + hstep;
            auto k6 = rhs(x + hstep, y6, lo, hi);
            for (int i = 0; i < 2; ++i)
                y7[i] = y[i] + hstep * (D::b1 * k1[i] + D::b3 * k3[i] + D::b4 * k4[i] + D::b5 * k5[i] +
                                        D::b6 * k6[i]);
            auto k7 = rhs(xnew, y7, lo, hi);
            double err = 0.0;
            for (int i = 0; i < 2; ++i) {
                double e = hstep * (D::e1 * k1[i] + D::e3 * k3[i] + D::e4 * k4[i] + D::e5 * k5[i] + D::e6 * k6[i] +
                                    D::e7 * k7[i]);
                double sc = ctrl_.abs_tol + ctrl_.rel_tol * std::max(std::abs(y[i]), std::abs(y7[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(0.5 * err);
            if (!std::isfinite(err)) {
                std::ostringstream msg;
                msg << "non-finite solution at x = " << x;
                throw NumericalError(msg.str());
            }
            if (err <= 1.0) {
                track_nodes(x, y, k1, xnew, y7, k7, hstep);
                x = xnew;
                y = y7;
                k1 = k7;
                psi_ = {y[0], y[1]};
                record(x, psi_, true);
                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (!clipped || fac < 1.0) h = hstep * fac;
            } else {
                h = hstep * std::max(0.2, 0.9 * std::pow(err, -0.2));
                if (h < ctrl_.min_step) {
                    std::ostringstream msg;
                    msg << "step-size underflow at x = " << x << " (h = " << h << ")";
                    throw NumericalError(msg.str());
                }
            }
        }
        h_ = h;
    }

    double initial_step(double lo, double hi) const {
        const double V = potential(0.5 * (lo + hi), lo, hi);
        const double w = std::sqrt(std::abs((sys_.a0 - V) * (sys_.b0 - V))) + 1.0;
        return std::min({max_step_, hi - lo, 0.05 / w});
    }

    // Hermite cubic for u on [x0, x1]; bisection for the node location.
    void track_nodes(double x0, const std::array<double, 2>& y0, const std::array<double, 2>& f0, double x1,
                     const std::array<double, 2>& y1, const std::array<double, 2>& f1, double h) {
        int s1 = sign_of(y1[0]);
        if (s1 == 0) return;
        if (last_sign_ != 0 && s1 != last_sign_) {
            auto hermite = [&](double t) {
                double t2 = t * t, t3 = t2 * t;
                return (2 * t3 - 3 * t2 + 1) * y0[0] + (t3 - 2 * t2 + t) * h * f0[0] + (-2 * t3 + 3 * t2) * y1[0] +
                       (t3 - t2) * h * f1[0];
            };
            double a = 0.0, b = 1.0;
            const int sa = last_sign_;
            for (int it = 0; it < 60; ++it) {
                double m = 0.5 * (a + b);
                if (sign_of(hermite(m)) == sa)
                    a = m;
                else
                    b = m;
            }
            ++out_.node_count;
            out_.node_positions.push_back(x0 + 0.5 * (a + b) * (x1 - x0));
        }
        last_sign_ = s1;
    }

    const PotentialSpec& pot_;
    LinearSystem sys_;
    const StepControl& ctrl_;
    const Sampling& sampling_;
    PropagationResult& out_;
    double max_step_ = 0.0;
    double h_ = 0.0;
    double x_ = 0.0;
    Spinor psi_;
    int last_sign_ = 0;
    std::size_t next_sample_ = 0;
};

}  // namespace detail

/// Integrates a linear system from the parity boundary condition at the origin
/// to the cutoff, applying point terms on the way.
inline PropagationResult propagate_system(const PotentialSpec& pot, LinearSystem sys, Parity parity,
                                          const StepControl& ctrl = {}, const Sampling& sampling = {}) {
    ctrl.validate();
    PropagationResult out;
    Spinor start = parity_boundary(parity);
    if (auto g = pot.origin_strength()) start = delta_jump(start, *g, JumpLocation::origin, parity);
    const double x0 = pot.singular_origin() ? 1e-8 * pot.cutoff() : 0.0;
    detail::Propagator prop(pot, sys, ctrl, sampling, out);
    out.spinor_at_a = prop.run(start, x0);
    return out;
}

/// Solution of the stationary system at energy E with the given parity, at x = a.
inline PropagationResult propagate(const PotentialSpec& pot, double E, Parity parity, const StepControl& ctrl = {},
                                   const Units& units = {}, const Sampling& sampling = {}) {
    return propagate_system(pot, LinearSystem::at_energy(E, units.mass), parity, ctrl, sampling);
}

/// Continuum solution at momentum k; depends on k only through k^2.
inline PropagationResult propagate_momentum(const PotentialSpec& pot, EnergySign sign, double k, Parity parity,
                                            const StepControl& ctrl = {}, const Units& units = {},
                                            const Sampling& sampling = {}) {
    return propagate_system(pot, LinearSystem::at_momentum(sign, k * k, units.mass), parity, ctrl, sampling);
}

/// Near-threshold reduced system u' + P v = 0, v' + Q u = 0 with
/// P = 2 mu + k^2/(2 mu) - V, Q = -k^2/(2 mu) + V. Intended for k <= 0.1 mu.
inline PropagationResult propagate_reduced_smallk(const PotentialSpec& pot, double k, Parity parity,
                                                  const StepControl& ctrl = {}, const Units& units = {},
                                                  const Sampling& sampling = {}) {
    return propagate_system(pot, LinearSystem::reduced(k * k, units.mass), parity, ctrl, sampling);
}

}  // namespace dirac1d

#pragma once

// Reference solutions for the tests. Nothing here calls the integrator or the
// library's matching code: piecewise-constant segments use exact transfer
// matrices, point terms solve the average-value jump condition directly, and
// phases come from fitting the free exterior basis at the cutoff.

#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

using real = long double;

inline constexpr real pi_l = 3.141592653589793238462643383279502884L;

struct Psi {
    real u = 1, v = 0;
};

struct Segment {
    real from, to, V;
};

struct Point {
    real x, g;  // g * delta(x - x0), x0 > 0
};

// Half-line potential: constant pieces covering [0, a], interior point terms,
// and an optional origin term.
struct Piecewise {
    real a = 1;
    std::vector<Segment> segments;
    std::vector<Point> points;
    real origin_g = 0;
};

inline Piecewise square_well(real V0, real a) { return {a, {{0, a, -V0}}, {}, 0}; }
inline Piecewise origin_delta(real g, real a = 1) { return {a, {{0, a, 0}}, {}, g}; }
inline Piecewise double_delta(real U0, real a) { return {a, {{0, a, 0}}, {{a, -U0}}, 0}; }
inline Piecewise delta_pair(real g, real x0) { return {x0, {{0, x0, 0}}, {{x0, g}}, 0}; }

// u' = -(P) v, v' = Q u with constant P, Q over a length L.
inline Psi constant_transfer(Psi in, real P, real Q, real L) {
    const real s = P * Q;
    if (s > 0) {
        const real w = std::sqrt(s);
        const real c = std::cos(w * L), sn = std::sin(w * L);
        return {in.u * c - P / w * in.v * sn, in.v * c + Q / w * in.u * sn};
    }
    if (s < 0) {
        const real w = std::sqrt(-s);
        const real c = std::cosh(w * L), sn = std::sinh(w * L);
        return {in.u * c - P / w * in.v * sn, in.v * c + Q / w * in.u * sn};
    }
    return {in.u - P * in.v * L, in.v + Q * in.u * L};
}

// (1 - hJ) psi+ = (1 + hJ) psi-, J(u, v) = (v, -u), h = g/2.
inline Psi point_jump(Psi in, real g) {
    const real h = g / 2;
    const real ru = in.u + h * in.v;
    const real rv = in.v - h * in.u;
    // [[1, -h], [h, 1]] psi+ = r
    const real det = 1 + h * h;
    return {(ru + h * rv) / det, (rv - h * ru) / det};
}

// Coefficients a0 = E + mu, b0 = E - mu of the stationary system.
struct Coeffs {
    real a0, b0;
};

inline Coeffs at_energy(real E, real mu = 1) { return {E + mu, E - mu}; }

inline Coeffs at_k(bool positive, real k, real mu = 1) {
    const real Ek = std::sqrt(k * k + mu * mu);
    if (positive) return {Ek + mu, k * k / (Ek + mu)};
    return {-k * k / (Ek + mu), -(Ek + mu)};
}

inline Psi solve(const Piecewise& p, Coeffs c, bool even) {
    Psi psi = even ? Psi{1, 0} : Psi{0, 1};
    // Parity relations at x = 0 with the average-value jump.
    if (p.origin_g != 0) {
        const real h = p.origin_g / 2;
        psi = even ? Psi{1, -h} : Psi{h, 1};
    }
    real x = 0;
    std::size_t next = 0;
    for (const auto& s : p.segments) {
        while (next < p.points.size() && p.points[next].x <= s.from) psi = point_jump(psi, p.points[next++].g);
        psi = constant_transfer(psi, c.a0 - s.V, c.b0 - s.V, s.to - s.from);
        x = s.to;
    }
    while (next < p.points.size() && p.points[next].x <= x) psi = point_jump(psi, p.points[next++].g);
    return psi;
}

inline real wrap(real eta) {
    eta = std::fmod(eta, pi_l);
    if (eta <= -pi_l / 2) eta += pi_l;
    if (eta > pi_l / 2) eta -= pi_l;
    return eta;
}

// Phase shift mod pi: write the interior spinor at a as
// cos(eta) * base(a) + sin(eta) * shifted(a), where the exterior solution is
// base(x + eta/k) expanded by the angle-addition formula.
inline real phase(const Piecewise& p, bool positive, bool even, real k, real mu = 1) {
    const real Ek = std::sqrt(k * k + mu * mu);
    const real ep = std::sqrt(Ek + mu);
    const real em = k / ep;
    const Psi in = solve(p, at_k(positive, k, mu), even);
    const real c = std::cos(k * p.a), s = std::sin(k * p.a);
    // Exterior families f(phi) = (fu(phi), fv(phi)), phi = kx + eta:
    //   even+: ( ep cos,  em sin)   odd+: (-ep sin, em cos)
    //   even-: ( em cos, -ep sin)   odd-: ( em sin, ep cos)
    // f(kx + eta) = cos(eta) f(kx) + sin(eta) f'(kx), f' the phi-derivative.
    real fu, fv, du, dv;
    if (positive && even) {
        fu = ep * c, fv = em * s, du = -ep * s, dv = em * c;
    } else if (positive) {
        fu = -ep * s, fv = em * c, du = -ep * c, dv = -em * s;
    } else if (even) {
        fu = em * c, fv = -ep * s, du = -em * s, dv = -ep * c;
    } else {
        fu = em * s, fv = ep * c, du = em * c, dv = -ep * s;
    }
    // Solve [fu du; fv dv] (A cos eta, A sin eta) = (u, v).
    const real det = fu * dv - du * fv;
    const real ac = (in.u * dv - du * in.v) / det;
    const real as = (fu * in.v - in.u * fv) / det;
    return wrap(std::atan2(as, ac));
}

// Bound-state matching function at E in the gap: interior spinor at a against
// the decaying exterior (E + mu, lambda).
inline real bound_mismatch(const Piecewise& p, real E, bool even, real mu = 1) {
    const Psi in = solve(p, at_energy(E, mu), even);
    const real lambda = std::sqrt((mu - E) * (mu + E));
    return in.u * lambda - in.v * (E + mu);
}

// Number of bound states of one parity, from sign changes of the matching
// function on a fine energy grid.
inline int bound_count(const Piecewise& p, bool even, int resolution = 20000, real mu = 1) {
    int n = 0;
    const real eps = 1e-9L * mu;
    real prev = bound_mismatch(p, -mu + eps, even, mu);
    for (int i = 1; i <= resolution; ++i) {
        const real E = -mu + eps + (2 * mu - 2 * eps) * i / resolution;
        const real cur = bound_mismatch(p, E, even, mu);
        if ((prev < 0) != (cur < 0)) ++n;
        prev = cur;
    }
    return n;
}

// Bound energies of the origin delta g delta(x) (well: g < 0 gives an even state,
// barrier: g > 0 an odd state), from the start spinor matching (E + mu, lambda).
inline real origin_delta_bound_energy(real U0) { return (1 - U0 * U0 / 4) / (1 + U0 * U0 / 4); }

// First square-well depths with a half-bound state at E = +mu (even: V0 (V0 + 2) = (n pi / a)^2).
inline real square_well_critical_plus_even(int n, real a = 1) {
    const real q = n * pi_l / a;
    return -1 + std::sqrt(1 + q * q);
}

}  // namespace oracle

#pragma once

// Shared domain types for the one-dimensional Dirac solver.
// Natural units (hbar = c = 1); the particle mass sets the only scale.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dirac1d {

inline constexpr double pi = 3.14159265358979323846;

// Error taxonomy; the CLI maps each to an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input or broken precondition (exit code 1).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Integrator or root-finder breakdown (exit code 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

// Levinson identity not satisfied (exit code 2).
class TheoremViolation : public Error {
public:
    using Error::Error;
};

struct Units {
    double mass = 1.0;

    void validate() const {
        if (!(mass > 0.0) || !std::isfinite(mass))
            throw ValidationError("mass must be positive and finite");
    }
};

enum class Parity { even, odd };
enum class EnergySign { positive, negative };

struct Channel {
    Parity parity = Parity::even;
    EnergySign sign = EnergySign::positive;

    friend constexpr bool operator==(Channel, Channel) = default;
};

/// The four channels in the fixed order even/+, even/-, odd/+, odd/-.
constexpr std::array<Channel, 4> channel_enumerate() {
    return {Channel{Parity::even, EnergySign::positive},
            Channel{Parity::even, EnergySign::negative},
            Channel{Parity::odd, EnergySign::positive},
            Channel{Parity::odd, EnergySign::negative}};
}

inline std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

inline std::string to_string(Channel c) {
    return to_string(c.parity) + (c.sign == EnergySign::positive ? "+" : "-");
}

inline Channel parse_channel(std::string_view s) {
    for (Channel c : channel_enumerate())
        if (to_string(c) == s) return c;
    throw ValidationError("unknown channel '" + std::string(s) + "' (expected even+, even-, odd+, odd-)");
}

inline Parity parse_parity(std::string_view s) {
    if (s == "even") return Parity::even;
    if (s == "odd") return Parity::odd;
    throw ValidationError("unknown parity '" + std::string(s) + "'");
}

/// +1 for even parity, -1 for odd; the sign in front of the sin^2 terms.
constexpr double parity_sign(Parity p) { return p == Parity::even ? 1.0 : -1.0; }
constexpr double energy_sign(EnergySign s) { return s == EnergySign::positive ? 1.0 : -1.0; }

struct Spinor {
    double u = 0.0;
    double v = 0.0;

    double norm() const { return std::hypot(u, v); }

    friend constexpr Spinor operator*(double c, Spinor s) { return {c * s.u, c * s.v}; }
    friend constexpr Spinor operator+(Spinor a, Spinor b) { return {a.u + b.u, a.v + b.v}; }
    friend constexpr Spinor operator-(Spinor a, Spinor b) { return {a.u - b.u, a.v - b.v}; }
    friend constexpr bool operator==(Spinor, Spinor) = default;
};

// Value of the mirrored solution (u(-x), -v(-x)) given the spinor at -x.
constexpr Spinor parity_reflect(Spinor s) { return {s.u, -s.v}; }

/// Free-particle energy E_k = sqrt(k^2 + mu^2); depends on k only through k^2.
inline double energy_from_k2(double k2, double mass = 1.0) { return std::sqrt(k2 + mass * mass); }

/// Signed continuum energy +-E_k for a channel.
inline double channel_energy(EnergySign sign, double k, double mass = 1.0) {
    return energy_sign(sign) * energy_from_k2(k * k, mass);
}

// E_k - mu without cancellation at small k.
inline double kinetic_energy(double k2, double mass = 1.0) {
    return k2 / (energy_from_k2(k2, mass) + mass);
}

// Energy in the mass gap parameterized by the decay constant lambda in [0, mu].
struct GapEnergy {
    double lambda = 0.0;
    EnergySign sign = EnergySign::positive;

    double energy(double mass = 1.0) const {
        if (lambda < 0.0 || lambda > mass) throw ValidationError("gap decay parameter outside [0, mu]");
        return energy_sign(sign) * std::sqrt((mass - lambda) * (mass + lambda));
    }

    static GapEnergy from_energy(double E, double mass = 1.0) {
        if (std::abs(E) > mass) throw ValidationError("energy outside the mass gap");
        return {std::sqrt((mass - E) * (mass + E)), E >= 0.0 ? EnergySign::positive : EnergySign::negative};
    }
};

/// Reduces an angle to the representative interval (-pi/2, pi/2].
inline double reduce_mod_pi(double angle) {
    double r = std::remainder(angle, pi);
    if (r <= -pi / 2) r += pi;
    if (r > pi / 2) r -= pi;
    return r;
}

}  // namespace dirac1d

#pragma once

// Symmetric cutoff potentials stored on the half-line x >= 0.
//
// A potential is a regular profile V(x) on [0, a] plus point interactions
// g * delta(x - x0). Mirror symmetry is implicit: a point term at x0 > 0
// stands for the pair at +-x0, a point term at x0 = 0 is a single delta at
// the origin. V vanishes identically for x > a.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <nlohmann/json.hpp>

#include "model.hpp"

namespace dirac1d {

enum class PotentialKind { square_well, delta_origin, delta_pair, double_delta_well, tabulated, custom };

inline std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::square_well: return "square_well";
        case PotentialKind::delta_origin: return "delta";
        case PotentialKind::delta_pair: return "delta_pair";
        case PotentialKind::double_delta_well: return "double_delta_well";
        case PotentialKind::tabulated: return "tabulated";
        case PotentialKind::custom: return "custom";
    }
    return "unknown";
}

struct PointTerm {
    double position = 0.0;
    double strength = 0.0;  // V contains strength * delta(x - position)

    friend bool operator==(const PointTerm&, const PointTerm&) = default;
};

enum class DeltaSign { well, barrier };

class PotentialSpec {
public:
    using Profile = std::function<double(double)>;

    PotentialSpec() = default;

    PotentialKind kind() const { return kind_; }
    double cutoff() const { return cutoff_; }

    /// Regular part of V at x >= 0 (zero beyond the cutoff).
    double regular(double x) const {
        if (x > cutoff_ || !profile_) return 0.0;
        return scale_ * profile_(std::abs(x));
    }

    /// Regular part on the full line; even by construction.
    double regular_full_line(double x) const { return regular(std::abs(x)); }

    bool regular_is_zero() const { return !profile_ || scale_ == 0.0; }
    bool singular_origin() const { return singular_origin_; }

    /// Interior points of (0, a) where the profile or its slope may jump.
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// Half-line point terms sorted by position.
    const std::vector<PointTerm>& point_terms() const { return points_; }
    bool has_point_terms() const { return !points_.empty(); }

    std::optional<double> origin_strength() const {
        if (!points_.empty() && points_.front().position == 0.0) return points_.front().strength;
        return std::nullopt;
    }

    bool is_free() const {
        return regular_is_zero() && std::all_of(points_.begin(), points_.end(),
                                                [](const PointTerm& p) { return p.strength == 0.0; });
    }

    /// Integral of the regular part over [0, a].
    double regular_integral() const { return scale_ * integral_; }

    /// Potential theta * V(x), same geometry.
    PotentialSpec scaled(double theta) const {
        PotentialSpec out = *this;
        out.scale_ *= theta;
        for (auto& p : out.points_) p.strength *= theta;
        out.description_["scale"] = out.scale_;
        return out;
    }

    /// JSON description as accepted by potential_from_json (scale recorded when != 1).
    const nlohmann::json& description() const { return description_; }

    // Assembly used by the named constructors below.
    struct Parts {
        PotentialKind kind = PotentialKind::custom;
        double cutoff = 1.0;
        Profile profile;
        std::vector<double> breakpoints;
        std::vector<PointTerm> points;
        bool singular_origin = false;
        std::optional<double> integral;
        nlohmann::json description;
    };

    static PotentialSpec assemble(Parts parts);

private:
    PotentialKind kind_ = PotentialKind::custom;
    double cutoff_ = 1.0;
    Profile profile_;
    double scale_ = 1.0;
    double integral_ = 0.0;
    std::vector<double> breakpoints_;
    std::vector<PointTerm> points_;
    bool singular_origin_ = false;
    nlohmann::json description_;
};

namespace detail {

inline double integrate_profile(const PotentialSpec::Profile& f, double a, const std::vector<double>& breaks,
                                bool singular_origin) {
    std::vector<double> nodes{0.0};
    nodes.insert(nodes.end(), breaks.begin(), breaks.end());
    nodes.push_back(a);
    boost::math::quadrature::tanh_sinh<double> quad;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double lo = nodes[i], hi = nodes[i + 1];
        if (hi <= lo) continue;
        // Keep evaluations strictly inside the piece so jump sides are respected.
        auto inner = [&](double x) {
            return f(std::clamp(x, std::nextafter(lo, hi), std::nextafter(hi, lo)));
        };
        total += (singular_origin && i == 0) ? quad.integrate(f, lo, hi) : quad.integrate(inner, lo, hi);
    }
    return total;
}

}  // namespace detail

inline PotentialSpec PotentialSpec::assemble(Parts parts) {
    if (!(parts.cutoff > 0.0) || !std::isfinite(parts.cutoff))
        throw ValidationError("cutoff must be positive and finite");
    std::sort(parts.points.begin(), parts.points.end(),
              [](const PointTerm& a, const PointTerm& b) { return a.position < b.position; });
    int at_origin = 0;
    for (const auto& p : parts.points) {
        if (!std::isfinite(p.strength)) throw ValidationError("point-term strength must be finite");
        if (p.position < 0.0 || p.position > parts.cutoff)
            throw ValidationError("point term outside [0, a]");
        if (p.position == 0.0) ++at_origin;
    }
    if (at_origin > 1) throw ValidationError("at most one point term may sit at the origin");
    for (std::size_t i = 1; i < parts.points.size(); ++i)
        if (parts.points[i].position == parts.points[i - 1].position)
            throw ValidationError("duplicate point-term position");

    std::sort(parts.breakpoints.begin(), parts.breakpoints.end());
    parts.breakpoints.erase(std::unique(parts.breakpoints.begin(), parts.breakpoints.end()), parts.breakpoints.end());
    std::erase_if(parts.breakpoints, [&](double x) { return x <= 0.0 || x >= parts.cutoff; });

    PotentialSpec s;
    s.kind_ = parts.kind;
    s.cutoff_ = parts.cutoff;
    s.profile_ = std::move(parts.profile);
    s.breakpoints_ = std::move(parts.breakpoints);
    s.points_ = std::move(parts.points);
    s.singular_origin_ = parts.singular_origin;
    s.description_ = std::move(parts.description);
    if (s.profile_) {
        s.integral_ = parts.integral ? *parts.integral
                                     : detail::integrate_profile(s.profile_, s.cutoff_, s.breakpoints_,
                                                                 s.singular_origin_);
        if (!std::isfinite(s.integral_)) throw ValidationError("potential profile is not integrable");
    }
    return s;
}

/// Square well: V = -depth for x < a, 0 beyond. depth > 0 attracts positive-energy states.
inline PotentialSpec make_square_well(double depth, double half_width) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ValidationError("square well: a must be > 0");
    if (!std::isfinite(depth)) throw ValidationError("square well: depth must be finite");
    PotentialSpec::Parts p;
    p.kind = PotentialKind::square_well;
    p.cutoff = half_width;
    if (depth != 0.0) {
        p.profile = [depth, half_width](double x) { return x <= half_width ? -depth : 0.0; };
        p.integral = -depth * half_width;
    }
    p.description = {{"kind", "square_well"}, {"params", {{"V0", depth}, {"a", half_width}}}};
    return PotentialSpec::assemble(std::move(p));
}

/// Free particle, represented as a zero-depth square well.
inline PotentialSpec make_free(double cutoff = 1.0) { return make_square_well(0.0, cutoff); }

/// delta at the origin: V = -U0 delta(x) (well) or +U0 delta(x) (barrier).
inline PotentialSpec make_delta(double strength, DeltaSign sign, double cutoff = 1.0) {
    if (!(strength > 0.0) || !std::isfinite(strength)) throw ValidationError("delta: U0 must be > 0");
    PotentialSpec::Parts p;
    p.kind = PotentialKind::delta_origin;
    p.cutoff = cutoff;
    p.points = {{0.0, sign == DeltaSign::well ? -strength : strength}};
    p.description = {{"kind", "delta"},
                     {"params", {{"U0", strength}, {"sign", sign == DeltaSign::well ? "well" : "barrier"}}}};
    if (cutoff != 1.0) p.description["params"]["a"] = cutoff;
    return PotentialSpec::assemble(std::move(p));
}

/// Symmetric pair g * [delta(x - x0) + delta(x + x0)] with signed strength g.
inline PotentialSpec make_delta_pair(double strength, double position) {
    if (!(position > 0.0) || !std::isfinite(position)) throw ValidationError("delta pair: position must be > 0");
    if (strength == 0.0 || !std::isfinite(strength)) throw ValidationError("delta pair: strength must be nonzero");
    PotentialSpec::Parts p;
    p.kind = PotentialKind::delta_pair;
    p.cutoff = position;
    p.points = {{position, strength}};
    p.description = {{"kind", "delta_pair"}, {"params", {{"g", strength}, {"x0", position}}}};
    return PotentialSpec::assemble(std::move(p));
}

/// Double well -U0 [delta(x - a) + delta(x + a)].
inline PotentialSpec make_double_delta_well(double strength, double separation) {
    if (!(strength > 0.0) || !std::isfinite(strength)) throw ValidationError("double delta: U0 must be > 0");
    if (!(separation > 0.0) || !std::isfinite(separation)) throw ValidationError("double delta: a must be > 0");
    PotentialSpec::Parts p;
    p.kind = PotentialKind::double_delta_well;
    p.cutoff = separation;
    p.points = {{separation, -strength}};
    p.description = {{"kind", "double_delta_well"}, {"params", {{"U0", strength}, {"a", separation}}}};
    return PotentialSpec::assemble(std::move(p));
}

/// Piecewise-linear profile through (x, V) samples.
///
/// Samples start at x = 0, are sorted in x, and end at x = a with V = 0. A
/// repeated x encodes a jump; the profile takes the left sample on the left of
/// it and the right sample on the right.
inline PotentialSpec load_tabulated(std::vector<std::pair<double, double>> samples) {
    if (samples.size() < 2) throw ValidationError("tabulated: need at least two samples");
    for (const auto& [x, V] : samples)
        if (!std::isfinite(x) || !std::isfinite(V)) throw ValidationError("tabulated: non-finite sample");
    if (samples.front().first != 0.0) throw ValidationError("tabulated: first sample must be at x = 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].first < 0.0) throw ValidationError("tabulated: negative x");
        if (i > 0 && samples[i].first < samples[i - 1].first) throw ValidationError("tabulated: x not sorted");
        if (i > 1 && samples[i].first == samples[i - 2].first)
            throw ValidationError("tabulated: more than two samples share an x");
    }
    const double a = samples.back().first;
    if (!(a > 0.0)) throw ValidationError("tabulated: cutoff must be > 0");
    if (samples.back().second != 0.0) throw ValidationError("tabulated: V(a+) must be 0 (last sample V = 0)");

    std::vector<double> xs, vs;
    for (const auto& [x, V] : samples) {
        xs.push_back(x);
        vs.push_back(V);
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) integral += 0.5 * (vs[i] + vs[i + 1]) * (xs[i + 1] - xs[i]);

    bool zero = std::all_of(vs.begin(), vs.end(), [](double v) { return v == 0.0; });
    PotentialSpec::Parts p;
    p.kind = PotentialKind::tabulated;
    p.cutoff = a;
    if (!zero) {
        auto shared_x = std::make_shared<const std::vector<double>>(xs);
        auto shared_v = std::make_shared<const std::vector<double>>(vs);
        p.profile = [shared_x, shared_v](double x) {
            const auto& X = *shared_x;
            const auto& Vv = *shared_v;
            auto it = std::upper_bound(X.begin(), X.end(), x);
            if (it == X.begin()) return Vv.front();
            if (it == X.end()) return Vv[X.size() - 2];  // left limit at a
            std::size_t hi = static_cast<std::size_t>(it - X.begin());
            std::size_t lo = hi - 1;
            double w = (x - X[lo]) / (X[hi] - X[lo]);
            return Vv[lo] + w * (Vv[hi] - Vv[lo]);
        };
        p.integral = integral;
        p.breakpoints = xs;
    }
    nlohmann::json js = nlohmann::json::array();
    for (const auto& [x, V] : samples) js.push_back({x, V});
    p.description = {{"kind", "tabulated"}, {"samples", js}};
    return PotentialSpec::assemble(std::move(p));
}

struct CustomOptions {
    std::vector<double> breakpoints;
    bool singular_origin = false;  // V ~ x^(-1 + rho/2) near 0; integration starts at 1e-8 a
    std::optional<double> integral;
    nlohmann::json description = {{"kind", "custom"}};
};

/// Arbitrary profile on [0, a]. The profile should be finite on (0, a], less
/// singular than 1/x at the origin.
inline PotentialSpec make_custom(PotentialSpec::Profile profile, double cutoff, CustomOptions opts = {}) {
    if (!profile) throw ValidationError("custom: empty profile");
    PotentialSpec::Parts p;
    p.kind = PotentialKind::custom;
    p.cutoff = cutoff;
    p.profile = std::move(profile);
    p.breakpoints = std::move(opts.breakpoints);
    p.singular_origin = opts.singular_origin;
    p.integral = opts.integral;
    p.description = std::move(opts.description);
    return PotentialSpec::assemble(std::move(p));
}

/// A0 * x^(-1 + rho/2) on (0, a], 0 < rho < 2.
inline PotentialSpec make_power_law(double amplitude, double rho, double cutoff) {
    if (!(rho > 0.0 && rho < 2.0)) throw ValidationError("power law: rho must lie in (0, 2)");
    if (!(cutoff > 0.0)) throw ValidationError("power law: a must be > 0");
    double exponent = -1.0 + rho / 2.0;
    CustomOptions o;
    o.singular_origin = true;
    o.integral = 2.0 * amplitude * std::pow(cutoff, rho / 2.0) / rho;
    o.description = {{"kind", "custom"},
                     {"params", {{"form", "power"}, {"A0", amplitude}, {"rho", rho}, {"a", cutoff}}}};
    return make_custom([amplitude, exponent](double x) { return amplitude * std::pow(x, exponent); }, cutoff,
                       std::move(o));
}

/// Smooth well -V0 (1 - (x/a)^2)^2, continuous with zero at the cutoff.
inline PotentialSpec make_smooth_well(double depth, double cutoff) {
    if (!(cutoff > 0.0)) throw ValidationError("smooth well: a must be > 0");
    CustomOptions o;
    o.integral = -depth * cutoff * 8.0 / 15.0;
    o.description = {{"kind", "custom"}, {"params", {{"form", "smooth_well"}, {"V0", depth}, {"a", cutoff}}}};
    return make_custom(
        [depth, cutoff](double x) {
            double s = 1.0 - (x / cutoff) * (x / cutoff);
            return -depth * s * s;
        },
        cutoff, std::move(o));
}

inline constexpr int potential_schema_version = 1;

namespace detail {

inline double param(const nlohmann::json& params, const char* key) {
    if (!params.contains(key) || !params.at(key).is_number())
        throw ValidationError(std::string("potential: missing numeric parameter '") + key + "'");
    return params.at(key).get<double>();
}

inline double param_or(const nlohmann::json& params, const char* key, double fallback) {
    return params.contains(key) ? param(params, key) : fallback;
}

}  // namespace detail

/// Parses the structured potential description
/// { "schema": 1, "kind": ..., "params": {...} } or { "kind": "tabulated", "samples": [[x, V], ...] }.
inline PotentialSpec potential_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ValidationError("potential: expected an object with a string 'kind'");
    if (j.contains("schema") && j.at("schema") != potential_schema_version)
        throw ValidationError("potential: unsupported schema version");
    const std::string kind = j.at("kind").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    PotentialSpec out;
    if (kind == "free") {
        out = make_free(detail::param_or(params, "a", 1.0));
    } else if (kind == "square_well") {
        out = make_square_well(detail::param(params, "V0"), detail::param(params, "a"));
    } else if (kind == "delta") {
        std::string sign = params.value("sign", "well");
        if (sign != "well" && sign != "barrier") throw ValidationError("delta: sign must be well or barrier");
        out = make_delta(detail::param(params, "U0"), sign == "well" ? DeltaSign::well : DeltaSign::barrier,
                         detail::param_or(params, "a", 1.0));
    } else if (kind == "delta_pair") {
        out = make_delta_pair(detail::param(params, "g"), detail::param(params, "x0"));
    } else if (kind == "double_delta_well") {
        out = make_double_delta_well(detail::param(params, "U0"), detail::param(params, "a"));
    } else if (kind == "tabulated") {
        if (!j.contains("samples") || !j.at("samples").is_array())
            throw ValidationError("tabulated: missing 'samples' array");
        std::vector<std::pair<double, double>> samples;
        for (const auto& s : j.at("samples")) {
            if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number())
                throw ValidationError("tabulated: each sample must be [x, V]");
            samples.emplace_back(s[0].get<double>(), s[1].get<double>());
        }
        out = load_tabulated(std::move(samples));
    } else if (kind == "custom") {
        std::string form = params.value("form", "");
        if (form == "power")
            out = make_power_law(detail::param(params, "A0"), detail::param(params, "rho"), detail::param(params, "a"));
        else if (form == "smooth_well")
            out = make_smooth_well(detail::param(params, "V0"), detail::param(params, "a"));
        else
            throw ValidationError("custom: unknown form '" + form + "' (power, smooth_well)");
    } else {
        throw ValidationError("potential: unknown kind '" + kind + "'");
    }
    if (j.contains("scale")) out = out.scaled(j.at("scale").get<double>());
    return out;
}

inline nlohmann::json potential_to_json(const PotentialSpec& s) {
    nlohmann::json j = s.description();
    j["schema"] = potential_schema_version;
    return j;
}

/// Closed-form square-well phase shift, reduced to (-pi/2, pi/2].
///
/// Interior solution of the constant-coefficient system with V = -depth is
/// matched at x = a against the free exterior forms; written independently of
/// the numerical pipeline and used as its oracle.
inline double square_well_oracle_phase(double depth, double a, Channel channel, double k, double mass = 1.0) {
    if (!(k > 0.0)) throw ValidationError("square_well_oracle_phase: k must be > 0");
    const double Ek = std::sqrt(k * k + mass * mass);
    const double E = channel.sign == EnergySign::positive ? Ek : -Ek;
    const double Ein = E + depth;  // E - V inside
    const double s = (Ein - mass) * (Ein + mass);
    double c, sn;  // cos(qa), sin(qa)/q (or hyperbolic analogues)
    if (s > 0) {
        double q = std::sqrt(s);
        c = std::cos(q * a);
        sn = std::sin(q * a) / q;
    } else if (s < 0) {
        double kap = std::sqrt(-s);
        c = std::cosh(kap * a);
        sn = std::sinh(kap * a) / kap;
    } else {
        c = 1.0;
        sn = a;
    }
    double f, g;
    if (channel.parity == Parity::even) {
        f = c;
        g = (Ein - mass) * sn;
    } else {
        f = -(Ein + mass) * sn;
        g = c;
    }
    const double xi = k * a;
    const double t = std::tan(xi);
    const double ratio = (Ek + mass) / k;  // sqrt((E_k + mu) / (E_k - mu))
    double tan_eta;
    if (channel.sign == EnergySign::positive) {
        double beta = ratio * g / f;
        tan_eta = channel.parity == Parity::even ? (beta - t) / (1 + beta * t) : (1 + beta * t) / (t - beta);
    } else if (channel.parity == Parity::even) {
        double beta = -g / (ratio * f);  // tan(xi + eta)
        tan_eta = (beta - t) / (1 + beta * t);
    } else {
        double gamma = g / (ratio * f);  // cot(xi + eta)
        tan_eta = (1 - gamma * t) / (gamma + t);
    }
    return reduce_mod_pi(std::atan(tan_eta));
}

/// Closed-form phase shift for a lone point term of strength g at the origin,
/// reduced to (-pi/2, pi/2]. The exterior is free down to x = 0+, so the phase
/// is read directly from the spinor just past the jump.
inline double origin_delta_oracle_phase(double g, Channel channel, double k, double mass = 1.0) {
    if (!(k > 0.0)) throw ValidationError("origin_delta_oracle_phase: k must be > 0");
    const double ep = std::sqrt(std::sqrt(k * k + mass * mass) + mass);
    const double em = k / ep;
    const double h = 0.5 * g;
    double phase;
    if (channel.sign == EnergySign::positive)
        phase = channel.parity == Parity::even ? std::atan2(-ep * h, em) : std::atan2(-em * h, ep);
    else
        phase = channel.parity == Parity::even ? std::atan2(em * h, ep) : std::atan2(ep * h, em);
    return reduce_mod_pi(phase);
}

}  // namespace dirac1d

#pragma once

// Time-dependent transverse fields h(t) and their piecewise-constant and
// frequency-domain views. Time in 1/J, fields and frequencies in J (hbar = 1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "tfim/errors.hpp"

namespace tfim {

enum class FieldKind { Step, Exponential, Tanh, Sinusoidal, Constant };

struct FieldSchedule {
    FieldKind kind = FieldKind::Constant;
    double a = 0.0;     // field before the switch (base amplitude for sinusoidal)
    double b = 0.0;     // final field; unused for sinusoidal/constant
    double omega = 0.0; // transition constant or angular frequency
    double phi = 0.0;   // sinusoidal phase, radians
    double t0 = 0.0;    // switch-on time

    static FieldSchedule constant(double a) { return {FieldKind::Constant, a, a, 0.0, 0.0, 0.0}; }
    static FieldSchedule step(double a, double b, double t0 = 0.0) { return {FieldKind::Step, a, b, 0.0, 0.0, t0}; }
    static FieldSchedule exponential(double a, double b, double omega, double t0 = 0.0) {
        return {FieldKind::Exponential, a, b, omega, 0.0, t0};
    }
    static FieldSchedule tanh(double a, double b, double omega, double t0 = 0.0) {
        return {FieldKind::Tanh, a, b, omega, 0.0, t0};
    }
    static FieldSchedule sinusoidal(double a, double omega, double phi, double t0 = 0.0) {
        return {FieldKind::Sinusoidal, a, 0.0, omega, phi, t0};
    }

    friend bool operator==(const FieldSchedule&, const FieldSchedule&) = default;
};

inline std::string kind_name(FieldKind k) {
    switch (k) {
    case FieldKind::Step: return "step";
    case FieldKind::Exponential: return "exp";
    case FieldKind::Tanh: return "tanh";
    case FieldKind::Sinusoidal: return "sin";
    case FieldKind::Constant: return "const";
    }
    return "const";
}

inline FieldKind parse_kind(const std::string& s) {
    if (s == "step") return FieldKind::Step;
    if (s == "exp" || s == "exponential") return FieldKind::Exponential;
    if (s == "tanh" || s == "hyperbolic") return FieldKind::Tanh;
    if (s == "sin" || s == "sinusoidal" || s == "periodic") return FieldKind::Sinusoidal;
    if (s == "const" || s == "constant") return FieldKind::Constant;
    throw ConfigError("unknown field kind \"" + s + "\"");
}

// Field value. For t < t0 every kind returns a. The step switches just after
// t0 (theta(0) = 0); the continuous kinds apply their formula from t0 on,
// with time measured from t0.
inline double field_at(const FieldSchedule& s, double t) {
    const double tau = t - s.t0;
    switch (s.kind) {
    case FieldKind::Constant: return s.a;
    case FieldKind::Step: return tau <= 0.0 ? s.a : s.b;
    case FieldKind::Exponential: return tau < 0.0 ? s.a : s.b + (s.a - s.b) * std::exp(-s.omega * tau);
    case FieldKind::Tanh: return tau < 0.0 ? s.a : 0.5 * (s.b - s.a) * (std::tanh(s.omega * tau) + 1.0) + s.a;
    case FieldKind::Sinusoidal: return tau < 0.0 ? s.a : s.a - s.a * std::sin(s.omega * tau + s.phi);
    }
    return s.a;
}

// Field the initial state is prepared in when evolution starts at t_start.
inline double initial_field(const FieldSchedule& s, double t_start) { return field_at(s, t_start); }

struct PiecewiseConstantField {
    std::vector<double> times;  // segment start times, spacing dt
    std::vector<double> values; // field per segment
    double dt = 0.0;
    double t_end = 0.0;
    double initial_field = 0.0; // field before the first segment

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    double duration(std::size_t k) const { return std::min(dt, t_end - times[k]); }
    double t_start() const { return times.empty() ? t_end : times.front(); }

    // Piecewise evaluation: value of the segment containing t.
    double value_at(double t) const {
        if (empty()) throw ConfigError("empty piecewise field");
        if (t <= times.front()) return values.front();
        std::size_t k = static_cast<std::size_t>((t - times.front()) / dt);
        if (k >= values.size()) k = values.size() - 1;
        return values[k];
    }
};

// Segment k covers [t_start + k dt, t_start + (k+1) dt), valued at its midpoint.
inline PiecewiseConstantField discretize(const FieldSchedule& s, double t_start, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_end > t_start)) throw ConfigError("t_end must exceed t_start");
    PiecewiseConstantField f;
    f.dt = dt;
    f.t_end = t_end;
    f.initial_field = initial_field(s, t_start);
    const auto n = static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
    f.times.reserve(n);
    f.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lo = t_start + static_cast<double>(k) * dt;
        const double hi = std::min(lo + dt, t_end);
        f.times.push_back(lo);
        f.values.push_back(field_at(s, 0.5 * (lo + hi)));
    }
    return f;
}

// Unit-amplitude switching profile g(tau), tau = t - t0 >= 0, such that the
// time-varying part of the field is switch_amplitude(s) * g.
inline double switching_profile(const FieldSchedule& s, double tau) {
    switch (s.kind) {
    case FieldKind::Exponential: return std::exp(-s.omega * tau);
    case FieldKind::Tanh: return 0.5 * (1.0 - std::tanh(s.omega * tau));
    case FieldKind::Sinusoidal: return -std::sin(s.omega * tau + s.phi);
    default: throw UnsupportedError("no finite switching profile for " + kind_name(s.kind) + " fields");
    }
}

inline double switch_amplitude(const FieldSchedule& s) {
    switch (s.kind) {
    case FieldKind::Exponential:
    case FieldKind::Tanh: return s.a - s.b;
    case FieldKind::Sinusoidal: return s.a;
    default: return 0.0;
    }
}

namespace detail {
inline void require_spectral_kind(const FieldSchedule& s) {
    if (s.kind == FieldKind::Step)
        throw UnsupportedError("step field has a flat, non-decaying spectrum; spectral density unsupported");
    if (s.kind == FieldKind::Constant) throw UnsupportedError("constant field has no switched component");
    if (!(s.omega > 0.0)) throw ConfigError("spectral density needs omega > 0");
}
} // namespace detail

// g(w') = integral_0^W g(tau) exp(i w' tau) dtau over 20 decay times
// (20 periods for sinusoidal), adaptive Gauss-Kronrod on period-sized chunks.
inline std::complex<double> switching_transform(const FieldSchedule& s, double wp) {
    detail::require_spectral_kind(s);
    const double window = s.kind == FieldKind::Sinusoidal ? 20.0 * 2.0 * std::numbers::pi / s.omega : 20.0 / s.omega;
    const double fastest = std::max({std::abs(wp), s.kind == FieldKind::Sinusoidal ? s.omega : 0.0, 1e-300});
    const double chunk = std::min(window, 2.0 * std::numbers::pi / fastest);
    const auto n_chunks = static_cast<int>(std::ceil(window / chunk));
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double re = 0.0, im = 0.0;
    for (int c = 0; c < n_chunks; ++c) {
        const double lo = window * c / n_chunks;
        const double hi = window * (c + 1) / n_chunks;
        re += Quad::integrate([&](double t) { return switching_profile(s, t) * std::cos(wp * t); }, lo, hi, 12, 1e-13);
        im += Quad::integrate([&](double t) { return switching_profile(s, t) * std::sin(wp * t); }, lo, hi, 12, 1e-13);
    }
    return {re, im};
}

inline double spectral_density_numeric(const FieldSchedule& s, double wp) {
    return std::norm(switching_transform(s, wp));
}

// |h(w')|^2 of the unit-amplitude switched part. Exponential: 1/(w'^2 + w^2).
inline double spectral_density(const FieldSchedule& s, double wp) {
    detail::require_spectral_kind(s);
    if (wp < 0.0) throw ConfigError("spectral density needs w' >= 0");
    if (s.kind == FieldKind::Exponential) return 1.0 / (wp * wp + s.omega * s.omega);
    return spectral_density_numeric(s, wp);
}

// Radians from a number or one of "pi", "pi/N", "-pi/N", "K*pi/N".
inline double parse_phase(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw ConfigError("phi must be a number or a string like \"pi/2\"");
    std::string s = v.get<std::string>();
    double sign = 1.0;
    if (!s.empty() && s[0] == '-') {
        sign = -1.0;
        s.erase(0, 1);
    }
    double mult = 1.0;
    const auto star = s.find('*');
    try {
        if (star != std::string::npos) {
            mult = std::stod(s.substr(0, star));
            s = s.substr(star + 1);
        }
        if (s.rfind("pi", 0) != 0) throw ConfigError("");
        double div = 1.0;
        if (s.size() > 2) {
            if (s[2] != '/') throw ConfigError("");
            div = std::stod(s.substr(3));
        }
        return sign * mult * std::numbers::pi / div;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse phase \"" + v.get<std::string>() + "\"");
    }
}

inline FieldSchedule schedule_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("schedule needs a \"kind\"");
    FieldSchedule s;
    s.kind = parse_kind(j.at("kind").get<std::string>());
    auto num = [&](const char* key, double dflt) {
        if (!j.contains(key)) return dflt;
        if (!j.at(key).is_number()) throw ConfigError(std::string("schedule field \"") + key + "\" must be a number");
        return j.at(key).get<double>();
    };
    s.a = num("a", 0.0);
    s.b = num("b", s.kind == FieldKind::Constant ? s.a : 0.0);
    s.omega = num("omega", 0.0);
    s.phi = j.contains("phi") ? parse_phase(j.at("phi")) : 0.0;
    s.t0 = num("t0", 0.0);
    if (s.kind == FieldKind::Constant) s.b = s.a;
    for (double v : {s.a, s.b, s.omega, s.phi, s.t0})
        if (!std::isfinite(v)) throw ConfigError("schedule parameters must be finite");
    if ((s.kind == FieldKind::Exponential || s.kind == FieldKind::Tanh) && !(s.omega > 0.0))
        throw ConfigError("exp/tanh schedules need omega > 0");
    if (s.kind == FieldKind::Sinusoidal && !(s.omega > 0.0)) throw ConfigError("sin schedule needs omega > 0");
    return s;
}

inline nlohmann::json schedule_to_json(const FieldSchedule& s) {
    return {{"kind", kind_name(s.kind)}, {"a", s.a}, {"b", s.b}, {"omega", s.omega}, {"phi", s.phi}, {"t0", s.t0}};
}

} // namespace tfim

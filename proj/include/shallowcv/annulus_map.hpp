#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "csm_map.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace shallowcv {

inline constexpr double kValidityWarning = 0.05;
inline constexpr double kValidityError = 0.2;

/// Möbius map between the annulus α ≤ |ζ| ≤ 1 and the w-plane strip below Im w = h
/// with the unit circle removed.
struct VerruijtMap {
    double h = 0.0;
    double a = 0.0;
    double alpha = 0.0;
};

[[nodiscard]] inline VerruijtMap build_verruijt(double h) {
    if (!(h >= 1.0 + 1e-6)) throw GeometryError("cavity image touches the surface line (h = " + std::to_string(h) + ")");
    VerruijtMap v;
    v.h = h;
    v.alpha = 1.0 / (h + std::sqrt(h * h - 1.0));
    v.a = h * (1.0 - v.alpha * v.alpha) / (1.0 + v.alpha * v.alpha);
    return v;
}

[[nodiscard]] inline cplx w_of_zeta(const VerruijtMap& v, cplx zeta) {
    if (zeta == cplx{1.0, 0.0}) throw GeometryError("ζ = 1 is the image of infinity");
    return -I * v.a * (1.0 + zeta) / (1.0 - zeta) + I * v.h;
}

[[nodiscard]] inline cplx zeta_of_w(const VerruijtMap& v, cplx w) {
    const cplx den = w - I * v.h - I * v.a;
    if (den == cplx{}) throw GeometryError("w = ih + ia is the pole of the annulus map");
    return (w - I * v.h + I * v.a) / den;
}

[[nodiscard]] inline cplx dw_dzeta(const VerruijtMap& v, cplx zeta) {
    if (zeta == cplx{1.0, 0.0}) throw GeometryError("ζ = 1 is the image of infinity");
    const cplx d = 1.0 - zeta;
    return -2.0 * I * v.a / (d * d);
}

/// Physical plane ↔ annulus, with the joint points snapped onto |ζ| = 1.
struct CompositeMap {
    CsmForwardMap fwd;
    CsmBackwardMap bwd;
    VerruijtMap ver;
    double theta1 = 0.0;  ///< in (−π, 0)
    double theta2 = 0.0;  ///< in (0, π)
    cplx t1;
    cplx t2;
    double h_from_t1 = 0.0;  ///< Im w(T₁), reported against h = Im w(T₂)
    double joint_modulus_error = 0.0;
    double validity = 0.0;   ///< max ||ζ(w(x))| − 1| over ground-surface samples
    double y0 = 0.0;         ///< max |Im z(e^{iθ})|, flatness of the simulated surface
    double roundtrip_collocation = 0.0;
    double roundtrip_midpoint = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] double alpha() const { return ver.alpha; }
};

[[nodiscard]] inline cplx z_of_zeta(const CompositeMap& m, cplx zeta) {
    return backward_eval(m.bwd, w_of_zeta(m.ver, zeta));
}

[[nodiscard]] inline cplx dz_dzeta(const CompositeMap& m, cplx zeta) {
    return backward_deriv(m.bwd, w_of_zeta(m.ver, zeta)) * dw_dzeta(m.ver, zeta);
}

/// 1/z'(ζ), finite (zero) at ζ = 1.
[[nodiscard]] inline cplx inv_dz_dzeta(const CompositeMap& m, cplx zeta) {
    const cplx d = 1.0 - zeta;
    if (std::abs(d) < 1e-300) return {};
    const cplx w = w_of_zeta(m.ver, zeta);
    return d * d / (-2.0 * I * m.ver.a * backward_deriv(m.bwd, w));
}

/// Forward composite ζ(z) through the CSM map.
[[nodiscard]] inline cplx zeta_of_z(const CompositeMap& m, cplx z) {
    return zeta_of_w(m.ver, forward_eval(m.fwd, z));
}

namespace detail {

inline double segment_distance(cplx p, cplx a, cplx b) {
    const cplx d = b - a;
    const double t = std::clamp(((p - a) * std::conj(d)).real() / std::norm(d), 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

inline double distance_to_trace(cplx p, std::span<const cplx> trace) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trace.size(); ++i)
        best = std::min(best, segment_distance(p, trace[i], trace[(i + 1) % trace.size()]));
    return best;
}

}  // namespace detail

[[nodiscard]] inline CompositeMap compose(const CavitySpec& spec, double k2) {
    validate(spec);
    CompositeMap m;
    m.fwd = solve_forward(spec, k2);
    m.bwd = fit_backward(m.fwd, spec);
    for (const auto& w : m.fwd.warnings) m.warnings.push_back(w);
    for (const auto& w : m.bwd.warnings) m.warnings.push_back(w);

    const cplx w1 = forward_eval(m.fwd, spec.T1);
    const cplx w2 = forward_eval(m.fwd, spec.T2);
    m.ver = build_verruijt(w2.imag());
    m.h_from_t1 = w1.imag();

    const cplx z1 = zeta_of_w(m.ver, w1);
    const cplx z2 = zeta_of_w(m.ver, w2);
    m.joint_modulus_error = std::max(std::abs(std::abs(z1) - 1.0), std::abs(std::abs(z2) - 1.0));
    if (m.joint_modulus_error > kValidityError)
        throw GeometryError("joint images are too far from the unit circle (deviation " +
                            std::to_string(m.joint_modulus_error) + ")");
    m.theta1 = std::arg(z1);
    m.theta2 = std::arg(z2);
    if (!(m.theta1 < 0.0 && m.theta2 > 0.0))
        throw GeometryError("joint points do not straddle the image of the free surface");
    m.t1 = std::polar(1.0, m.theta1);
    m.t2 = std::polar(1.0, m.theta2);

    // ground-surface samples spread like a uniform angle grid on |ζ| = 1
    const double pi = std::numbers::pi;
    const int S = 720;
    for (int j = 0; j < S; ++j) {
        const double phi = 2.0 * pi * (j + 0.5) / S;
        const cplx x{spec.zc.real() + spec.depth() / std::tan(phi / 2.0), 0.0};
        m.validity = std::max(m.validity, std::abs(std::abs(zeta_of_z(m, x)) - 1.0));
        m.y0 = std::max(m.y0, std::abs(z_of_zeta(m, std::polar(1.0, phi)).imag()));
    }
    if (m.validity > kValidityWarning)
        m.warnings.push_back("geomaterial simulation is poor: surface deviates from |ζ| = 1 by " +
                             std::to_string(m.validity));

    const double scale = spec.size();
    const auto& pts = spec.points;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx back = backward_eval(m.bwd, forward_eval(m.fwd, pts[i]));
        m.roundtrip_collocation = std::max(m.roundtrip_collocation, std::abs(back - pts[i]) / scale);
        // midpoint of the w-images, mapped back and compared with the fine trace
        const cplx wa = forward_eval(m.fwd, pts[i]);
        const cplx wb = forward_eval(m.fwd, pts[(i + 1) % n]);
        cplx wm = wa + wb;
        wm /= std::abs(wm);
        const cplx zm = backward_eval(m.bwd, wm);
        m.roundtrip_midpoint = std::max(m.roundtrip_midpoint, detail::distance_to_trace(zm, spec.fine_trace()) / scale);
    }
    return m;
}

}  // namespace shallowcv

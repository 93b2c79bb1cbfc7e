#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace shallowcv {

enum class PlaneMode { plane_strain, plane_stress };

/// Elastic and gravitational parameters.  E in MPa, γ in kPa/m; stresses come out in kPa.
struct MaterialParams {
    double E_mpa = 20.0;
    double nu = 0.3;
    double gamma = 20.0;
    double k0 = 0.8;
    PlaneMode mode = PlaneMode::plane_strain;

    [[nodiscard]] double kappa() const {
        return mode == PlaneMode::plane_strain ? 3.0 - 4.0 * nu : (3.0 - nu) / (1.0 + nu);
    }
    /// Shear modulus in kPa.
    [[nodiscard]] double shear_modulus() const { return 1000.0 * E_mpa / (2.0 * (1.0 + nu)); }

    /// γ = 0 is accepted so that the unloaded problem can be run as a check.
    void validate() const {
        if (!(E_mpa > 0.0)) throw ConfigError("material.E_mpa must be positive");
        if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("material.nu must lie in [0, 0.5)");
        if (!(gamma >= 0.0)) throw ConfigError("material.gamma_kpa must be non-negative");
        if (!(k0 > 0.0)) throw ConfigError("material.k0 must be positive");
    }
};

struct StressTriple {
    double sx = 0.0;
    double sy = 0.0;
    double txy = 0.0;
};

/// Cavity boundary traced clockwise (geomaterial on the left when walking the trace).
struct CavitySpec {
    std::vector<cplx> points;
    cplx zc;
    cplx T1;
    cplx T2;
    std::string label;
    /// Optional fine trace of the same curve (same orientation), used for areas and
    /// traction integrals.  Presets fill it from their analytic shape.
    std::vector<cplx> dense;

    [[nodiscard]] double depth() const { return -zc.imag(); }
    [[nodiscard]] std::span<const cplx> fine_trace() const {
        return dense.empty() ? std::span<const cplx>(points) : std::span<const cplx>(dense);
    }
    [[nodiscard]] double size() const {
        double r = 0.0;
        for (auto p : points) r = std::max(r, std::abs(p - zc));
        return r;
    }
};

[[nodiscard]] inline StressTriple initial_stress(cplx point, const MaterialParams& mat) {
    const double y = point.imag();
    if (y > 0.0) throw GeometryError("initial_stress: point above the ground surface");
    return {mat.k0 * mat.gamma * y, mat.gamma * y, 0.0};
}

/// Excavation traction X + iY on the cavity wall, i.e. minus the geostatic traction
/// acting on the surface whose normal points into the cavity.
[[nodiscard]] inline cplx cavity_traction(cplx point, cplx unit_tangent, const MaterialParams& mat) {
    const double t = std::abs(unit_tangent);
    if (!(t > 0.0)) throw GeometryError("cavity_traction: zero tangent");
    const cplx u = unit_tangent / t;
    const double y = point.imag();
    return {-mat.k0 * mat.gamma * y * u.imag(), mat.gamma * y * u.real()};
}

/// Shoelace area, positive for counterclockwise traces.
[[nodiscard]] inline double signed_area(std::span<const cplx> pts) {
    const std::size_t n = pts.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a = pts[i];
        const cplx b = pts[(i + 1) % n];
        s += a.real() * b.imag() - b.real() * a.imag();
    }
    return 0.5 * s;
}

[[nodiscard]] inline bool point_in_polygon(cplx p, std::span<const cplx> poly) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const cplx a = poly[i];
        const cplx b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
            const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (p.real() < x) inside = !inside;
        }
    }
    return inside;
}

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

inline bool self_intersecting(std::span<const cplx> pts) {
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
        }
    }
    return false;
}

inline cplx centroid(std::span<const cplx> pts) {
    const std::size_t n = pts.size();
    double a = 0.0;
    cplx c{};
    for (std::size_t i = 0; i < n; ++i) {
        const cplx p = pts[i];
        const cplx q = pts[(i + 1) % n];
        const double w = cross(p, q);
        a += w;
        c += (p + q) * w;
    }
    return c / (3.0 * a);
}

}  // namespace detail

/// Checks every CavitySpec invariant; throws GeometryError naming the first violation.
inline void validate(const CavitySpec& s) {
    if (s.points.size() < 16) throw GeometryError("cavity trace needs at least 16 points");
    if (s.points.size() % 2 != 0) throw GeometryError("cavity trace needs an even number (2N) of points");
    double xmin = s.points.front().real(), xmax = xmin;
    for (auto p : s.points) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw GeometryError("non-finite cavity point");
        if (!(p.imag() < 0.0)) throw GeometryError("cavity point at or above the ground surface");
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
    }
    const double a = signed_area(s.points);
    if (a == 0.0 || !std::isfinite(a)) throw GeometryError("degenerate cavity trace (zero area)");
    if (a > 0.0) throw GeometryError("cavity trace must be clockwise");
    if (s.points.size() <= 4096 && detail::self_intersecting(s.points))
        throw GeometryError("self-intersecting cavity trace");
    if (!point_in_polygon(s.zc, s.points)) throw GeometryError("cavity center z_c is not inside the trace");
    if (s.T1.imag() != 0.0 || s.T2.imag() != 0.0) throw GeometryError("joint points must lie on y = 0");
    if (!(s.T1.real() < xmin)) throw GeometryError("joint T1 must lie left of the cavity");
    if (!(s.T2.real() > xmax)) throw GeometryError("joint T2 must lie right of the cavity");
}

struct AreaResultant {
    double W = 0.0;   ///< area / 2π (m²)
    double Ry = 0.0;  ///< upward resultant 2πWγ (kN/m)
};

[[nodiscard]] inline AreaResultant area_and_resultant(const CavitySpec& s, double gamma) {
    if (s.points.size() < 3) throw GeometryError("degenerate cavity trace (fewer than 3 points)");
    const double a = -signed_area(s.fine_trace());
    if (!(std::abs(a) > 0.0)) throw GeometryError("degenerate cavity trace (zero area)");
    if (s.points.size() <= 4096 && detail::self_intersecting(s.points))
        throw GeometryError("self-intersecting cavity trace");
    const double W = std::abs(a) / (2.0 * std::numbers::pi);
    return {W, 2.0 * std::numbers::pi * W * gamma};
}

/// Trigonometric interpolation of a closed trace, uniform in the point index.
[[nodiscard]] inline std::vector<cplx> densify_trace(std::span<const cplx> pts, std::size_t m) {
    const std::size_t n = pts.size();
    if (n >= m) return {pts.begin(), pts.end()};
    const int half = static_cast<int>(n / 2);
    const double tau = 2.0 * std::numbers::pi;
    std::vector<cplx> c(n);
    for (int k = -half; k < static_cast<int>(n) - half; ++k) {
        cplx acc{};
        for (std::size_t j = 0; j < n; ++j) acc += pts[j] * std::polar(1.0, -tau * k * double(j) / double(n));
        c[static_cast<std::size_t>(k + half)] = acc / double(n);
    }
    const bool nyquist = n % 2 == 0;
    std::vector<cplx> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = double(i) / double(m);
        cplx z{};
        for (int k = -half; k < static_cast<int>(n) - half; ++k) {
            const cplx ck = c[static_cast<std::size_t>(k + half)];
            if (nyquist && k == -half) {
                z += ck * std::cos(tau * half * t);  // split the Nyquist mode symmetrically
            } else {
                z += ck * std::polar(1.0, tau * k * t);
            }
        }
        out[i] = z;
    }
    return out;
}

inline constexpr std::size_t kDenseCount = 16384;

/// Sets the joint points at Re z_c ∓ x₀·L, with L the cavity depth unless given.
inline void place_joints(CavitySpec& s, double x0, std::optional<double> length = {}) {
    if (!(x0 > 0.0)) throw ConfigError("x0 must be positive");
    if (!(s.depth() > 0.0)) throw GeometryError("cavity center must lie below the ground surface");
    const double d = length ? *length : s.depth();
    s.T1 = {s.zc.real() - x0 * d, 0.0};
    s.T2 = {s.zc.real() + x0 * d, 0.0};
}

/// Two half-ellipses sharing the vertical axis x = 0: right semi-axes (right, semi_y),
/// left semi-axes (left, semi_y), centre at depth `depth`.
struct CompositeEllipse {
    double depth = 10.0;
    double right = 6.0;
    double left = 4.0;
    double semi_y = 5.0;
    int n = 30;
    /// Length that x₀ is normalized by.  The four presets share the Case 1 depth.
    double joint_length = 10.0;
};

/// Shape z(ζ) = −ia(1+ζ)/(1−ζ) + iΣ b_k(ζ^k − ζ^{−k}) sampled on |ζ| = α.
struct AxisymmetricShape {
    double a = 0.0;
    double alpha = 0.0;
    std::vector<double> b;
    int n = 30;

    [[nodiscard]] cplx eval(cplx zeta) const {
        cplx z = -I * a * (1.0 + zeta) / (1.0 - zeta);
        cplx p = zeta;
        for (std::size_t k = 0; k < b.size(); ++k) {
            z += I * b[k] * (p - 1.0 / p);
            p *= zeta;
        }
        return z;
    }

    /// Circle of radius r centred at depth h.
    [[nodiscard]] static AxisymmetricShape circle(double r, double h, int n = 30) {
        AxisymmetricShape s;
        s.alpha = r / (h + std::sqrt(h * h - r * r));
        s.a = h * (1.0 - s.alpha * s.alpha) / (1.0 + s.alpha * s.alpha);
        s.n = n;
        return s;
    }
};

namespace detail {

inline cplx composite_ellipse_point(const CompositeEllipse& c, int i, int n) {
    // i = 1..2n; first half sweeps the right side downward, second half the left side upward
    const double pi = std::numbers::pi;
    if (i <= n) {
        const double t = pi / 2.0 - (i - 1) * pi / n;
        return {c.right * std::cos(t), c.semi_y * std::sin(t) - c.depth};
    }
    const double t = -pi / 2.0 - (i - n - 1) * pi / n;
    return {c.left * std::cos(t), c.semi_y * std::sin(t) - c.depth};
}

}  // namespace detail

[[nodiscard]] inline CavitySpec build_case_boundary(const CompositeEllipse& c, double x0) {
    if (c.n < 8) throw GeometryError("collocation count N must be at least 8");
    if (!(c.depth > 0.0)) throw GeometryError("cavity depth must be positive");
    if (!(c.right > 0.0 && c.left > 0.0 && c.semi_y > 0.0)) throw GeometryError("semi-axes must be positive");
    if (c.semi_y >= c.depth) throw GeometryError("cavity reaches the ground surface");
    CavitySpec s;
    for (int i = 1; i <= 2 * c.n; ++i) s.points.push_back(detail::composite_ellipse_point(c, i, c.n));
    const int nd = static_cast<int>(kDenseCount / 2);
    s.dense.reserve(kDenseCount);
    for (int i = 1; i <= 2 * nd; ++i) s.dense.push_back(detail::composite_ellipse_point(c, i, nd));
    s.zc = {0.0, -c.depth};
    place_joints(s, x0, c.joint_length);
    s.label = "composite-ellipse";
    validate(s);
    return s;
}

[[nodiscard]] inline CavitySpec build_case_boundary(const AxisymmetricShape& a, double x0) {
    if (a.n < 8) throw GeometryError("collocation count N must be at least 8");
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw GeometryError("axisymmetric alpha must lie in (0, 1)");
    if (!(a.a > 0.0)) throw GeometryError("axisymmetric a must be positive");
    const double pi = std::numbers::pi;
    CavitySpec s;
    // σ_j = exp(−ijπ/N) walks the ring clockwise, matching the trace orientation
    for (int j = 0; j < 2 * a.n; ++j) s.points.push_back(a.eval(a.alpha * std::polar(1.0, -j * pi / a.n)));
    s.dense.reserve(kDenseCount);
    for (std::size_t j = 0; j < kDenseCount; ++j)
        s.dense.push_back(a.eval(a.alpha * std::polar(1.0, -2.0 * pi * double(j) / double(kDenseCount))));
    s.zc = detail::centroid(s.dense);
    place_joints(s, x0);
    s.label = "axisymmetric";
    validate(s);
    return s;
}

/// Explicit point list.  Counterclockwise input is reversed; z_c defaults to the centroid.
[[nodiscard]] inline CavitySpec build_case_boundary(std::vector<cplx> pts, double x0, std::optional<cplx> zc = {}) {
    if (pts.size() < 3) throw GeometryError("degenerate cavity trace (fewer than 3 points)");
    if (signed_area(pts) > 0.0) std::reverse(pts.begin() + 1, pts.end());
    CavitySpec s;
    s.points = std::move(pts);
    s.zc = zc ? *zc : detail::centroid(s.points);
    s.dense = densify_trace(s.points, kDenseCount);
    place_joints(s, x0);
    s.label = "explicit";
    validate(s);
    return s;
}

/// Depths of the four composite-ellipse presets.
[[nodiscard]] inline std::optional<double> preset_depth(std::string_view id) {
    if (id == "case1") return 10.0;
    if (id == "case2") return 8.0;
    if (id == "case3") return 6.0;
    if (id == "case4") return 5.2;
    return std::nullopt;
}

}  // namespace shallowcv

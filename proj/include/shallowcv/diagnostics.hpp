#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "field_eval.hpp"

namespace shallowcv {

/// Uniform grid θ_j = 2π(j + ½)/n − π; never hits ζ = 1 exactly.
[[nodiscard]] inline std::vector<double> theta_grid_open(int n) {
    std::vector<double> t(static_cast<std::size_t>(std::max(n, 0)));
    for (int j = 0; j < n; ++j) t[std::size_t(j)] = 2.0 * std::numbers::pi * (j + 0.5) / n - std::numbers::pi;
    return t;
}

/// Wrapped angular distance.
[[nodiscard]] inline double angle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

struct BoundaryResiduals {
    double free_traction = 0.0;     ///< max |σρ + iτρθ| / γH on the free arc
    double constrained_disp = 0.0;  ///< max |u + iv| / (γH·H/2G) on the constrained arc
    double cavity_l2 = 0.0;         ///< relative L2 mismatch of the cavity traction
    int n_free = 0;
    int n_constrained = 0;
    int n_cavity = 0;
    double traction_scale = 0.0;
    double displacement_scale = 0.0;
    double exclusion_rad = 0.0;
};

/// Pointwise boundary-condition residuals, skipping a window of the given half-width
/// around each joint.  H is the depth of the cavity center.
[[nodiscard]] inline BoundaryResiduals boundary_residuals(const Solution& sol, bool filter, int n_theta = 1440,
                                                          double exclusion_deg = 5.0) {
    BoundaryResiduals r;
    const double H = sol.spec.depth();
    const double gH = sol.mat.gamma * H;
    r.traction_scale = gH;
    r.displacement_scale = gH * H / (2.0 * sol.mat.shear_modulus());
    r.exclusion_rad = exclusion_deg * std::numbers::pi / 180.0;
    const double t1 = sol.map.theta1;
    const double t2 = sol.map.theta2;
    const auto grid = theta_grid_open(n_theta);

    for (const FieldSample& f : ring_fields(sol, 1.0, grid, filter)) {
        if (angle_distance(f.theta, t1) < r.exclusion_rad || angle_distance(f.theta, t2) < r.exclusion_rad) continue;
        if (f.theta > t1 && f.theta < t2) {
            r.constrained_disp = std::max(r.constrained_disp, std::hypot(f.u, f.v));
            ++r.n_constrained;
        } else {
            r.free_traction = std::max(r.free_traction, std::abs(f.traction()));
            ++r.n_free;
        }
    }

    // the rebuilt traction on the cavity wall, with the wall traversed clockwise
    double num = 0.0, den = 0.0;
    for (const FieldSample& f : ring_fields(sol, sol.alpha(), grid, filter)) {
        const cplx t = f.zeta * dz_dzeta(sol.map, f.zeta);
        const cplx e = t / std::abs(t);
        const cplx expected = cavity_traction(f.z, -I * e, sol.mat);
        const cplx rebuilt = -e * f.traction();
        num += std::norm(rebuilt - expected);
        den += std::norm(expected);
        ++r.n_cavity;
    }
    if (gH > 0.0) {
        r.free_traction /= gH;
        r.constrained_disp /= r.displacement_scale;
    }
    r.cavity_l2 = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return r;
}

/// Hoop stress along the cavity ring.
[[nodiscard]] inline std::vector<double> cavity_hoop_trace(const Solution& sol, bool filter, int n_theta = 720) {
    std::vector<double> out;
    out.reserve(std::size_t(n_theta));
    for (const FieldSample& f : ring_fields(sol, sol.alpha(), theta_grid_open(n_theta), filter)) out.push_back(f.sigma_theta);
    return out;
}

/// Vertical displacement along the ground ring.
[[nodiscard]] inline std::vector<double> surface_settlement_trace(const Solution& sol, bool filter, int n_theta = 720) {
    std::vector<double> out;
    out.reserve(std::size_t(n_theta));
    for (const FieldSample& f : ring_fields(sol, 1.0, theta_grid_open(n_theta), filter)) out.push_back(f.v);
    return out;
}

/// Total variation of a periodic sampled trace.
[[nodiscard]] inline double total_variation(const std::vector<double>& v) {
    double t = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) t += std::abs(v[(i + 1) % v.size()] - v[i]);
    return t;
}

[[nodiscard]] inline double sup_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("traces sampled on different grids");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Area/2π enclosed by the image of |ζ| = α, i.e. the cavity the solver actually sees.
[[nodiscard]] inline double simulated_cavity_W(const CompositeMap& m, int samples = 4096) {
    const double al = m.alpha();
    double a = 0.0;
    for (int j = 0; j < samples; ++j) {
        const cplx zeta = al * std::polar(1.0, 2.0 * std::numbers::pi * j / samples);
        const cplx z = z_of_zeta(m, zeta);
        const cplx dz = I * zeta * dz_dzeta(m, zeta);
        a += z.real() * dz.imag();
    }
    a *= 2.0 * std::numbers::pi / samples;
    return std::abs(a) / (2.0 * std::numbers::pi);
}

/// Largest |σρ + iτρθ| near ζ = 1 on the ground ring, sampled from both sides.
[[nodiscard]] inline double far_field_traction(const Solution& sol, bool filter) {
    const double deg = std::numbers::pi / 180.0;
    const std::vector<double> th{-0.1 * deg, -0.01 * deg, 0.01 * deg, 0.1 * deg};
    double m = 0.0;
    for (const FieldSample& f : ring_fields(sol, 1.0, th, filter)) m = std::max(m, std::abs(f.traction()));
    return m;
}

/// |g₀(1)|, in kPa·m (2G times the displacement).
[[nodiscard]] inline double far_field_displacement(const Solution& sol, bool filter) {
    const FieldSample f = ring_fields(sol, 1.0, std::vector<double>{0.0}, filter).front();
    return 2.0 * sol.mat.shear_modulus() * std::hypot(f.u, f.v);
}

}  // namespace shallowcv

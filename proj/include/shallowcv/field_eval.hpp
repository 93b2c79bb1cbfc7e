#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "problem.hpp"

namespace shallowcv {

/// σ-factors sin(kπ/N₀)/(kπ/N₀) for |k| ≤ N₀.
struct LanczosWeights {
    int N0 = 0;
    std::vector<double> L;  ///< index k + N₀

    [[nodiscard]] double operator()(int k) const {
        return k >= -N0 && k <= N0 ? L[std::size_t(k + N0)] : 0.0;
    }
};

[[nodiscard]] inline LanczosWeights lanczos_weights(int N0) {
    if (N0 < 1) throw ConfigError("Lanczos truncation must be at least 1");
    LanczosWeights w;
    w.N0 = N0;
    w.L.resize(std::size_t(2 * N0 + 1));
    for (int k = -N0; k <= N0; ++k) {
        if (k == 0) {
            w.L[std::size_t(N0)] = 1.0;
            continue;
        }
        if (std::abs(k) == N0) {
            w.L[std::size_t(k + N0)] = 0.0;  // sin(π) is not exactly zero in floating point
            continue;
        }
        const double x = k * std::numbers::pi / N0;
        w.L[std::size_t(k + N0)] = std::sin(x) / x;
    }
    return w;
}

/// Rigid translation making g₀ vanish at ζ = 1.
[[nodiscard]] inline cplx rigid_constant(const SolverState& s, const LanczosWeights* w) {
    cplx acc{};
    for (int k = -s.N0; k <= s.N0; ++k) {
        if (k == 0) continue;
        const cplx term = (s.kappa * s.A(k - 1) + s.B(k - 1)) / double(k);
        acc += w ? (*w)(k) * term : term;
    }
    return -acc;
}

struct FieldSample {
    double rho = 0.0;
    double theta = 0.0;
    cplx zeta;
    cplx z;
    // excavation-induced, curvilinear
    double sigma_rho = 0.0;
    double sigma_theta = 0.0;
    double tau_rt = 0.0;
    // excavation-induced, rectangular
    double sigma_x = 0.0;
    double sigma_y = 0.0;
    double tau_xy = 0.0;
    // total = excavation + geostatic
    double sigma_x_total = 0.0;
    double sigma_y_total = 0.0;
    double tau_xy_total = 0.0;
    double u = 0.0;
    double v = 0.0;
    bool filtered = false;

    [[nodiscard]] cplx traction() const { return {sigma_rho, tau_rt}; }
};

/// Coefficients in σ^k (|k| ≤ N₀) of the three ring series at radius ρ:
///   stress  z'(σρ + iτρθ),  trace  φ'(ζ),  displacement 2G(u + iv).
struct RingSeries {
    double rho = 0.0;
    IndexedSeries stress;
    IndexedSeries trace;
    IndexedSeries disp;
};

[[nodiscard]] inline RingSeries ring_series(const Solution& sol, double rho, const LanczosWeights* w) {
    const SolverState& s = sol.state;
    const int N0 = s.N0;
    const double kap = s.kappa;
    const bool outer = rho >= 1.0;
    RingExpansion fr;
    if (!outer) fr = rho == sol.f_alpha.rho ? sol.f_alpha : ring_expand(sol.map, rho, sol.cfg.M);

    IndexedSeries conjA(-N0, N0);  // conj(A_m)·ρ^m
    for (int m = -N0; m <= N0; ++m) conjA.at(m) = std::conj(s.A(m)) * std::pow(rho, m);

    RingSeries r{rho, IndexedSeries(-N0, N0), IndexedSeries(-N0, N0), IndexedSeries(-N0, N0)};
    const cplx C0 = rigid_constant(s, w);
    for (int k = -N0; k <= N0; ++k) {
        cplx st = s.A(k) * std::pow(rho, k) - s.B(k) * std::pow(rho, -k - 2);
        cplx tr = s.A(k) * std::pow(rho, k);
        cplx dp{};
        if (k != 0) dp = (kap * s.A(k - 1) * std::pow(rho, k) + s.B(k - 1) * std::pow(rho, -k)) / double(k);
        if (!outer) {
            cplx cs{}, cd{};
            for (int m = -N0; m <= N0; ++m) {
                cs += fr.f(m + k + 1) * conjA(m);
                cd += fr.f(m + k) * conjA(m);
            }
            st += double(k + 1) * cs / rho;
            dp -= cd;
        }
        if (k == 0) {
            dp += (kap * s.A(-1) - s.B(-1)) * std::log(rho);
            dp += C0;
        }
        if (w) {
            const double L = (*w)(k);
            st *= L;
            tr *= L;
            if (k != 0) dp *= L;
        }
        r.stress.at(k) = st;
        r.trace.at(k) = tr;
        r.disp.at(k) = dp;
    }
    return r;
}

namespace detail {

inline FieldSample sample_from_series(const Solution& sol, const RingSeries& rs, double theta, bool filtered) {
    FieldSample f;
    f.rho = rs.rho;
    f.theta = theta;
    f.filtered = filtered;
    const cplx sigma = std::polar(1.0, theta);
    f.zeta = rs.rho * sigma;
    const cplx g0 = eval_series(rs.disp, sigma);
    const double twoG = 2.0 * sol.mat.shear_modulus();
    f.u = g0.real() / twoG;
    f.v = g0.imag() / twoG;

    const cplx inv = inv_dz_dzeta(sol.map, f.zeta);
    if (inv == cplx{}) {  // ζ = 1, physical infinity
        f.z = {std::numeric_limits<double>::infinity(), 0.0};
        return f;
    }
    f.z = z_of_zeta(sol.map, f.zeta);
    const cplx s = inv * eval_series(rs.stress, sigma);
    const double T = 4.0 * (inv * eval_series(rs.trace, sigma)).real();
    f.sigma_rho = s.real();
    f.tau_rt = s.imag();
    f.sigma_theta = T - s.real();

    const cplx rot = (std::conj(f.zeta) / f.zeta) * (inv / std::conj(inv));
    const cplx dv = (T - 2.0 * std::conj(s)) * rot;  // σy − σx + 2iτxy
    f.sigma_x = 0.5 * (T - dv.real());
    f.sigma_y = 0.5 * (T + dv.real());
    f.tau_xy = 0.5 * dv.imag();

    // the simulated surface may sit a hair above y = 0
    const StressTriple s0 = initial_stress({f.z.real(), std::min(f.z.imag(), 0.0)}, sol.mat);
    f.sigma_x_total = f.sigma_x + s0.sx;
    f.sigma_y_total = f.sigma_y + s0.sy;
    f.tau_xy_total = f.tau_xy + s0.txy;
    return f;
}

}  // namespace detail

[[nodiscard]] inline std::vector<FieldSample> ring_fields(const Solution& sol, double rho, std::span<const double> thetas, bool filter) {
    const double al = sol.alpha();
    if (!(rho >= al * (1.0 - 1e-12) && rho <= 1.0)) throw GeometryError("ring radius outside [α, 1]");
    const LanczosWeights w = lanczos_weights(sol.state.N0);
    const RingSeries rs = ring_series(sol, rho, filter ? &w : nullptr);
    std::vector<FieldSample> out;
    out.reserve(thetas.size());
    for (double t : thetas) out.push_back(detail::sample_from_series(sol, rs, t, filter));
    return out;
}

/// Uniform angle grid θ_j = 2πj/n − π, j = 0..n−1 (contains θ = 0 when n is even).
[[nodiscard]] inline std::vector<double> theta_grid(int n) {
    std::vector<double> t(static_cast<std::size_t>(std::max(n, 0)));
    for (int j = 0; j < n; ++j) t[std::size_t(j)] = 2.0 * std::numbers::pi * j / n - std::numbers::pi;
    return t;
}

/// Newton inversion of the backward composite map, seeded by the forward composite map.
[[nodiscard]] inline cplx invert_composite(const CompositeMap& m, cplx z, double tol = 1e-10) {
    cplx zeta = zeta_of_z(m, z);
    const double scale = std::max(1.0, std::abs(z));
    double res = std::abs(z_of_zeta(m, zeta) - z);
    for (int it = 0; it < 60 && res > tol * scale; ++it) {
        const cplx step = (z_of_zeta(m, zeta) - z) / dz_dzeta(m, zeta);
        double lam = 1.0;
        cplx trial = zeta - step;
        double r2 = std::abs(z_of_zeta(m, trial) - z);
        while (r2 > res && lam > 1e-4) {
            lam *= 0.5;
            trial = zeta - lam * step;
            r2 = std::abs(z_of_zeta(m, trial) - z);
        }
        zeta = trial;
        res = r2;
    }
    if (!(res <= 1e3 * tol * scale)) throw GeometryError("composite-map inversion did not converge");
    return zeta;
}

/// Fields at physical points inside the simulated geomaterial.
[[nodiscard]] inline std::vector<FieldSample> physical_fields(const Solution& sol, std::span<const cplx> points, bool filter) {
    const double al = sol.alpha();
    const LanczosWeights w = lanczos_weights(sol.state.N0);
    std::map<double, RingSeries> cache;
    std::vector<FieldSample> out;
    out.reserve(points.size());
    for (cplx z : points) {
        const cplx zeta = invert_composite(sol.map, z);
        double rho = std::abs(zeta);
        if (rho < al * (1.0 - 1e-9) || rho > 1.0 + 1e-9) throw GeometryError("point outside the simulated geomaterial");
        rho = std::clamp(rho, al, 1.0);
        auto it = cache.find(rho);
        if (it == cache.end()) it = cache.emplace(rho, ring_series(sol, rho, filter ? &w : nullptr)).first;
        out.push_back(detail::sample_from_series(sol, it->second, std::arg(zeta), filter));
    }
    return out;
}

}  // namespace shallowcv

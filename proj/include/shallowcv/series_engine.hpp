#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "annulus_map.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace shallowcv {

/// Taylor (|ζ| < 1) and Laurent (|ζ| > 1) coefficients of the mixed-boundary kernel
///   X(ζ) = (ζ − t₁)^{−1/2−iλ} (ζ − t₂)^{−1/2+iλ},  λ = ln κ / 2π,
/// on the branch with ζX(ζ) → 1 at infinity and the cut along the constrained arc.
struct AnnulusCoeffs {
    double lambda = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    cplx t1;
    cplx t2;
    std::vector<cplx> alpha;  ///< k = 0..M
    std::vector<cplx> beta;   ///< k = 0..M
    std::vector<cplx> c;      ///< binomial coefficients of exponent −1/2 − iλ

    [[nodiscard]] cplx a(int k) const { return k >= 0 && k < int(alpha.size()) ? alpha[std::size_t(k)] : cplx{}; }
    [[nodiscard]] cplx b(int k) const { return k >= 0 && k < int(beta.size()) ? beta[std::size_t(k)] : cplx{}; }
};

/// θ₁ must lie in (−π, 0) and θ₂ in (0, π): the free arc then passes through ζ = −1.
[[nodiscard]] inline AnnulusCoeffs kernel_coeffs(double kappa, double theta1, double theta2, int M) {
    if (!(kappa > 1.0)) throw ConfigError("Kolosov parameter must exceed 1");
    if (M < 8) throw ConfigError("expansion truncation M must be at least 8");
    if (!(theta1 > -std::numbers::pi && theta1 < 0.0 && theta2 > 0.0 && theta2 < std::numbers::pi))
        throw GeometryError("joint angles must satisfy −π < θ₁ < 0 < θ₂ < π");

    AnnulusCoeffs r;
    r.lambda = std::log(kappa) / (2.0 * std::numbers::pi);
    r.theta1 = theta1;
    r.theta2 = theta2;
    r.t1 = std::polar(1.0, theta1);
    r.t2 = std::polar(1.0, theta2);
    const cplx p{-0.5, -r.lambda};  // exponent on (ζ − t₁); its conjugate goes on (ζ − t₂)
    const auto n = static_cast<std::size_t>(M) + 1;

    r.c.resize(n);
    r.c[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) r.c[k] = r.c[k - 1] * (cplx{0.5, -r.lambda} - double(k)) / double(k);

    // t^p on the chosen branch: exp(p·iθ)
    const cplx t1p = std::exp(p * I * theta1);
    const cplx t2p = std::exp(std::conj(p) * I * theta2);
    const cplx a0 = -t1p * t2p;

    // u_l = (−1)^l c_l t₁^{−l}, v_l = (−1)^l c̄_l t₂^{−l}; α = α₀ (u ∗ v)
    std::vector<cplx> u(n), v(n), s(n), sb(n);
    const cplx r1 = -std::conj(r.t1);  // −1/t₁
    const cplx r2 = -std::conj(r.t2);
    const cplx q1 = -r.t1;
    const cplx q2 = -r.t2;
    cplx pu{1.0}, pv{1.0}, ps{1.0}, pt{1.0};
    for (std::size_t l = 0; l < n; ++l) {
        u[l] = r.c[l] * pu;
        v[l] = std::conj(r.c[l]) * pv;
        s[l] = r.c[l] * ps;               // (−1)^l c_l t₁^l
        sb[l] = std::conj(r.c[l]) * pt;   // (−1)^l c̄_l t₂^l
        pu *= r1;
        pv *= r2;
        ps *= q1;
        pt *= q2;
    }
    r.alpha.assign(n, cplx{});
    r.beta.assign(n, cplx{});
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t l = 0; l <= k; ++l) acc += u[l] * v[k - l];
        r.alpha[k] = a0 * acc;
    }
    // β_k = Σ_{l=0}^{k−1} s_l sb_{k−1−l}  (the (−1)^{k−1} sign is carried by s and sb)
    for (std::size_t k = 1; k < n; ++k) {
        cplx acc{};
        for (std::size_t l = 0; l <= k - 1; ++l) acc += s[l] * sb[k - 1 - l];
        r.beta[k] = acc;
    }
    return r;
}

/// Σ α_k ζ^k, the interior series of X.
[[nodiscard]] inline cplx kernel_interior(const AnnulusCoeffs& c, cplx zeta) {
    cplx acc{};
    for (std::size_t k = c.alpha.size(); k-- > 0;) acc = acc * zeta + c.alpha[k];
    return acc;
}

/// Σ β_k ζ^{−k}, the exterior series of X.
[[nodiscard]] inline cplx kernel_exterior(const AnnulusCoeffs& c, cplx zeta) {
    const cplx u = 1.0 / zeta;
    cplx acc{};
    for (std::size_t k = c.beta.size(); k-- > 0;) acc = acc * u + c.beta[k];
    return acc;
}

/// Largest |ζX(ζ) − 1| over a ring of the given radius, evaluated with the exterior series.
[[nodiscard]] inline double branch_check(const AnnulusCoeffs& c, double radius, int samples = 16) {
    double e = 0.0;
    for (int j = 0; j < samples; ++j) {
        const cplx z = std::polar(radius, 2.0 * std::numbers::pi * (j + 0.37) / samples);
        e = std::max(e, std::abs(z * kernel_exterior(c, z) - 1.0));
    }
    return e;
}

/// Uniform-angle discrete Fourier coefficients c_k, |k| ≤ M, of samples F(e^{2πij/P}).
[[nodiscard]] inline IndexedSeries fourier_coefficients(const std::vector<cplx>& samples, int M) {
    const auto P = static_cast<long>(samples.size());
    if (P < 2L * M + 1) throw ConfigError("too few samples for the requested Fourier truncation");
    std::vector<cplx> tw(static_cast<std::size_t>(P));
    for (long j = 0; j < P; ++j) tw[std::size_t(j)] = std::polar(1.0, -2.0 * std::numbers::pi * double(j) / double(P));
    IndexedSeries out(-M, M);
    for (int k = -M; k <= M; ++k) {
        const long kk = ((k % P) + P) % P;
        cplx acc{};
        long idx = 0;
        for (long j = 0; j < P; ++j) {
            acc += samples[std::size_t(j)] * tw[std::size_t(idx)];
            idx += kk;
            if (idx >= P) idx -= P;
        }
        out.at(k) = acc / double(P);
    }
    return out;
}

/// Evaluates Σ c_k σ^k.
[[nodiscard]] inline cplx eval_series(const IndexedSeries& c, cplx sigma) {
    cplx acc{};
    for (int k = c.hi(); k >= 0; --k) acc = acc * sigma + c(k);
    const cplx inv = 1.0 / sigma;
    cplx neg{};
    for (int k = c.lo(); k <= -1; ++k) neg = (neg + c(k)) * inv;
    return acc + neg;
}

/// F(σ) = (z(ρσ) − z(σ/ρ)) / conj(z'(ρσ)).
[[nodiscard]] inline cplx ring_target(const CompositeMap& map, double rho, cplx sigma) {
    const cplx zin = z_of_zeta(map, rho * sigma);
    const cplx zout = z_of_zeta(map, sigma / rho);
    const cplx d = dz_dzeta(map, rho * sigma);
    if (!(std::abs(d) > 0.0) || !std::isfinite(std::abs(d))) throw GeometryError("singular map derivative on the sampling ring");
    return (zin - zout) / std::conj(d);
}

struct RingExpansion {
    double rho = 0.0;
    IndexedSeries f;  ///< k = −M..M
};

[[nodiscard]] inline RingExpansion ring_expand(const CompositeMap& map, double rho, int M, int P = 0) {
    if (!(rho >= map.alpha() * (1.0 - 1e-12) && rho < 1.0)) throw GeometryError("ring radius outside [α, 1)");
    if (P == 0) P = 4 * M + 1;
    std::vector<cplx> smp(static_cast<std::size_t>(P));
    for (int j = 0; j < P; ++j) smp[std::size_t(j)] = ring_target(map, rho, std::polar(1.0, 2.0 * std::numbers::pi * j / P));
    return {rho, fourier_coefficients(smp, M)};
}

/// Fourier data of the cavity traction integral on ρ = α.
struct CavityRhs {
    IndexedSeries g;   ///< k = −M..M
    IndexedSeries Ik;  ///< k = 1..M
    IndexedSeries Jk;  ///< k = 1..M
    cplx K0;
};

/// y·(k₀·i dy/dσ + dx/dσ) on the cavity ring.
[[nodiscard]] inline cplx cavity_integrand(const CompositeMap& map, double k0, cplx sigma) {
    const double al = map.alpha();
    const cplx z = z_of_zeta(map, al * sigma);
    const cplx d = dz_dzeta(map, al * sigma);
    const cplx dc = std::conj(d) / (sigma * sigma);
    const cplx dx = 0.5 * al * (d - dc);
    const cplx idy = 0.5 * al * (d + dc);
    return z.imag() * (k0 * idy + dx);
}

[[nodiscard]] inline CavityRhs cavity_rhs(const CompositeMap& map, const MaterialParams& mat, int M, int P = 0) {
    if (P == 0) P = 4 * M + 1;
    std::vector<cplx> smp(static_cast<std::size_t>(P));
    for (int j = 0; j < P; ++j) smp[std::size_t(j)] = cavity_integrand(map, mat.k0, std::polar(1.0, 2.0 * std::numbers::pi * j / P));
    CavityRhs r;
    r.g = fourier_coefficients(smp, M);
    r.Ik = IndexedSeries(1, M);
    r.Jk = IndexedSeries(1, M);
    const double g = mat.gamma;
    for (int k = 1; k <= M; ++k) {
        r.Ik.at(k) = g * r.g(-k - 1) / double(k);
        r.Jk.at(k) = -g * r.g(k - 1) / double(k);
    }
    r.K0 = -g * r.g(-1);
    return r;
}

}  // namespace shallowcv

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dense.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace shallowcv {

inline constexpr double kConditionWarning = 1e10;

/// Charge-simulation map of the cavity exterior onto |w| > 1:
///   w(z) = (z − z_c)·exp(Γ + Σ Q_k ln((z − Z_k)/(z − z₀))).
struct CsmForwardMap {
    double robin = 0.0;  ///< Γ
    std::vector<cplx> Z;
    std::vector<double> Q;
    cplx zc;
    cplx z0;
    double condition = 0.0;
    std::vector<std::string> warnings;
};

/// Backward series z(w) = Σ_{k=−1}^{2N−2} q_k w^{−k}; q[0] holds q_{−1}.
struct CsmBackwardMap {
    std::vector<cplx> q;
    double condition = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] cplx coeff(int k) const { return q.at(static_cast<std::size_t>(k + 1)); }
};

[[nodiscard]] inline std::vector<cplx> charge_points(std::span<const cplx> pts, double k2) {
    const std::size_t n = pts.size();
    std::vector<cplx> Z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx prev = pts[(k + n - 1) % n];
        const cplx next = pts[(k + 1) % n];
        const double hk = 0.5 * (std::abs(next - pts[k]) + std::abs(pts[k] - prev));
        // clockwise trace: tangent turned by −π/2 points into the cavity
        const double theta = std::arg(next - prev) - std::numbers::pi / 2.0;
        Z[k] = pts[k] + k2 * hk * std::polar(1.0, theta);
    }
    return Z;
}

[[nodiscard]] inline CsmForwardMap solve_forward(const CavitySpec& spec, double k2) {
    const auto& pts = spec.points;
    const std::size_t n = pts.size();
    if (n < 16) throw GeometryError("CSM needs at least 16 collocation points");
    if (!(k2 > 0.0)) throw ConfigError("assignment factor k2 must be positive");

    CsmForwardMap m;
    m.zc = spec.zc;
    m.z0 = spec.zc;
    m.Z = charge_points(pts, k2);
    for (std::size_t k = 0; k < n; ++k) {
        if (!point_in_polygon(m.Z[k], pts)) {
            m.warnings.push_back("charge point " + std::to_string(k) + " lies outside the cavity trace");
        }
    }

    // unknowns (Q_1..Q_2N, Γ); rows: collocation conditions, then ΣQ = 0
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t k = 0; k < n; ++k) A(r, static_cast<Eigen::Index>(k)) = std::log(std::abs(pts[i] - m.Z[k]));
        A(r, static_cast<Eigen::Index>(n)) = 1.0;
        b(r) = -std::log(std::abs(pts[i] - m.zc));
    }
    for (std::size_t k = 0; k < n; ++k) A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = 1.0;

    const FactoredMatrix<double> f(A);
    m.condition = f.condition;
    if (f.singular()) throw GeometryError("CSM collocation system is singular (condition " + std::to_string(f.condition) + ")");
    if (f.condition > kConditionWarning)
        m.warnings.push_back("CSM collocation system ill-conditioned (condition " + std::to_string(f.condition) + ")");
    const Eigen::VectorXd x = f.solve(b);
    m.Q.assign(x.data(), x.data() + n);
    m.robin = x(static_cast<Eigen::Index>(n));
    return m;
}

namespace detail {

inline void check_regular(const CsmForwardMap& m, cplx z) {
    if (z == m.zc || z == m.z0) throw GeometryError("forward map evaluated at the cavity center");
    for (auto Zk : m.Z)
        if (z == Zk) throw GeometryError("forward map evaluated at a charge point");
}

}  // namespace detail

[[nodiscard]] inline cplx forward_eval(const CsmForwardMap& m, cplx z) {
    detail::check_regular(m, z);
    cplx s{m.robin, 0.0};
    for (std::size_t k = 0; k < m.Z.size(); ++k) s += m.Q[k] * std::log((z - m.Z[k]) / (z - m.z0));
    return (z - m.zc) * std::exp(s);
}

[[nodiscard]] inline cplx forward_deriv(const CsmForwardMap& m, cplx z) {
    const cplx w = forward_eval(m, z);
    cplx s = 1.0 / (z - m.zc);
    for (std::size_t k = 0; k < m.Z.size(); ++k) s += m.Q[k] * (1.0 / (z - m.Z[k]) - 1.0 / (z - m.z0));
    return w * s;
}

[[nodiscard]] inline cplx backward_eval(const CsmBackwardMap& b, cplx w) {
    if (w == cplx{}) throw GeometryError("backward map evaluated at w = 0");
    const cplx u = 1.0 / w;
    cplx acc{};
    for (std::size_t k = b.q.size() - 1; k >= 1; --k) acc = acc * u + b.q[k];  // Horner over k = 0..2N−2
    return b.q[0] * w + acc;
}

[[nodiscard]] inline cplx backward_deriv(const CsmBackwardMap& b, cplx w) {
    if (w == cplx{}) throw GeometryError("backward map evaluated at w = 0");
    const cplx u = 1.0 / w;
    // Σ_{k≥1} (−k) q_k u^{k+1}
    cplx acc{};
    for (std::size_t j = b.q.size() - 1; j >= 2; --j) {
        const double k = double(j) - 1.0;
        acc = acc * u + k * b.q[j];
    }
    return b.q[0] - acc * u * u;
}

[[nodiscard]] inline CsmBackwardMap fit_backward(const CsmForwardMap& m, const CavitySpec& spec) {
    const auto& pts = spec.points;
    const std::size_t n = pts.size();
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd A(N, N);
    Eigen::VectorXcd rhs(N);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx w = forward_eval(m, pts[i]);
        const cplx u = 1.0 / w;
        const auto r = static_cast<Eigen::Index>(i);
        A(r, 0) = w;
        cplx p{1.0, 0.0};
        for (Eigen::Index c = 1; c < N; ++c) {
            A(r, c) = p;
            p *= u;
        }
        rhs(r) = pts[i];
    }
    const FactoredMatrix<cplx> f(A);
    CsmBackwardMap b;
    b.condition = f.condition;
    if (f.singular()) throw GeometryError("backward-map system is singular (condition " + std::to_string(f.condition) + ")");
    if (f.condition > kConditionWarning)
        b.warnings.push_back("backward-map system ill-conditioned (condition " + std::to_string(f.condition) + ")");
    const Eigen::VectorXcd q = f.solve(rhs);
    b.q.assign(q.data(), q.data() + n);
    return b;
}

}  // namespace shallowcv

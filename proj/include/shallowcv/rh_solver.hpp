#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dense.hpp"
#include "series_engine.hpp"
#include "types.hpp"

namespace shallowcv {

struct SolverConfig {
    int N0 = 80;
    int M = 360;
    double eps = 1e-16;
    double rel_eps = 1e-14;
    int max_iters = 100;
    double x0 = 1.0;

    void validate() const {
        if (N0 < 4) throw ConfigError("solver.N0 must be at least 4");
        if (2 * N0 + 1 > M) throw ConfigError("solver.M must satisfy 2*N0 + 1 <= M");
        if (!(eps > 0.0)) throw ConfigError("solver.eps must be positive");
        if (!(rel_eps >= 0.0)) throw ConfigError("solver.rel_eps must be non-negative");
        if (max_iters < 1) throw ConfigError("solver.max_iters must be at least 1");
        if (!(x0 > 0.0)) throw ConfigError("x0 must be positive");
    }
};

/// The two triangular Toeplitz systems, factored once per solve.
///   negative-index system: unknowns d_{−1..−N₀}, rows k = 0..N₀−1, entries α_{n−k−1}
///   positive-index system: unknowns d_{0..N₀},   rows k = 0..N₀,   entries β_{n−k+1}
struct FactoredSystems {
    int N0 = 0;
    FactoredMatrix<cplx> neg;
    FactoredMatrix<cplx> pos;
    int factorizations = 0;
};

[[nodiscard]] inline FactoredSystems assemble_systems(const AnnulusCoeffs& c, const SolverConfig& cfg) {
    cfg.validate();
    if (int(c.alpha.size()) < 2 * cfg.N0 + 2) throw ConfigError("kernel coefficients truncated below 2*N0 + 1");
    const int N0 = cfg.N0;
    Eigen::MatrixXcd an = Eigen::MatrixXcd::Zero(N0, N0);
    for (int k = 0; k < N0; ++k)
        for (int n = k + 1; n <= N0; ++n) an(k, n - 1) = c.a(n - k - 1);
    Eigen::MatrixXcd bp = Eigen::MatrixXcd::Zero(N0 + 1, N0 + 1);
    for (int k = 0; k <= N0; ++k)
        for (int n = k; n <= N0; ++n) bp(k, n) = c.b(n - k + 1);

    FactoredSystems s;
    s.N0 = N0;
    s.neg = FactoredMatrix<cplx>(an);
    s.pos = FactoredMatrix<cplx>(bp);
    s.factorizations = 2;
    if (s.neg.singular()) throw SolverError("negative-index system is singular");
    if (s.pos.singular()) throw SolverError("positive-index system is singular");
    return s;
}

enum class StopReason { zero_rhs, tolerance, relative_tolerance, cap_reached, diverged };

[[nodiscard]] inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::zero_rhs: return "zero_rhs";
        case StopReason::tolerance: return "tolerance";
        case StopReason::relative_tolerance: return "relative_tolerance";
        case StopReason::cap_reached: return "cap_reached";
        case StopReason::diverged: return "diverged";
    }
    return "unknown";
}

struct SolverState {
    int N0 = 0;
    double kappa = 0.0;
    IndexedSeries d;  ///< n = −N₀..N₀
    IndexedSeries A;  ///< k = −N₀..N₀
    IndexedSeries B;  ///< k = −N₀..N₀
    int iterations = 0;  ///< passes after the first solve
    std::vector<double> residual_history;  ///< max|d^{(q)}|, q = 0, 1, ...
    StopReason stop = StopReason::cap_reached;
    int factorizations = 0;
    double condition_neg = 0.0;
    double condition_pos = 0.0;
};

/// Truncated products A_k = Σ_{m≤k} α_{k−m} d_m and B_k = Σ_{m≥k} β_{m−k} d_m, |k| ≤ N₀.
inline void assemble_potentials(const AnnulusCoeffs& c, const IndexedSeries& d, int N0, IndexedSeries& A, IndexedSeries& B) {
    A = IndexedSeries(-N0, N0);
    B = IndexedSeries(-N0, N0);
    for (int k = -N0; k <= N0; ++k) {
        cplx a{}, b{};
        for (int m = -N0; m <= k; ++m) a += c.a(k - m) * d(m);
        for (int m = k; m <= N0; ++m) b += c.b(m - k) * d(m);
        A.at(k) = a;
        B.at(k) = b;
    }
}

namespace detail {

inline IndexedSeries solve_pair(const FactoredSystems& s, const Eigen::VectorXcd& rn, const Eigen::VectorXcd& rp) {
    const int N0 = s.N0;
    const Eigen::VectorXcd xn = s.neg.solve(rn);
    const Eigen::VectorXcd xp = s.pos.solve(rp);
    IndexedSeries d(-N0, N0);
    for (int n = 1; n <= N0; ++n) d.at(-n) = xn(n - 1);
    for (int n = 0; n <= N0; ++n) d.at(n) = xp(n);
    return d;
}

}  // namespace detail

/// Fixed-point iteration on the cavity coupling; each pass reuses the two factorizations.
[[nodiscard]] inline SolverState iterate(const FactoredSystems& sys, const AnnulusCoeffs& c, const CavityRhs& rhs,
                                         const RingExpansion& fa, double alpha, double kappa, const SolverConfig& cfg) {
    const int N0 = sys.N0;
    SolverState st;
    st.N0 = N0;
    st.kappa = kappa;
    st.factorizations = sys.factorizations;
    st.condition_neg = sys.neg.condition;
    st.condition_pos = sys.pos.condition;

    std::vector<double> ak(std::size_t(2 * N0 + 3));  // α^k, k = 0..2N₀+2
    ak[0] = 1.0;
    for (std::size_t k = 1; k < ak.size(); ++k) ak[k] = ak[k - 1] * alpha;

    Eigen::VectorXcd rn = Eigen::VectorXcd::Zero(N0);
    Eigen::VectorXcd rp = Eigen::VectorXcd::Zero(N0 + 1);
    rn(0) = rhs.K0 / (1.0 + kappa);
    rp(0) = -kappa * rhs.K0 / (1.0 + kappa);
    for (int k = 1; k < N0; ++k) rn(k) = -double(k) * ak[std::size_t(k)] * rhs.Ik(k);
    for (int k = 1; k <= N0; ++k) rp(k) = -double(k) * ak[std::size_t(k)] * rhs.Jk(k);

    IndexedSeries dq = detail::solve_pair(sys, rn, rp);
    st.d = dq;
    const double first = dq.max_abs();
    st.residual_history.push_back(first);
    st.stop = StopReason::cap_reached;
    if (first <= cfg.eps) {
        st.stop = StopReason::zero_rhs;
    } else {
        int rising = 0;
        IndexedSeries Aq, Bq;
        IndexedSeries sA(-N0, N0);  // α^m·conj(A_m)
        for (int q = 0; q < cfg.max_iters; ++q) {
            assemble_potentials(c, dq, N0, Aq, Bq);
            for (int m = -N0; m <= N0; ++m)
                sA.at(m) = std::pow(alpha, m) * std::conj(Aq(m));

            rn.setZero();
            rp.setZero();
            for (int k = 1; k < N0; ++k) {
                cplx conv{};
                for (int m = -N0; m <= N0; ++m) conv += sA(m) * fa.f(m - k);
                rn(k) = ak[std::size_t(2 * k)] * Bq(-k - 1) + double(k) * ak[std::size_t(k)] * conv;
            }
            for (int k = 1; k <= N0; ++k) {
                cplx conv{};
                for (int m = -N0; m <= N0; ++m) conv += sA(m) * fa.f(m + k);
                rp(k) = ak[std::size_t(2 * k)] * Aq(k - 1) + double(k) * ak[std::size_t(k)] * conv;
            }
            dq = detail::solve_pair(sys, rn, rp);
            for (int n = -N0; n <= N0; ++n) st.d.at(n) += dq(n);
            const double r = dq.max_abs();
            st.iterations = q + 1;
            rising = r > st.residual_history.back() ? rising + 1 : 0;
            st.residual_history.push_back(r);
            if (r <= cfg.eps) {
                st.stop = StopReason::tolerance;
                break;
            }
            if (r <= cfg.rel_eps * first) {
                st.stop = StopReason::relative_tolerance;
                break;
            }
            if (rising >= 5 || !std::isfinite(r)) {
                st.stop = StopReason::diverged;
                break;
            }
        }
    }
    assemble_potentials(c, st.d, N0, st.A, st.B);
    return st;
}

struct EquilibriumReport {
    double a_minus1 = 0.0;      ///< |A₋₁ + iWγ/(1+κ)| / |iWγ/(1+κ)|
    double b_minus1 = 0.0;      ///< |B₋₁ − iκWγ/(1+κ)| / |iκWγ/(1+κ)|
    double resultant = 0.0;     ///< |A₋₁ − B₋₁ + iWγ| / |Wγ|
    double single_valued = 0.0; ///< |κA₋₁ + B₋₁| / |A₋₁|
};

[[nodiscard]] inline EquilibriumReport check_equilibrium(const SolverState& s, double W, double gamma, double kappa) {
    EquilibriumReport r;
    const cplx a1 = s.A(-1);
    const cplx b1 = s.B(-1);
    const cplx ea = -I * W * gamma / (1.0 + kappa);
    const cplx eb = I * kappa * W * gamma / (1.0 + kappa);
    const double scale = std::abs(W * gamma);
    if (scale == 0.0) {
        r.a_minus1 = std::abs(a1);
        r.b_minus1 = std::abs(b1);
        r.resultant = std::abs(a1 - b1);
        r.single_valued = std::abs(kappa * a1 + b1);
        return r;
    }
    r.a_minus1 = std::abs(a1 - ea) / std::abs(ea);
    r.b_minus1 = std::abs(b1 - eb) / std::abs(eb);
    r.resultant = std::abs(a1 - b1 + I * W * gamma) / scale;
    r.single_valued = std::abs(kappa * a1 + b1) / std::abs(a1);
    return r;
}

}  // namespace shallowcv

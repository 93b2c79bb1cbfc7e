#pragma once

#include "annulus_map.hpp"
#include "geometry.hpp"
#include "rh_solver.hpp"
#include "series_engine.hpp"

namespace shallowcv {

/// Everything produced by one solve; immutable afterwards.
struct Solution {
    CavitySpec spec;
    MaterialParams mat;
    SolverConfig cfg;
    double k2 = 1.2;
    CompositeMap map;
    AnnulusCoeffs coeffs;
    RingExpansion f_alpha;
    CavityRhs rhs;
    SolverState state;
    AreaResultant area;

    [[nodiscard]] double alpha() const { return map.alpha(); }
    [[nodiscard]] double kappa() const { return mat.kappa(); }
};

/// Map, expand, and iterate.  Divergence is reported through state.stop, not thrown,
/// so callers can still write diagnostics.
[[nodiscard]] inline Solution solve_problem(CavitySpec spec, const MaterialParams& mat, const SolverConfig& cfg, double k2) {
    mat.validate();
    cfg.validate();
    Solution s;
    s.spec = std::move(spec);
    s.mat = mat;
    s.cfg = cfg;
    s.k2 = k2;
    s.map = compose(s.spec, k2);
    s.coeffs = kernel_coeffs(mat.kappa(), s.map.theta1, s.map.theta2, cfg.M);
    s.f_alpha = ring_expand(s.map, s.alpha(), cfg.M);
    s.rhs = cavity_rhs(s.map, mat, cfg.M);
    const FactoredSystems sys = assemble_systems(s.coeffs, cfg);
    s.state = iterate(sys, s.coeffs, s.rhs, s.f_alpha, s.alpha(), mat.kappa(), cfg);
    s.area = area_and_resultant(s.spec, mat.gamma);
    return s;
}

}  // namespace shallowcv

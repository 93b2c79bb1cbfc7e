#pragma once

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "diagnostics.hpp"
#include "output.hpp"
#include "problem.hpp"

namespace shallowcv::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverFailure = 3, kIoError = 4 };

struct Options {
    std::string config;
    std::string out;
    std::string filter;
    bool compare_filter = false;
    std::vector<double> sweep_x0;
    std::vector<int> sweep_n0;
    std::vector<double> rings;
};

[[nodiscard]] inline RunConfig effective_config(const Options& o) {
    RunConfig c = load_config(o.config);
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.filter.empty()) c.filter = parse_filter(o.filter);
    if (o.compare_filter) c.filter = FilterMode::both;
    if (!o.rings.empty()) c.grids.rings_rho = o.rings;
    c.validate();
    return c;
}

[[nodiscard]] inline std::vector<bool> filter_passes(FilterMode f) {
    switch (f) {
        case FilterMode::on: return {true};
        case FilterMode::off: return {false};
        case FilterMode::both: return {true, false};
    }
    return {true};
}

inline const char* filter_tag(bool f) { return f ? "filtered" : "unfiltered"; }

namespace detail {

inline void emit_warnings(const std::vector<std::string>& w, std::ostream& log) {
    for (const auto& s : w) log << "warning: " << s << '\n';
}

inline json equilibrium_json(const EquilibriumReport& e) {
    return {{"a_minus1", e.a_minus1}, {"b_minus1", e.b_minus1}, {"resultant", e.resultant}, {"single_valued", e.single_valued}};
}

inline double k0_error(cplx K0, double W, double gamma) {
    const double s = std::abs(W * gamma);
    const double d = std::abs(K0 + I * W * gamma);
    return s > 0.0 ? d / s : d;
}

inline std::vector<std::string> solve_warnings(const Solution& sol) {
    std::vector<std::string> w = sol.map.warnings;
    if (sol.state.stop == StopReason::cap_reached)
        w.push_back("iteration cap reached with final correction " + fmt(sol.state.residual_history.back()));
    if (sol.state.stop == StopReason::diverged) w.push_back("iteration diverged");
    return w;
}

}  // namespace detail

[[nodiscard]] inline json solver_report(const Solution& sol, const json& echo) {
    const double W = sol.area.W;
    const double Wsim = simulated_cavity_W(sol.map);
    const double g = sol.mat.gamma;
    const double kap = sol.kappa();
    const LanczosWeights w = lanczos_weights(sol.state.N0);
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "solver_report";
    j["config"] = echo;
    j["Q"] = sol.state.iterations;
    j["stop_reason"] = to_string(sol.state.stop);
    j["residual_history"] = sol.state.residual_history;
    j["factorizations"] = sol.state.factorizations;
    j["condition_estimates"] = {{"negative_index_system", sol.state.condition_neg},
                                {"positive_index_system", sol.state.condition_pos},
                                {"csm_forward", sol.map.fwd.condition},
                                {"csm_backward", sol.map.bwd.condition}};
    j["kernel"] = {{"kappa", kap},
                   {"lambda", sol.coeffs.lambda},
                   {"theta1_deg", sol.map.theta1 * 180.0 / std::numbers::pi},
                   {"theta2_deg", sol.map.theta2 * 180.0 / std::numbers::pi}};
    j["map"] = {{"alpha", sol.alpha()}, {"h", sol.map.ver.h}, {"validity_metric", sol.map.validity}, {"y0_m", sol.map.y0}};
    j["equilibrium"] = {{"W_trace_m2", W},
                        {"W_simulated_m2", Wsim},
                        {"K0", complex_json(sol.rhs.K0)},
                        {"K0_rel_error_trace", detail::k0_error(sol.rhs.K0, W, g)},
                        {"K0_rel_error_simulated", detail::k0_error(sol.rhs.K0, Wsim, g)},
                        {"A_minus1", complex_json(sol.state.A(-1))},
                        {"B_minus1", complex_json(sol.state.B(-1))},
                        {"vs_trace_area", detail::equilibrium_json(check_equilibrium(sol.state, W, g, kap))},
                        {"vs_simulated_area", detail::equilibrium_json(check_equilibrium(sol.state, Wsim, g, kap))}};
    j["rigid_constant"] = {{"filtered", complex_json(rigid_constant(sol.state, &w))},
                           {"unfiltered", complex_json(rigid_constant(sol.state, nullptr))}};
    j["warnings"] = detail::solve_warnings(sol);
    return j;
}

inline int cmd_map(const RunConfig& cfg, std::ostream& log) {
    const json echo = config_echo(cfg);
    const CavitySpec spec = build_geometry(cfg.geometry, cfg.solver.x0);
    const CompositeMap m = compose(spec, cfg.geometry.k2);
    const double deg = 180.0 / std::numbers::pi;

    double qsum = 0.0, modulus = 0.0;
    for (double q : m.fwd.Q) qsum += q;
    for (cplx p : spec.points) modulus = std::max(modulus, std::abs(std::abs(forward_eval(m.fwd, p)) - 1.0));

    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "map_report";
    j["config"] = echo;
    j["geometry"] = {{"label", spec.label},
                     {"n_points", spec.points.size()},
                     {"zc", complex_json(spec.zc)},
                     {"T1", complex_json(spec.T1)},
                     {"T2", complex_json(spec.T2)},
                     {"W_trace_m2", area_and_resultant(spec, cfg.material.gamma).W},
                     {"W_simulated_m2", simulated_cavity_W(m)}};
    j["csm"] = {{"robin_constant", m.fwd.robin},
                {"charge_sum", qsum},
                {"collocation_modulus_error", modulus},
                {"condition_forward", m.fwd.condition},
                {"condition_backward", m.bwd.condition},
                {"Q", m.fwd.Q},
                {"Z", complex_list(m.fwd.Z)},
                {"q", complex_list(m.bwd.q)}};
    j["verruijt"] = {{"h", m.ver.h}, {"a", m.ver.a}, {"alpha", m.ver.alpha}, {"h_from_T1", m.h_from_t1},
                     {"joint_modulus_error", m.joint_modulus_error}};
    j["theta1_deg"] = m.theta1 * deg;
    j["theta2_deg"] = m.theta2 * deg;
    j["validity_metric"] = m.validity;
    j["y0_m"] = m.y0;
    j["roundtrip"] = {{"collocation_rel", m.roundtrip_collocation}, {"midpoint_rel", m.roundtrip_midpoint}};
    j["warnings"] = m.warnings;

    const auto grid = theta_grid_open(cfg.grids.theta_count);
    std::string back = csv_preamble(echo, "map_backward_grid") + "rho,theta_deg,x,y\n";
    for (int i = 0; i <= 8; ++i) {
        const double rho = m.alpha() + (1.0 - m.alpha()) * i / 8.0;
        for (double t : grid) {
            const cplx z = z_of_zeta(m, std::polar(rho, t));
            back += fmt(rho) + ',' + fmt(t * deg) + ',' + fmt(z.real()) + ',' + fmt(z.imag()) + '\n';
        }
    }
    std::string fwd = csv_preamble(echo, "map_forward_cloud") + "rho,theta_deg,x,y\n";
    auto add_fwd = [&](cplx z) {
        const cplx zeta = zeta_of_z(m, z);
        fwd += fmt(std::abs(zeta)) + ',' + fmt(std::arg(zeta) * deg) + ',' + fmt(z.real()) + ',' + fmt(z.imag()) + '\n';
    };
    for (double s : {1.0, 1.25, 1.5, 2.0, 3.0})
        for (cplx p : spec.points) {
            const cplx z = spec.zc + s * (p - spec.zc);
            if (z.imag() < 0.0) add_fwd(z);
        }
    const double H = spec.depth();
    for (int i = 0; i <= 100; ++i) add_fwd({spec.zc.real() + H * (-5.0 + 0.1 * i), 0.0});

    const std::filesystem::path dir = cfg.out_dir;
    write_file(dir / "map.json", j.dump(2) + "\n");
    write_file(dir / "map_backward_grid.csv", back);
    write_file(dir / "map_forward_cloud.csv", fwd);
    detail::emit_warnings(m.warnings, log);
    return kOk;
}

namespace detail {

inline void check_rings(const RunConfig& cfg, const Solution& sol) {
    for (double r : cfg.grids.rings_rho)
        if (r < sol.alpha()) throw ConfigError("grids.rings_rho entry " + fmt(r) + " lies inside the cavity ring α = " + fmt(sol.alpha()));
}

inline std::string ring_name(double rho) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "ring_rho%.6g", rho);
    return buf;
}

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg, std::ostream& log) {
    const json echo = config_echo(cfg);
    const Solution sol = solve_problem(build_geometry(cfg.geometry, cfg.solver.x0), cfg.material, cfg.solver, cfg.geometry.k2);
    detail::check_rings(cfg, sol);
    const std::filesystem::path dir = cfg.out_dir;
    const json report = solver_report(sol, echo);
    detail::emit_warnings(report["warnings"].get<std::vector<std::string>>(), log);
    if (sol.state.stop == StopReason::diverged) {
        write_file(dir / "solver_report.json", report.dump(2) + "\n");
        log << "error: solver diverged after " << sol.state.iterations << " iterations\n";
        return kSolverFailure;
    }
    const auto grid = theta_grid_open(cfg.grids.theta_count);
    std::vector<std::pair<std::string, std::string>> files;
    for (bool f : filter_passes(cfg.filter)) {
        const std::string tag = filter_tag(f);
        files.emplace_back("surface_" + tag + ".csv", field_csv(ring_fields(sol, 1.0, grid, f), echo));
        files.emplace_back("cavity_" + tag + ".csv", field_csv(ring_fields(sol, sol.alpha(), grid, f), echo));
        for (double r : cfg.grids.rings_rho)
            files.emplace_back(detail::ring_name(r) + "_" + tag + ".csv", field_csv(ring_fields(sol, r, grid, f), echo));
    }
    for (const auto& [name, body] : files) write_file(dir / name, body);
    write_file(dir / "solver_report.json", report.dump(2) + "\n");
    return kOk;
}

struct SweepMember {
    double value = 0.0;
    std::string status = "ok";
    std::string stop;
    int iterations = 0;
    double alpha = 0.0;
    std::vector<double> hoop;
    std::vector<double> settlement;
};

[[nodiscard]] inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

inline int cmd_converge(const RunConfig& cfg, const Options& o, std::ostream& log) {
    if (o.sweep_x0.empty() && o.sweep_n0.empty()) throw ConfigError("converge needs --sweep-x0 or --sweep-n0");
    for (double x : o.sweep_x0)
        if (!(x > 0.0)) throw ConfigError("--sweep-x0 values must be positive");
    for (int n : o.sweep_n0) {
        SolverConfig s = cfg.solver;
        s.N0 = n;
        try {
            s.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("--sweep-n0 value " + std::to_string(n) + ": " + e.what());
        }
    }
    const json echo = config_echo(cfg);
    const bool filt = cfg.filter != FilterMode::off;
    const auto grid = theta_grid_open(cfg.grids.theta_count);
    const std::filesystem::path dir = cfg.out_dir;
    bool any_failed = false;
    json sweeps = json::array();

    auto run = [&](const std::string& param, const std::vector<double>& values) {
        std::vector<SweepMember> members;
        for (double v : values) {
            SweepMember mem;
            mem.value = v;
            RunConfig c = cfg;
            if (param == "x0") c.solver.x0 = v;
            else c.solver.N0 = int(v);
            try {
                const Solution sol = solve_problem(build_geometry(c.geometry, c.solver.x0), c.material, c.solver, c.geometry.k2);
                mem.stop = to_string(sol.state.stop);
                mem.iterations = sol.state.iterations;
                mem.alpha = sol.alpha();
                if (sol.state.stop == StopReason::diverged) {
                    mem.status = "diverged";
                } else {
                    const auto cav = ring_fields(sol, sol.alpha(), grid, filt);
                    const auto sur = ring_fields(sol, 1.0, grid, filt);
                    for (const auto& f : cav) mem.hoop.push_back(f.sigma_theta);
                    for (const auto& f : sur) mem.settlement.push_back(f.v);
                    const std::string sub = param + "_" + fmt(v);
                    const json member_echo = config_echo(c);
                    write_file(dir / "converge" / sub / "cavity.csv", field_csv(cav, member_echo));
                    write_file(dir / "converge" / sub / "surface.csv", field_csv(sur, member_echo));
                }
            } catch (const IoError&) {
                throw;
            } catch (const std::exception& e) {
                mem.status = std::string("failed: ") + e.what();
            }
            if (mem.status != "ok") {
                any_failed = true;
                log << "warning: sweep member " << param << "=" << fmt(v) << " " << mem.status << '\n';
            }
            members.push_back(std::move(mem));
        }

        std::string csv = csv_preamble(echo, "converge_summary") +
                          "parameter,value,status,stop_reason,iterations,alpha,sup_diff_hoop_kpa,sup_diff_settlement_m\n";
        std::vector<double> dh, ds;
        const SweepMember* prev = nullptr;
        for (const SweepMember& m : members) {
            std::string a = "", b = "";
            if (m.status == "ok") {
                if (prev) {
                    dh.push_back(sup_difference(m.hoop, prev->hoop));
                    ds.push_back(sup_difference(m.settlement, prev->settlement));
                    a = fmt(dh.back());
                    b = fmt(ds.back());
                }
                prev = &m;
            }
            std::string status = m.status;
            std::replace(status.begin(), status.end(), ',', ';');
            csv += param + ',' + fmt(m.value) + ',' + status + ',' + m.stop + ',' + std::to_string(m.iterations) + ',' + fmt(m.alpha) + ',' +
                   a + ',' + b + '\n';
        }
        write_file(dir / ("converge_" + param + ".csv"), csv);
        sweeps.push_back({{"parameter", param},
                          {"values", values},
                          {"sup_diff_hoop_kpa", dh},
                          {"sup_diff_settlement_m", ds},
                          {"monotone_hoop", strictly_decreasing(dh)},
                          {"monotone_settlement", strictly_decreasing(ds)}});
    };
    if (!o.sweep_x0.empty()) run("x0", o.sweep_x0);
    if (!o.sweep_n0.empty()) run("N0", std::vector<double>(o.sweep_n0.begin(), o.sweep_n0.end()));

    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "converge_report";
    j["config"] = echo;
    j["filtered"] = filt;
    j["sweeps"] = sweeps;
    write_file(dir / "converge_report.json", j.dump(2) + "\n");
    return any_failed ? kSolverFailure : kOk;
}

inline int cmd_residuals(const RunConfig& cfg, std::ostream& log) {
    const json echo = config_echo(cfg);
    const Solution sol = solve_problem(build_geometry(cfg.geometry, cfg.solver.x0), cfg.material, cfg.solver, cfg.geometry.k2);
    const std::filesystem::path dir = cfg.out_dir;
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "residual_report";
    j["config"] = echo;
    j["stop_reason"] = to_string(sol.state.stop);
    j["Q"] = sol.state.iterations;
    const json rep = solver_report(sol, echo);
    j["equilibrium"] = rep["equilibrium"];
    j["warnings"] = rep["warnings"];
    detail::emit_warnings(rep["warnings"].get<std::vector<std::string>>(), log);
    if (sol.state.stop == StopReason::diverged) {
        write_file(dir / "residuals.json", j.dump(2) + "\n");
        log << "error: solver diverged after " << sol.state.iterations << " iterations\n";
        return kSolverFailure;
    }
    const double gH = sol.mat.gamma * sol.spec.depth();
    j["thresholds"] = {{"free_traction", 0.05}, {"constrained_displacement", 0.05}, {"cavity_traction_l2", 0.02}};
    json passes = json::object();
    for (bool f : filter_passes(cfg.filter)) {
        const BoundaryResiduals r = boundary_residuals(sol, f, cfg.grids.theta_count, cfg.grids.joint_exclusion_deg);
        passes[filter_tag(f)] = {
            {"free_traction_over_gammaH", r.free_traction},
            {"constrained_displacement_over_scale", r.constrained_disp},
            {"cavity_traction_rel_l2", r.cavity_l2},
            {"samples", {{"free", r.n_free}, {"constrained", r.n_constrained}, {"cavity", r.n_cavity}}},
            {"far_field_traction_over_gammaH", gH > 0.0 ? far_field_traction(sol, f) / gH : far_field_traction(sol, f)},
            {"far_field_g0", far_field_displacement(sol, f)},
            {"cavity_hoop_total_variation_kpa", total_variation(cavity_hoop_trace(sol, f, cfg.grids.theta_count))},
            {"within_thresholds", {{"free_traction", r.n_free > 0 ? json(r.free_traction <= 0.05) : json(nullptr)},
                                   {"constrained_displacement", r.n_constrained > 0 ? json(r.constrained_disp <= 0.05) : json(nullptr)},
                                   {"cavity_traction_l2", r.cavity_l2 <= 0.02}}}};
        if (r.n_constrained == 0)
            log << "note: no constrained-arc samples survive the joint exclusion (" << to_string(cfg.filter) << ")\n";
    }
    j["residuals"] = passes;
    write_file(dir / "residuals.json", j.dump(2) + "\n");
    return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Stress and displacement around a shallow cavity in a gravitational half-plane"};
    app.require_subcommand(1, 1);
    Options o;
    auto common = [&](CLI::App* s) {
        s->add_option("--config", o.config, "JSON run configuration")->required();
        s->add_option("--out", o.out, "output directory (overrides outputs.dir)");
        s->add_option("--filter", o.filter, "Lanczos filtering: on, off or both")->check(CLI::IsMember({"on", "off", "both"}));
        s->add_flag("--compare-filter", o.compare_filter, "same as --filter both");
        s->add_option("--rings", o.rings, "extra interior rings, comma separated radii")->delimiter(',');
    };
    CLI::App* map = app.add_subcommand("map", "mapping diagnostics");
    CLI::App* solve = app.add_subcommand("solve", "full solve with boundary traces and solver report");
    CLI::App* conv = app.add_subcommand("converge", "x0 or N0 sweeps");
    CLI::App* res = app.add_subcommand("residuals", "boundary-condition residual report");
    for (CLI::App* s : {map, solve, conv, res}) common(s);
    conv->add_option("--sweep-x0", o.sweep_x0, "x0 values, comma separated")->delimiter(',');
    conv->add_option("--sweep-n0", o.sweep_n0, "N0 values, comma separated")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }
    try {
        const RunConfig cfg = effective_config(o);
        if (map->parsed()) return cmd_map(cfg, err);
        if (solve->parsed()) return cmd_solve(cfg, err);
        if (conv->parsed()) return cmd_converge(cfg, o, err);
        return cmd_residuals(cfg, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
}

}  // namespace shallowcv::app

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geometry.hpp"
#include "rh_solver.hpp"

namespace shallowcv {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class FilterMode { on, off, both };

[[nodiscard]] inline const char* to_string(FilterMode f) {
    switch (f) {
        case FilterMode::on: return "on";
        case FilterMode::off: return "off";
        case FilterMode::both: return "both";
    }
    return "on";
}

[[nodiscard]] inline FilterMode parse_filter(const std::string& s) {
    if (s == "on") return FilterMode::on;
    if (s == "off") return FilterMode::off;
    if (s == "both") return FilterMode::both;
    throw ConfigError("filter must be one of on, off, both (got '" + s + "')");
}

struct GeometryConfig {
    std::string preset;               ///< case1..case4, circle, lin-axi; empty for CSV input
    std::filesystem::path csv_path;   ///< as written in the config
    std::filesystem::path csv_resolved;
    std::optional<cplx> zc;
    int n = 30;
    double k2 = 1.2;
    double radius_m = 0.0;  // circle
    double depth_m = 0.0;   // circle
    double a_m = 0.0;       // lin-axi
    double alpha = 0.0;     // lin-axi
    std::vector<double> b_m;
};

struct GridConfig {
    int theta_count = 720;
    std::vector<double> rings_rho;
    double joint_exclusion_deg = 5.0;
};

struct RunConfig {
    MaterialParams material;
    GeometryConfig geometry;
    SolverConfig solver;
    FilterMode filter = FilterMode::on;
    GridConfig grids;
    std::filesystem::path out_dir = "out";

    void validate() const {
        material.validate();
        solver.validate();
        if (grids.theta_count < 8) throw ConfigError("grids.theta_count must be at least 8");
        if (!(grids.joint_exclusion_deg >= 0.0 && grids.joint_exclusion_deg < 90.0))
            throw ConfigError("grids.joint_exclusion_deg must lie in [0, 90)");
        for (double r : grids.rings_rho)
            if (!(r > 0.0 && r <= 1.0)) throw ConfigError("grids.rings_rho entries must lie in (0, 1]");
        if (!(geometry.k2 > 0.0)) throw ConfigError("geometry.k2 must be positive");
        if (geometry.n < 8) throw ConfigError("geometry.n must be at least 8");
    }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
void read_opt(const json& obj, const char* key, const std::string& where, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("bad type for '" + where + "." + key + "'");
    }
}

inline cplx read_point(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("'" + name + "' must be a two-element [x, y] array");
    return {v[0].get<double>(), v[1].get<double>()};
}

}  // namespace detail

/// Reads a config object; relative CSV paths resolve against `base_dir`.
[[nodiscard]] inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {}) {
    using detail::read_opt;
    detail::reject_unknown(j, "", {"schema_version", "material", "geometry", "solver", "x0", "filter", "grids", "outputs"});
    RunConfig c;
    if (j.contains("schema_version")) {
        int v = 0;
        read_opt(j, "schema_version", "", v);
        if (v != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(v));
    }
    if (j.contains("material")) {
        const json& m = j.at("material");
        detail::reject_unknown(m, "material", {"E_mpa", "nu", "gamma_kpa_per_m", "k0", "mode"});
        read_opt(m, "E_mpa", "material", c.material.E_mpa);
        read_opt(m, "nu", "material", c.material.nu);
        read_opt(m, "gamma_kpa_per_m", "material", c.material.gamma);
        read_opt(m, "k0", "material", c.material.k0);
        std::string mode = "plane_strain";
        read_opt(m, "mode", "material", mode);
        if (mode == "plane_strain") c.material.mode = PlaneMode::plane_strain;
        else if (mode == "plane_stress") c.material.mode = PlaneMode::plane_stress;
        else throw ConfigError("material.mode must be plane_strain or plane_stress");
    }
    if (!j.contains("geometry")) throw ConfigError("missing 'geometry'");
    {
        const json& g = j.at("geometry");
        detail::reject_unknown(g, "geometry", {"preset", "csv_path", "zc_m", "n", "k2", "radius_m", "depth_m", "a_m", "alpha", "b_m"});
        GeometryConfig& gc = c.geometry;
        read_opt(g, "preset", "geometry", gc.preset);
        std::string path;
        read_opt(g, "csv_path", "geometry", path);
        if (gc.preset.empty() == path.empty()) throw ConfigError("geometry needs exactly one of 'preset' or 'csv_path'");
        if (!path.empty()) {
            gc.csv_path = path;
            gc.csv_resolved = gc.csv_path.is_absolute() || base_dir.empty() ? gc.csv_path : base_dir / gc.csv_path;
        }
        if (g.contains("zc_m")) gc.zc = detail::read_point(g.at("zc_m"), "geometry.zc_m");
        read_opt(g, "n", "geometry", gc.n);
        read_opt(g, "k2", "geometry", gc.k2);
        read_opt(g, "radius_m", "geometry", gc.radius_m);
        read_opt(g, "depth_m", "geometry", gc.depth_m);
        read_opt(g, "a_m", "geometry", gc.a_m);
        read_opt(g, "alpha", "geometry", gc.alpha);
        read_opt(g, "b_m", "geometry", gc.b_m);
        const bool is_case = preset_depth(gc.preset).has_value();
        if (!gc.preset.empty() && !is_case && gc.preset != "circle" && gc.preset != "lin-axi")
            throw ConfigError("geometry.preset must be case1..case4, circle or lin-axi (got '" + gc.preset + "')");
        if (gc.preset == "circle" && !(gc.radius_m > 0.0 && gc.depth_m > gc.radius_m))
            throw ConfigError("geometry.radius_m and geometry.depth_m must satisfy 0 < radius_m < depth_m");
        if (gc.preset == "lin-axi" && !(gc.a_m > 0.0 && gc.alpha > 0.0 && gc.alpha < 1.0))
            throw ConfigError("geometry.a_m must be positive and geometry.alpha must lie in (0, 1)");
        if (gc.zc && path.empty()) throw ConfigError("geometry.zc_m applies to csv_path input only");
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        detail::reject_unknown(s, "solver", {"N0", "M", "eps", "rel_eps", "max_iters"});
        read_opt(s, "N0", "solver", c.solver.N0);
        read_opt(s, "M", "solver", c.solver.M);
        read_opt(s, "eps", "solver", c.solver.eps);
        read_opt(s, "rel_eps", "solver", c.solver.rel_eps);
        read_opt(s, "max_iters", "solver", c.solver.max_iters);
    }
    read_opt(j, "x0", "", c.solver.x0);
    if (j.contains("filter")) {
        const json& f = j.at("filter");
        if (f.is_boolean()) c.filter = f.get<bool>() ? FilterMode::on : FilterMode::off;
        else if (f.is_string()) c.filter = parse_filter(f.get<std::string>());
        else throw ConfigError("filter must be a boolean or one of on, off, both");
    }
    if (j.contains("grids")) {
        const json& g = j.at("grids");
        detail::reject_unknown(g, "grids", {"theta_count", "rings_rho", "joint_exclusion_deg"});
        read_opt(g, "theta_count", "grids", c.grids.theta_count);
        read_opt(g, "rings_rho", "grids", c.grids.rings_rho);
        read_opt(g, "joint_exclusion_deg", "grids", c.grids.joint_exclusion_deg);
    }
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        detail::reject_unknown(o, "outputs", {"dir"});
        std::string d;
        read_opt(o, "dir", "outputs", d);
        if (!d.empty()) c.out_dir = d;
    }
    c.validate();
    return c;
}

[[nodiscard]] inline RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file '" + file.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    return parse_config(j, file.parent_path());
}

/// Normalized echo of the effective configuration.
[[nodiscard]] inline json config_echo(const RunConfig& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["material"] = {{"E_mpa", c.material.E_mpa},
                     {"nu", c.material.nu},
                     {"gamma_kpa_per_m", c.material.gamma},
                     {"k0", c.material.k0},
                     {"mode", c.material.mode == PlaneMode::plane_strain ? "plane_strain" : "plane_stress"}};
    json g;
    const GeometryConfig& gc = c.geometry;
    if (!gc.preset.empty()) g["preset"] = gc.preset;
    else g["csv_path"] = gc.csv_path.generic_string();
    if (gc.zc) g["zc_m"] = {gc.zc->real(), gc.zc->imag()};
    if (!gc.preset.empty()) g["n"] = gc.n;
    g["k2"] = gc.k2;
    if (gc.preset == "circle") {
        g["radius_m"] = gc.radius_m;
        g["depth_m"] = gc.depth_m;
    }
    if (gc.preset == "lin-axi") {
        g["a_m"] = gc.a_m;
        g["alpha"] = gc.alpha;
        g["b_m"] = gc.b_m;
    }
    j["geometry"] = g;
    j["solver"] = {{"N0", c.solver.N0}, {"M", c.solver.M}, {"eps", c.solver.eps}, {"rel_eps", c.solver.rel_eps}, {"max_iters", c.solver.max_iters}};
    j["x0"] = c.solver.x0;
    j["filter"] = to_string(c.filter);
    j["grids"] = {{"theta_count", c.grids.theta_count}, {"rings_rho", c.grids.rings_rho}, {"joint_exclusion_deg", c.grids.joint_exclusion_deg}};
    j["outputs"] = {{"dir", c.out_dir.generic_string()}};
    return j;
}

/// Cavity points from a two-column x,y file.  Commas or whitespace separate fields;
/// a non-numeric first line is taken as a header; '#' starts a comment.
[[nodiscard]] inline std::vector<cplx> read_points_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw GeometryError("cannot open geometry file '" + file.string() + "'");
    std::vector<cplx> pts;
    std::string line;
    int lineno = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a)) continue;
        double x = 0.0, y = 0.0;
        try {
            std::size_t pa = 0, pb = 0;
            if (!(ss >> b)) throw std::invalid_argument("one column");
            x = std::stod(a, &pa);
            y = std::stod(b, &pb);
            if (pa != a.size() || pb != b.size() || (ss >> extra)) throw std::invalid_argument("junk");
        } catch (const std::exception&) {
            if (!seen_data && pts.empty() && lineno == 1) continue;  // header
            throw GeometryError("geometry file '" + file.string() + "' line " + std::to_string(lineno) + ": expected two numbers");
        }
        seen_data = true;
        pts.emplace_back(x, y);
    }
    if (pts.empty()) throw GeometryError("geometry file '" + file.string() + "' has no points");
    return pts;
}

/// Cavity for the configured geometry at the given x₀.
[[nodiscard]] inline CavitySpec build_geometry(const GeometryConfig& g, double x0) {
    if (auto d = preset_depth(g.preset)) {
        CompositeEllipse c;
        c.depth = *d;
        c.n = g.n;
        CavitySpec s = build_case_boundary(c, x0);
        s.label = g.preset;
        return s;
    }
    if (g.preset == "circle") {
        CavitySpec s = build_case_boundary(AxisymmetricShape::circle(g.radius_m, g.depth_m, g.n), x0);
        s.label = "circle";
        return s;
    }
    if (g.preset == "lin-axi") {
        AxisymmetricShape a;
        a.a = g.a_m;
        a.alpha = g.alpha;
        a.b = g.b_m;
        a.n = g.n;
        return build_case_boundary(a, x0);
    }
    return build_case_boundary(read_points_csv(g.csv_resolved), x0, g.zc);
}

}  // namespace shallowcv

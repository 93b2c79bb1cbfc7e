#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "field_eval.hpp"

namespace shallowcv {

/// Fixed-format number so repeated runs are byte-identical.
[[nodiscard]] inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

/// Header lines shared by every CSV: schema version and a one-line config echo.
[[nodiscard]] inline std::string csv_preamble(const json& echo, const std::string& kind) {
    return "# schema_version=" + std::to_string(kSchemaVersion) + " kind=" + kind + "\n# config=" + echo.dump() + "\n";
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

inline constexpr const char* kFieldColumns =
    "theta_deg,rho,x,y,sigma_rho,sigma_theta,tau_rhotheta,sigma_x,sigma_y,tau_xy,u,v,filtered";

/// Curvilinear columns are excavation-induced; rectangular columns are totals with the
/// geostatic field added; u, v are excavation displacements.
[[nodiscard]] inline std::string field_csv(std::span<const FieldSample> samples, const json& echo) {
    std::string s = csv_preamble(echo, "field");
    s += kFieldColumns;
    s += '\n';
    const double deg = 180.0 / std::numbers::pi;
    for (const FieldSample& f : samples) {
        s += fmt(f.theta * deg) + ',' + fmt(f.rho) + ',' + fmt(f.z.real()) + ',' + fmt(f.z.imag()) + ',' + fmt(f.sigma_rho) + ',' +
             fmt(f.sigma_theta) + ',' + fmt(f.tau_rt) + ',' + fmt(f.sigma_x_total) + ',' + fmt(f.sigma_y_total) + ',' +
             fmt(f.tau_xy_total) + ',' + fmt(f.u) + ',' + fmt(f.v) + ',' + (f.filtered ? "1" : "0") + '\n';
    }
    return s;
}

[[nodiscard]] inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

template <class Range>
[[nodiscard]] json complex_list(const Range& r) {
    json a = json::array();
    for (const cplx& z : r) a.push_back(complex_json(z));
    return a;
}

[[nodiscard]] inline json series_json(const IndexedSeries& s) {
    json a = json::array();
    for (int k = s.lo(); k <= s.hi(); ++k) a.push_back(complex_json(s(k)));
    return a;
}

}  // namespace shallowcv

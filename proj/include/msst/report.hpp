#pragma once

#include <optional>
#include <string>

#include "msst/instance.hpp"
#include "msst/solver.hpp"

namespace msst {

/// Everything a result file carries besides the dipole itself.
struct ReportContext {
    std::string objective;  ///< "msst", "two-center" or "oracle"
    std::string instance;
    std::size_t n{0};
    std::string mode;
    double eps{kDefaultEps};
    std::optional<double> wall_ms;  ///< goes to the "timing" section
};

namespace detail {

inline std::string dipole_fields(const DipoleResult& r, const std::string& indent) {
    std::string out;
    out += indent + "\"poles\": [" + std::to_string(r.pole_x) + ", " + std::to_string(r.pole_y) + "],\n";
    out += indent + "\"msst_cost\": " + format_real(r.msst_cost) + ",\n";
    out += indent + "\"two_center_cost\": " + format_real(r.two_center_cost) + ",\n";
    out += indent + "\"r_x\": " + format_real(r.r_x) + ",\n";
    out += indent + "\"r_y\": " + format_real(r.r_y) + ",\n";
    out += indent + "\"edges\": [";
    for (std::size_t i = 0; i < r.edges.size(); ++i) {
        out += i ? ", [" : "[";
        out += std::to_string(r.edges[i].first) + ", " + std::to_string(r.edges[i].second) + "]";
    }
    out += "]";
    return out;
}

inline std::string header_fields(const ReportContext& ctx) {
    std::string out;
    out += "  \"objective\": " + nlohmann::json(ctx.objective).dump() + ",\n";
    out += "  \"instance\": " + nlohmann::json(ctx.instance).dump() + ",\n";
    out += "  \"n\": " + std::to_string(ctx.n) + ",\n";
    out += "  \"mode\": " + nlohmann::json(ctx.mode).dump() + ",\n";
    out += "  \"eps\": " + format_real(ctx.eps) + ",\n";
    return out;
}

inline std::string timing_field(const ReportContext& ctx) {
    if (!ctx.wall_ms) return "\n";
    return ",\n  \"timing\": {\"wall_ms\": " + format_real(*ctx.wall_ms) + "}\n";
}

} // namespace detail

/// Result file for one objective. Reals use 17 significant digits; wall
/// time sits in a separate "timing" object so the rest is reproducible.
inline std::string result_to_json(const DipoleResult& r, const ReportContext& ctx) {
    return "{\n" + detail::header_fields(ctx) + detail::dipole_fields(r, "  ") + detail::timing_field(ctx) + "}\n";
}

/// Both brute-force optima in one file.
inline std::string oracle_to_json(const OracleResult& r, const ReportContext& ctx) {
    return "{\n" + detail::header_fields(ctx) + "  \"msst\": {\n" + detail::dipole_fields(r.msst, "    ") +
           "\n  },\n  \"two_center\": {\n" + detail::dipole_fields(r.two_center, "    ") + "\n  }" +
           detail::timing_field(ctx) + "}\n";
}

} // namespace msst

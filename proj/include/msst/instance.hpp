#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "msst/errors.hpp"
#include "msst/geometry.hpp"

namespace msst {

struct Instance {
    std::vector<Point3> points;
    std::string name;
    std::optional<std::uint64_t> seed;
};

enum class Format { Auto, Json, Csv };

/// 17 significant digits, enough to read back the same double.
inline std::string format_real(double v) {
    // "-0" would read back as the integer 0.
    if (v == 0.0 && std::signbit(v)) return "-0.0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Format parse_format(std::string_view s) {
    if (s == "json") return Format::Json;
    if (s == "csv") return Format::Csv;
    if (s == "auto") return Format::Auto;
    throw ValidationError("unknown format '" + std::string(s) + "' (expected json or csv)");
}

/// Json unless the path ends in ".csv".
inline Format resolve_format(Format f, std::string_view path) {
    if (f != Format::Auto) return f;
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? Format::Csv : Format::Json;
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open file for writing");
    out << text;
    if (!out) throw Error(path + ": write failed");
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Checks n >= 2, finiteness and distinctness. `where(i)` names point i in
/// messages.
template <typename Where>
void validate_instance_points(const std::vector<Point3>& pts, double eps, Where&& where) {
    if (pts.size() < 2) {
        throw ValidationError("instance needs at least 2 points, got " + std::to_string(pts.size()));
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!is_finite(pts[i])) throw ValidationError(where(i) + ": non-finite coordinate");
    }
    try {
        validate_points(pts, eps);
    } catch (const DuplicatePoints& e) {
        throw DuplicatePoints("duplicate point: " + where(e.first()) + " and " + where(e.second()) + " coincide",
                              e.first(), e.second());
    }
}

} // namespace detail

/// JSON shape {"name": str, "points": [[x, y, z], ...]}, with an optional
/// integer "seed". `source` prefixes error messages.
inline Instance parse_instance_json(const std::string& text, const std::string& source = "<json>",
                                    double eps = kDefaultEps) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(source + ": top level must be an object");
    Instance inst;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ParseError(source + ": \"name\" must be a string");
        inst.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed") && !doc["seed"].is_null()) {
        if (!doc["seed"].is_number_unsigned()) throw ParseError(source + ": \"seed\" must be a non-negative integer");
        inst.seed = doc["seed"].get<std::uint64_t>();
    }
    if (!doc.contains("points") || !doc["points"].is_array()) {
        throw ParseError(source + ": missing \"points\" array");
    }
    const auto& arr = doc["points"];
    inst.points.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& p = arr[i];
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
            throw ParseError(source + ": points[" + std::to_string(i) + "]: expected [x, y, z]");
        }
        inst.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    detail::validate_instance_points(inst.points, eps,
                                     [&](std::size_t i) { return source + ": points[" + std::to_string(i) + "]"; });
    return inst;
}

/// One "x,y,z" line per point. Blank lines and lines starting with '#' are
/// skipped.
inline Instance parse_instance_csv(const std::string& text, const std::string& source = "<csv>",
                                   double eps = kDefaultEps) {
    Instance inst;
    std::vector<std::size_t> line_of;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = detail::trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        double xyz[3];
        std::size_t field = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view tok = detail::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (field >= 3) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": expected 3 fields");
            }
            std::string_view num = tok;
            if (!num.empty() && num.front() == '+') num.remove_prefix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
            if (num.empty() || ec != std::errc() || ptr != num.data() + num.size()) {
                throw ParseError(source + ":" + std::to_string(line_no) + ": field " + std::to_string(field + 1) +
                                 ": cannot parse '" + std::string(tok) + "' as a number");
            }
            xyz[field++] = v;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (field != 3) throw ParseError(source + ":" + std::to_string(line_no) + ": expected 3 fields");
        inst.points.push_back({xyz[0], xyz[1], xyz[2]});
        line_of.push_back(line_no);
    }
    detail::validate_instance_points(inst.points, eps,
                                     [&](std::size_t i) { return source + ":" + std::to_string(line_of[i]); });
    return inst;
}

inline Instance load_instance(const std::string& path, Format format = Format::Auto, double eps = kDefaultEps) {
    const std::string text = detail::read_file(path);
    Instance inst = resolve_format(format, path) == Format::Csv ? parse_instance_csv(text, path, eps)
                                                               : parse_instance_json(text, path, eps);
    if (inst.name.empty()) {
        const auto slash = path.find_last_of('/');
        inst.name = slash == std::string::npos ? path : path.substr(slash + 1);
    }
    return inst;
}

inline std::string instance_to_json(const Instance& inst) {
    std::string out = "{\n  \"name\": " + nlohmann::json(inst.name).dump();
    if (inst.seed) out += ",\n  \"seed\": " + std::to_string(*inst.seed);
    out += ",\n  \"points\": [";
    for (std::size_t i = 0; i < inst.points.size(); ++i) {
        const auto& p = inst.points[i];
        out += i ? ",\n    [" : "\n    [";
        out += format_real(p.x) + ", " + format_real(p.y) + ", " + format_real(p.z) + "]";
    }
    out += inst.points.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

inline std::string instance_to_csv(const Instance& inst) {
    std::string out;
    for (const auto& p : inst.points) {
        out += format_real(p.x) + "," + format_real(p.y) + "," + format_real(p.z) + "\n";
    }
    return out;
}

inline void save_instance(const Instance& inst, const std::string& path, Format format = Format::Auto) {
    detail::write_file(path, resolve_format(format, path) == Format::Csv ? instance_to_csv(inst)
                                                                        : instance_to_json(inst));
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

enum class Distribution { Cube, Sphere, Clusters, Collinear };

inline const char* to_string(Distribution d) {
    switch (d) {
    case Distribution::Cube: return "cube";
    case Distribution::Sphere: return "sphere";
    case Distribution::Clusters: return "clusters";
    case Distribution::Collinear: return "collinear";
    }
    return "?";
}

inline Distribution parse_distribution(std::string_view s) {
    if (s == "cube") return Distribution::Cube;
    if (s == "sphere") return Distribution::Sphere;
    if (s == "clusters") return Distribution::Clusters;
    if (s == "collinear") return Distribution::Collinear;
    throw ValidationError("unknown distribution '" + std::string(s) + "'");
}

/// Platform-independent draws on top of mt19937_64. The standard
/// distributions are implementation-defined, so the mapping is done here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller, one value per call.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_{0.0};
    bool has_spare_{false};
};

/// cube: uniform in [0,1]^3. sphere: uniform on the unit sphere. clusters:
/// two Gaussian blobs (sigma 0.05) centered at (0.25, 0.5, 0.5) and
/// (0.75, 0.5, 0.5), points alternating between them. collinear: x = 0..n-1
/// on the x-axis.
inline Instance generate(std::size_t n, Distribution dist, std::uint64_t seed) {
    if (n < 2) throw ValidationError("generate needs n >= 2");
    Instance inst;
    inst.name = std::string(to_string(dist)) + "-n" + std::to_string(n) + "-s" + std::to_string(seed);
    inst.seed = seed;
    inst.points.reserve(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        switch (dist) {
        case Distribution::Cube: {
            const double x = rng.uniform();
            const double y = rng.uniform();
            const double z = rng.uniform();
            inst.points.push_back({x, y, z});
            break;
        }
        case Distribution::Sphere: {
            Vec3 v;
            do {
                const double x = rng.normal();
                const double y = rng.normal();
                const double z = rng.normal();
                v = {x, y, z};
            } while (norm2(v) < 1e-12);
            inst.points.push_back(v / norm(v));
            break;
        }
        case Distribution::Clusters: {
            const double cx = (i % 2 == 0) ? 0.25 : 0.75;
            const double x = cx + 0.05 * rng.normal();
            const double y = 0.5 + 0.05 * rng.normal();
            const double z = 0.5 + 0.05 * rng.normal();
            inst.points.push_back({x, y, z});
            break;
        }
        case Distribution::Collinear:
            inst.points.push_back({static_cast<double>(i), 0.0, 0.0});
            break;
        }
    }
    return inst;
}

} // namespace msst

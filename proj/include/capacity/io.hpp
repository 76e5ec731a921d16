#ifndef CAPACITY_IO_HPP
#define CAPACITY_IO_HPP

///
/// \file io.hpp
///
/// JSON configuration files and JSON/CSV result emission.
///
/// A configuration is one JSON object; every key is optional at this level
/// and each command checks for what it needs. Unknown keys are rejected.
///
///   shapes      [{"type": "disk", "center": [x, y], "radius": r}, ...]
///               types disk, ellipse (center, semi_major, semi_minor,
///               rotation), polygon (vertices), arc_chain (pieces of
///               {"type": "segment", "start", "end"} and {"type": "arc",
///               "center", "radius", "theta_start", "theta_end"}); every
///               shape accepts "label": "E" | "F", a per-shape "schedule",
///               and disks accept "grow": true for scene sweeps
///   schedule    {"mode": "rings", "layers": k} |
///               {"mode": "powers", "n": k, "corners": bool}
///   solver      "gram" | "sampled"
///   quadrature  {"abs_tol": t, "max_depth": d}
///   centers     [[x, y], ...]           disk configuration centers
///   random      {"n": k, "spread": s, "min_distance": d}
///   radius      r
///   m           split index
///   sweep       {"r_min": a, "r_max": b, "steps": k}
///   seed        integer
///

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "capacity/subadditivity_lab.hpp"

namespace capacity
{

using Json        = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

struct RandomCenters
{
    int n               = 0;
    double spread       = 1.0;
    double min_distance = 0.0;
};

struct SweepGrid
{
    std::optional<double> r_min;
    std::optional<double> r_max;
    int steps = 50;
};

struct RunConfig
{
    Scene scene;
    /// Per-shape growth flags (scene sweeps).
    std::vector<bool> growing;
    Schedule schedule;
    bool has_schedule = false;
    SolverSettings solver;
    QuadratureSettings quadrature;
    std::optional<std::vector<Point>> centers;
    std::optional<RandomCenters> random;
    std::optional<double> radius;
    std::optional<int> m;
    SweepGrid sweep;
    std::optional<std::uint64_t> seed;
};

namespace detail
{

inline void allow_keys(const Json& obj, std::initializer_list<const char*> keys,
                       const std::string& where)
{
    if (!obj.is_object())
        throw ConfigError(where + " must be a JSON object");
    for (const auto& item : obj.items())
    {
        bool known = false;
        for (const char* k : keys)
            known = known || item.key() == k;
        if (!known)
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
    }
}

inline const Json& require(const Json& obj, const char* key,
                           const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
    return *it;
}

inline double number(const Json& j, const std::string& what)
{
    if (!j.is_number())
        throw ConfigError(what + " must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(what + " must be finite");
    return x;
}

inline int integer(const Json& j, const std::string& what)
{
    if (!j.is_number_integer())
        throw ConfigError(what + " must be an integer");
    return j.get<int>();
}

inline Point point(const Json& j, const std::string& what)
{
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(what + " must be a pair [x, y]");
    return {number(j[0], what + "[0]"), number(j[1], what + "[1]")};
}

inline std::vector<Point> points(const Json& j, const std::string& what)
{
    if (!j.is_array())
        throw ConfigError(what + " must be an array of [x, y] pairs");
    std::vector<Point> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(point(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::string text(const Json& j, const std::string& what)
{
    if (!j.is_string())
        throw ConfigError(what + " must be a string");
    return j.get<std::string>();
}

} // namespace detail

inline ShapeSchedule parse_schedule(const Json& j)
{
    const std::string where = "schedule";
    if (!j.is_object())
        throw ConfigError("schedule must be a JSON object");
    const auto mode = detail::text(detail::require(j, "mode", where), "mode");
    if (mode == "rings")
    {
        detail::allow_keys(j, {"mode", "layers"}, where);
        const int layers =
            detail::integer(detail::require(j, "layers", where), "layers");
        if (layers < 0)
            throw ConfigError("layers must be non-negative");
        return Rings{layers};
    }
    if (mode == "powers")
    {
        detail::allow_keys(j, {"mode", "n", "corners"}, where);
        const int n = detail::integer(detail::require(j, "n", where), "n");
        if (n < 1)
            throw ConfigError("powers schedule needs n >= 1");
        bool corners = false;
        if (j.contains("corners"))
        {
            if (!j["corners"].is_boolean())
                throw ConfigError("corners must be true or false");
            corners = j["corners"].get<bool>();
        }
        return Powers{n, corners};
    }
    throw ConfigError("unknown schedule mode \"" + mode + "\"");
}

inline Label parse_label(const Json& j)
{
    const auto s = detail::text(j, "label");
    if (s == "E")
        return Label::E;
    if (s == "F")
        return Label::F;
    throw ConfigError("label must be \"E\" or \"F\"");
}

namespace detail
{

inline ChainPiece parse_piece(const Json& j, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be a JSON object");
    const auto type = text(require(j, "type", where), where + ".type");
    if (type == "segment")
    {
        allow_keys(j, {"type", "start", "end"}, where);
        return Segment{point(require(j, "start", where), where + ".start"),
                       point(require(j, "end", where), where + ".end")};
    }
    if (type == "arc")
    {
        allow_keys(j, {"type", "center", "radius", "theta_start", "theta_end"},
                   where);
        return CircularArc{
            point(require(j, "center", where), where + ".center"),
            number(require(j, "radius", where), where + ".radius"),
            number(require(j, "theta_start", where), where + ".theta_start"),
            number(require(j, "theta_end", where), where + ".theta_end")};
    }
    throw ConfigError("unknown piece type \"" + type + "\" in " + where);
}

} // namespace detail

struct ParsedShape
{
    Shape shape;
    Label label = Label::E;
    std::optional<ShapeSchedule> schedule;
    bool grow = false;
};

inline ParsedShape parse_shape(const Json& j, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be a JSON object");
    ParsedShape out;
    const auto type = detail::text(detail::require(j, "type", where), where + ".type");
    auto num = [&](const char* key) {
        return detail::number(detail::require(j, key, where),
                              where + "." + key);
    };
    if (type == "disk")
    {
        detail::allow_keys(j, {"type", "center", "radius", "label", "schedule",
                               "grow"},
                           where);
        out.shape = Disk{detail::point(detail::require(j, "center", where),
                                       where + ".center"),
                         num("radius")};
        if (j.contains("grow"))
        {
            if (!j["grow"].is_boolean())
                throw ConfigError(where + ".grow must be true or false");
            out.grow = j["grow"].get<bool>();
        }
    }
    else if (type == "ellipse")
    {
        detail::allow_keys(j, {"type", "center", "semi_major", "semi_minor",
                               "rotation", "label", "schedule"},
                           where);
        out.shape = Ellipse{detail::point(detail::require(j, "center", where),
                                          where + ".center"),
                            num("semi_major"), num("semi_minor"),
                            j.contains("rotation")
                                ? detail::number(j["rotation"],
                                                 where + ".rotation")
                                : 0.0};
    }
    else if (type == "polygon")
    {
        detail::allow_keys(j, {"type", "vertices", "label", "schedule"}, where);
        out.shape = Polygon{detail::points(detail::require(j, "vertices", where),
                                           where + ".vertices")};
    }
    else if (type == "arc_chain")
    {
        detail::allow_keys(j, {"type", "pieces", "label", "schedule"}, where);
        const auto& pieces = detail::require(j, "pieces", where);
        if (!pieces.is_array())
            throw ConfigError(where + ".pieces must be an array");
        ArcChain chain;
        for (std::size_t i = 0; i < pieces.size(); ++i)
            chain.pieces.push_back(detail::parse_piece(
                pieces[i], where + ".pieces[" + std::to_string(i) + "]"));
        out.shape = chain;
    }
    else
        throw ConfigError("unknown shape type \"" + type + "\" in " + where);

    if (j.contains("label"))
        out.label = parse_label(j["label"]);
    if (j.contains("schedule"))
        out.schedule = parse_schedule(j["schedule"]);
    return out;
}

inline RunConfig parse_config(const Json& j)
{
    detail::allow_keys(j,
                       {"shapes", "schedule", "solver", "quadrature", "centers",
                        "random", "radius", "m", "sweep", "seed"},
                       "configuration");
    RunConfig cfg;
    if (j.contains("schedule"))
    {
        cfg.schedule.fallback = parse_schedule(j["schedule"]);
        cfg.has_schedule      = true;
    }
    if (j.contains("shapes"))
    {
        const auto& shapes = j["shapes"];
        if (!shapes.is_array() || shapes.empty())
            throw ConfigError("shapes must be a non-empty array");
        std::vector<ParsedShape> parsed;
        bool any_override = false;
        for (std::size_t i = 0; i < shapes.size(); ++i)
        {
            parsed.push_back(
                parse_shape(shapes[i], "shapes[" + std::to_string(i) + "]"));
            any_override = any_override || parsed.back().schedule.has_value();
        }
        for (const auto& p : parsed)
        {
            cfg.scene.shapes.push_back(p.shape);
            cfg.scene.labels.push_back(p.label);
            cfg.growing.push_back(p.grow);
            if (any_override)
                cfg.schedule.per_shape.push_back(
                    p.schedule ? *p.schedule : cfg.schedule.fallback);
        }
        cfg.has_schedule = cfg.has_schedule || any_override;
    }
    if (j.contains("solver"))
    {
        const auto s = detail::text(j["solver"], "solver");
        if (s == "gram")
            cfg.solver.kind = SolverKind::gram;
        else if (s == "sampled")
            cfg.solver.kind = SolverKind::sampled;
        else
            throw ConfigError("solver must be \"gram\" or \"sampled\"");
    }
    if (j.contains("quadrature"))
    {
        const auto& q = j["quadrature"];
        detail::allow_keys(q, {"abs_tol", "max_depth"}, "quadrature");
        if (q.contains("abs_tol"))
            cfg.quadrature.abs_tol = detail::number(q["abs_tol"], "abs_tol");
        if (q.contains("max_depth"))
            cfg.quadrature.max_depth = detail::integer(q["max_depth"], "max_depth");
    }
    if (j.contains("centers"))
        cfg.centers = detail::points(j["centers"], "centers");
    if (j.contains("random"))
    {
        const auto& r = j["random"];
        detail::allow_keys(r, {"n", "spread", "min_distance"}, "random");
        RandomCenters rc;
        rc.n = detail::integer(detail::require(r, "n", "random"), "random.n");
        if (r.contains("spread"))
            rc.spread = detail::number(r["spread"], "random.spread");
        if (r.contains("min_distance"))
            rc.min_distance = detail::number(r["min_distance"], "random.min_distance");
        cfg.random = rc;
    }
    if (cfg.centers && cfg.random)
        throw ConfigError("give either centers or random, not both");
    if (j.contains("radius"))
        cfg.radius = detail::number(j["radius"], "radius");
    if (j.contains("m"))
        cfg.m = detail::integer(j["m"], "m");
    if (j.contains("sweep"))
    {
        const auto& s = j["sweep"];
        detail::allow_keys(s, {"r_min", "r_max", "steps"}, "sweep");
        if (s.contains("r_min"))
            cfg.sweep.r_min = detail::number(s["r_min"], "sweep.r_min");
        if (s.contains("r_max"))
            cfg.sweep.r_max = detail::number(s["r_max"], "sweep.r_max");
        if (s.contains("steps"))
            cfg.sweep.steps = detail::integer(s["steps"], "sweep.steps");
    }
    if (j.contains("seed"))
    {
        if (!j["seed"].is_number_unsigned())
            throw ConfigError("seed must be a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    return cfg;
}

inline Json parse_json_text(const std::string& text, const std::string& origin)
{
    try
    {
        return Json::parse(text);
    }
    catch (const Json::exception& e)
    {
        throw ConfigError(origin + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(parse_json_text(buffer.str(), path));
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace detail
{

inline void write_json_value(std::ostream& os, const OrderedJson& j, int indent,
                             int depth)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type())
    {
    case OrderedJson::value_t::object:
    {
        if (j.empty())
        {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (const auto& item : j.items())
        {
            if (!first)
                os << ",\n";
            first = false;
            os << pad << OrderedJson(item.key()).dump() << ": ";
            write_json_value(os, item.value(), indent, depth + 1);
        }
        os << '\n' << close << '}';
        return;
    }
    case OrderedJson::value_t::array:
    {
        if (j.empty())
        {
            os << "[]";
            return;
        }
        os << '[';
        bool first = true;
        for (const auto& v : j)
        {
            if (!first)
                os << ", ";
            first = false;
            write_json_value(os, v, indent, depth + 1);
        }
        os << ']';
        return;
    }
    case OrderedJson::value_t::number_float:
    {
        const double x = j.get<double>();
        if (!std::isfinite(x))
            os << "null";
        else
            os << format_number(x);
        return;
    }
    default:
        os << j.dump();
    }
}

} // namespace detail

/// JSON with every floating-point number at 17 significant digits;
/// non-finite numbers become null.
inline void write_json(std::ostream& os, const OrderedJson& j)
{
    detail::write_json_value(os, j, 2, 0);
    os << '\n';
}

inline OrderedJson to_json(const BoundsResult& b)
{
    OrderedJson j;
    j["lower"]       = b.lower;
    j["upper"]       = b.upper;
    j["n_basis"]     = b.n_basis;
    j["slack"]       = b.slack;
    j["wall_time_s"] = b.wall_time;
    return j;
}

inline OrderedJson to_json(const DiscreteReport& d)
{
    OrderedJson j;
    j["lambda"] = d.lambda;
    j["M"]      = d.M;
    j["N"]      = d.N;
    j["alpha"]  = d.alpha;
    j["beta"]   = d.beta;
    if (d.delta)
        j["delta"] = *d.delta;
    j["poly_lower"] = d.poly_lower;
    j["poly_upper"] = d.poly_upper;
    return j;
}

inline OrderedJson points_json(const std::vector<Point>& Z)
{
    OrderedJson out = OrderedJson::array();
    for (const auto& z : Z)
        out.push_back(OrderedJson::array({z.real(), z.imag()}));
    return out;
}

inline OrderedJson to_json(const Verdict& v, const std::vector<SweepRecord>& records)
{
    OrderedJson j;
    j["records"]   = records.size();
    j["decreases"] = v.decreases;
    j["increases"] = v.increases;
    j["undecided"] = v.undecided;
    j["failed"]    = v.failed;
    int sub = 0, sup = 0;
    for (const auto& rec : records)
    {
        sub += rec.subadditive() ? 1 : 0;
        sup += rec.ok() && rec.ratio_low > 1.0 ? 1 : 0;
    }
    j["certified_subadditive"]   = sub;
    j["certified_superadditive"] = sup;
    bool any_ok = false;
    for (const auto& rec : records)
        any_ok = any_ok || rec.ok();
    if (any_ok)
        j["max_gap"] = gap_report(records);
    OrderedJson pairs = OrderedJson::array();
    for (auto p : v.pairs)
        pairs.push_back(to_string(p));
    j["verdicts"] = pairs;
    OrderedJson errors = OrderedJson::array();
    for (const auto& rec : records)
        if (!rec.ok())
            errors.push_back(OrderedJson{{"r", rec.r}, {"error", rec.error}});
    j["errors"] = errors;
    return j;
}

/// Reads a sweep CSV back (header checked); used for round-trip tests.
inline std::vector<std::vector<double>> read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != sweep_csv_header)
        throw ConfigError("sweep CSV header mismatch");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
        {
            try
            {
                row.push_back(cell == "nan" ? std::nan("") : std::stod(cell));
            }
            catch (const std::exception&)
            {
                throw ConfigError("bad CSV cell \"" + cell + "\"");
            }
        }
        if (row.size() != 11)
            throw ConfigError("sweep CSV row has " + std::to_string(row.size()) +
                              " cells, expected 11");
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace capacity

#endif

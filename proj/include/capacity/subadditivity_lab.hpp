#ifndef CAPACITY_SUBADDITIVITY_LAB_HPP
#define CAPACITY_SUBADDITIVITY_LAB_HPP

///
/// \file subadditivity_lab.hpp
///
/// Certified brackets for the ratio
///
///   R(Z, r, m) = gamma(E u F) / (gamma(E) + gamma(F)),
///
/// E the first m disks D(z_j, r), F the rest; radius sweeps, monotonicity
/// verdicts from non-overlapping brackets, and the small-r slope check
/// 1 - R ~ (delta / n) r^2.
///

#include <algorithm>
#include <array>
#include <cstdint>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "capacity/discrete_capacity.hpp"

namespace capacity
{

struct SweepRecord
{
    double r          = 0.0;
    double ratio_low  = 0.0;
    double ratio_high = 0.0;
    BoundsResult ef_bounds;
    BoundsResult e_bounds;
    BoundsResult f_bounds;
    /// Set when this radius failed; the numeric fields are then meaningless.
    std::string error;

    bool ok() const noexcept { return error.empty(); }
    /// ratio_high < 1.
    bool subadditive() const noexcept { return ok() && ratio_high < 1.0; }
};

struct RatioSettings
{
    Schedule schedule{Rings{4}, {}};
    QuadratureSettings quadrature{};
    SolverSettings solver{};
};

namespace detail
{

inline void check_disjoint(const std::vector<Point>& Z, double r)
{
    if (Z.size() > 1 && !(min_distance(Z) > 2.0 * r))
        throw OverlapError("disks of radius " + std::to_string(r) +
                           " overlap or touch");
}

} // namespace detail

///
/// Certified bracket for gamma(E u F) / (gamma(E) + gamma(F)) where E and F
/// are the shapes labelled E and F. The schedule's per-shape entries, if
/// any, follow the shapes into the two parts.
///
inline SweepRecord scene_ratio_bounds(const Scene& scene,
                                      const RatioSettings& settings)
{
    const auto validated = validate_scene(scene).scene;
    const auto& sch      = settings.schedule;
    if (!sch.per_shape.empty() && sch.per_shape.size() != validated.shapes.size())
        throw ScheduleError("per-shape schedule does not match the scene");

    std::array<Scene, 2> parts;
    std::array<Schedule, 2> schedules{Schedule{sch.fallback, {}},
                                      Schedule{sch.fallback, {}}};
    for (std::size_t i = 0; i < validated.shapes.size(); ++i)
    {
        const std::size_t p = validated.labels[i] == Label::E ? 0 : 1;
        parts[p].shapes.push_back(validated.shapes[i]);
        parts[p].labels.push_back(validated.labels[i]);
        if (!sch.per_shape.empty())
            schedules[p].per_shape.push_back(sch.per_shape[i]);
    }
    if (parts[0].shapes.empty() || parts[1].shapes.empty())
        throw SplitError("ratio needs shapes labelled E and shapes labelled F");

    SweepRecord out;
    out.ef_bounds = gamma_bounds(validated, sch, settings.quadrature, 1,
                                 settings.solver);
    out.e_bounds  = gamma_bounds(parts[0], schedules[0], settings.quadrature, 1,
                                 settings.solver);
    out.f_bounds  = gamma_bounds(parts[1], schedules[1], settings.quadrature, 1,
                                 settings.solver);
    // Outward by a few ulps: for exactly solvable scenes the two sides of a
    // bracket agree to rounding and may cross by an ulp.
    constexpr double widen = 8.0 * std::numeric_limits<double>::epsilon();
    out.ratio_low = (1.0 - widen) * out.ef_bounds.lower /
                    (out.e_bounds.upper + out.f_bounds.upper);
    const double denom = out.e_bounds.lower + out.f_bounds.lower;
    out.ratio_high     = denom > 0.0 ? (1.0 + widen) * out.ef_bounds.upper / denom
                                     : std::numeric_limits<double>::infinity();
    return out;
}

/// Disks D(z_j, r) with the first m labelled E and the rest F.
inline Scene split_disk_scene(const std::vector<Point>& Z, double r, int m)
{
    detail::check_centers(Z);
    detail::check_radius(r);
    detail::check_split(Z.size(), m);
    Scene out = disk_scene(Z, r);
    for (std::size_t j = 0; j < Z.size(); ++j)
        out.labels.push_back(static_cast<int>(j) < m ? Label::E : Label::F);
    return out;
}

/// Certified bracket for R(Z, r, m) from three capacity brackets.
inline SweepRecord ratio_bounds(const DiskConfiguration& cfg,
                                const RatioSettings& settings)
{
    if (!cfg.m)
        throw SplitError("ratio needs a split index m");
    const auto scene = split_disk_scene(cfg.Z, cfg.r, *cfg.m);
    detail::check_disjoint(cfg.Z, cfg.r);
    auto out = scene_ratio_bounds(scene, settings);
    out.r    = cfg.r;
    return out;
}

/// Largest admissible radius 0.999 * (minimal center distance) / 2.
inline double max_sweep_radius(const std::vector<Point>& Z)
{
    detail::check_centers(Z);
    if (Z.size() < 2)
        throw DomainError("a sweep needs at least two disks");
    return 0.999 * 0.5 * detail::min_distance(Z);
}

///
/// `steps` equally spaced radii ending at r_max. Without r_min the grid is
/// r_max * k / steps, k = 1..steps; r_max defaults to max_sweep_radius and
/// may not reach half the minimal center distance.
///
inline std::vector<double> radius_grid(const std::vector<Point>& Z, int steps,
                                       std::optional<double> r_min = {},
                                       std::optional<double> r_max = {})
{
    if (steps < 1)
        throw DomainError("sweep needs at least one step");
    const double limit = 0.5 * detail::min_distance(Z);
    const double hi    = r_max ? *r_max : max_sweep_radius(Z);
    if (!(hi > 0.0))
        throw DomainError("maximal radius must be positive");
    if (!(hi < limit))
        throw OverlapError("maximal radius " + std::to_string(hi) +
                           " makes the disks touch or overlap (limit " +
                           std::to_string(limit) + ")");
    std::vector<double> out;
    if (!r_min)
    {
        for (int k = 1; k <= steps; ++k)
            out.push_back(hi * k / steps);
        return out;
    }
    if (!(*r_min > 0.0) || *r_min > hi)
        throw DomainError("need 0 < r_min <= r_max");
    if (steps == 1)
        return {*r_min};
    for (int k = 0; k < steps; ++k)
        out.push_back(*r_min + (hi - *r_min) * k / (steps - 1));
    return out;
}

namespace detail
{

template <typename Compute>
std::vector<SweepRecord> sweep_records(const std::vector<double>& r_grid,
                                       unsigned threads, const Compute& compute)
{
    std::vector<SweepRecord> out(r_grid.size());
    parallel_for(r_grid.size(), threads, [&](std::size_t i) {
        try
        {
            out[i]   = compute(r_grid[i]);
            out[i].r = r_grid[i];
        }
        catch (const NumericalError& e)
        {
            out[i]           = SweepRecord{};
            out[i].r         = r_grid[i];
            out[i].error     = e.what();
            out[i].ratio_low = out[i].ratio_high =
                std::numeric_limits<double>::quiet_NaN();
        }
    });
    return out;
}

inline void check_grid(const std::vector<double>& r_grid)
{
    for (std::size_t i = 0; i < r_grid.size(); ++i)
    {
        check_radius(r_grid[i]);
        if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
            throw DomainError("sweep radii must be strictly increasing");
    }
}

} // namespace detail

///
/// One record per radius, computed by `threads` workers. Invalid input
/// throws before any work; numerical failures at a radius are recorded in
/// that record's `error`.
///
inline std::vector<SweepRecord> sweep(const std::vector<Point>& Z, int m,
                                      const std::vector<double>& r_grid,
                                      const RatioSettings& settings,
                                      unsigned threads = 1)
{
    detail::check_centers(Z);
    detail::check_split(Z.size(), m);
    detail::check_grid(r_grid);
    for (double r : r_grid)
        detail::check_disjoint(Z, r);
    validate(settings.quadrature);
    validate(settings.solver);
    return detail::sweep_records(r_grid, threads, [&](double r) {
        return ratio_bounds({Z, r, m}, settings);
    });
}

///
/// Sweep of a labelled disk scene in which the disks flagged in `growing`
/// take radius r and the others keep theirs.
///
inline std::vector<SweepRecord> sweep_scene(const Scene& scene,
                                            const std::vector<bool>& growing,
                                            const std::vector<double>& r_grid,
                                            const RatioSettings& settings,
                                            unsigned threads = 1)
{
    if (growing.size() != scene.shapes.size())
        throw ConfigError("growth flags do not match the scene");
    for (const auto& shape : scene.shapes)
        if (!std::holds_alternative<Disk>(shape))
            throw ConfigError("scene sweeps need disks only");
    detail::check_grid(r_grid);
    auto at = [&](double r) {
        Scene out = scene;
        for (std::size_t i = 0; i < out.shapes.size(); ++i)
            if (growing[i])
                std::get<Disk>(out.shapes[i]).radius = r;
        return out;
    };
    for (double r : r_grid)
        validate_scene(at(r));
    validate(settings.quadrature);
    validate(settings.solver);
    return detail::sweep_records(r_grid, threads, [&](double r) {
        return scene_ratio_bounds(at(r), settings);
    });
}

///
/// n centers drawn uniformly from the square [-spread, spread]^2 with
/// pairwise distance at least min_distance, by rejection. Uses the raw
/// 64-bit engine output, so a seed gives the same centers on every platform.
///
inline std::vector<Point> random_centers(int n, std::uint64_t seed,
                                         double spread, double min_distance)
{
    if (n < 1 || !(spread > 0.0) || !(min_distance >= 0.0))
        throw DomainError("random centers need n >= 1, spread > 0");
    std::mt19937_64 engine(seed);
    auto unit = [&] {
        return static_cast<double>(engine() >> 11) * 0x1.0p-53;
    };
    std::vector<Point> out;
    for (long attempt = 0; static_cast<int>(out.size()) < n; ++attempt)
    {
        if (attempt > 1000000)
            throw DomainError("could not place the random centers; lower "
                              "min_distance or raise spread");
        const Point z{spread * (2.0 * unit() - 1.0),
                      spread * (2.0 * unit() - 1.0)};
        bool ok = true;
        for (const auto& w : out)
            ok = ok && std::abs(z - w) >= min_distance;
        if (ok)
            out.push_back(z);
    }
    return out;
}

enum class PairVerdict
{
    certified_decrease,
    certified_increase,
    undecided
};

inline const char* to_string(PairVerdict v)
{
    switch (v)
    {
    case PairVerdict::certified_decrease:
        return "CERTIFIED_DECREASE";
    case PairVerdict::certified_increase:
        return "CERTIFIED_INCREASE";
    case PairVerdict::undecided:
    default:
        return "UNDECIDED";
    }
}

struct Verdict
{
    /// pairs[i] compares records i and i + 1
    std::vector<PairVerdict> pairs;
    /// per record: certified ratio_high < 1
    std::vector<bool> subadditive;
    int decreases  = 0;
    int increases  = 0;
    int undecided  = 0;
    int failed     = 0;

    bool violation() const noexcept { return increases > 0; }
};

/// Pairwise verdicts from the brackets alone (never from midpoints).
inline Verdict monotonicity_verdict(const std::vector<SweepRecord>& records)
{
    Verdict out;
    for (const auto& rec : records)
    {
        out.subadditive.push_back(rec.subadditive());
        if (!rec.ok())
            ++out.failed;
    }
    for (std::size_t i = 0; i + 1 < records.size(); ++i)
    {
        const auto& a = records[i];
        const auto& b = records[i + 1];
        PairVerdict v = PairVerdict::undecided;
        if (a.ok() && b.ok())
        {
            if (b.ratio_high < a.ratio_low)
                v = PairVerdict::certified_decrease;
            else if (b.ratio_low > a.ratio_high)
                v = PairVerdict::certified_increase;
        }
        out.pairs.push_back(v);
        switch (v)
        {
        case PairVerdict::certified_decrease:
            ++out.decreases;
            break;
        case PairVerdict::certified_increase:
            ++out.increases;
            break;
        case PairVerdict::undecided:
            ++out.undecided;
            break;
        }
    }
    return out;
}

/// max(ratio_high - ratio_low) over the successful records.
inline double gap_report(const std::vector<SweepRecord>& records)
{
    if (records.empty())
        throw PreconditionError("gap report needs at least one record");
    double out = 0.0;
    bool any   = false;
    for (const auto& rec : records)
    {
        if (!rec.ok())
            continue;
        out = std::max(out, rec.ratio_high - rec.ratio_low);
        any = true;
    }
    if (!any)
        throw PreconditionError("gap report needs a successful record");
    return out;
}

struct AsymptoticReport
{
    std::vector<double> radii;
    /// (1 - R_mid) / r^2 per radius
    std::vector<double> scaled_defect;
    /// intercept C of the fit C + D r
    double fitted = 0.0;
    double predicted = 0.0;
    double relative_deviation = 0.0;
};

namespace detail
{

/// Least-squares line y = c + d x; returns c.
inline double fit_intercept(const std::vector<double>& x,
                            const std::vector<double>& y)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 0.0))
        throw NumericalError("degenerate slope fit");
    return (sxx * sy - sx * sxy) / det;
}

} // namespace detail

///
/// Fits (1 - R_mid(r)) / r^2 = C + D r over r_k = r0 2^{-k}, k = 0..5, and
/// compares C with delta / n. r0 defaults to a quarter of the minimal center
/// distance.
///
inline AsymptoticReport asymptotic_check(const std::vector<Point>& Z, int m,
                                         const RatioSettings& settings,
                                         std::optional<double> r0 = {})
{
    detail::check_centers(Z);
    detail::check_split(Z.size(), m);
    const double start = r0 ? *r0 : 0.25 * detail::min_distance(Z);
    AsymptoticReport out;
    out.predicted = predicted_slope(Z, m);
    for (int k = 0; k <= 5; ++k)
    {
        const double r   = start * std::ldexp(1.0, -k);
        const auto rec   = ratio_bounds({Z, r, m}, settings);
        const double mid = 0.5 * (rec.ratio_low + rec.ratio_high);
        out.radii.push_back(r);
        out.scaled_defect.push_back((1.0 - mid) / (r * r));
    }
    out.fitted = detail::fit_intercept(out.radii, out.scaled_defect);
    out.relative_deviation =
        std::abs(out.fitted - out.predicted) / std::abs(out.predicted);
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr const char* sweep_csv_header =
    "r,ratio_low,ratio_high,gamma_ef_low,gamma_ef_high,gamma_e_low,"
    "gamma_e_high,gamma_f_low,gamma_f_high,n_basis,wall_time_s";

inline std::string format_number(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

inline void write_sweep_csv(std::ostream& os,
                            const std::vector<SweepRecord>& records)
{
    os << sweep_csv_header << '\n';
    for (const auto& rec : records)
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const bool ok    = rec.ok();
        auto v           = [&](double x) { return format_number(ok ? x : nan); };
        os << format_number(rec.r) << ',' << v(rec.ratio_low) << ','
           << v(rec.ratio_high) << ',' << v(rec.ef_bounds.lower) << ','
           << v(rec.ef_bounds.upper) << ',' << v(rec.e_bounds.lower) << ','
           << v(rec.e_bounds.upper) << ',' << v(rec.f_bounds.lower) << ','
           << v(rec.f_bounds.upper) << ',' << (ok ? rec.ef_bounds.n_basis : 0)
           << ','
           << v(rec.ef_bounds.wall_time + rec.e_bounds.wall_time +
                rec.f_bounds.wall_time)
           << '\n';
    }
}

} // namespace capacity

#endif

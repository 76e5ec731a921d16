#ifndef CAPACITY_CLI_HPP
#define CAPACITY_CLI_HPP

///
/// \file cli.hpp
///
/// Subcommands gamma, exact, discrete and sweep behind one entry point.
///
/// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
/// failure, 4 a certified increase of the sweep ratio.
///

#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "capacity/exact_formulas.hpp"
#include "capacity/io.hpp"

namespace capacity
{

namespace exit_code
{
inline constexpr int ok        = 0;
inline constexpr int input     = 2;
inline constexpr int numerical = 3;
inline constexpr int increase  = 4;
} // namespace exit_code

struct CliOptions
{
    std::string config;
    std::optional<double> quad_tol;
    std::optional<int> quad_max_depth;
    std::optional<int> m;
    std::optional<double> r_min;
    std::optional<double> r_max;
    std::optional<int> steps;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string solver;
    /// Report zero wall times so repeated runs are byte-identical.
    bool no_timing = false;
    double c = 0.0;
    double r = 0.0;
    double s = 0.0;
};

namespace detail
{

inline unsigned default_threads()
{
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

inline RunConfig resolve_config(const CliOptions& opt)
{
    RunConfig cfg = load_config(opt.config);
    if (opt.quad_tol)
        cfg.quadrature.abs_tol = *opt.quad_tol;
    if (opt.quad_max_depth)
        cfg.quadrature.max_depth = *opt.quad_max_depth;
    if (opt.m)
        cfg.m = *opt.m;
    if (opt.r_min)
        cfg.sweep.r_min = *opt.r_min;
    if (opt.r_max)
        cfg.sweep.r_max = *opt.r_max;
    if (opt.steps)
        cfg.sweep.steps = *opt.steps;
    if (opt.seed)
        cfg.seed = *opt.seed;
    if (opt.solver == "gram")
        cfg.solver.kind = SolverKind::gram;
    else if (opt.solver == "sampled")
        cfg.solver.kind = SolverKind::sampled;
    validate(cfg.quadrature);
    return cfg;
}

/// Centers from the config, drawing random ones when asked (seed 0 default).
inline std::vector<Point> resolve_centers(RunConfig& cfg)
{
    if (cfg.centers)
        return *cfg.centers;
    if (cfg.random)
    {
        if (!cfg.seed)
            cfg.seed = 0;
        return random_centers(cfg.random->n, *cfg.seed, cfg.random->spread,
                              cfg.random->min_distance);
    }
    throw ConfigError("configuration needs \"centers\" or \"random\"");
}

inline std::optional<ShapeSchedule> smaller(const ShapeSchedule& s)
{
    if (const auto* r = std::get_if<Rings>(&s))
        return r->layers > 0 ? std::optional<ShapeSchedule>(Rings{r->layers - 1})
                             : std::nullopt;
    const auto& p = std::get<Powers>(s);
    return p.n > 1 ? std::optional<ShapeSchedule>(Powers{p.n - 1, p.with_corners})
                   : std::nullopt;
}

inline std::string describe(const ShapeSchedule& s)
{
    if (const auto* r = std::get_if<Rings>(&s))
        return "rings " + std::to_string(r->layers);
    const auto& p = std::get<Powers>(s);
    return "powers " + std::to_string(p.n) + (p.with_corners ? " with corners" : "");
}

inline int cmd_gamma(const CliOptions& opt, std::ostream& out, std::ostream& err)
{
    const auto cfg = resolve_config(opt);
    if (cfg.scene.shapes.empty())
        throw ConfigError("gamma needs \"shapes\"");
    try
    {
        auto b = gamma_bounds(cfg.scene, cfg.schedule, cfg.quadrature,
                              opt.threads, cfg.solver);
        if (opt.no_timing)
            b.wall_time = 0.0;
        write_json(out, to_json(b));
        return exit_code::ok;
    }
    catch (const NumericalError& e)
    {
        err << "error: " << e.what() << '\n';
        if (!cfg.schedule.per_shape.empty())
            return exit_code::numerical;
        // Walk the uniform schedule down to the largest one that solves.
        Schedule trial = cfg.schedule;
        for (auto next = smaller(trial.fallback); next; next = smaller(trial.fallback))
        {
            trial.fallback = *next;
            try
            {
                const auto b = gamma_bounds(cfg.scene, trial, cfg.quadrature,
                                            opt.threads, cfg.solver);
                err << "largest usable schedule: " << describe(trial.fallback)
                    << ", bracket [" << format_number(b.lower) << ", "
                    << format_number(b.upper) << "]\n";
                break;
            }
            catch (const NumericalError&)
            {
            }
        }
        return exit_code::numerical;
    }
}

inline void print_exact(std::ostream& out, double value, const char* formula)
{
    OrderedJson j;
    j["value"]   = value;
    j["formula"] = formula;
    write_json(out, j);
}

inline int cmd_discrete(const CliOptions& opt, std::ostream& out)
{
    auto cfg     = resolve_config(opt);
    const auto Z = resolve_centers(cfg);
    if (!cfg.radius)
        throw ConfigError("discrete needs \"radius\"");
    const auto report = discrete_report({Z, *cfg.radius, cfg.m});
    OrderedJson j;
    j["n"]       = Z.size();
    j["r"]       = *cfg.radius;
    j["centers"] = points_json(Z);
    if (cfg.m)
        j["m"] = *cfg.m;
    if (cfg.random)
        j["seed"] = *cfg.seed;
    const auto fields = to_json(report);
    for (const auto& item : fields.items())
        j[item.key()] = item.value();
    write_json(out, j);
    return exit_code::ok;
}

inline int cmd_sweep(const CliOptions& opt, std::ostream& out, std::ostream& err)
{
    auto cfg = resolve_config(opt);
    RatioSettings settings;
    if (cfg.has_schedule)
        settings.schedule = cfg.schedule;
    settings.quadrature = cfg.quadrature;
    settings.solver     = cfg.solver;

    std::vector<SweepRecord> records;
    OrderedJson summary;
    if (!cfg.scene.shapes.empty())
    {
        if (cfg.centers || cfg.random)
            throw ConfigError("give either \"shapes\" or centers, not both");
        if (!cfg.schedule.per_shape.empty())
            throw ConfigError("per-shape schedules are not supported in sweeps");
        // The grid limit comes from the growing disks' centers.
        std::vector<Point> grown;
        for (std::size_t i = 0; i < cfg.scene.shapes.size(); ++i)
            if (cfg.growing[i])
                if (const auto* d = std::get_if<Disk>(&cfg.scene.shapes[i]))
                    grown.push_back(d->center);
        if (grown.size() < 2)
            throw ConfigError("scene sweeps need at least two disks with "
                              "\"grow\": true");
        const auto grid =
            radius_grid(grown, cfg.sweep.steps, cfg.sweep.r_min, cfg.sweep.r_max);
        records = sweep_scene(cfg.scene, cfg.growing, grid, settings, opt.threads);
    }
    else
    {
        const auto Z = resolve_centers(cfg);
        if (!cfg.m)
            throw ConfigError("sweep needs the split index \"m\" (or --m)");
        const auto grid =
            radius_grid(Z, cfg.sweep.steps, cfg.sweep.r_min, cfg.sweep.r_max);
        records = sweep(Z, *cfg.m, grid, settings, opt.threads);
        summary["centers"] = points_json(Z);
        summary["m"]       = *cfg.m;
    }
    if (cfg.seed)
        summary["seed"] = *cfg.seed;
    if (opt.no_timing)
        for (auto& rec : records)
            rec.ef_bounds.wall_time = rec.e_bounds.wall_time =
                rec.f_bounds.wall_time = 0.0;

    if (opt.out_path.empty())
        write_sweep_csv(out, records);
    else
    {
        std::ofstream file(opt.out_path);
        if (!file)
            throw ConfigError("cannot write " + opt.out_path);
        write_sweep_csv(file, records);
    }

    const auto verdict = monotonicity_verdict(records);
    const auto fields = to_json(verdict, records);
    for (const auto& item : fields.items())
        summary[item.key()] = item.value();
    write_json(err, summary);

    for (const auto& rec : records)
        if (rec.ok() && rec.ratio_low > 1.0)
            err << "WARNING: certified superadditive ratio at r = "
                << format_number(rec.r) << ": [" << format_number(rec.ratio_low)
                << ", " << format_number(rec.ratio_high) << "]\n";

    if (verdict.violation())
    {
        err << "CERTIFIED_INCREASE detected; offending records:\n";
        std::vector<SweepRecord> offending;
        for (std::size_t i = 0; i < verdict.pairs.size(); ++i)
            if (verdict.pairs[i] == PairVerdict::certified_increase)
            {
                offending.push_back(records[i]);
                offending.push_back(records[i + 1]);
            }
        write_sweep_csv(err, offending);
        return exit_code::increase;
    }
    return exit_code::ok;
}

} // namespace detail

///
/// Parses `args` (without the program name) and runs the subcommand.
/// Results go to `out`; diagnostics and the sweep summary go to `err`.
///
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err)
{
    CLI::App app{"Certified bounds for analytic capacity", "capacity_cli"};
    app.require_subcommand(1);
    CliOptions opt;
    opt.threads = detail::default_threads();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON configuration file")
            ->required();
        sub->add_option("--quad-tol", opt.quad_tol, "absolute quadrature tolerance");
        sub->add_option("--quad-max-depth", opt.quad_max_depth,
                        "maximal adaptive Simpson depth");
        sub->add_option("--threads", opt.threads, "worker threads")
            ->check(CLI::PositiveNumber);
        sub->add_option("--solver", opt.solver, "gram or sampled")
            ->check(CLI::IsMember({"gram", "sampled"}));
        sub->add_option("--seed", opt.seed, "seed for random centers");
        sub->add_flag("--no-timing", opt.no_timing,
                      "write zero wall times for reproducible output");
    };

    auto* gamma = app.add_subcommand("gamma", "certified bracket for a scene");
    add_common(gamma);

    auto* exact = app.add_subcommand("exact", "closed-form capacities");
    exact->require_subcommand(1);
    auto* two = exact->add_subcommand("two-disks", "two disks of radius r at +-c");
    two->add_option("--c", opt.c, "center distance from the origin")->required();
    two->add_option("--r", opt.r, "disk radius")->required();
    auto* square = exact->add_subcommand("square", "square with corners +-s, +-is");
    square->add_option("--s", opt.s, "half-diagonal")->required();

    auto* discrete = app.add_subcommand("discrete", "discrete capacity report");
    add_common(discrete);
    discrete->add_option("--m", opt.m, "split index");

    auto* sweep_cmd = app.add_subcommand("sweep", "ratio sweep over radii");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--m", opt.m, "split index");
    sweep_cmd->add_option("--r-min", opt.r_min, "smallest radius");
    sweep_cmd->add_option("--r-max", opt.r_max, "largest radius");
    sweep_cmd->add_option("--steps", opt.steps, "number of radii");
    sweep_cmd->add_option("--out", opt.out_path, "CSV file (default stdout)");

    try
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_code::ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::input;
    }

    try
    {
        if (*gamma)
            return detail::cmd_gamma(opt, out, err);
        if (*two)
        {
            detail::print_exact(out, two_disk_capacity(opt.c, opt.r),
                                "sqrt(c^2 - r^2) * theta2(q)^2, "
                                "c/r = (q^(-1/2) + q^(1/2)) / 2");
            return exit_code::ok;
        }
        if (*square)
        {
            detail::print_exact(out, square_capacity(opt.s),
                                "s * sqrt(2) * Gamma(1/4)^2 / (4 * pi^(3/2))");
            return exit_code::ok;
        }
        if (*discrete)
            return detail::cmd_discrete(opt, out);
        if (*sweep_cmd)
            return detail::cmd_sweep(opt, out, err);
    }
    catch (const InputError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::input;
    }
    catch (const NumericalError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_code::numerical;
    }
    return exit_code::input;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run_cli(args, out, err);
}

} // namespace capacity

#endif

#ifndef CAPACITY_CAPACITY_SOLVER_HPP
#define CAPACITY_CAPACITY_SOLVER_HPP

///
/// \file capacity_solver.hpp
///
/// Two-sided bounds for the analytic capacity over the span of a basis.
///
/// Writing g = sum_j conj(y_j) g_j, the two dual extremal problems reduce to
/// Hermitian quadratic forms in y:
///
///   upper = min_y  c0 + 2 Re(y^H u) + y^H H y  =  c0 - u^H H^{-1} u
///   lower = max_y  2 Re(y^H d) - y^H H y       =  d^H H^{-1} d
///
/// where d_j is the 1/z coefficient of g_j at infinity.
///

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capacity/boundary_integrals.hpp"

namespace capacity
{

struct GramSystem
{
    GramData gram;
    Eigen::VectorXcd d;
};

struct BoundsResult
{
    double lower          = 0.0;
    double upper          = 0.0;
    int n_basis           = 0;
    double solve_residual = 0.0;
    double wall_time      = 0.0;
    /// Certified allowance for quadrature error, 10 * abs_tol * n_basis.
    double slack = 0.0;
};

///
/// Cholesky factorization of a Hermitian positive-definite matrix after
/// symmetric diagonal scaling D H D with D = diag(H)^{-1/2}.
///
class HermitianSolver
{
public:
    explicit HermitianSolver(const Eigen::MatrixXcd& H) : H_(H)
    {
        const auto n = H.rows();
        if (H.cols() != n)
            throw SingularGramError("Gram matrix is not square");
        scale_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double diag = H(i, i).real();
            if (!(diag > 0.0) || !std::isfinite(diag))
                throw SingularGramError("Gram matrix has a non-positive "
                                        "diagonal entry at index " +
                                        std::to_string(i));
            scale_(i) = 1.0 / std::sqrt(diag);
        }
        const Eigen::MatrixXcd scaled =
            scale_.asDiagonal() * H * scale_.asDiagonal();
        llt_.compute(scaled);
        if (llt_.info() != Eigen::Success)
            throw SingularGramError(
                "Gram matrix is not numerically positive definite (n = " +
                std::to_string(n) + "); try a smaller basis");
        const auto L       = llt_.matrixLLT();
        double min_pivot   = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i)
            min_pivot = std::min(min_pivot, L(i, i).real());
        if (!(min_pivot > 0.0))
            throw SingularGramError("Cholesky pivot is not positive");
        min_pivot_ = min_pivot;
    }

    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const
    {
        const Eigen::VectorXcd y = llt_.solve(scale_.asDiagonal() * rhs);
        return scale_.asDiagonal() * y;
    }

    /// rhs^H H^{-1} rhs (real for Hermitian H) and the relative residual.
    std::pair<double, double> quadratic_form(const Eigen::VectorXcd& rhs) const
    {
        if (rhs.size() == 0)
            return {0.0, 0.0};
        const Eigen::VectorXcd x = solve(rhs);
        const double value       = rhs.dot(x).real();
        const double norm        = rhs.norm();
        const double residual =
            norm > 0.0 ? (H_ * x - rhs).norm() / norm : 0.0;
        return {value, residual};
    }

    double min_pivot() const noexcept { return min_pivot_; }

private:
    Eigen::MatrixXcd H_;
    Eigen::VectorXd scale_;
    Eigen::LLT<Eigen::MatrixXcd> llt_;
    double min_pivot_ = 0.0;
};

/// c0 - u^H H^{-1} u.
inline double upper_bound(const GramSystem& sys)
{
    if (sys.gram.H.rows() == 0)
        return sys.gram.c0;
    const HermitianSolver solver(sys.gram.H);
    return sys.gram.c0 - solver.quadratic_form(sys.gram.u).first;
}

/// d^H H^{-1} d.
inline double lower_bound(const GramSystem& sys)
{
    if (sys.gram.H.rows() == 0)
        return 0.0;
    const HermitianSolver solver(sys.gram.H);
    return solver.quadratic_form(sys.d).first;
}

/// Both bounds from a single factorization.
inline BoundsResult solve_bounds(const GramSystem& sys, double slack)
{
    BoundsResult out;
    out.n_basis = static_cast<int>(sys.gram.H.rows());
    out.slack   = slack;
    if (out.n_basis == 0)
    {
        out.upper = sys.gram.c0;
        return out;
    }
    const HermitianSolver solver(sys.gram.H);
    const auto [up, res_u]  = solver.quadratic_form(sys.gram.u);
    const auto [low, res_d] = solver.quadratic_form(sys.d);
    out.upper          = sys.gram.c0 - up;
    out.lower          = low;
    out.solve_residual = std::max(res_u, res_d);
    const double tol   = 1e-11 * std::max(1.0, std::abs(out.upper)) + slack;
    if (!(out.lower <= out.upper + tol) || !(out.lower >= -tol))
        throw NumericalError("inconsistent bounds: lower " +
                             std::to_string(out.lower) + " > upper " +
                             std::to_string(out.upper) +
                             "; the basis is too ill-conditioned");
    out.lower = std::max(out.lower, 0.0);
    return out;
}

inline double certified_slack(const QuadratureSettings& s, std::size_t n_basis)
{
    return 10.0 * s.abs_tol * static_cast<double>(n_basis);
}

inline GramSystem gram_system(const Scene& scene,
                              const std::vector<BasisFunction>& basis,
                              const QuadratureSettings& s, unsigned threads = 1)
{
    return {assemble_gram(scene, basis, s, threads), d_infinity_vector(basis)};
}

/// Bounds for an explicit basis.
inline BoundsResult bounds_for_basis(const Scene& scene,
                                     const std::vector<BasisFunction>& basis,
                                     const QuadratureSettings& s,
                                     unsigned threads = 1)
{
    const auto start = std::chrono::steady_clock::now();
    const auto sys   = gram_system(scene, basis, s, threads);
    auto out         = solve_bounds(sys, certified_slack(s, basis.size()));
    out.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return out;
}

// ---------------------------------------------------------------------------
// Sampled least squares
// ---------------------------------------------------------------------------

///
/// Solver choice. `gram` assembles H by adaptive quadrature and factors it;
/// `sampled` discretizes the boundary with a fixed rule and evaluates both
/// extremal problems as least-squares residuals from a QR factorization,
/// which works with the square root of the Gram condition number. The node
/// count is doubled until both bounds move by at most abs_tol * n_basis.
///
enum class SolverKind
{
    gram,
    sampled
};

struct SolverSettings
{
    SolverKind kind   = SolverKind::gram;
    int initial_nodes = 256;
    int max_nodes     = 1 << 14;
};

inline void validate(const SolverSettings& s)
{
    if (s.initial_nodes < 16 || s.max_nodes < s.initial_nodes)
        throw InputError("sampled solver needs 16 <= initial_nodes <= max_nodes");
}

namespace detail
{

struct WeightedSample
{
    ParametricArc::Sample sample;
    double weight = 0.0;
};

/// Composite 8-point Gauss-Legendre on [lo, hi].
template <typename Emit>
void gauss_panels(double lo, double hi, int panels, const Emit& emit)
{
    static constexpr double xg[] = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
        -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
        0.7966664774136267,  0.9602898564975363};
    static constexpr double wg[] = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
        0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
        0.2223810344533745, 0.1012285362903763};
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p)
    {
        const double mid = lo + (p + 0.5) * h;
        for (int g = 0; g < 8; ++g)
            emit(mid + 0.5 * h * xg[g], 0.5 * h * wg[g]);
    }
}

///
/// About `nodes` points of a rule for oint f |dz| over one arc: trapezoidal
/// for periodic arcs, graded Gauss-Legendre panels otherwise (same grading
/// toward corners as the adaptive quadrature).
///
inline std::vector<WeightedSample> arc_rule(const ParametricArc& arc, int nodes)
{
    std::vector<WeightedSample> out;
    if (arc.periodic())
    {
        out.reserve(static_cast<std::size_t>(nodes));
        for (int i = 0; i < nodes; ++i)
        {
            const auto smp = arc.sample(static_cast<double>(i) / nodes, false);
            out.push_back({smp, std::abs(smp.dz) / nodes});
        }
        return out;
    }
    constexpr double p = grading_power;
    const int panels   = std::max(1, nodes / 8);
    auto graded = [&](double span, bool from_end, int count) {
        gauss_panels(0.0, 1.0, count, [&](double u, double w) {
            const auto smp = arc.sample(span * std::pow(u, p), from_end);
            out.push_back(
                {smp, w * span * p * std::pow(u, p - 1.0) * std::abs(smp.dz)});
        });
    };
    if (arc.singular_start && arc.singular_end)
    {
        graded(0.5, false, std::max(1, panels / 2));
        graded(0.5, true, std::max(1, panels / 2));
    }
    else if (arc.singular_start)
        graded(1.0, false, panels);
    else if (arc.singular_end)
        graded(1.0, true, panels);
    else
    {
        gauss_panels(0.0, 1.0, panels, [&](double t, double w) {
            const bool from_end = t > 0.5;
            const auto smp = arc.sample(from_end ? 1.0 - t : t, from_end);
            out.push_back({smp, w * std::abs(smp.dz)});
        });
    }
    return out;
}

/// Squared distance from `target` to the column span of `cols`; throws if
/// the columns are numerically dependent, since the residual of a
/// rank-deficient factorization would understate the distance.
inline double residual_squared(Eigen::MatrixXcd cols,
                               const Eigen::VectorXcd& target)
{
    const auto m = cols.cols();
    if (m == 0)
        return target.squaredNorm();
    for (Eigen::Index j = 0; j < m; ++j)
    {
        const double norm = cols.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw SingularGramError("basis function vanishes on the samples");
        cols.col(j) /= norm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cols);
    qr.setThreshold(1e-14);
    if (qr.rank() < m)
        throw SingularGramError(
            "sampled system is numerically rank deficient (rank " +
            std::to_string(qr.rank()) + " of " + std::to_string(m) +
            "); try a smaller basis");
    const Eigen::VectorXcd proj = qr.householderQ().adjoint() * target;
    return proj.tail(proj.size() - m).squaredNorm();
}

/// (lower, upper) from one sampling level.
inline std::pair<double, double>
sampled_level(const std::vector<WeightedSample>& rule,
              const std::vector<BasisFunction>& basis, const Eigen::VectorXcd& d,
              unsigned threads)
{
    const auto rows = static_cast<Eigen::Index>(rule.size());
    const auto n    = static_cast<Eigen::Index>(basis.size());
    // B_ij = sqrt(w_i) conj(g_j(z_i)), so B^H B = H and B^H s = u
    Eigen::MatrixXcd B(rows, n);
    Eigen::VectorXcd s(rows);
    parallel_for(rule.size(), threads, [&](std::size_t i) {
        const auto ii     = static_cast<Eigen::Index>(i);
        const double root = std::sqrt(rule[i].weight / two_pi);
        s(ii)             = root;
        for (Eigen::Index j = 0; j < n; ++j)
            B(ii, j) = root * std::conj(eval_unchecked(
                                  basis[static_cast<std::size_t>(j)],
                                  rule[i].sample));
    });

    const double upper = residual_squared(B, s);

    // 1/lower = min ||B y||^2 subject to d^H y = 1; eliminate the entry of
    // largest |d|.
    Eigen::Index pivot = 0;
    for (Eigen::Index j = 1; j < n; ++j)
        if (std::abs(d(j)) > std::abs(d(pivot)))
            pivot = j;
    if (n == 0 || d(pivot) == Complex{})
        return {0.0, upper};
    const Complex dp = std::conj(d(pivot));
    Eigen::MatrixXcd C(rows, n - 1);
    for (Eigen::Index j = 0, c = 0; j < n; ++j)
    {
        if (j == pivot)
            continue;
        C.col(c++) = B.col(j) - B.col(pivot) * (std::conj(d(j)) / dp);
    }
    const double inverse = residual_squared(C, B.col(pivot) / dp);
    if (!(inverse > 0.0))
        throw SolveError("sampled lower bound is degenerate");
    return {1.0 / inverse, upper};
}

} // namespace detail

/// Bounds for an explicit basis from the sampled least-squares problems.
inline BoundsResult sampled_bounds(const Scene& scene,
                                   const std::vector<BasisFunction>& basis,
                                   const QuadratureSettings& s,
                                   const SolverSettings& solver,
                                   unsigned threads = 1)
{
    validate(s);
    validate(solver);
    const auto start = std::chrono::steady_clock::now();
    std::vector<ParametricArc> all;
    for (const auto& shape : scene.shapes)
    {
        auto part = arcs(shape);
        all.insert(all.end(), part.begin(), part.end());
    }
    const auto d       = d_infinity_vector(basis);
    const double slack = certified_slack(s, basis.size());
    const double settle = s.abs_tol * static_cast<double>(
                                          std::max<std::size_t>(1, basis.size()));

    std::optional<std::pair<double, double>> previous;
    for (int nodes = solver.initial_nodes; nodes <= solver.max_nodes;
         nodes *= 2)
    {
        std::vector<detail::WeightedSample> rule;
        for (const auto& arc : all)
        {
            auto part = detail::arc_rule(arc, nodes);
            rule.insert(rule.end(), part.begin(), part.end());
        }
        const auto level = detail::sampled_level(rule, basis, d, threads);
        if (previous && std::abs(level.first - previous->first) <= settle &&
            std::abs(level.second - previous->second) <= settle)
        {
            BoundsResult out;
            out.n_basis    = static_cast<int>(basis.size());
            out.slack      = slack;
            out.lower      = level.first;
            out.upper      = level.second;
            out.solve_residual = std::max(
                std::abs(level.first - previous->first),
                std::abs(level.second - previous->second));
            const double tol =
                1e-11 * std::max(1.0, std::abs(out.upper)) + slack;
            if (!(out.lower <= out.upper + tol))
                throw NumericalError("inconsistent sampled bounds: lower " +
                                     std::to_string(out.lower) + " > upper " +
                                     std::to_string(out.upper));
            out.wall_time = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
            return out;
        }
        previous = level;
    }
    throw MaxDepthError("sampled bounds did not settle within " +
                        std::to_string(solver.max_nodes) + " nodes per arc");
}

///
/// Validates the scene, builds the basis for the schedule and returns the
/// certified bracket [lower, upper] for the analytic capacity.
///
inline BoundsResult gamma_bounds(const Scene& scene, const Schedule& schedule,
                                 const QuadratureSettings& s,
                                 unsigned threads             = 1,
                                 const SolverSettings& solver = {})
{
    validate(solver);
    const auto start     = std::chrono::steady_clock::now();
    const auto validated = validate_scene(scene).scene;
    const auto basis     = build_basis(validated, schedule);
    auto out = solver.kind == SolverKind::sampled
                   ? sampled_bounds(validated, basis, s, solver, threads)
                   : bounds_for_basis(validated, basis, s, threads);
    out.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    return out;
}

/// Bounds along a ladder of nested schedules.
inline std::vector<BoundsResult> refine(const Scene& scene,
                                        const std::vector<Schedule>& ladder,
                                        const QuadratureSettings& s,
                                        unsigned threads             = 1,
                                        const SolverSettings& solver = {})
{
    std::vector<BoundsResult> out;
    out.reserve(ladder.size());
    for (const auto& schedule : ladder)
        out.push_back(gamma_bounds(scene, schedule, s, threads, solver));
    return out;
}

} // namespace capacity

#endif

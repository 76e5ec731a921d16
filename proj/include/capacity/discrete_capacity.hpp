#ifndef CAPACITY_DISCRETE_CAPACITY_HPP
#define CAPACITY_DISCRETE_CAPACITY_HPP

///
/// \file discrete_capacity.hpp
///
/// Discrete capacity of n equal disks D(z_j, r):
///
///   lambda(Z, r) = < (D^{-1} + C D C^H)^{-1} 1, 1 >,   D = r I,
///
/// with the Cauchy matrix c_jk = 1/(z_j - z_k), c_jj = 0, together with the
/// comparison constants M, N, the quadratic forms alpha = <C C^H 1, 1> and
/// beta = <(C C^H)^2 1, 1>, and the split excess delta = alpha - alpha' - alpha''.
///

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "capacity/capacity_solver.hpp"

namespace capacity
{

/// Centers, common radius and an optional split Z' = Z[0..m), Z'' = Z[m..n).
struct DiskConfiguration
{
    std::vector<Point> Z;
    double r = 0.0;
    std::optional<int> m;
};

struct DiscreteReport
{
    double lambda = 0.0;
    double M      = 0.0;
    double N      = 0.0;
    double alpha  = 0.0;
    double beta   = 0.0;
    std::optional<double> delta;
    double poly_lower = 0.0;
    double poly_upper = 0.0;
};

namespace detail
{

inline void check_centers(const std::vector<Point>& Z)
{
    if (Z.empty())
        throw DomainError("configuration needs at least one center");
    for (std::size_t j = 0; j < Z.size(); ++j)
    {
        if (!std::isfinite(Z[j].real()) || !std::isfinite(Z[j].imag()))
            throw DomainError("center is not finite");
        for (std::size_t k = j + 1; k < Z.size(); ++k)
            if (Z[j] == Z[k])
                throw DuplicateCenterError("centers " + std::to_string(j) +
                                           " and " + std::to_string(k) +
                                           " coincide");
    }
}

inline void check_radius(double r)
{
    if (!(r > 0.0) || !std::isfinite(r))
        throw DomainError("radius must be positive");
}

inline void check_split(std::size_t n, int m)
{
    if (m < 1 || static_cast<std::size_t>(m) >= n)
        throw SplitError("split index must lie in 1..n-1, got " +
                         std::to_string(m) + " for n = " + std::to_string(n));
}

inline double min_distance(const std::vector<Point>& Z)
{
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < Z.size(); ++j)
        for (std::size_t k = j + 1; k < Z.size(); ++k)
            out = std::min(out, std::abs(Z[j] - Z[k]));
    return out;
}

/// C^H 1, whose squared norm is alpha.
inline Eigen::VectorXcd cauchy_adjoint_ones(const Eigen::MatrixXcd& C)
{
    return C.adjoint() * Eigen::VectorXcd::Ones(C.rows());
}

} // namespace detail

inline Eigen::MatrixXcd cauchy_matrix(const std::vector<Point>& Z)
{
    detail::check_centers(Z);
    const auto n = static_cast<Eigen::Index>(Z.size());
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            if (j != k)
                C(j, k) = 1.0 / (Z[static_cast<std::size_t>(j)] -
                                 Z[static_cast<std::size_t>(k)]);
    return C;
}

inline double lambda_discrete(const std::vector<Point>& Z, double r)
{
    detail::check_radius(r);
    const auto C = cauchy_matrix(Z);
    const auto n = C.rows();
    const Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(n, n) / r + r * C * C.adjoint();
    const Eigen::LLT<Eigen::MatrixXcd> llt(A);
    if (llt.info() != Eigen::Success)
        throw SolveError("discrete capacity system is not positive definite");
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
    const Eigen::VectorXcd x    = llt.solve(ones);
    const Complex value         = ones.dot(x);
    if (std::abs(value.imag()) > 1e-12 * std::max(1.0, std::abs(value)))
        throw SolveError("discrete capacity has a non-negligible imaginary part");
    return value.real();
}

/// r^4 sum_k sum_{j != k} |z_k - z_j|^{-4}.
inline double melnikov_M(const std::vector<Point>& Z, double r)
{
    detail::check_centers(Z);
    double sum = 0.0;
    for (std::size_t j = 0; j < Z.size(); ++j)
        for (std::size_t k = 0; k < Z.size(); ++k)
            if (j != k)
            {
                const double d2 = std::norm(Z[j] - Z[k]);
                sum += 1.0 / (d2 * d2);
            }
    return std::pow(r, 4) * sum;
}

/// r (sum_k sum_{j != k} |z_k - z_j|^{-2})^{1/2} M^{1/2}.
inline double melnikov_N(const std::vector<Point>& Z, double r)
{
    detail::check_centers(Z);
    double sum = 0.0;
    for (std::size_t j = 0; j < Z.size(); ++j)
        for (std::size_t k = 0; k < Z.size(); ++k)
            if (j != k)
                sum += 1.0 / std::norm(Z[j] - Z[k]);
    return r * std::sqrt(sum) * std::sqrt(melnikov_M(Z, r));
}

/// <C C^H 1, 1> = |C^H 1|^2.
inline double alpha(const std::vector<Point>& Z)
{
    return detail::cauchy_adjoint_ones(cauchy_matrix(Z)).squaredNorm();
}

/// <(C C^H)^2 1, 1> = |C C^H 1|^2.
inline double beta(const std::vector<Point>& Z)
{
    const auto C = cauchy_matrix(Z);
    return (C * detail::cauchy_adjoint_ones(C)).squaredNorm();
}

///
/// sum_j sum_{l != j} |z_j - z_l|^{-2} + sum_{j<k<l} R(z_j, z_k, z_l)^{-2},
/// with the circumradius R = abc / (4S); triples of area below
/// 1e-14 diam^2 are collinear and contribute nothing.
///
inline double alpha_geometric(const std::vector<Point>& Z)
{
    detail::check_centers(Z);
    const std::size_t n = Z.size();
    double diam         = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            diam = std::max(diam, std::abs(Z[j] - Z[k]));

    double pairs = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
            if (j != l)
                pairs += 1.0 / std::norm(Z[j] - Z[l]);

    double triples = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            for (std::size_t l = k + 1; l < n; ++l)
            {
                const double area =
                    0.5 * std::abs(detail::cross(Z[k] - Z[j], Z[l] - Z[j]));
                if (area < 1e-14 * diam * diam)
                    continue;
                const double a = std::abs(Z[k] - Z[l]);
                const double b = std::abs(Z[j] - Z[l]);
                const double c = std::abs(Z[j] - Z[k]);
                const double R = a * b * c / (4.0 * area);
                triples += 1.0 / (R * R);
            }
    return pairs + triples;
}

/// alpha(Z) - alpha(Z') - alpha(Z''), positive for any split.
inline double delta(const std::vector<Point>& Z, int m)
{
    detail::check_centers(Z);
    detail::check_split(Z.size(), m);
    const std::vector<Point> head(Z.begin(), Z.begin() + m);
    const std::vector<Point> tail(Z.begin() + m, Z.end());
    const double out = alpha(Z) - alpha(head) - alpha(tail);
    if (!(out > 0.0))
        throw NumericalError("split excess delta is not positive: " +
                             std::to_string(out));
    return out;
}

/// (n r - r^3 alpha, n r - r^3 alpha + r^5 beta).
inline std::pair<double, double> lambda_poly_bounds(const std::vector<Point>& Z,
                                                    double r)
{
    detail::check_radius(r);
    const double n    = static_cast<double>(Z.size());
    const double base = n * r - std::pow(r, 3) * alpha(Z);
    return {base, base + std::pow(r, 5) * beta(Z)};
}

/// delta / n: predicted coefficient C in R(Z, r, m) = 1 - C r^2 + O(r^3).
inline double predicted_slope(const std::vector<Point>& Z, int m)
{
    return delta(Z, m) / static_cast<double>(Z.size());
}

inline DiscreteReport discrete_report(const DiskConfiguration& cfg)
{
    DiscreteReport out;
    out.lambda = lambda_discrete(cfg.Z, cfg.r);
    out.M      = melnikov_M(cfg.Z, cfg.r);
    out.N      = melnikov_N(cfg.Z, cfg.r);
    out.alpha  = alpha(cfg.Z);
    out.beta   = beta(cfg.Z);
    if (cfg.m)
        out.delta = delta(cfg.Z, *cfg.m);
    std::tie(out.poly_lower, out.poly_upper) = lambda_poly_bounds(cfg.Z, cfg.r);
    return out;
}

/// Scene of the closed disks D(z_j, r).
inline Scene disk_scene(const std::vector<Point>& Z, double r)
{
    Scene out;
    for (const auto& z : Z)
        out.shapes.emplace_back(Disk{z, r});
    return out;
}

enum class SandwichVerdict
{
    pass,
    fail
};

struct SandwichReport
{
    SandwichVerdict verdict = SandwichVerdict::pass;
    double lambda           = 0.0;
    /// gamma.lower / (1 + 4N)
    double lower_side = 0.0;
    /// (1 + 2M) gamma.upper
    double upper_side = 0.0;
    double M          = 0.0;
    double N          = 0.0;
};

///
/// gamma / (1 + 4N) <= lambda <= (1 + 2M) gamma, checked against a certified
/// bracket for gamma with its slack. Requires the doubled disks D(z_j, 2r)
/// to be pairwise disjoint.
///
inline SandwichReport sandwich_check(const std::vector<Point>& Z, double r,
                                     const BoundsResult& gb)
{
    detail::check_centers(Z);
    detail::check_radius(r);
    if (Z.size() > 1 && !(detail::min_distance(Z) > 4.0 * r))
        throw PreconditionError(
            "sandwich bounds need |z_j - z_k| > 4r for all j != k");
    SandwichReport out;
    out.lambda     = lambda_discrete(Z, r);
    out.M          = melnikov_M(Z, r);
    out.N          = melnikov_N(Z, r);
    out.lower_side = gb.lower / (1.0 + 4.0 * out.N);
    out.upper_side = (1.0 + 2.0 * out.M) * gb.upper;
    const double eps = gb.slack;
    const bool ok    = out.lower_side <= out.lambda + eps &&
                    out.lambda <= out.upper_side + eps;
    out.verdict = ok ? SandwichVerdict::pass : SandwichVerdict::fail;
    return out;
}

} // namespace capacity

#endif

#ifndef CAPACITY_BOUNDARY_INTEGRALS_HPP
#define CAPACITY_BOUNDARY_INTEGRALS_HPP

///
/// \file boundary_integrals.hpp
///
/// Gram data of a basis on the boundary of a scene:
///
///   H_jk = (1/2pi) oint g_j(z) conj(g_k(z)) |dz|
///   u_j  = (1/2pi) oint g_j(z) |dz|
///   c0   = (boundary length) / 2pi
///
/// On circles with rational functions the integrals are exact residue sums;
/// everything else goes through adaptive Simpson quadrature.
///

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "capacity/basis.hpp"
#include "capacity/quadrature.hpp"

namespace capacity
{

struct GramData
{
    Eigen::MatrixXcd H;
    Eigen::VectorXcd u;
    double c0 = 0.0;
};

namespace detail
{

/// Factor (zeta - location)^exponent of a rational function.
struct Factor
{
    Complex location;
    int exponent = 0;
};

/// Rational function constant * prod (zeta - p_i)^{e_i}.
struct Rational
{
    Complex constant{1.0, 0.0};
    std::vector<Factor> factors;

    void multiply(Complex location, int exponent)
    {
        if (exponent == 0)
            return;
        for (auto& f : factors)
        {
            if (f.location == location)
            {
                f.exponent += exponent;
                return;
            }
        }
        factors.push_back({location, exponent});
    }
};

inline Complex int_pow(Complex d, int e)
{
    Complex out{1.0, 0.0};
    const Complex base = e < 0 ? 1.0 / d : d;
    for (int i = 0; i < std::abs(e); ++i)
        out *= base;
    return out;
}

inline double binomial(int e, int j)
{
    double out = 1.0;
    for (int i = 0; i < j; ++i)
        out *= static_cast<double>(e - i) / (i + 1);
    return out;
}

/// Residue of r at the factor location `pole` (exponent -m, m >= 1): the
/// (m-1)-th Taylor coefficient of the remaining factors at the pole.
inline Complex residue_at(const Rational& r, std::size_t pole)
{
    const int m = -r.factors[pole].exponent;
    if (m <= 0)
        return {};
    const Complex p = r.factors[pole].location;
    std::vector<Complex> series(static_cast<std::size_t>(m), Complex{});
    series[0] = r.constant;
    std::vector<Complex> next(series.size());
    std::vector<Complex> term(series.size());
    for (std::size_t i = 0; i < r.factors.size(); ++i)
    {
        if (i == pole || r.factors[i].exponent == 0)
            continue;
        const int e     = r.factors[i].exponent;
        const Complex d = p - r.factors[i].location;
        // (h + d)^e = sum_j binom(e, j) d^{e-j} h^j
        for (int j = 0; j < m; ++j)
        {
            term[j] = binomial(e, j) * int_pow(d, e - j);
        }
        for (int a = 0; a < m; ++a)
        {
            Complex acc{};
            for (int b = 0; b <= a; ++b)
                acc += series[b] * term[a - b];
            next[a] = acc;
        }
        series.swap(next);
    }
    return series[m - 1];
}

/// 2 pi r times the sum of residues of r strictly inside |zeta| < radius.
inline Complex residue_contour(const Rational& r, double radius)
{
    Complex sum{};
    for (std::size_t i = 0; i < r.factors.size(); ++i)
    {
        if (r.factors[i].exponent < 0 &&
            std::abs(r.factors[i].location) < radius)
            sum += residue_at(r, i);
    }
    return two_pi * radius * sum;
}

inline void check_off_contour(Complex offset, double radius)
{
    if (std::abs(std::abs(offset) - radius) <= 1e-13 * radius)
        throw PoleOnContourError("basis pole lies on the integration circle");
}

inline RationalPole rational_or_throw(const BasisFunction& b)
{
    const auto r = as_rational(b);
    if (!r)
        throw NonRationalBasisError(
            "residue integration needs a rational basis function");
    return *r;
}

} // namespace detail

///
/// Exact oint_{|z-c|=r} b1(z) conj(b2(z)) |dz| for rational b1, b2.
///
/// With zeta = z - c on the circle, conj(z - p) = (r^2 - conj(p-c) zeta)/zeta
/// and |dz| = (r/i) dzeta / zeta, so the integral is 2 pi r times the sum of
/// interior residues of zeta^{k2-1} (zeta-alpha)^{-k1} (r^2-conj(beta) zeta)^{-k2}.
///
inline Complex circle_pair_integral(const BasisFunction& b1,
                                    const BasisFunction& b2, const Disk& circle)
{
    const auto f1 = detail::rational_or_throw(b1);
    const auto f2 = detail::rational_or_throw(b2);
    const double r     = circle.radius;
    const Complex alpha = f1.pole - circle.center;
    const Complex beta  = f2.pole - circle.center;
    detail::check_off_contour(alpha, r);
    detail::check_off_contour(beta, r);

    detail::Rational rat;
    rat.multiply(0.0, f2.order - 1);
    rat.multiply(alpha, -f1.order);
    if (beta == Complex{})
    {
        rat.constant = detail::int_pow(r * r, -f2.order);
    }
    else
    {
        const Complex cb = std::conj(beta);
        rat.constant     = detail::int_pow(-cb, -f2.order);
        rat.multiply(r * r / cb, -f2.order);
    }
    return detail::residue_contour(rat, r);
}

/// Exact oint_{|z-c|=r} b(z) |dz| for rational b.
inline Complex circle_mean_integral(const BasisFunction& b, const Disk& circle)
{
    const auto f       = detail::rational_or_throw(b);
    const Complex alpha = f.pole - circle.center;
    detail::check_off_contour(alpha, circle.radius);
    detail::Rational rat;
    rat.multiply(0.0, -1);
    rat.multiply(alpha, -f.order);
    return detail::residue_contour(rat, circle.radius);
}

namespace detail
{

/// Per-shape raw integrals (no 1/2pi), before accumulation.
class ShapeIntegrator
{
public:
    ShapeIntegrator(const Shape& shape, const QuadratureSettings& s)
        : arcs_(arcs(shape)), settings_(s)
    {
        if (const auto* d = std::get_if<Disk>(&shape))
            disk_ = *d;
        for (const auto& a : arcs_)
            length_ += a.length();
    }

    double length() const { return length_; }

    Complex pair(const BasisFunction& b1, const BasisFunction& b2,
                 double tol) const
    {
        if (disk_ && as_rational(b1) && as_rational(b2))
            return circle_pair_integral(b1, b2, *disk_);
        QuadratureSettings s = settings_;
        s.abs_tol            = tol;
        Complex total{};
        for (const auto& arc : arcs_)
        {
            total += quad_arc(
                [&](const ParametricArc::Sample& smp) {
                    return eval_unchecked(b1, smp) *
                           std::conj(eval_unchecked(b2, smp));
                },
                arc, s);
        }
        return total;
    }

    Complex mean(const BasisFunction& b, double tol) const
    {
        if (disk_ && as_rational(b))
            return circle_mean_integral(b, *disk_);
        QuadratureSettings s = settings_;
        s.abs_tol            = tol;
        Complex total{};
        for (const auto& arc : arcs_)
        {
            total += quad_arc(
                [&](const ParametricArc::Sample& smp) {
                    return eval_unchecked(b, smp);
                },
                arc, s);
        }
        return total;
    }

    /// Rough magnitude of oint |b|^2 |dz| from a fixed graded rule, used to
    /// scale tolerances for badly normalized functions.
    double norm_estimate(const BasisFunction& b) const
    {
        if (disk_ && as_rational(b))
            return std::abs(circle_pair_integral(b, b, *disk_));
        double total = 0.0;
        constexpr int n = 64;
        for (const auto& arc : arcs_)
        {
            for (int i = 1; i < n; ++i)
            {
                const double t = static_cast<double>(i) / n;
                const auto smp = t > 0.5 ? arc.sample(1.0 - t, true)
                                         : arc.sample(t, false);
                total += std::norm(eval_unchecked(b, smp)) *
                         std::abs(smp.dz) / n;
            }
        }
        return total;
    }

private:
    std::vector<ParametricArc> arcs_;
    QuadratureSettings settings_;
    std::optional<Disk> disk_;
    double length_ = 0.0;
};

/// Absolute tolerance, relaxed only where it would sit below the rounding
/// level of an integral of the given magnitude.
inline double entry_tolerance(double abs_tol, double magnitude)
{
    return std::max(abs_tol, 1e-13 * magnitude);
}

template <typename Task>
void parallel_for(std::size_t count, unsigned threads, const Task& task)
{
    if (threads <= 1 || count <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                task(i);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(threads, count);
    for (std::size_t t = 0; t < n; ++t)
        pool.emplace_back(worker);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace detail

///
/// Assembles H, u and c0 for the basis on the boundary of the scene.
///
/// Quadrature tolerances are absolute unless sqrt(|g_j|^2 |g_k|^2) is so large
/// that abs_tol is below its rounding level. Entry (j, k) sums shape
/// contributions in shape order; the lower triangle is the conjugate mirror,
/// so H is exactly Hermitian and independent of the thread count.
///
inline GramData assemble_gram(const Scene& scene,
                              const std::vector<BasisFunction>& basis,
                              const QuadratureSettings& s,
                              unsigned threads = 1)
{
    validate(s);
    const auto n       = static_cast<Eigen::Index>(basis.size());
    const auto nshapes = scene.shapes.size();

    std::vector<detail::ShapeIntegrator> shapes;
    shapes.reserve(nshapes);
    double length = 0.0;
    for (const auto& shape : scene.shapes)
    {
        shapes.emplace_back(shape, s);
        length += shapes.back().length();
    }

    // norms[shape][j] ~ oint_shape |g_j|^2 |dz|
    std::vector<std::vector<double>> norms(nshapes,
                                           std::vector<double>(basis.size()));
    detail::parallel_for(basis.size(), threads, [&](std::size_t j) {
        for (std::size_t sh = 0; sh < nshapes; ++sh)
            norms[sh][j] = shapes[sh].norm_estimate(basis[j]);
    });

    GramData g;
    g.H.resize(n, n);
    g.u.resize(n);
    g.c0 = length / two_pi;

    detail::parallel_for(basis.size(), threads, [&](std::size_t j) {
        for (std::size_t k = j; k < basis.size(); ++k)
        {
            Complex entry{};
            for (std::size_t sh = 0; sh < nshapes; ++sh)
            {
                const double tol = detail::entry_tolerance(
                    s.abs_tol, std::sqrt(norms[sh][j] * norms[sh][k]));
                entry += shapes[sh].pair(basis[j], basis[k], tol);
            }
            entry /= two_pi;
            const auto jj = static_cast<Eigen::Index>(j);
            const auto kk = static_cast<Eigen::Index>(k);
            if (j == k)
                g.H(jj, jj) = entry.real();
            else
            {
                g.H(jj, kk) = entry;
                g.H(kk, jj) = std::conj(entry);
            }
        }
        Complex mean{};
        for (std::size_t sh = 0; sh < nshapes; ++sh)
        {
            const double tol = detail::entry_tolerance(
                s.abs_tol, std::sqrt(norms[sh][j] * shapes[sh].length()));
            mean += shapes[sh].mean(basis[j], tol);
        }
        g.u(static_cast<Eigen::Index>(j)) = mean / two_pi;
    });
    return g;
}

/// Vector of d_infinity over a basis.
inline Eigen::VectorXcd d_infinity_vector(const std::vector<BasisFunction>& basis)
{
    Eigen::VectorXcd d(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        d(static_cast<Eigen::Index>(j)) = d_infinity(basis[j]);
    return d;
}

} // namespace capacity

#endif

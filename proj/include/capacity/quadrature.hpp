#ifndef CAPACITY_QUADRATURE_HPP
#define CAPACITY_QUADRATURE_HPP

///
/// \file quadrature.hpp
///
/// Recursive adaptive Simpson quadrature of complex integrands along
/// parametric boundary arcs.
///

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include "capacity/geometry.hpp"

namespace capacity
{

struct QuadratureSettings
{
    double abs_tol = 1e-9;
    int max_depth  = 50;
};

inline void validate(const QuadratureSettings& s)
{
    if (!(s.abs_tol > 0.0))
        throw InputError("quadrature tolerance must be positive");
    if (s.max_depth < 1)
        throw InputError("quadrature max depth must be positive");
}

namespace detail
{

inline bool simpson_accepts(Complex diff, double tol)
{
    return std::abs(diff.real()) <= 15.0 * tol &&
           std::abs(diff.imag()) <= 15.0 * tol;
}

template <typename F>
Complex simpson_step(const F& f, double a, double b, Complex fa, Complex fm,
                     Complex fb, Complex whole, double tol, int depth,
                     int max_depth)
{
    const double m   = 0.5 * (a + b);
    const double lm  = 0.5 * (a + m);
    const double rm  = 0.5 * (m + b);
    const Complex fl = f(lm);
    const Complex fr = f(rm);
    const double h   = (b - a) / 12.0;
    const Complex left  = h * (fa + 4.0 * fl + fm);
    const Complex right = h * (fm + 4.0 * fr + fb);
    const Complex both  = left + right;
    const Complex diff  = both - whole;
    if (simpson_accepts(diff, tol))
        return both + diff / 15.0;
    if (depth >= max_depth || !(lm > a && rm < b && m > lm && rm > m))
        throw MaxDepthError("adaptive Simpson did not reach tolerance " +
                            std::to_string(tol) + " within depth " +
                            std::to_string(max_depth));
    return simpson_step(f, a, m, fa, fl, fm, left, 0.5 * tol, depth + 1,
                        max_depth) +
           simpson_step(f, m, b, fm, fr, fb, right, 0.5 * tol, depth + 1,
                        max_depth);
}

} // namespace detail

///
/// Integral of f over [a, b] to absolute tolerance `tol` in both the real and
/// the imaginary part. The interval is first cut into `panels` pieces so that
/// the acceptance test never runs on a single coarse panel.
///
template <typename F>
Complex adaptive_simpson(const F& f, double a, double b, double tol,
                         int max_depth, int panels = 8)
{
    Complex total{};
    const double width = (b - a) / panels;
    double x0          = a;
    Complex f0         = f(x0);
    for (int p = 0; p < panels; ++p)
    {
        const double x1 = p + 1 == panels ? b : a + (p + 1) * width;
        const double xm = 0.5 * (x0 + x1);
        const Complex fm = f(xm);
        const Complex f1 = f(x1);
        const Complex whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += detail::simpson_step(f, x0, x1, f0, fm, f1, whole,
                                      tol / panels, 0, max_depth);
        x0 = x1;
        f0 = f1;
    }
    return total;
}

namespace detail
{

inline constexpr double grading_power = 4.0;

} // namespace detail

///
/// Integral over an arc of f |z'(t)| dt, t in [0, 1]; f receives the arc
/// sample (point, derivative and exact offset from the nearer endpoint).
///
/// At endpoints flagged as corners the variable is graded, t = tau^4 measured
/// from the corner, which turns integrable endpoint singularities
/// |t|^{-1/2+eps} into continuous integrands. The corner itself is never
/// evaluated.
///
template <typename F>
Complex quad_arc_samples(const F& f, const ParametricArc& arc,
                         const QuadratureSettings& s)
{
    constexpr double p = detail::grading_power;
    // distance tau = span * u^p from the chosen endpoint
    auto graded = [&](double span, bool from_end) {
        return [&, span, from_end](double u) -> Complex {
            if (u <= 0.0)
                return {};
            const double jac = span * p * std::pow(u, p - 1.0);
            const auto smp   = arc.sample(span * std::pow(u, p), from_end);
            return f(smp) * (std::abs(smp.dz) * jac);
        };
    };
    auto plain = [&](double t) -> Complex {
        const bool from_end = t > 0.5;
        const auto smp      = arc.sample(from_end ? 1.0 - t : t, from_end);
        return f(smp) * std::abs(smp.dz);
    };

    const int panels = arc.kind() == ParametricArc::Kind::line ? 8 : 16;
    if (arc.singular_start && arc.singular_end)
    {
        return adaptive_simpson(graded(0.5, false), 0.0, 1.0, 0.5 * s.abs_tol,
                                s.max_depth, panels / 2) +
               adaptive_simpson(graded(0.5, true), 0.0, 1.0, 0.5 * s.abs_tol,
                                s.max_depth, panels / 2);
    }
    if (arc.singular_start)
        return adaptive_simpson(graded(1.0, false), 0.0, 1.0, s.abs_tol,
                                s.max_depth, panels);
    if (arc.singular_end)
        return adaptive_simpson(graded(1.0, true), 0.0, 1.0, s.abs_tol,
                                s.max_depth, panels);
    return adaptive_simpson(plain, 0.0, 1.0, s.abs_tol, s.max_depth, panels);
}

/// Integral over an arc of f(t) |z'(t)| dt for an integrand in the arc
/// parameter t in [0, 1].
template <typename F>
Complex quad_arc(const F& f, const ParametricArc& arc,
                 const QuadratureSettings& s)
{
    if constexpr (std::is_invocable_v<const F&, const ParametricArc::Sample&>)
        return quad_arc_samples(f, arc, s);
    else
    {
        auto with_t = [&](const ParametricArc::Sample& smp) {
            return f(smp.t);
        };
        return quad_arc_samples(with_t, arc, s);
    }
}

} // namespace capacity

#endif

#ifndef CAPACITY_BASIS_HPP
#define CAPACITY_BASIS_HPP

///
/// \file basis.hpp
///
/// Approximating functions holomorphic off K and vanishing at infinity:
///
///   SimplePole     1 / (z - a)
///   PowerPole      1 / (z - c)^k
///   CornerAdapted  ((z - a) / (z - c))^beta / (z - c)^k
///
/// The corner-adapted family reproduces the square-root-of-conformal-map
/// singularity at a corner a whose complement sector has opening omega:
/// beta = (pi / omega - 1) / 2.
///

#include <optional>
#include <variant>
#include <vector>

#include "capacity/geometry.hpp"

namespace capacity
{

struct SimplePole
{
    Point a;
};

struct PowerPole
{
    Point c;
    int k = 1;
};

struct CornerAdapted
{
    Point c;
    Point a;
    double beta = 0.0;
    int k       = 1;
};

using BasisFunction = std::variant<SimplePole, PowerPole, CornerAdapted>;

/// Exponent that matches a corner with complement angle omega.
inline double corner_exponent(double omega_angle)
{
    return 0.5 * (pi / omega_angle - 1.0);
}

namespace detail
{

inline Complex int_power(Complex w, int k)
{
    Complex out{1.0, 0.0};
    for (int i = 0; i < k; ++i)
        out *= w;
    return out;
}

} // namespace detail

/// Evaluation without domain checks, for inner quadrature loops.
inline Complex eval_unchecked(const BasisFunction& b, Point z) noexcept
{
    return std::visit(
        [z](const auto& f) -> Complex {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SimplePole>)
                return 1.0 / (z - f.a);
            else if constexpr (std::is_same_v<T, PowerPole>)
                return 1.0 / detail::int_power(z - f.c, f.k);
            else
            {
                const Complex zc = z - f.c;
                const Complex w  = (z - f.a) / zc;
                return std::exp(f.beta * std::log(w)) /
                       detail::int_power(zc, f.k);
            }
        },
        b);
}

/// Evaluation at an arc sample; corner functions whose corner is the
/// sample's anchor use the exact offset in place of z - a.
inline Complex eval_unchecked(const BasisFunction& b,
                              const ParametricArc::Sample& s) noexcept
{
    if (const auto* f = std::get_if<CornerAdapted>(&b))
    {
        const Complex zc = s.z - f->c;
        const double tol = 1e-13 * (1.0 + std::abs(f->a));
        const Complex za = std::abs(s.anchor - f->a) <= tol ? s.offset
                                                            : s.z - f->a;
        return std::exp(f->beta * std::log(za / zc)) /
               detail::int_power(zc, f->k);
    }
    return eval_unchecked(b, s.z);
}

/// Value at z; fractional powers use the principal branch of the ratio.
inline Complex eval(const BasisFunction& b, Point z)
{
    std::visit(
        [z](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SimplePole>)
            {
                if (z == f.a)
                    throw PoleEvaluationError("evaluation at a simple pole");
            }
            else if constexpr (std::is_same_v<T, PowerPole>)
            {
                if (z == f.c)
                    throw PoleEvaluationError("evaluation at a power pole");
            }
            else
            {
                if (z == f.c)
                    throw PoleEvaluationError("evaluation at an anchor pole");
                const Complex w = (z - f.a) / (z - f.c);
                if (w.imag() == 0.0 && w.real() <= 0.0)
                    throw BranchCutError("corner ratio on the branch cut");
            }
        },
        b);
    return eval_unchecked(b, z);
}

/// Coefficient of 1/z in the expansion at infinity.
inline Complex d_infinity(const BasisFunction& b) noexcept
{
    return std::visit(
        [](const auto& f) -> Complex {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, SimplePole>)
                return 1.0;
            else
                return f.k == 1 ? 1.0 : 0.0;
        },
        b);
}

/// Pole location and order when the function is rational.
struct RationalPole
{
    Point pole;
    int order = 1;
};

inline std::optional<RationalPole> as_rational(const BasisFunction& b) noexcept
{
    if (const auto* s = std::get_if<SimplePole>(&b))
        return RationalPole{s->a, 1};
    if (const auto* p = std::get_if<PowerPole>(&b))
        return RationalPole{p->c, p->k};
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schedules and layouts
// ---------------------------------------------------------------------------

/// Center plus `layers` rings of four poles each (disks and ellipses).
struct Rings
{
    int layers = 0;
};

/// Power poles 1/(z-c)^k, k = 1..n, about the shape's anchor, optionally with
/// the corner-adapted companions of every corner.
struct Powers
{
    int n             = 1;
    bool with_corners = false;
};

using ShapeSchedule = std::variant<Rings, Powers>;

struct Schedule
{
    ShapeSchedule fallback = Rings{0};
    /// Optional per-shape override; empty means `fallback` everywhere.
    std::vector<ShapeSchedule> per_shape;

    const ShapeSchedule& for_shape(std::size_t i) const
    {
        return per_shape.empty() ? fallback : per_shape.at(i);
    }
};

///
/// Poles {c, c +- r_m, c +- i r_m : m = 1..layers} with r_m = m r/(layers+1),
/// all strictly inside the disk.
///
inline std::vector<Point> disk_pole_layout(const Disk& d, int layers)
{
    if (layers < 0)
        throw ScheduleError("ring layers must be non-negative");
    std::vector<Point> out{d.center};
    for (int m = 1; m <= layers; ++m)
    {
        const double rm = m * d.radius / (layers + 1);
        out.push_back(d.center + rm);
        out.push_back(d.center - rm);
        out.push_back(d.center + Complex(0.0, rm));
        out.push_back(d.center - Complex(0.0, rm));
    }
    return out;
}

/// Ring layout stretched along the ellipse axes.
inline std::vector<Point> ellipse_pole_layout(const Ellipse& e, int layers)
{
    if (layers < 0)
        throw ScheduleError("ring layers must be non-negative");
    const Complex rot = std::polar(1.0, e.rotation);
    std::vector<Point> out{e.center};
    for (int m = 1; m <= layers; ++m)
    {
        const double s = static_cast<double>(m) / (layers + 1);
        out.push_back(e.center + rot * (s * e.semi_major));
        out.push_back(e.center - rot * (s * e.semi_major));
        out.push_back(e.center + rot * Complex(0.0, s * e.semi_minor));
        out.push_back(e.center - rot * Complex(0.0, s * e.semi_minor));
    }
    return out;
}

/// Basis functions contributed by one shape under its schedule.
inline std::vector<BasisFunction> shape_basis(const Shape& shape,
                                              const ShapeSchedule& mode)
{
    std::vector<BasisFunction> out;
    if (const auto* rings = std::get_if<Rings>(&mode))
    {
        std::vector<Point> poles;
        if (const auto* d = std::get_if<Disk>(&shape))
            poles = disk_pole_layout(*d, rings->layers);
        else if (const auto* e = std::get_if<Ellipse>(&shape))
            poles = ellipse_pole_layout(*e, rings->layers);
        else
            throw ScheduleError("rings schedule needs a disk or an ellipse");
        for (const auto& p : poles)
            out.emplace_back(SimplePole{p});
        return out;
    }

    const auto& powers = std::get<Powers>(mode);
    if (powers.n < 1)
        throw ScheduleError("powers schedule needs n >= 1");
    const Point c = interior_anchor(shape);
    std::vector<Corner> cs;
    if (powers.with_corners)
    {
        cs = corners(shape);
        if (!cs.empty() && !star_shaped_about(shape, c))
            throw ScheduleError(
                "corner functions need a shape star-shaped about its anchor");
    }
    for (int k = 1; k <= powers.n; ++k)
    {
        out.emplace_back(PowerPole{c, k});
        for (const auto& corner : cs)
        {
            out.emplace_back(CornerAdapted{c, corner.location,
                                           corner_exponent(corner.omega_angle),
                                           k});
        }
    }
    return out;
}

/// Concatenation of every shape's functions, in shape order.
inline std::vector<BasisFunction> build_basis(const Scene& scene,
                                              const Schedule& schedule)
{
    if (!schedule.per_shape.empty() &&
        schedule.per_shape.size() != scene.shapes.size())
        throw ScheduleError("per-shape schedule does not match the scene");
    std::vector<BasisFunction> out;
    for (std::size_t i = 0; i < scene.shapes.size(); ++i)
    {
        auto part = shape_basis(scene.shapes[i], schedule.for_shape(i));
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

/// Image of a basis function under z -> a z + b (up to a constant factor,
/// which leaves the spanned space unchanged).
inline BasisFunction transform(const BasisFunction& f, Complex a, Complex b)
{
    return std::visit(
        [&](const auto& g) -> BasisFunction {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, SimplePole>)
                return SimplePole{a * g.a + b};
            else if constexpr (std::is_same_v<T, PowerPole>)
                return PowerPole{a * g.c + b, g.k};
            else
                return CornerAdapted{a * g.c + b, a * g.a + b, g.beta, g.k};
        },
        f);
}

} // namespace capacity

#endif

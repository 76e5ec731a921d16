#ifndef CAPACITY_GEOMETRY_HPP
#define CAPACITY_GEOMETRY_HPP

///
/// \file geometry.hpp
///
/// Compact plane sets bounded by finitely many disjoint Jordan curves: disks,
/// ellipses, polygons and closed chains of segments and circular arcs.
///

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "capacity/error.hpp"

namespace capacity
{

using Point   = std::complex<double>;
using Complex = std::complex<double>;

inline constexpr double pi     = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Disk
{
    Point center;
    double radius = 0.0;
};

struct Ellipse
{
    Point center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double rotation   = 0.0;
};

/// Vertices in counter-clockwise order after validation.
struct Polygon
{
    std::vector<Point> vertices;
};

struct Segment
{
    Point start;
    Point end;
};

/// Arc of the circle |z - center| = radius, traversed from theta_start to
/// theta_end (clockwise when theta_end < theta_start).
struct CircularArc
{
    Point center;
    double radius      = 0.0;
    double theta_start = 0.0;
    double theta_end   = 0.0;
};

using ChainPiece = std::variant<Segment, CircularArc>;

struct ArcChain
{
    std::vector<ChainPiece> pieces;
};

using Shape = std::variant<Disk, Ellipse, Polygon, ArcChain>;

enum class Label
{
    E,
    F
};

struct Scene
{
    std::vector<Shape> shapes;
    std::vector<Label> labels;
};

/// A non-smooth boundary point; omega_angle is the opening of the sector
/// occupied by the complement, so a square corner has omega_angle = 3*pi/2.
struct Corner
{
    Point location;
    double omega_angle = pi;
};

///
/// One analytic piece of a boundary, parametrized over t in [0, 1] with
/// positive orientation (complement on the right-hand side).
///
class ParametricArc
{
public:
    enum class Kind
    {
        line,
        circle,
        ellipse
    };

    static ParametricArc line(Point from, Point to)
    {
        ParametricArc a;
        a.kind_   = Kind::line;
        a.center_ = from;
        a.delta_  = to - from;
        return a;
    }

    static ParametricArc circle(Point center, double radius, double theta0,
                                double theta1)
    {
        ParametricArc a;
        a.kind_   = Kind::circle;
        a.center_ = center;
        a.ra_     = radius;
        a.rb_     = radius;
        a.theta0_ = theta0;
        a.theta1_ = theta1;
        return a;
    }

    static ParametricArc ellipse(Point center, double semi_major,
                                 double semi_minor, double rotation,
                                 double theta0 = 0.0, double theta1 = two_pi)
    {
        ParametricArc a;
        a.kind_     = Kind::ellipse;
        a.center_   = center;
        a.ra_       = semi_major;
        a.rb_       = semi_minor;
        a.rotation_ = std::polar(1.0, rotation);
        a.theta0_   = theta0;
        a.theta1_   = theta1;
        return a;
    }

    Kind kind() const noexcept { return kind_; }

    /// Smooth closed curve traversed once (a whole circle or ellipse without
    /// flagged endpoints).
    bool periodic() const noexcept
    {
        return kind_ != Kind::line && !singular_start && !singular_end &&
               std::abs(std::abs(theta1_ - theta0_) - two_pi) < 1e-15;
    }

    Point point(double t) const
    {
        switch (kind_)
        {
        case Kind::line:
            return center_ + t * delta_;
        case Kind::circle:
            return center_ + std::polar(ra_, angle(t));
        case Kind::ellipse:
        default:
        {
            const double th = angle(t);
            return center_ +
                   rotation_ * Complex(ra_ * std::cos(th), rb_ * std::sin(th));
        }
        }
    }

    Complex derivative(double t) const
    {
        const double dth = theta1_ - theta0_;
        switch (kind_)
        {
        case Kind::line:
            return delta_;
        case Kind::circle:
            return Complex(0.0, dth) * std::polar(ra_, angle(t));
        case Kind::ellipse:
        default:
        {
            const double th = angle(t);
            return dth * rotation_ *
                   Complex(-ra_ * std::sin(th), rb_ * std::cos(th));
        }
        }
    }

    /// A boundary point together with its exact offset from the nearer
    /// endpoint, so functions singular at a corner can be evaluated without
    /// cancellation in z - corner.
    struct Sample
    {
        double t = 0.0;
        Point z;
        Complex dz;
        Point anchor;
        Complex offset;
    };

    /// Sample at t = tau (from_end = false) or t = 1 - tau (from_end = true).
    Sample sample(double tau, bool from_end) const
    {
        const double t = from_end ? 1.0 - tau : tau;
        Sample s;
        s.t      = t;
        s.z      = point(t);
        s.dz     = derivative(t);
        s.anchor = from_end ? point(1.0) : point(0.0);
        const double sign = from_end ? -1.0 : 1.0;
        switch (kind_)
        {
        case Kind::line:
            s.offset = sign * tau * delta_;
            break;
        case Kind::circle:
        case Kind::ellipse:
        default:
        {
            // e^{i(th0 + x)} - e^{i th0} = 2i sin(x/2) e^{i(th0 + x/2)}
            const double th0 = from_end ? theta1_ : theta0_;
            const double x   = sign * tau * (theta1_ - theta0_);
            const double h   = std::sin(0.5 * x);
            const double mid = th0 + 0.5 * x;
            const double dcos = -2.0 * h * std::sin(mid);
            const double dsin = 2.0 * h * std::cos(mid);
            s.offset = rotation_ * Complex(ra_ * dcos, rb_ * dsin);
            break;
        }
        }
        return s;
    }

    /// Exact length (Gauss-Kummer AGM series for elliptical arcs covering a
    /// full turn, adaptive composite rule otherwise).
    double length() const;

    /// Whether the start/end point is a corner of the boundary; quadrature
    /// grades its mesh toward flagged endpoints.
    bool singular_start = false;
    bool singular_end   = false;

private:
    double angle(double t) const { return theta0_ + t * (theta1_ - theta0_); }

    Kind kind_ = Kind::line;
    Point center_{};
    Complex delta_{};
    Complex rotation_{1.0, 0.0};
    double ra_     = 0.0;
    double rb_     = 0.0;
    double theta0_ = 0.0;
    double theta1_ = 0.0;
};

namespace detail
{

inline double cross(Complex a, Complex b)
{
    return a.real() * b.imag() - a.imag() * b.real();
}

/// Perimeter of an ellipse by the arithmetic-geometric mean iteration:
/// P = 2 pi / M(a, b) * (a^2 - sum_n 2^{n-1} c_n^2).
inline double ellipse_perimeter(double a, double b)
{
    double x      = a;
    double y      = b;
    double weight = 0.5;
    double sum    = weight * (a * a - b * b);
    for (int it = 0; it < 64; ++it)
    {
        const double c = 0.5 * (x - y);
        if (std::abs(c) <= 1e-17 * a)
            break;
        const double xn = 0.5 * (x + y);
        y               = std::sqrt(x * y);
        x               = xn;
        weight *= 2.0;
        sum += weight * c * c;
    }
    return two_pi / x * (a * a - sum);
}

/// Composite Gauss-Legendre fallback for arc lengths without closed form.
inline double integrate_speed(const ParametricArc& arc, int panels)
{
    static constexpr double xg[] = {-0.9061798459386640, -0.5384693101056831,
                                    0.0, 0.5384693101056831,
                                    0.9061798459386640};
    static constexpr double wg[] = {0.2369268850561891, 0.4786286704993665,
                                    0.5688888888888889, 0.4786286704993665,
                                    0.2369268850561891};
    double total = 0.0;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p)
    {
        const double mid = (p + 0.5) * h;
        for (int g = 0; g < 5; ++g)
        {
            total += wg[g] * 0.5 * h *
                     std::abs(arc.derivative(mid + 0.5 * h * xg[g]));
        }
    }
    return total;
}

} // namespace detail

inline double ParametricArc::length() const
{
    const double sweep = std::abs(theta1_ - theta0_);
    switch (kind_)
    {
    case Kind::line:
        return std::abs(delta_);
    case Kind::circle:
        return ra_ * sweep;
    case Kind::ellipse:
    default:
        if (std::abs(sweep - two_pi) < 1e-15)
        {
            return detail::ellipse_perimeter(std::max(ra_, rb_),
                                             std::min(ra_, rb_));
        }
        return detail::integrate_speed(*this, 4096);
    }
}

// ---------------------------------------------------------------------------
// Shape primitives
// ---------------------------------------------------------------------------

inline Point start_point(const ChainPiece& piece)
{
    return std::visit(
        [](const auto& p) -> Point {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Segment>)
                return p.start;
            else
                return p.center + std::polar(p.radius, p.theta_start);
        },
        piece);
}

inline Point end_point(const ChainPiece& piece)
{
    return std::visit(
        [](const auto& p) -> Point {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Segment>)
                return p.end;
            else
                return p.center + std::polar(p.radius, p.theta_end);
        },
        piece);
}

inline ParametricArc to_arc(const ChainPiece& piece)
{
    return std::visit(
        [](const auto& p) -> ParametricArc {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Segment>)
                return ParametricArc::line(p.start, p.end);
            else
                return ParametricArc::circle(p.center, p.radius, p.theta_start,
                                             p.theta_end);
        },
        piece);
}

namespace detail
{

// Unit tangents entering and leaving vertex i of a closed chain.
inline Complex tangent_in(const ChainPiece& piece)
{
    const Complex d = to_arc(piece).derivative(1.0);
    return d / std::abs(d);
}

inline Complex tangent_out(const ChainPiece& piece)
{
    const Complex d = to_arc(piece).derivative(0.0);
    return d / std::abs(d);
}

inline std::vector<ChainPiece> polygon_pieces(const Polygon& poly)
{
    std::vector<ChainPiece> out;
    const auto n = poly.vertices.size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        out.emplace_back(
            Segment{poly.vertices[i], poly.vertices[(i + 1) % n]});
    }
    return out;
}

/// Dense polyline of the boundary (closed; last point not repeated).
inline std::vector<Point> boundary_polyline(const Shape& shape,
                                            int per_curve = 1024)
{
    std::vector<Point> pts;
    auto add_arc = [&](const ParametricArc& arc, int m) {
        for (int i = 0; i < m; ++i)
        {
            pts.push_back(arc.point(static_cast<double>(i) / m));
        }
    };
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>)
            {
                add_arc(ParametricArc::circle(s.center, s.radius, 0.0, two_pi),
                        per_curve);
            }
            else if constexpr (std::is_same_v<T, Ellipse>)
            {
                add_arc(ParametricArc::ellipse(s.center, s.semi_major,
                                               s.semi_minor, s.rotation),
                        per_curve);
            }
            else if constexpr (std::is_same_v<T, Polygon>)
            {
                pts = s.vertices;
            }
            else
            {
                for (const auto& piece : s.pieces)
                {
                    if (std::holds_alternative<Segment>(piece))
                    {
                        pts.push_back(start_point(piece));
                    }
                    else
                    {
                        const auto& a = std::get<CircularArc>(piece);
                        const double sweep =
                            std::abs(a.theta_end - a.theta_start);
                        const int m = std::max(
                            8, static_cast<int>(per_curve * sweep / two_pi));
                        add_arc(to_arc(piece), m);
                    }
                }
            }
        },
        shape);
    return pts;
}

/// Largest distance between a chord of the polyline and the true boundary.
inline double polyline_sagitta(const Shape& shape, int per_curve = 1024)
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            const double h = 1.0 - std::cos(pi / per_curve);
            if constexpr (std::is_same_v<T, Disk>)
                return s.radius * h;
            else if constexpr (std::is_same_v<T, Ellipse>)
                return s.semi_major * s.semi_major / s.semi_minor * h;
            else if constexpr (std::is_same_v<T, Polygon>)
                return 0.0;
            else
            {
                double worst = 0.0;
                for (const auto& piece : s.pieces)
                {
                    if (const auto* a = std::get_if<CircularArc>(&piece))
                    {
                        worst = std::max(worst, a->radius * h * 4.0);
                    }
                }
                return worst;
            }
        },
        shape);
}

inline double segment_point_distance(Point a, Point b, Point p)
{
    const Complex ab  = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0)
        return std::abs(p - a);
    double t = ((p - a) * std::conj(ab)).real() / len2;
    t        = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

inline bool segments_intersect(Point p1, Point p2, Point q1, Point q2)
{
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on = [](Point a, Point b, Point p) {
        return segment_point_distance(a, b, p) == 0.0;
    };
    return on(q1, q2, p1) || on(q1, q2, p2) || on(p1, p2, q1) ||
           on(p1, p2, q2);
}

inline double segment_distance(Point p1, Point p2, Point q1, Point q2)
{
    if (segments_intersect(p1, p2, q1, q2))
        return 0.0;
    return std::min({segment_point_distance(q1, q2, p1),
                     segment_point_distance(q1, q2, p2),
                     segment_point_distance(p1, p2, q1),
                     segment_point_distance(p1, p2, q2)});
}

inline double polyline_distance(const std::vector<Point>& a,
                                const std::vector<Point>& b)
{
    // midpoint and half length per segment: |m_a - m_b| - h_a - h_b is a
    // lower bound for the segment distance
    auto summarize = [](const std::vector<Point>& p) {
        std::vector<std::pair<Point, double>> out(p.size());
        for (std::size_t i = 0; i < p.size(); ++i)
        {
            const Point q = p[(i + 1) % p.size()];
            out[i] = {0.5 * (p[i] + q), 0.5 * std::abs(q - p[i])};
        }
        return out;
    };
    const auto sa = summarize(a);
    const auto sb = summarize(b);
    double best   = std::numeric_limits<double>::infinity();
    const auto na = a.size();
    const auto nb = b.size();
    for (std::size_t i = 0; i < na; ++i)
    {
        for (std::size_t j = 0; j < nb; ++j)
        {
            if (std::abs(sa[i].first - sb[j].first) - sa[i].second -
                    sb[j].second >= best)
                continue;
            best = std::min(best, segment_distance(a[i], a[(i + 1) % na], b[j],
                                                   b[(j + 1) % nb]));
            if (best == 0.0)
                return 0.0;
        }
    }
    return best;
}

inline bool polyline_contains(const std::vector<Point>& poly, Point p)
{
    bool inside  = false;
    const auto n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        const Point a = poly[i];
        const Point b = poly[j];
        if ((a.imag() > p.imag()) != (b.imag() > p.imag()))
        {
            const double x = (b.real() - a.real()) * (p.imag() - a.imag()) /
                                 (b.imag() - a.imag()) +
                             a.real();
            if (p.real() < x)
                inside = !inside;
        }
    }
    return inside;
}

inline double signed_area(const std::vector<Point>& poly)
{
    double s     = 0.0;
    const auto n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * s;
}

inline double shape_scale(const Shape& shape)
{
    const auto pts = boundary_polyline(shape, 64);
    double lo_x = pts[0].real(), hi_x = lo_x, lo_y = pts[0].imag(), hi_y = lo_y;
    for (const auto& p : pts)
    {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    return std::max(hi_x - lo_x, hi_y - lo_y);
}

} // namespace detail

/// Whether p lies in the closed region bounded by the shape (polyline
/// approximation for curved chains).
inline bool contains(const Shape& shape, Point p)
{
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>)
                return std::abs(p - s.center) <= s.radius;
            else if constexpr (std::is_same_v<T, Ellipse>)
            {
                const Complex w = (p - s.center) * std::polar(1.0, -s.rotation);
                const double x  = w.real() / s.semi_major;
                const double y  = w.imag() / s.semi_minor;
                return x * x + y * y <= 1.0;
            }
            else
                return detail::polyline_contains(
                    detail::boundary_polyline(shape), p);
        },
        shape);
}

// ---------------------------------------------------------------------------
// Corners, arcs, anchors
// ---------------------------------------------------------------------------

namespace detail
{

inline std::vector<ChainPiece> chain_of(const Shape& shape)
{
    if (const auto* poly = std::get_if<Polygon>(&shape))
        return polygon_pieces(*poly);
    if (const auto* chain = std::get_if<ArcChain>(&shape))
        return chain->pieces;
    return {};
}

// Tangent turning angle at the junction entering piece i, in (-pi, pi).
inline double turning_angle(const std::vector<ChainPiece>& pieces,
                            std::size_t i)
{
    const auto n       = pieces.size();
    const auto& before = pieces[(i + n - 1) % n];
    return std::arg(tangent_out(pieces[i]) / tangent_in(before));
}

inline constexpr double corner_tolerance = 1e-10;

} // namespace detail

/// Boundary points where adjacent analytic pieces meet at an angle other
/// than pi, in boundary order. Smooth shapes have none.
inline std::vector<Corner> corners(const Shape& shape)
{
    std::vector<Corner> out;
    const auto pieces = detail::chain_of(shape);
    for (std::size_t i = 0; i < pieces.size(); ++i)
    {
        const double turn = detail::turning_angle(pieces, i);
        if (std::abs(turn) > detail::corner_tolerance)
        {
            out.push_back({start_point(pieces[i]), pi + turn});
        }
    }
    return out;
}

/// Positively oriented cover of the boundary by analytic arcs.
inline std::vector<ParametricArc> arcs(const Shape& shape)
{
    std::vector<ParametricArc> out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>)
            {
                out.push_back(
                    ParametricArc::circle(s.center, s.radius, 0.0, two_pi));
            }
            else if constexpr (std::is_same_v<T, Ellipse>)
            {
                out.push_back(ParametricArc::ellipse(
                    s.center, s.semi_major, s.semi_minor, s.rotation));
            }
            else
            {
                const auto pieces = detail::chain_of(shape);
                const auto n      = pieces.size();
                std::vector<bool> corner_at(n);
                for (std::size_t i = 0; i < n; ++i)
                {
                    corner_at[i] = std::abs(detail::turning_angle(pieces, i)) >
                                   detail::corner_tolerance;
                }
                for (std::size_t i = 0; i < n; ++i)
                {
                    auto arc           = to_arc(pieces[i]);
                    arc.singular_start = corner_at[i];
                    arc.singular_end   = corner_at[(i + 1) % n];
                    out.push_back(arc);
                }
            }
        },
        shape);
    return out;
}

inline double perimeter(const Shape& shape)
{
    double total = 0.0;
    for (const auto& arc : arcs(shape))
        total += arc.length();
    return total;
}

/// Whether every ray from c meets the boundary exactly once, transversally.
inline bool star_shaped_about(const Shape& shape, Point c)
{
    if (const auto* d = std::get_if<Disk>(&shape))
        return std::abs(c - d->center) < d->radius;
    if (std::holds_alternative<Ellipse>(shape))
    {
        // convex: any strictly interior point works
        const auto& e   = std::get<Ellipse>(shape);
        const Complex w = (c - e.center) * std::polar(1.0, -e.rotation);
        const double x  = w.real() / e.semi_major;
        const double y  = w.imag() / e.semi_minor;
        return x * x + y * y < 1.0;
    }
    for (const auto& arc : arcs(shape))
    {
        constexpr int samples = 64;
        for (int i = 0; i <= samples; ++i)
        {
            const double t = static_cast<double>(i) / samples;
            if (detail::cross(arc.point(t) - c, arc.derivative(t)) <= 0.0)
                return false;
        }
    }
    return true;
}

namespace detail
{

inline double boundary_distance(const Shape& shape, Point p)
{
    const auto pts = boundary_polyline(shape, 256);
    double best    = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        best = std::min(best, segment_point_distance(
                                  pts[i], pts[(i + 1) % pts.size()], p));
    }
    return best;
}

} // namespace detail

/// A point strictly inside the shape: the center of a disk or ellipse, the
/// vertex average of a polygon when it lies inside, otherwise the deepest
/// point of a grid search over the bounding box.
inline Point interior_anchor(const Shape& shape)
{
    if (const auto* d = std::get_if<Disk>(&shape))
        return d->center;
    if (const auto* e = std::get_if<Ellipse>(&shape))
        return e->center;

    const auto pts = detail::boundary_polyline(shape);
    std::vector<Point> nodes;
    if (const auto* poly = std::get_if<Polygon>(&shape))
        nodes = poly->vertices;
    else
        for (const auto& piece : std::get<ArcChain>(shape).pieces)
            nodes.push_back(start_point(piece));

    Point avg{};
    for (const auto& p : nodes)
        avg += p;
    avg /= static_cast<double>(nodes.size());
    if (detail::polyline_contains(pts, avg) &&
        detail::boundary_distance(shape, avg) > 0.0 &&
        (!std::holds_alternative<ArcChain>(shape) ||
         star_shaped_about(shape, avg)))
        return avg;

    double lo_x = pts[0].real(), hi_x = lo_x, lo_y = pts[0].imag(), hi_y = lo_y;
    for (const auto& p : pts)
    {
        lo_x = std::min(lo_x, p.real());
        hi_x = std::max(hi_x, p.real());
        lo_y = std::min(lo_y, p.imag());
        hi_y = std::max(hi_y, p.imag());
    }
    Point best      = avg;
    double best_val = -1.0;
    constexpr int grid = 48;
    for (int i = 1; i < grid; ++i)
    {
        for (int j = 1; j < grid; ++j)
        {
            const Point p(lo_x + (hi_x - lo_x) * i / grid,
                          lo_y + (hi_y - lo_y) * j / grid);
            if (!detail::polyline_contains(pts, p))
                continue;
            double val = detail::boundary_distance(shape, p);
            if (star_shaped_about(shape, p))
                val += hi_x - lo_x + hi_y - lo_y;
            if (val > best_val)
            {
                best_val = val;
                best     = p;
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationReport
{
    Scene scene;
    /// Smallest distance between two distinct shapes (infinity for one).
    double min_gap = std::numeric_limits<double>::infinity();
};

namespace detail
{

inline void check_finite(Point p, const char* what)
{
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
        throw DegenerateShapeError(std::string(what) + ": non-finite point");
}

inline Polygon normalized(Polygon poly)
{
    auto& v = poly.vertices;
    if (v.size() < 3)
        throw DegenerateShapeError("polygon needs at least 3 vertices");
    for (const auto& p : v)
        check_finite(p, "polygon");
    if (signed_area(v) < 0.0)
        std::reverse(v.begin(), v.end());
    const auto n      = v.size();
    const double scale = shape_scale(poly);
    if (!(scale > 0.0))
        throw DegenerateShapeError("polygon collapsed to a point");
    for (std::size_t i = 0; i < n; ++i)
    {
        const Complex e0 = v[i] - v[(i + n - 1) % n];
        const Complex e1 = v[(i + 1) % n] - v[i];
        if (std::abs(e0) <= 1e-14 * scale || std::abs(e1) <= 1e-14 * scale)
            throw DegenerateShapeError("polygon has a repeated vertex");
        if (std::abs(std::arg(e1 / e0)) <= corner_tolerance ||
            std::abs(std::abs(std::arg(e1 / e0)) - pi) <= corner_tolerance)
            throw DegenerateShapeError("polygon has collinear adjacent edges");
    }
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            if (j == i + 1 || (i == 0 && j == n - 1))
                continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                throw DegenerateShapeError("polygon is self-intersecting");
        }
    }
    return poly;
}

inline ChainPiece reversed(const ChainPiece& piece)
{
    if (const auto* s = std::get_if<Segment>(&piece))
        return Segment{s->end, s->start};
    auto a = std::get<CircularArc>(piece);
    std::swap(a.theta_start, a.theta_end);
    return a;
}

inline ArcChain normalized(ArcChain chain)
{
    auto& pieces = chain.pieces;
    if (pieces.empty())
        throw DegenerateShapeError("arc chain has no pieces");
    for (const auto& piece : pieces)
    {
        if (const auto* a = std::get_if<CircularArc>(&piece))
        {
            const double sweep = std::abs(a->theta_end - a->theta_start);
            if (!(a->radius > 0.0) || !(sweep > 0.0) || sweep > two_pi + 1e-12)
                throw DegenerateShapeError("degenerate circular arc");
        }
        else
        {
            const auto& s = std::get<Segment>(piece);
            check_finite(s.start, "segment");
            check_finite(s.end, "segment");
            if (s.start == s.end)
                throw DegenerateShapeError("zero-length segment");
        }
    }
    const double scale = shape_scale(chain);
    if (!(scale > 0.0))
        throw DegenerateShapeError("arc chain collapsed to a point");
    const auto n = pieces.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        if (std::abs(end_point(pieces[i]) - start_point(pieces[(i + 1) % n])) >
            1e-9 * scale)
            throw DegenerateShapeError("arc chain pieces do not join up");
    }
    const auto poly = boundary_polyline(chain);
    if (signed_area(poly) < 0.0)
    {
        std::vector<ChainPiece> rev;
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
            rev.push_back(reversed(*it));
        pieces = std::move(rev);
    }
    // cusps make the Jordan curve degenerate
    for (std::size_t i = 0; i < n; ++i)
    {
        if (std::abs(std::abs(turning_angle(pieces, i)) - pi) <= 1e-9)
            throw DegenerateShapeError("arc chain has a cusp");
    }
    const auto pts = boundary_polyline(chain);
    const auto m   = pts.size();
    for (std::size_t i = 0; i < m; ++i)
    {
        for (std::size_t j = i + 2; j < m; ++j)
        {
            if (i == 0 && j == m - 1)
                continue;
            if (segments_intersect(pts[i], pts[(i + 1) % m], pts[j],
                                   pts[(j + 1) % m]))
                throw DegenerateShapeError("arc chain is self-intersecting");
        }
    }
    return chain;
}

inline Shape normalized(const Shape& shape)
{
    return std::visit(
        [](const auto& s) -> Shape {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Disk>)
            {
                check_finite(s.center, "disk");
                if (!(s.radius > 0.0) || !std::isfinite(s.radius))
                    throw DegenerateShapeError("disk radius must be positive");
                return s;
            }
            else if constexpr (std::is_same_v<T, Ellipse>)
            {
                check_finite(s.center, "ellipse");
                if (!(s.semi_major > 0.0) || !(s.semi_minor > 0.0) ||
                    !std::isfinite(s.semi_major) || !std::isfinite(s.semi_minor))
                    throw DegenerateShapeError(
                        "ellipse semi-axes must be positive");
                return s;
            }
            else
                return normalized(s);
        },
        shape);
}

inline double shape_gap(const Shape& a, const Shape& b)
{
    const auto* da = std::get_if<Disk>(&a);
    const auto* db = std::get_if<Disk>(&b);
    if (da && db)
        return std::abs(da->center - db->center) - da->radius - db->radius;

    const auto pa = boundary_polyline(a);
    const auto pb = boundary_polyline(b);
    if (contains(a, pb[0]) || contains(b, pa[0]))
        return -1.0;
    const double d = polyline_distance(pa, pb);
    if (d == 0.0)
        return -1.0;
    // chords lie within one sagitta of the true curves
    return d - polyline_sagitta(a) - polyline_sagitta(b);
}

} // namespace detail

///
/// Checks that every shape is a non-degenerate Jordan curve and that the
/// closures are pairwise disjoint. Polygons and chains are reoriented
/// counter-clockwise; missing labels default to E.
///
inline ValidationReport validate_scene(const Scene& scene)
{
    if (scene.shapes.empty())
        throw DegenerateShapeError("scene has no shapes");
    if (!scene.labels.empty() && scene.labels.size() != scene.shapes.size())
        throw DegenerateShapeError("scene labels do not match shapes");

    ValidationReport report;
    report.scene.labels = scene.labels;
    if (report.scene.labels.empty())
        report.scene.labels.assign(scene.shapes.size(), Label::E);
    for (const auto& s : scene.shapes)
        report.scene.shapes.push_back(detail::normalized(s));

    const auto& shapes = report.scene.shapes;
    for (std::size_t i = 0; i < shapes.size(); ++i)
    {
        for (std::size_t j = i + 1; j < shapes.size(); ++j)
        {
            const double gap = detail::shape_gap(shapes[i], shapes[j]);
            if (!(gap > 0.0))
                throw OverlapError("shapes " + std::to_string(i) + " and " +
                                   std::to_string(j) + " are not disjoint");
            report.min_gap = std::min(report.min_gap, gap);
        }
    }
    return report;
}

/// Image of the scene under z -> a z + b.
inline Scene transform(const Scene& scene, Complex a, Complex b)
{
    if (a == Complex{})
        throw ZeroScaleError("transform scale must be nonzero");
    const double mod = std::abs(a);
    const double rot = std::arg(a);
    auto map         = [&](Point z) { return a * z + b; };

    Scene out;
    out.labels = scene.labels;
    for (const auto& shape : scene.shapes)
    {
        out.shapes.push_back(std::visit(
            [&](const auto& s) -> Shape {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Disk>)
                    return Disk{map(s.center), mod * s.radius};
                else if constexpr (std::is_same_v<T, Ellipse>)
                    return Ellipse{map(s.center), mod * s.semi_major,
                                   mod * s.semi_minor, s.rotation + rot};
                else if constexpr (std::is_same_v<T, Polygon>)
                {
                    Polygon p;
                    for (const auto& v : s.vertices)
                        p.vertices.push_back(map(v));
                    return p;
                }
                else
                {
                    ArcChain c;
                    for (const auto& piece : s.pieces)
                    {
                        if (const auto* seg = std::get_if<Segment>(&piece))
                            c.pieces.emplace_back(
                                Segment{map(seg->start), map(seg->end)});
                        else
                        {
                            const auto& arc = std::get<CircularArc>(piece);
                            c.pieces.emplace_back(CircularArc{
                                map(arc.center), mod * arc.radius,
                                arc.theta_start + rot, arc.theta_end + rot});
                        }
                    }
                    return c;
                }
            },
            shape));
    }
    return out;
}

} // namespace capacity

#endif

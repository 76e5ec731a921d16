#include <gtest/gtest.h>

#include "support.hpp"

using namespace capacity;
using testing_support::Rng;

namespace
{

Polygon unit_square()
{
    return Polygon{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
}

// Stadium: two half-disks joined by segments, smooth everywhere.
ArcChain stadium()
{
    ArcChain c;
    c.pieces.push_back(Segment{{2, -1}, {4, -1}});
    c.pieces.push_back(CircularArc{{4, 0}, 1, -pi / 2, pi / 2});
    c.pieces.push_back(Segment{{4, 1}, {2, 1}});
    c.pieces.push_back(CircularArc{{2, 0}, 1, pi / 2, 3 * pi / 2});
    return c;
}

// Lens bounded by two circular arcs through +-i.
ArcChain lens()
{
    const double h = std::sqrt(2.0);
    ArcChain c;
    c.pieces.push_back(CircularArc{{-1, 0}, h, -pi / 4, pi / 4});
    c.pieces.push_back(CircularArc{{1, 0}, h, 3 * pi / 4, 5 * pi / 4});
    return c;
}

} // namespace

TEST(Geometry, PerimetersMatchClosedForms)
{
    EXPECT_NEAR(perimeter(Disk{{1, 2}, 0.75}), 2 * pi * 0.75, 1e-13);
    EXPECT_NEAR(perimeter(unit_square()), 4 * std::sqrt(2.0), 1e-13);
    // 4 a E(e), a = 2, b = 1
    EXPECT_NEAR(perimeter(Ellipse{{0, 0}, 2, 1, 0.3}), 9.688448220547675, 1e-10);
    EXPECT_NEAR(perimeter(stadium()), 4 + 2 * pi, 1e-12);
}

TEST(Geometry, SquareHasFourRightCorners)
{
    const auto cs = corners(unit_square());
    ASSERT_EQ(cs.size(), 4u);
    for (const auto& c : cs)
        EXPECT_NEAR(c.omega_angle, 1.5 * pi, 1e-12);
    EXPECT_NEAR(corner_exponent(1.5 * pi), -1.0 / 6.0, 1e-15);
}

TEST(Geometry, SmoothChainHasNoCorners)
{
    EXPECT_TRUE(corners(stadium()).empty());
    EXPECT_TRUE(corners(Disk{{0, 0}, 1}).empty());
}

TEST(Geometry, LensCornersOpenOutward)
{
    const auto cs = corners(validate_scene(Scene{{lens()}, {}}).scene.shapes[0]);
    ASSERT_EQ(cs.size(), 2u);
    // Interior angle pi/2 at each tip, so the complement sees 3pi/2.
    for (const auto& c : cs)
        EXPECT_NEAR(c.omega_angle, 1.5 * pi, 1e-12);
}

TEST(Geometry, ClockwisePolygonIsReoriented)
{
    Polygon cw{{{0, -1}, {-1, 0}, {0, 1}, {1, 0}}};
    const auto scene = validate_scene(Scene{{cw}, {}}).scene;
    const auto& v    = std::get<Polygon>(scene.shapes[0]).vertices;
    EXPECT_GT(detail::signed_area(v), 0.0);
    EXPECT_EQ(scene.labels.size(), 1u);
    EXPECT_EQ(scene.labels[0], Label::E);
}

TEST(Geometry, OverlapAndTouchingAreRejected)
{
    EXPECT_THROW(validate_scene(Scene{{Disk{{0, 0}, 1}, Disk{{1.5, 0}, 1}}, {}}),
                 OverlapError);
    EXPECT_THROW(validate_scene(Scene{{Disk{{0, 0}, 1}, Disk{{2, 0}, 1}}, {}}),
                 OverlapError);
    EXPECT_THROW(validate_scene(Scene{{Disk{{0, 0}, 1}, unit_square()}, {}}),
                 OverlapError);
    EXPECT_NO_THROW(validate_scene(Scene{{Disk{{0, 0}, 1}, Disk{{2.01, 0}, 1}}, {}}));
}

TEST(Geometry, DegenerateShapesAreRejected)
{
    EXPECT_THROW(validate_scene(Scene{{Disk{{0, 0}, 0}}, {}}), InputError);
    EXPECT_THROW(validate_scene(Scene{{Ellipse{{0, 0}, 1, -1, 0}}, {}}),
                 InputError);
    EXPECT_THROW(validate_scene(Scene{{Polygon{{{0, 0}, {1, 0}}}}, {}}),
                 DegenerateShapeError);
    EXPECT_THROW(validate_scene(Scene{{Polygon{{{0, 0}, {1, 0}, {2, 0}}}}, {}}),
                 DegenerateShapeError);
    // bow tie
    EXPECT_THROW(
        validate_scene(Scene{{Polygon{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}}, {}}),
        DegenerateShapeError);
    EXPECT_THROW(validate_scene(Scene{}), DegenerateShapeError);
    EXPECT_THROW(validate_scene(Scene{{Disk{{0, 0}, 1}}, {Label::E, Label::F}}),
                 DegenerateShapeError);
}

TEST(Geometry, OpenChainIsRejected)
{
    ArcChain open;
    open.pieces.push_back(Segment{{0, 0}, {1, 0}});
    open.pieces.push_back(Segment{{1, 0}, {1, 1}});
    EXPECT_THROW(validate_scene(Scene{{open}, {}}), DegenerateShapeError);
}

TEST(Geometry, ContainsAndAnchor)
{
    EXPECT_TRUE(contains(unit_square(), {0.2, 0.2}));
    EXPECT_FALSE(contains(unit_square(), {0.8, 0.8}));
    EXPECT_TRUE(contains(Ellipse{{0, 0}, 2, 1, pi / 2}, {0, 1.9}));
    EXPECT_FALSE(contains(Ellipse{{0, 0}, 2, 1, pi / 2}, {1.9, 0}));
    const Point a = interior_anchor(stadium());
    EXPECT_TRUE(contains(stadium(), a));
}

TEST(Geometry, ArcsArePositivelyOriented)
{
    for (const Shape& s : {Shape{Disk{{0, 0}, 1}}, Shape{Ellipse{{1, 1}, 3, 1, 0.4}},
                           Shape{unit_square()}, Shape{stadium()}})
    {
        const Shape n = validate_scene(Scene{{s}, {}}).scene.shapes[0];
        // winding number about an interior point via sampled arguments
        const Point c = interior_anchor(n);
        double turn   = 0.0;
        for (const auto& arc : arcs(n))
        {
            constexpr int m = 400;
            for (int i = 0; i < m; ++i)
                turn += std::arg((arc.point((i + 1.0) / m) - c) /
                                 (arc.point(static_cast<double>(i) / m) - c));
        }
        EXPECT_NEAR(turn, two_pi, 1e-9);
    }
}

// Property: samples taken from either end reproduce the endpoint offset
// exactly enough that anchor + offset equals the sampled point.
TEST(GeometryProperty, SampleOffsetsAreConsistent)
{
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial)
    {
        const Point c    = rng.point(3.0);
        const double t0  = rng.uniform(-pi, pi);
        const double t1  = t0 + rng.uniform(0.1, 3.0);
        std::vector<ParametricArc> cases{
            ParametricArc::line(rng.point(3.0), rng.point(3.0)),
            ParametricArc::circle(c, rng.uniform(0.5, 2.0), t0, t1),
            ParametricArc::ellipse(c, rng.uniform(1.0, 2.0), rng.uniform(0.3, 1.0),
                                   rng.uniform(0.0, pi), t0, t1)};
        for (const auto& arc : cases)
        {
            const double tau = std::pow(10.0, rng.uniform(-12.0, -0.5));
            for (bool from_end : {false, true})
            {
                const auto s = arc.sample(tau, from_end);
                EXPECT_NEAR(std::abs(s.anchor + s.offset - s.z), 0.0,
                            1e-14 * (1.0 + std::abs(s.z)));
                EXPECT_NEAR(std::abs(s.z - arc.point(s.t)), 0.0, 1e-12);
                EXPECT_NEAR(std::abs(s.anchor - arc.point(from_end ? 1.0 : 0.0)),
                            0.0, 1e-13);
            }
        }
    }
}

// Property: z -> a z + b maps perimeters by |a| and preserves validity.
TEST(GeometryProperty, SimilarityTransformScalesPerimeter)
{
    Rng rng(102);
    const Scene far_stadium = transform(Scene{{stadium()}, {}}, 1.0, Complex(1, -4));
    const Scene shifted{{Disk{{-2, 0}, 0.7}, unit_square(),
                         Ellipse{{4, 1}, 1.2, 0.5, 0.3}, far_stadium.shapes[0]},
                        {}};
    for (int trial = 0; trial < 25; ++trial)
    {
        const Complex a = std::polar(rng.uniform(0.2, 5.0), rng.uniform(-pi, pi));
        const Complex b = rng.point(10.0);
        const auto mapped = validate_scene(transform(shifted, a, b)).scene;
        const auto orig   = validate_scene(shifted).scene;
        for (std::size_t i = 0; i < orig.shapes.size(); ++i)
            EXPECT_NEAR(perimeter(mapped.shapes[i]),
                        std::abs(a) * perimeter(orig.shapes[i]),
                        1e-10 * std::abs(a) * perimeter(orig.shapes[i]));
    }
    EXPECT_THROW(transform(shifted, 0.0, 1.0), ZeroScaleError);
}

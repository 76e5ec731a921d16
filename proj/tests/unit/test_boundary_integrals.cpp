#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace capacity;
using testing_support::Rng;

namespace
{

Complex quadrature_pair(const BasisFunction& a, const BasisFunction& b,
                        const Disk& d, double tol)
{
    QuadratureSettings s;
    s.abs_tol = tol;
    Complex total{};
    for (const auto& arc : arcs(d))
        total += quad_arc([&](double t) {
            const Point z = arc.point(t);
            return eval(a, z) * std::conj(eval(b, z));
        },
                          arc, s);
    return total;
}

Complex quadrature_mean(const BasisFunction& a, const Disk& d, double tol)
{
    QuadratureSettings s;
    s.abs_tol = tol;
    Complex total{};
    for (const auto& arc : arcs(d))
        total += quad_arc([&](double t) { return eval(a, arc.point(t)); }, arc, s);
    return total;
}

BasisFunction random_rational(Rng& rng, const Disk& d)
{
    const Point p = d.center + std::polar(rng.uniform(0.0, 0.7 * d.radius),
                                          rng.uniform(-pi, pi));
    if (rng.integer(0, 1) == 0)
        return SimplePole{p};
    return PowerPole{p, rng.integer(1, 3)};
}

} // namespace

TEST(Quadrature, SimpsonIsExactForCubics)
{
    const auto arc = ParametricArc::line({0, 0}, {2, 0});
    QuadratureSettings s;
    const Complex v = quad_arc([&](double t) {
        const double x = arc.point(t).real();
        return Complex(x * x * x, x);
    },
                               arc, s);
    EXPECT_NEAR(v.real(), 4.0, 1e-12);
    EXPECT_NEAR(v.imag(), 2.0, 1e-12);
}

TEST(Quadrature, DepthLimitIsReported)
{
    const auto arc = ParametricArc::circle({0, 0}, 1, 0, two_pi);
    QuadratureSettings s;
    s.abs_tol   = 1e-14;
    s.max_depth = 2;
    // nearly singular integrand: pole very close to the contour
    EXPECT_THROW(quad_arc([&](double t) { return 1.0 / (arc.point(t) - 0.999999); },
                          arc, s),
                 MaxDepthError);
    s.abs_tol = 0.0;
    EXPECT_THROW(validate(s), InputError);
}

TEST(BoundaryIntegrals, ClosedFormEntriesForTwoDisks)
{
    // one pole per disk at the centers of D(+-2, 1)
    const Scene sc{{Disk{{-2, 0}, 1}, Disk{{2, 0}, 1}}, {}};
    const std::vector<BasisFunction> basis{SimplePole{{-2, 0}}, SimplePole{{2, 0}}};
    const auto g = assemble_gram(sc, basis, {});
    EXPECT_NEAR(g.c0, 2.0, 1e-15);
    // (1/2pi) oint_{|z+2|=1} |z+2|^-2 + (1/2pi) oint_{|z-2|=1} |z+2|^-2
    EXPECT_NEAR(g.H(0, 0).real(), 1.0 + 1.0 / 15.0, 1e-14);
    EXPECT_NEAR(std::abs(g.H(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(g.H(1, 1).real(), 16.0 / 15.0, 1e-14);
    // 1/(z + 2) averages 1/4 over |z - 2| = 1 and 0 over its own circle
    EXPECT_NEAR(std::abs(g.u(0) - 0.25), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g.u(1) + 0.25), 0.0, 1e-15);
    EXPECT_EQ(g.H(0, 0).imag(), 0.0);
}

TEST(BoundaryIntegrals, PoleOnContourIsRejected)
{
    EXPECT_THROW(circle_pair_integral(SimplePole{{1, 0}}, SimplePole{{0, 0}},
                                      Disk{{0, 0}, 1}),
                 PoleOnContourError);
    EXPECT_THROW(circle_mean_integral(CornerAdapted{{0, 0}, {1, 0}, 0.1, 1},
                                      Disk{{0, 0}, 1}),
                 NonRationalBasisError);
}

// Property: residue formulas agree with adaptive quadrature.
TEST(BoundaryIntegralsProperty, ResiduesMatchQuadrature)
{
    Rng rng(301);
    for (int trial = 0; trial < 60; ++trial)
    {
        const Disk d{rng.point(3.0), rng.uniform(0.3, 2.0)};
        const auto a = random_rational(rng, d);
        const auto b = random_rational(rng, d);
        const Complex exact = circle_pair_integral(a, b, d);
        const Complex quad  = quadrature_pair(a, b, d, 1e-12);
        EXPECT_NEAR(std::abs(exact - quad), 0.0, 1e-9 * std::max(1.0, std::abs(exact)))
            << "trial " << trial;
        const Complex m_exact = circle_mean_integral(a, d);
        const Complex m_quad  = quadrature_mean(a, d, 1e-12);
        EXPECT_NEAR(std::abs(m_exact - m_quad), 0.0,
                    1e-9 * std::max(1.0, std::abs(m_exact)));
    }
}

// Property: Gram matrices are exactly Hermitian, positive definite, and the
// complex solve agrees with the equivalent real 2n x 2n symmetric system.
TEST(BoundaryIntegralsProperty, GramIsHermitianPositiveDefinite)
{
    Rng rng(302);
    for (int trial = 0; trial < 40; ++trial)
    {
        Scene sc = testing_support::random_disks(rng, rng.integer(1, 3));
        if (trial % 2 == 1)
            sc.shapes.emplace_back(Ellipse{{0, 12}, rng.uniform(1.0, 2.0),
                                           rng.uniform(0.3, 0.9),
                                           rng.uniform(0.0, pi)});
        const auto v = validate_scene(sc).scene;
        const Schedule sch{trial % 3 == 0 ? ShapeSchedule{Powers{rng.integer(1, 3), false}}
                                          : ShapeSchedule{Rings{rng.integer(0, 2)}},
                           {}};
        const auto basis = build_basis(v, sch);
        const auto g     = assemble_gram(v, basis, {});
        const auto n     = g.H.rows();
        ASSERT_EQ(n, static_cast<Eigen::Index>(basis.size()));
        EXPECT_EQ((g.H - g.H.adjoint()).norm(), 0.0);
        for (Eigen::Index i = 0; i < n; ++i)
            EXPECT_EQ(g.H(i, i).imag(), 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.H);
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << "trial " << trial;

        // [Re -Im; Im Re] [x; y] = [Re b; Im b]
        Eigen::MatrixXd R(2 * n, 2 * n);
        R << g.H.real(), -g.H.imag(), g.H.imag(), g.H.real();
        Eigen::VectorXd rhs(2 * n);
        rhs << g.u.real(), g.u.imag();
        const Eigen::VectorXd xr = R.ldlt().solve(rhs);
        const double real_form   = rhs.dot(xr);
        const HermitianSolver hs(g.H);
        const double complex_form = hs.quadratic_form(g.u).first;
        EXPECT_NEAR(real_form, complex_form, 1e-12 * std::max(1.0, complex_form));
    }
}

TEST(BoundaryIntegrals, AssemblyIsIndependentOfThreads)
{
    const Scene sc{{Disk{{-2, 0}, 1}, Ellipse{{3, 0}, 1.5, 0.5, 0.4},
                    Polygon{{{0, 4}, {1, 5}, {-1, 5}}}},
                   {}};
    const auto v     = validate_scene(sc).scene;
    const auto basis = build_basis(v, Schedule{Powers{3, false}, {}});
    const auto g1    = assemble_gram(v, basis, {}, 1);
    const auto g4    = assemble_gram(v, basis, {}, 4);
    EXPECT_EQ((g1.H - g4.H).norm(), 0.0);
    EXPECT_EQ((g1.u - g4.u).norm(), 0.0);
}

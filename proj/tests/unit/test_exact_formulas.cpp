#include <gtest/gtest.h>

#include "support.hpp"

using namespace capacity;
using testing_support::Rng;

namespace
{

struct ThetaRow
{
    double q, t2, t3, t4;
};

// mpmath jtheta(k, 0, q) at 30 digits
const ThetaRow theta_table[] = {
    {0.05, 0.9481059778028966244, 1.10001250000390625, 0.90001249999609375},
    {0.3, 1.6144603411944334908, 1.616239374609513658, 0.41616064260917474258},
    {0.7, 2.9678273689173760623, 2.9678273689287804683, 0.0058764107103488591579},
    {0.95, 7.8260864281413179507, 7.8260864281413179507, 2.0108076374556688396e-20},
};

} // namespace

TEST(ExactFormulas, ThetaAgainstReferenceTable)
{
    for (const auto& row : theta_table)
    {
        for (auto form : {ThetaForm::series, ThetaForm::product})
        {
            EXPECT_NEAR(theta2(row.q, form), row.t2, 2e-15 * row.t2);
            EXPECT_NEAR(theta3(row.q, form), row.t3, 2e-15 * row.t3);
        }
        // The alternating series for theta4 is accurate in absolute terms
        // only; the product keeps relative accuracy.
        EXPECT_NEAR(theta4(row.q), row.t4, 4e-16 * row.t3);
        EXPECT_NEAR(theta4(row.q, ThetaForm::product), row.t4, 1e-13 * row.t4);
    }
    EXPECT_EQ(theta3(1e-20), 1.0);
    EXPECT_NEAR(theta3(1e-20) - 1.0, 0.0, 1e-30);
    EXPECT_NEAR(theta2(std::exp(-pi)), theta4(std::exp(-pi)), 1e-15);
    // past the modular threshold
    EXPECT_NEAR(theta2(0.995), 25.034904076335754141, 1e-13);
}

TEST(ExactFormulas, TwoDiskValues)
{
    EXPECT_NEAR(two_disk_capacity(2, 1), 1.8755950190971197289, 3e-16);
    EXPECT_NEAR(two_disk_capacity(1.5, 1), 1.7817340439442365201, 1e-15);
    EXPECT_NEAR(two_disk_capacity(10, 0.1), 0.19999500000000313634, 1e-16);
    EXPECT_NEAR(two_disk_capacity(1.001, 1), 1.5713198906722183644, 1e-14);
    EXPECT_NEAR(murai_capacity(2, 1), two_disk_capacity(2, 1), 1e-9);
}

TEST(ExactFormulas, SquareAndGaussConstant)
{
    EXPECT_NEAR(square_capacity(1.0), 0.8346268416740732, 1e-16);
    // the square's capacity equals Gauss's constant 1 / M(1, sqrt 2)
    EXPECT_NEAR(square_capacity(1.0), 1.0 / agm(1.0, std::sqrt(2.0)), 1e-15);
    EXPECT_NEAR(square_capacity(2.5), 2.5 * square_capacity(1.0), 1e-15);
    EXPECT_NEAR(elliptic_k(std::sqrt(0.5)), 1.8540746773013719184, 1e-15);
    EXPECT_NEAR(elliptic_k(0.0), pi / 2, 1e-15);
}

TEST(ExactFormulas, DomainErrors)
{
    EXPECT_THROW(two_disk_capacity(1, 2), DomainError);
    EXPECT_THROW(two_disk_capacity(1, 1), DomainError);
    EXPECT_THROW(two_disk_capacity(1, 0), DomainError);
    EXPECT_THROW(theta2(1.0), DomainError);
    EXPECT_THROW(theta3(0.0), DomainError);
    EXPECT_THROW(square_capacity(-1), DomainError);
    EXPECT_THROW(elliptic_k(1.0), DomainError);
    EXPECT_THROW(agm(0.0, 1.0), DomainError);
    EXPECT_THROW(log_deriv_u(0.5, 0), DomainError);
    EXPECT_THROW(log_deriv_u_bound(0.5, 1), DomainError);
}

TEST(ExactFormulas, ModularIdentity)
{
    for (int i = 0; i <= 400; ++i)
    {
        const double x = 0.5 + 19.5 * i / 400.0;
        EXPECT_NEAR(theta2(std::exp(-pi / x)), std::sqrt(x) * theta4(std::exp(-pi * x)),
                    1e-12);
    }
}

TEST(ExactFormulas, LogDerivativeSignChange)
{
    for (int i = 1; i <= 1000; ++i)
    {
        const double q = 0.8 * i / 1000.0;
        EXPECT_LT(log_deriv_u(q), 0.0) << "q=" << q;
        EXPECT_LT(log_deriv_u_bound(q, 10), 0.0) << "q=" << q;
    }
    EXPECT_LT(log_deriv_u_bound(0.81121, 10), 0.0);
    EXPECT_GT(log_deriv_u_bound(0.8113, 10), 0.0);
}

// Property: series and product forms agree, and the Jacobi identity
// theta3^4 = theta2^4 + theta4^4 holds.
TEST(ExactFormulasProperty, ThetaFormsAndJacobiIdentity)
{
    Rng rng(501);
    for (int trial = 0; trial < 60; ++trial)
    {
        const double q = std::exp(rng.uniform(std::log(1e-6), std::log(0.99)));
        const double a = theta2(q), b = theta3(q), c = theta4(q);
        EXPECT_NEAR(theta2(q, ThetaForm::product), a, 1e-13);
        EXPECT_NEAR(theta3(q, ThetaForm::product), b, 1e-13);
        EXPECT_NEAR(theta4(q, ThetaForm::product), c, 1e-13);
        EXPECT_NEAR(std::pow(b, 4), std::pow(a, 4) + std::pow(c, 4), 1e-12 * std::pow(b, 4));
    }
}

// Property: the ratio f(q) equals gamma / (2r), Murai's form agrees, and
// the two-disk capacity is homogeneous of degree one.
TEST(ExactFormulasProperty, RatioAndMuraiForms)
{
    Rng rng(502);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double r = rng.uniform(0.05, 2.0);
        const double c = r * rng.uniform(1.01, 20.0);
        const double q = nome_from_geometry(c, r);
        EXPECT_NEAR(c / r, 0.5 * (1 / std::sqrt(q) + std::sqrt(q)), 1e-12 * c / r);
        const double g = two_disk_capacity(c, r);
        EXPECT_NEAR(ratio_f(q), g / (2 * r), 1e-13);
        EXPECT_NEAR(ratio_f_theta(q), ratio_f(q), 1e-13);
        EXPECT_NEAR(murai_capacity(c, r), g, 1e-12 * g);
        const double s = rng.uniform(0.1, 10.0);
        EXPECT_NEAR(two_disk_capacity(s * c, s * r), s * g, 1e-13 * s * g);
        // capacity lies between one disk and the sum of both
        EXPECT_GT(g, r);
        EXPECT_LT(g, 2 * r);
    }
}

// Property: u(q) is the scaled logarithmic derivative of f and the bound
// dominates it.
TEST(ExactFormulasProperty, LogDerivativeMatchesFiniteDifference)
{
    Rng rng(503);
    for (int trial = 0; trial < 40; ++trial)
    {
        const double q  = rng.uniform(0.01, 0.95);
        const double h  = 1e-5 * q;
        const double fd = q * (std::log(ratio_f(q + h)) - std::log(ratio_f(q - h))) / (2 * h);
        EXPECT_NEAR(log_deriv_u(q), fd, 1e-8 * std::max(1.0, std::abs(fd)));
        for (int k : {2, 5, 10})
            EXPECT_GE(log_deriv_u_bound(q, k), log_deriv_u(q) - 1e-12);
    }
}

#include <gtest/gtest.h>

#include <sstream>

#include "capacity/io.hpp"
#include "support.hpp"

using namespace capacity;
using testing_support::Rng;

namespace
{

const std::vector<Point> pair_Z{{2, 0}, {-2, 0}};

SweepRecord synthetic(double r, double lo, double hi)
{
    SweepRecord rec;
    rec.r          = r;
    rec.ratio_low  = lo;
    rec.ratio_high = hi;
    return rec;
}

RatioSettings rings(int layers)
{
    RatioSettings s;
    s.schedule = Schedule{Rings{layers}, {}};
    return s;
}

} // namespace

TEST(SubadditivityLab, RatioBracketForUnitDisks)
{
    const auto rec  = ratio_bounds({pair_Z, 1.0, 1}, rings(4));
    const double ex = ratio_f(nome_from_geometry(2.0, 1.0));
    EXPECT_NEAR(ex, 1.8755950190971197289 / 2, 1e-15);
    EXPECT_LE(rec.ratio_low, ex);
    EXPECT_GE(rec.ratio_high, ex);
    EXPECT_TRUE(rec.subadditive());
    EXPECT_NEAR(rec.e_bounds.lower, 1.0, 1e-15);
    EXPECT_THROW(ratio_bounds({pair_Z, 2.0, 1}, rings(0)), OverlapError);
    EXPECT_THROW(ratio_bounds({pair_Z, 1.0, std::nullopt}, rings(0)), SplitError);
}

TEST(SubadditivityLab, RatioTendsToOneForSmallRadii)
{
    double prev = 0.0;
    for (double r : {0.4, 0.1, 0.02, 0.005})
    {
        const auto rec = ratio_bounds({pair_Z, r, 1}, rings(2));
        EXPECT_GT(rec.ratio_low, prev);
        EXPECT_LT(rec.ratio_high, 1.0);
        prev = rec.ratio_low;
    }
    EXPECT_GT(prev, 1.0 - 1e-5);
}

TEST(SubadditivityLab, TwoDiskSweepFollowsThetaCurve)
{
    const auto grid = radius_grid(pair_Z, 50, {}, 1.9);
    ASSERT_EQ(grid.size(), 50u);
    EXPECT_NEAR(grid.back(), 1.9, 1e-15);
    const auto recs = sweep(pair_Z, 1, grid, rings(4), 2);
    const auto v    = monotonicity_verdict(recs);
    EXPECT_EQ(v.decreases, 49);
    EXPECT_EQ(v.increases + v.undecided + v.failed, 0);
    EXPECT_LE(gap_report(recs), 1e-6);
    for (const auto& rec : recs)
    {
        const double ex = ratio_f(nome_from_geometry(2.0, rec.r));
        EXPECT_LE(rec.ratio_low, ex) << "r=" << rec.r;
        EXPECT_GE(rec.ratio_high, ex) << "r=" << rec.r;
        EXPECT_NEAR(0.5 * (rec.ratio_low + rec.ratio_high), ex, 1e-6);
        EXPECT_TRUE(rec.subadditive());
    }
}

TEST(SubadditivityLab, CollinearSweepDecreases)
{
    std::vector<Point> Z;
    for (int k = 0; k < 10; ++k)
        Z.emplace_back(k, 0);
    const auto recs = sweep(Z, 5, radius_grid(Z, 12), rings(2), 4);
    const auto v    = monotonicity_verdict(recs);
    EXPECT_EQ(v.decreases, 11);
    for (const auto& rec : recs)
        EXPECT_TRUE(rec.subadditive());
}

TEST(SubadditivityLab, SingleRadiusGivesOneRecord)
{
    const auto recs = sweep(pair_Z, 1, {0.7}, rings(0));
    ASSERT_EQ(recs.size(), 1u);
    const auto v = monotonicity_verdict(recs);
    EXPECT_TRUE(v.pairs.empty());
    EXPECT_EQ(gap_report(recs), recs[0].ratio_high - recs[0].ratio_low);
}

TEST(SubadditivityLab, VerdictsFromBracketsOnly)
{
    // overlapping brackets: undecided even though midpoints decrease
    auto v = monotonicity_verdict({synthetic(0.1, 0.95, 0.99), synthetic(0.2, 0.94, 0.98)});
    EXPECT_EQ(v.pairs[0], PairVerdict::undecided);
    EXPECT_FALSE(v.violation());
    v = monotonicity_verdict({synthetic(0.1, 0.90, 0.91), synthetic(0.2, 0.92, 0.93)});
    EXPECT_EQ(v.pairs[0], PairVerdict::certified_increase);
    EXPECT_TRUE(v.violation());
    v = monotonicity_verdict({synthetic(0.1, 0.92, 0.93), synthetic(0.2, 0.90, 0.91),
                              synthetic(0.3, 0.95, 1.01)});
    EXPECT_EQ(v.pairs[0], PairVerdict::certified_decrease);
    EXPECT_EQ(v.pairs[1], PairVerdict::certified_increase);
    EXPECT_EQ(v.subadditive, (std::vector<bool>{true, true, false}));
    EXPECT_STREQ(to_string(PairVerdict::undecided), "UNDECIDED");
    EXPECT_STREQ(to_string(PairVerdict::certified_decrease), "CERTIFIED_DECREASE");
    EXPECT_STREQ(to_string(PairVerdict::certified_increase), "CERTIFIED_INCREASE");
}

TEST(SubadditivityLab, GapReport)
{
    EXPECT_NEAR(gap_report({synthetic(0.1, 0.9, 0.95), synthetic(0.2, 0.8, 0.81)}), 0.05,
                1e-16);
    EXPECT_THROW(gap_report({}), PreconditionError);
    const auto grid   = radius_grid(pair_Z, 5, {}, 1.5);
    const double fine = gap_report(sweep(pair_Z, 1, grid, rings(4)));
    const double poor = gap_report(sweep(pair_Z, 1, grid, rings(0)));
    EXPECT_GT(poor, fine);
}

TEST(SubadditivityLab, RadiusGridValidation)
{
    const auto g = radius_grid(pair_Z, 4);
    EXPECT_NEAR(g.back(), 0.999 * 2.0, 1e-15);
    EXPECT_NEAR(g.front(), 0.999 * 0.5, 1e-15);
    const auto h = radius_grid(pair_Z, 3, 0.5, 1.5);
    EXPECT_EQ(h, (std::vector<double>{0.5, 1.0, 1.5}));
    EXPECT_THROW(radius_grid(pair_Z, 10, {}, 2.0), OverlapError);
    EXPECT_THROW(radius_grid(pair_Z, 0), DomainError);
    EXPECT_THROW(radius_grid(pair_Z, 3, 1.8, 1.5), DomainError);
    EXPECT_THROW(radius_grid({{0, 0}}, 3), DomainError);
    EXPECT_THROW(sweep(pair_Z, 1, {0.5, 0.4}, rings(0)), DomainError);
    EXPECT_THROW(sweep(pair_Z, 1, {0.5, 2.5}, rings(0)), OverlapError);
}

TEST(SubadditivityLab, SweepIsIndependentOfThreads)
{
    const auto Z    = random_centers(5, 7, 3.0, 1.0);
    const auto grid = radius_grid(Z, 6);
    const auto a    = sweep(Z, 2, grid, rings(1), 1);
    const auto b    = sweep(Z, 2, grid, rings(1), 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        EXPECT_EQ(a[i].r, b[i].r);
        EXPECT_EQ(a[i].ratio_low, b[i].ratio_low);
        EXPECT_EQ(a[i].ratio_high, b[i].ratio_high);
    }
}

TEST(SubadditivityLab, FailedRadiusIsRecorded)
{
    const auto recs = sweep(pair_Z, 1, {0.5, 1.0}, rings(9));
    ASSERT_EQ(recs.size(), 2u);
    for (const auto& rec : recs)
    {
        EXPECT_FALSE(rec.ok());
        EXPECT_FALSE(rec.error.empty());
        EXPECT_TRUE(std::isnan(rec.ratio_low));
    }
    const auto v = monotonicity_verdict(recs);
    EXPECT_EQ(v.failed, 2);
    EXPECT_EQ(v.undecided, 1);
    EXPECT_THROW(gap_report(recs), PreconditionError);
}

TEST(SubadditivityLab, AsymptoticSlopeForTwoDisks)
{
    const auto rep = asymptotic_check(pair_Z, 1, rings(4));
    EXPECT_NEAR(rep.predicted, 1.0 / 16.0, 1e-16);
    EXPECT_LT(rep.relative_deviation, 0.05) << "fitted " << rep.fitted;
    ASSERT_EQ(rep.radii.size(), 6u);
    // the same fit on the exact ratio curve
    std::vector<double> exact;
    for (double r : rep.radii)
        exact.push_back((1.0 - ratio_f(nome_from_geometry(2.0, r))) / (r * r));
    const double c = detail::fit_intercept(rep.radii, exact);
    EXPECT_LT(std::abs(c - 1.0 / 16.0), 0.05 / 16.0);
    EXPECT_NEAR(rep.fitted, c, 1e-4);
}

// Property: for random four-point configurations the fitted slope is close
// to delta / n, and rescaling the centers rescales it by 1 / s^2.
TEST(SubadditivityLabProperty, AsymptoticSlopeRandomConfigurations)
{
    Rng rng(701);
    for (int trial = 0; trial < 12; ++trial)
    {
        const auto Z   = testing_support::separated_points(rng, 4, 3.0, 1.0);
        const auto rep = asymptotic_check(Z, 2, rings(3));
        EXPECT_LT(rep.relative_deviation, 0.10)
            << "trial " << trial << " fitted " << rep.fitted << " predicted " << rep.predicted;

        const double s = rng.uniform(0.5, 2.0);
        std::vector<Point> sZ;
        for (const auto& z : Z)
            sZ.push_back(s * z);
        const auto scaled = asymptotic_check(sZ, 2, rings(3));
        EXPECT_NEAR(scaled.fitted * s * s, rep.fitted, 1e-3 * std::abs(rep.fitted));
    }
}

// Property: the certified bracket contains the theta ratio for random
// two-disk geometries.
TEST(SubadditivityLabProperty, BracketContainsExactRatio)
{
    Rng rng(702);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double c = rng.uniform(0.5, 4.0);
        const double r = c * rng.uniform(0.05, 0.95);
        const Complex dir = std::polar(1.0, rng.uniform(-pi, pi));
        const Point shift = rng.point(5.0);
        const auto rec = ratio_bounds({{shift + c * dir, shift - c * dir}, r, 1}, rings(3));
        const double ex = ratio_f(nome_from_geometry(c, r));
        EXPECT_LE(rec.ratio_low, ex) << "trial " << trial;
        EXPECT_GE(rec.ratio_high, ex) << "trial " << trial;
    }
}

// Property: refining the schedule never flips a certified verdict.
TEST(SubadditivityLabProperty, RefinementKeepsCertifiedVerdicts)
{
    Rng rng(703);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto Z    = testing_support::separated_points(rng, 4, 3.0, 1.2);
        const auto grid = radius_grid(Z, 8);
        const auto coarse = monotonicity_verdict(sweep(Z, 2, grid, rings(0), 4));
        const auto fine   = monotonicity_verdict(sweep(Z, 2, grid, rings(2), 4));
        for (std::size_t i = 0; i < coarse.pairs.size(); ++i)
            if (coarse.pairs[i] != PairVerdict::undecided)
            {
                EXPECT_EQ(fine.pairs[i], coarse.pairs[i]) << "trial " << trial << " pair " << i;
            }
        EXPECT_GE(fine.decreases, coarse.decreases);
    }
}

TEST(SubadditivityLab, CsvRoundTrip)
{
    auto recs = sweep(pair_Z, 1, {0.3, 0.9, 1.5}, rings(2));
    recs.push_back(synthetic(1.7, 0, 0));
    recs.back().error = "failed";
    std::stringstream ss;
    write_sweep_csv(ss, recs);
    const auto rows = read_sweep_csv(ss);
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 0; i < 3; ++i)
    {
        EXPECT_EQ(rows[i][0], recs[i].r);
        EXPECT_EQ(rows[i][1], recs[i].ratio_low);
        EXPECT_EQ(rows[i][2], recs[i].ratio_high);
        EXPECT_EQ(rows[i][3], recs[i].ef_bounds.lower);
        EXPECT_EQ(rows[i][8], recs[i].f_bounds.upper);
        EXPECT_EQ(rows[i][9], recs[i].ef_bounds.n_basis);
    }
    EXPECT_EQ(rows[3][0], 1.7);
    EXPECT_TRUE(std::isnan(rows[3][1]));

    std::stringstream bad("r,ratio_low\n1,2\n");
    EXPECT_THROW(read_sweep_csv(bad), ConfigError);
}

TEST(SubadditivityLab, RandomCentersAreSeededAndSpaced)
{
    const auto a = random_centers(18, 18, 4.0, 1.0);
    const auto b = random_centers(18, 18, 4.0, 1.0);
    const auto c = random_centers(18, 19, 4.0, 1.0);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_GE(detail::min_distance(a), 1.0);
    for (const auto& z : a)
    {
        EXPECT_LE(std::abs(z.real()), 4.0);
        EXPECT_LE(std::abs(z.imag()), 4.0);
    }
    EXPECT_THROW(random_centers(50, 1, 1.0, 1.0), DomainError);
    EXPECT_THROW(random_centers(0, 1, 1.0, 1.0), DomainError);
}

TEST(SubadditivityLab, MixedRadiusSceneSweep)
{
    // fixed disks keep radius 0.49; the last two grow
    Scene sc;
    for (int k = 0; k < 4; ++k)
    {
        sc.shapes.emplace_back(Disk{{static_cast<double>(k), 0}, 0.49});
        sc.labels.push_back(k < 2 ? Label::E : Label::F);
    }
    sc.shapes.emplace_back(Disk{{6, 0}, 0.1});
    sc.labels.push_back(Label::E);
    sc.shapes.emplace_back(Disk{{7, 0}, 0.1});
    sc.labels.push_back(Label::F);
    const std::vector<bool> grow{false, false, false, false, true, true};
    const auto recs = sweep_scene(sc, grow, {0.1, 0.2, 0.3, 0.4}, rings(1), 2);
    ASSERT_EQ(recs.size(), 4u);
    for (const auto& rec : recs)
    {
        ASSERT_TRUE(rec.ok()) << rec.error;
        EXPECT_LE(rec.ratio_low, rec.ratio_high);
        EXPECT_TRUE(rec.subadditive());
    }
    EXPECT_THROW(sweep_scene(sc, grow, {0.1, 0.6}, rings(1)), OverlapError);
    EXPECT_THROW(sweep_scene(sc, {true}, {0.1}, rings(1)), ConfigError);
}

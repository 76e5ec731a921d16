#ifndef CAPACITY_TESTS_SUPPORT_HPP
#define CAPACITY_TESTS_SUPPORT_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "capacity/capacity.hpp"

namespace testing_support
{

using capacity::Point;

/// Fixed-seed engine so every property case is reproducible.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    int integer(int lo, int hi)
    {
        return std::uniform_int_distribution<int>(lo, hi)(engine_);
    }

    Point point(double spread)
    {
        return {uniform(-spread, spread), uniform(-spread, spread)};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// n centers in [-spread, spread]^2, pairwise at least min_distance apart.
inline std::vector<Point> separated_points(Rng& rng, int n, double spread,
                                           double min_distance)
{
    std::vector<Point> out;
    while (static_cast<int>(out.size()) < n)
    {
        const Point z = rng.point(spread);
        bool ok       = true;
        for (const auto& w : out)
            ok = ok && std::abs(z - w) >= min_distance;
        if (ok)
            out.push_back(z);
    }
    return out;
}

/// A few disjoint disks with random radii.
inline capacity::Scene random_disks(Rng& rng, int n)
{
    const auto centers = separated_points(rng, n, 4.0, 2.0);
    capacity::Scene out;
    for (const auto& c : centers)
        out.shapes.emplace_back(capacity::Disk{c, rng.uniform(0.2, 0.8)});
    return out;
}

} // namespace testing_support

#endif

#include "vamk/distance_transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace vamk;

namespace {

std::vector<double> bruteForce(const std::vector<std::uint8_t> &f, int nx, int ny, double hx, double hy, bool outside)
{
    std::vector<double> out(f.size(), std::numeric_limits<double>::infinity());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int q = -1; q <= ny; ++q)
                for (int p = -1; p <= nx; ++p) {
                    const bool inside = p >= 0 && q >= 0 && p < nx && q < ny;
                    const bool feat = inside ? f[std::size_t(q) * nx + p] != 0 : outside;
                    if (!feat) continue;
                    const double dx = (i - p) * hx, dy = (j - q) * hy;
                    best = std::min(best, dx * dx + dy * dy);
                }
            out[std::size_t(j) * nx + i] = best;
        }
    return out;
}

} // namespace

TEST(DistanceTransform, MatchesBruteForce)
{
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
        const int nx = 3 + int(rng() % 20), ny = 3 + int(rng() % 20);
        const double hx = 0.1 + (rng() % 100) / 50.0, hy = 0.1 + (rng() % 100) / 50.0;
        const double density = (rng() % 100) / 400.0;
        std::bernoulli_distribution feat(density);
        std::vector<std::uint8_t> f(std::size_t(nx) * ny);
        for (auto &v : f) v = feat(rng);
        for (bool outside : {true, false}) {
            const auto got = squaredDistanceTransform(f, nx, ny, hx, hy, outside);
            const auto ref = bruteForce(f, nx, ny, hx, hy, outside);
            for (std::size_t k = 0; k < f.size(); ++k) {
                if (std::isinf(ref[k])) EXPECT_TRUE(std::isinf(got[k]));
                else EXPECT_NEAR(got[k], ref[k], 1e-9 * (1 + ref[k]));
            }
        }
    }
}

TEST(DistanceTransform, EmptyRasterWithBorderFeatures)
{
    std::vector<std::uint8_t> f(5 * 5, 0);
    const auto d = squaredDistanceTransform(f, 5, 5, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(d[2 * 5 + 2], 9.0);
    EXPECT_DOUBLE_EQ(d[0], 1.0);
}

TEST(DistanceTransform, SizeMismatchThrows)
{
    std::vector<std::uint8_t> f(4, 0);
    EXPECT_THROW(squaredDistanceTransform(f, 3, 3, 1.0, 1.0), std::invalid_argument);
}

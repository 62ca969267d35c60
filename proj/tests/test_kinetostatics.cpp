#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace vamk;

TEST(Frobenius, DiagonalExample)
{
    // (1/2) sqrt((1 + 4)(1 + 1/4)) = 1.25
    Mat<2, 2> m;
    m(0, 0) = 1;
    m(1, 1) = 2;
    const auto c = frobeniusCondition(m);
    EXPECT_NEAR(c.kappa, 1.25, 1e-14);
    EXPECT_NEAR(c.invKappa, 0.8, 1e-14);
}

TEST(Frobenius, IsotropicAndSingular)
{
    EXPECT_DOUBLE_EQ(frobeniusCondition(3.0 * Mat3::identity()).kappa, 1.0);
    Mat3 s;
    s(0, 0) = 1;
    const auto c = frobeniusCondition(s);
    EXPECT_TRUE(std::isinf(c.kappa));
    EXPECT_EQ(c.invKappa, 0.0);
}

TEST(Frobenius, ScaleInvariantAndBoundedBelow)
{
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 500; ++k) {
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
        const auto c = frobeniusCondition(m);
        if (!std::isfinite(c.kappa)) continue;
        EXPECT_GE(c.kappa, 1.0);
        EXPECT_NEAR(frobeniusCondition(7.5 * m).kappa / c.kappa, 1.0, 1e-10);
    }
}

TEST(Frobenius, RectangularUsesGram)
{
    Mat<2, 3> m;
    m(0, 0) = 1;
    m(1, 1) = 2;
    EXPECT_NEAR(frobeniusCondition(m).kappa, 1.25, 1e-14);
}

TEST(ForceLines, FoldAndIntercept)
{
    const auto l = makeForceLine({1, 2}, degToRad(135));
    EXPECT_NEAR(l.directionAngle, degToRad(-45), 1e-14);
    EXPECT_NEAR(l.intercept, 3.0, 1e-14);
    const auto v = makeForceLine({1, 2}, -kPi / 2);
    EXPECT_TRUE(v.vertical());
    EXPECT_DOUBLE_EQ(v.directionAngle, kPi / 2);
}

TEST(InstantaneousCentre, WorkedExample)
{
    const auto icr = instantaneousCenter(makeForceLine({0, 0}, 0.0), makeForceLine({4, 0}, kPi / 4));
    ASSERT_TRUE(icr.finite());
    EXPECT_NEAR(icr.point.x, 4.0, 1e-12);
    EXPECT_NEAR(icr.point.y, 0.0, 1e-12);
    const Vec2 t = oracle::slopeInterceptIntersection(0.0, 0.0, kPi / 4, -4.0);
    EXPECT_NEAR(t.x, 4.0, 1e-12);
    EXPECT_NEAR(t.y, 0.0, 1e-12);
}

TEST(InstantaneousCentre, MatchesSlopeInterceptFormulas)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> pt(-5, 5);
    std::uniform_real_distribution<double> ang(-1.4, 1.4);
    int n = 0;
    while (n < 1000) {
        const auto a = makeForceLine({pt(rng), pt(rng)}, ang(rng));
        const auto b = makeForceLine({pt(rng), pt(rng)}, ang(rng));
        if (std::fabs(std::sin(a.directionAngle - b.directionAngle)) < 0.05) continue;
        ++n;
        const auto icr = instantaneousCenter(a, b);
        ASSERT_TRUE(icr.finite());
        const Vec2 ref = oracle::slopeInterceptIntersection(a.directionAngle, a.intercept, b.directionAngle, b.intercept);
        EXPECT_LT(norm(icr.point - ref), 1e-9 * std::max(1.0, norm(ref)));
        // Order does not matter.
        const auto swapped = instantaneousCenter(b, a);
        EXPECT_LT(norm(swapped.point - icr.point), 1e-12 * std::max(1.0, norm(ref)));
    }
}

TEST(InstantaneousCentre, VerticalAndParallelLines)
{
    const auto icr = instantaneousCenter(makeForceLine({2, 7}, kPi / 2), makeForceLine({0, 1}, 0.0));
    ASSERT_TRUE(icr.finite());
    EXPECT_NEAR(icr.point.x, 2.0, 1e-14);
    EXPECT_NEAR(icr.point.y, 1.0, 1e-14);

    const auto par = instantaneousCenter(makeForceLine({0, 0}, 0.3), makeForceLine({0, 1}, 0.3));
    EXPECT_EQ(par.kind, InstantaneousCenter::Kind::AtInfinity);
    const auto same = instantaneousCenter(makeForceLine({0, 0}, 0.3), makeForceLine(unitFromAngle(0.3) * 2.0, 0.3));
    EXPECT_EQ(same.kind, InstantaneousCenter::Kind::Coincident);
}

TEST(Transmission, FoldMatchesBruteForce)
{
    // Smallest angle between two undirected lines, by trying every lift.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int k = 0; k < 5000; ++k) {
        const double g = u(rng), b = u(rng);
        double best = 1e9;
        for (int n = -10; n <= 10; ++n) best = std::min(best, std::fabs(g - b + n * kPi));
        const double f = foldTransmission(g, b);
        EXPECT_NEAR(f, best, 1e-12);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, kPi / 2);
    }
}

TEST(Transmission, LockedLegVelocityOracle)
{
    const auto g = defaultGeometry();
    for (const Pose &pose : oracle::randomRegularPoses(15, 303)) {
        const auto s = fullIK(g, pose);
        for (const auto &mode : ActuatingMode::all()) {
            const auto ta = transmissionAngles(g, *s, mode);
            for (int i = 0; i < 3; ++i) {
                EXPECT_GE(ta.perLeg[i], 0.0);
                EXPECT_LE(ta.perLeg[i], kPi / 2);
                const auto fd = oracle::lockedLegVelocityAngle(g, pose, {}, mode, i);
                ASSERT_TRUE(fd);
                ASSERT_FALSE(std::isnan(ta.velocityAngle[i]));
                EXPECT_LT(oracle::angleGapModPi(*fd, ta.velocityAngle[i]), 1e-4);
            }
            EXPECT_DOUBLE_EQ(ta.psi, *std::max_element(ta.perLeg.begin(), ta.perLeg.end()));
        }
    }
}

TEST(Evaluation, UnreachableYieldsNaN)
{
    const auto s = evaluatePose(defaultGeometry(), {20, 0, 0}, {}, ActuatingMode::fromNumber(1));
    EXPECT_FALSE(s.reachable);
    EXPECT_EQ(s.unreachableLeg, 0);
    EXPECT_TRUE(std::isnan(s.invCondition));
    EXPECT_TRUE(std::isnan(s.transmissionAngle));
}

TEST(Evaluation, DirectConditioningOption)
{
    const auto g = defaultGeometry();
    const Pose pose{0.5, -0.3, degToRad(17.5)};
    const auto s = fullIK(g, pose);
    const auto m = ActuatingMode::fromNumber(1);
    EvaluationOptions opt;
    opt.conditioned = ConditionedMatrix::Direct;
    const auto a = evaluateSolved(g, *s, pose, m, opt);
    const auto jp = jacobianPair(g, *s, pose, m);
    EXPECT_NEAR(a.invCondition, frobeniusCondition(normalizedDirect(jp, 3.0)).invKappa, 1e-15);
    const auto b = evaluateSolved(g, *s, pose, m);
    EXPECT_NEAR(b.invCondition, frobeniusCondition(*kinematicJacobian(jp, 3.0)).invKappa, 1e-15);
    EXPECT_GT(b.invCondition, 0.0);
    EXPECT_LE(b.invCondition, 1.0);
}

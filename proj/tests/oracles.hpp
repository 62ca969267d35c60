#pragma once

// Independent numerical checks shared by the unit tests and the acceptance
// runner: finite differences on the inverse kinematics, locked-leg
// velocities and the tangent-based line intersection.

#include "vamk/vamk.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using namespace vamk;

inline Pose offset(const Pose &p, const Vec3 &t, double h)
{
    return {p.x + h * t[0], p.y + h * t[1], p.phi + h * t[2]};
}

/// Central difference of the actuated coordinates along twist t.
inline std::optional<Vec3> actuatedRates(const MechanismGeometry &g, const Pose &pose, const WorkingMode &wm,
                                         const ActuatingMode &mode, const Vec3 &t, double h = 1e-6)
{
    const auto plus = fullIK(g, offset(pose, t, h), wm);
    const auto minus = fullIK(g, offset(pose, t, -h), wm);
    if (!plus || !minus) return std::nullopt;
    const Vec3 qp = actuatedCoordinates(*plus, mode);
    const Vec3 qm = actuatedCoordinates(*minus, mode);
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = wrapAngle(qp[i] - qm[i]) / (2.0 * h);
    return out;
}

/// d q / d (x, y, phi) by central differences; rows are legs.
inline std::optional<Mat3> rateJacobianFd(const MechanismGeometry &g, const Pose &pose, const WorkingMode &wm,
                                          const ActuatingMode &mode, double h = 1e-6)
{
    Mat3 k;
    for (int c = 0; c < 3; ++c) {
        Vec3 e{};
        e[c] = 1.0;
        const auto col = actuatedRates(g, pose, wm, mode, e, h);
        if (!col) return std::nullopt;
        for (int r = 0; r < 3; ++r) k(r, c) = (*col)[r];
    }
    return k;
}

/// Velocity direction of C_i when the actuators of the other two legs are
/// held still: the twist lies in the null space of their rows.
inline std::optional<double> lockedLegVelocityAngle(const MechanismGeometry &g, const Pose &pose,
                                                    const WorkingMode &wm, const ActuatingMode &mode, int leg)
{
    const auto k = rateJacobianFd(g, pose, wm, mode);
    if (!k) return std::nullopt;
    const int j = (leg + 1) % 3;
    const int l = (leg + 2) % 3;
    const Vec3 rj{(*k)(j, 0), (*k)(j, 1), (*k)(j, 2)};
    const Vec3 rl{(*k)(l, 0), (*k)(l, 1), (*k)(l, 2)};
    const Vec3 t{rj[1] * rl[2] - rj[2] * rl[1], rj[2] * rl[0] - rj[0] * rl[2], rj[0] * rl[1] - rj[1] * rl[0]};
    const Vec2 c = platformPoints(g, pose)[leg];
    const Vec2 v = Vec2{t[0], t[1]} + t[2] * perp(c - pose.position());
    if (!(norm(v) > 1e-12)) return std::nullopt;
    return angleOf(v);
}

/// Distance between two line directions, modulo pi.
inline double angleGapModPi(double a, double b)
{
    const double d = std::fmod(std::fabs(a - b), kPi);
    return std::min(d, kPi - d);
}

/// Intersection of y = tan(g_j) x + b_j and y = tan(g_k) x + b_k written out
/// in slope-intercept form.
inline Vec2 slopeInterceptIntersection(double gj, double bj, double gk, double bk)
{
    const double tj = std::tan(gj);
    const double tk = std::tan(gk);
    return {(bj - bk) / (tk - tj), (bj * tk - bk * tj) / (tk - tj)};
}

/// Reachable pose away from serial and parallel singularities in every mode
/// and with every leg comfortably inside its annulus.
inline bool wellConditioned(const MechanismGeometry &g, const Pose &pose, const WorkingMode &wm)
{
    const auto s = fullIK(g, pose, wm);
    if (!s) return false;
    for (int i = 0; i < 3; ++i)
        if (std::fabs(std::sin(s->delta[i] - s->alpha[i])) < 0.2) return false;
    for (const auto &m : ActuatingMode::all()) {
        const auto jp = jacobianPair(g, *s, pose, m);
        if (frobeniusCondition(normalizedDirect(jp, 3.0)).invKappa < 0.05) return false;
    }
    return true;
}

inline std::vector<Pose> randomRegularPoses(int n, std::uint64_t seed, const MechanismGeometry &g = defaultGeometry(),
                                            const WorkingMode &wm = {})
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xy(-4.0, 4.0);
    std::uniform_real_distribution<double> ang(degToRad(-40.0), degToRad(40.0));
    std::vector<Pose> out;
    while (int(out.size()) < n) {
        const Pose p{xy(rng), xy(rng), ang(rng)};
        if (wellConditioned(g, p, wm)) out.push_back(p);
    }
    return out;
}

inline Vec3 randomUnitTwist(std::mt19937_64 &rng)
{
    std::normal_distribution<double> nd;
    Vec3 t{nd(rng), nd(rng), nd(rng)};
    const double n = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
    for (double &v : t) v /= n;
    return t;
}

} // namespace oracle

#pragma once

// Kinetostatic indices: Frobenius condition number of the normalised
// Jacobian and the transmission angle built from instantaneous centres of
// rotation.

#include "vamk/linalg.hpp"
#include "vamk/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vamk {

struct FrobeniusCondition
{
    double kappa = 1.0;    ///< >= 1, +inf when singular
    double invKappa = 1.0; ///< in [0, 1]
};

/// kappa = (1/m) sqrt(tr(G) tr(G^-1)) with G the m x m Gram matrix of an
/// m x n matrix (m <= n). For square input this is ||M||_F ||M^-1||_F / m,
/// which is what gets evaluated to avoid squaring the conditioning.
template <std::size_t R, std::size_t C>
    requires(R <= C)
FrobeniusCondition frobeniusCondition(const Mat<R, C> &m)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    double kappa = inf;
    if constexpr (R == C) {
        if (const auto inv = inverse(m, 1e-15)) kappa = frobeniusNorm(m) * frobeniusNorm(*inv) / double(R);
    } else {
        const Mat<R, R> gram = m * transpose(m);
        if (const auto inv = inverse(gram, 1e-15))
            kappa = std::sqrt(trace(gram) * trace(*inv)) / double(R);
    }
    if (!std::isfinite(kappa)) return {inf, 0.0};
    kappa = std::max(kappa, 1.0);
    return {kappa, 1.0 / kappa};
}

/// Line of the force transmitted to C_i by leg i.
struct ForceLine
{
    Vec2 throughPoint;
    double directionAngle = 0.0; ///< in (-pi/2, pi/2]
    double intercept = 0.0;      ///< y-intercept, +inf for vertical lines

    Vec2 direction() const { return unitFromAngle(directionAngle); }
    bool vertical() const { return !std::isfinite(intercept); }
};

inline ForceLine makeForceLine(const Vec2 &through, double angle)
{
    // Fold into (-pi/2, pi/2].
    double a = std::remainder(angle, kPi);
    if (a <= -kPi / 2) a += kPi;
    ForceLine line{through, a, 0.0};
    if (std::fabs(std::fabs(a) - kPi / 2) < 1e-15) {
        line.directionAngle = kPi / 2;
        line.intercept = std::numeric_limits<double>::infinity();
    } else {
        line.intercept = through.y - through.x * std::tan(a);
    }
    return line;
}

/// Proximal drive: along B_iC_i. Distal drive: along A_iC_i. Passes through C_i.
inline Checked<ForceLine> forceLine(const MechanismGeometry &g, const JointState &s, int leg, LegDrive drive)
{
    const Vec2 c = s.platformPoints[leg];
    const Vec2 d = c - forceLinePivot(g, s, leg, drive);
    if (!(norm(d) > 0.0)) return Checked<ForceLine>::fail(Fault::DegenerateDirection, leg);
    return Checked<ForceLine>::ok(makeForceLine(c, angleOf(d)));
}

struct InstantaneousCenter
{
    enum class Kind : std::uint8_t { Finite, AtInfinity, Coincident };

    Kind kind = Kind::Finite;
    Vec2 point;     ///< valid when Finite
    Vec2 direction; ///< common line direction when AtInfinity or Coincident

    bool finite() const { return kind == Kind::Finite; }
};

/// Intersection of two force lines in homogeneous coordinates, so vertical
/// lines need no special case.
inline InstantaneousCenter instantaneousCenter(const ForceLine &first, const ForceLine &second)
{
    const Vec2 d1 = first.direction();
    const Vec2 d2 = second.direction();
    // Line n.x + c = 0 with normal n = perp(d).
    const Vec2 n1 = perp(d1);
    const Vec2 n2 = perp(d2);
    const double c1 = -dot(n1, first.throughPoint);
    const double c2 = -dot(n2, second.throughPoint);
    const double w = n1.x * n2.y - n2.x * n1.y;

    InstantaneousCenter icr;
    if (std::fabs(w) < 1e-14) {
        icr.direction = d1;
        const double gap = std::fabs(dot(n1, second.throughPoint) + c1);
        const double scale = 1.0 + norm(first.throughPoint) + norm(second.throughPoint);
        icr.kind = gap <= 1e-9 * scale ? InstantaneousCenter::Kind::Coincident
                                       : InstantaneousCenter::Kind::AtInfinity;
        return icr;
    }
    icr.point = {(n1.y * c2 - n2.y * c1) / w, (c1 * n2.x - c2 * n1.x) / w};
    return icr;
}

/// Reduces |gamma - beta| modulo pi and reflects into [0, pi/2].
inline double foldTransmission(double gamma, double beta)
{
    const double d = std::fmod(std::fabs(gamma - beta), kPi);
    return std::min(d, kPi - d);
}

struct TransmissionAngles
{
    double psi = 0.0;
    std::array<double, kLegs> perLeg{};
    /// Direction of the velocity of C_i when the other two legs are locked;
    /// NaN where it is undefined.
    std::array<double, kLegs> velocityAngle{};
    bool indeterminate = false; ///< some centre was undefined; affected legs report pi/2
};

inline TransmissionAngles transmissionAngles(const MechanismGeometry &g, const JointState &s,
                                             const ActuatingMode &mode)
{
    std::array<ForceLine, kLegs> lines;
    TransmissionAngles out;
    for (int i = 0; i < kLegs; ++i) {
        const auto line = forceLine(g, s, i, mode.drive(i));
        if (!line) {
            out.indeterminate = true;
            out.perLeg.fill(kPi / 2);
            out.velocityAngle.fill(std::numeric_limits<double>::quiet_NaN());
            out.psi = kPi / 2;
            return out;
        }
        lines[i] = *line;
    }
    for (int i = 0; i < kLegs; ++i) {
        const int j = (i + 1) % kLegs;
        const int k = (i + 2) % kLegs;
        const InstantaneousCenter icr = instantaneousCenter(lines[std::min(j, k)], lines[std::max(j, k)]);
        double beta = 0.0;
        bool defined = true;
        switch (icr.kind) {
        case InstantaneousCenter::Kind::Finite: {
            const Vec2 r = s.platformPoints[i] - icr.point;
            if (norm(r) > 1e-12 * (1.0 + norm(icr.point))) beta = angleOf(r) + kPi / 2;
            else defined = false;
            break;
        }
        case InstantaneousCenter::Kind::AtInfinity:
            beta = angleOf(icr.direction) + kPi / 2;
            break;
        case InstantaneousCenter::Kind::Coincident:
            defined = false;
            break;
        }
        if (defined) {
            out.perLeg[i] = foldTransmission(lines[i].directionAngle, beta);
            out.velocityAngle[i] = beta;
        } else {
            out.perLeg[i] = kPi / 2;
            out.velocityAngle[i] = std::numeric_limits<double>::quiet_NaN();
            out.indeterminate = true;
        }
    }
    out.psi = *std::max_element(out.perLeg.begin(), out.perLeg.end());
    return out;
}

/// Matrix whose Frobenius condition number is reported. `Kinematic` is the
/// kinematic Jacobian J = A_norm^-1 B; `Direct` conditions A_norm alone.
enum class ConditionedMatrix : std::uint8_t { Kinematic, Direct };

struct EvaluationOptions
{
    double charLength = kDefaultCharLength;
    ConditionedMatrix conditioned = ConditionedMatrix::Kinematic;
};

struct PerformanceSample
{
    bool reachable = false;
    int unreachableLeg = -1;
    std::array<bool, kLegs> serialLegs{};
    bool serialSingular = false;
    bool parallelSingular = false;
    /// Indices are NaN when the pose is unreachable.
    double invCondition = std::numeric_limits<double>::quiet_NaN();
    std::array<double, kLegs> transmissionAngles{
        std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
        std::numeric_limits<double>::quiet_NaN()};
    double transmissionAngle = std::numeric_limits<double>::quiet_NaN();
    double detDirect = std::numeric_limits<double>::quiet_NaN(); ///< det(A_norm)
    Vec3 inverseB{};
    JointState joints{};
};

/// Inverse condition number for a solved pose; 0 at any singularity.
inline double inverseCondition(const JacobianPair &jp, const SingularityFlags &flags,
                               const EvaluationOptions &opt)
{
    if (flags.parallel || flags.anySerial()) return 0.0;
    if (opt.conditioned == ConditionedMatrix::Direct)
        return frobeniusCondition(normalizedDirect(jp, opt.charLength)).invKappa;
    const auto j = kinematicJacobian(jp, opt.charLength);
    return j ? frobeniusCondition(*j).invKappa : 0.0;
}

inline PerformanceSample evaluateSolved(const MechanismGeometry &g, const JointState &s, const Pose &pose,
                                        const ActuatingMode &mode, const EvaluationOptions &opt = {})
{
    PerformanceSample out;
    out.reachable = true;
    out.joints = s;
    const JacobianPair jp = jacobianPair(g, s, pose, mode);
    const SingularityFlags flags = singularityFlags(g, s, pose, mode, opt.charLength);
    out.serialLegs = flags.serial;
    out.serialSingular = flags.anySerial();
    out.parallelSingular = flags.parallel;
    out.detDirect = determinant(normalizedDirect(jp, opt.charLength));
    out.inverseB = jp.inverseB;
    out.invCondition = inverseCondition(jp, flags, opt);
    const TransmissionAngles ta = transmissionAngles(g, s, mode);
    out.transmissionAngles = ta.perLeg;
    out.transmissionAngle = ta.psi;
    return out;
}

inline PerformanceSample evaluatePose(const MechanismGeometry &g, const Pose &pose, const WorkingMode &wm,
                                      const ActuatingMode &mode, const EvaluationOptions &opt = {})
{
    const auto s = fullIK(g, pose, wm);
    if (!s) {
        PerformanceSample out;
        out.unreachableLeg = s.leg;
        return out;
    }
    return evaluateSolved(g, *s, pose, mode, opt);
}

} // namespace vamk

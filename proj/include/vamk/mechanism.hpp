#pragma once

// Geometry, inverse kinematics, Jacobians and singularity predicates of the
// 3-RRR planar mechanism whose legs can each be driven at the base joint
// (proximal link A_iB_i) or at the elbow (distal link B_iC_i).

#include "vamk/linalg.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace vamk {

inline constexpr int kLegs = 3;

/// Link length used to homogenise the moment column of the direct Jacobian
/// when no other value is given.
inline constexpr double kDefaultCharLength = 3.0;

/// Serial singularity threshold on |sin(delta_i - alpha_i)|.
inline constexpr double kSerialSinTol = 1e-8;
/// Parallel singularity threshold on |det(A_norm)| / ||A_norm||_F^3.
inline constexpr double kParallelDetTol = 1e-10;

enum class Fault : std::uint8_t {
    None,
    Unreachable,
    SerialSingular,
    ParallelSingular,
    DegenerateDirection,
};

inline const char *toString(Fault f)
{
    switch (f) {
    case Fault::None: return "none";
    case Fault::Unreachable: return "unreachable";
    case Fault::SerialSingular: return "serial-singular";
    case Fault::ParallelSingular: return "parallel-singular";
    case Fault::DegenerateDirection: return "degenerate-direction";
    }
    return "?";
}

/// Value or the reason it could not be produced. `leg` is 0-based and only
/// meaningful for leg-specific faults.
template <class T>
struct Checked
{
    std::optional<T> value;
    Fault fault = Fault::None;
    int leg = -1;

    explicit operator bool() const { return value.has_value(); }
    const T &operator*() const { return *value; }
    const T *operator->() const { return &*value; }

    static Checked ok(T v) { return {std::move(v), Fault::None, -1}; }
    static Checked fail(Fault f, int leg = -1) { return {std::nullopt, f, leg}; }
};

struct MechanismGeometry
{
    std::array<Vec2, kLegs> baseAnchors;     ///< A_i in the base frame
    std::array<Vec2, kLegs> platformOffsets; ///< C_i - P in the moving frame
    double proximalLength = 3.0;             ///< |A_iB_i|
    double distalLength = 3.0;               ///< |B_iC_i|
};

/// Vertices of an equilateral triangle of the given side, centroid at the
/// origin, first edge parallel to the x-axis and vertices counterclockwise
/// starting at the lower-left one.
inline std::array<Vec2, kLegs> equilateralTriangle(double side)
{
    const double r = side / std::sqrt(3.0);
    std::array<Vec2, kLegs> out;
    const std::array<double, kLegs> deg{210.0, 330.0, 90.0};
    for (int i = 0; i < kLegs; ++i) out[i] = r * unitFromAngle(degToRad(deg[i]));
    return out;
}

inline void validate(const MechanismGeometry &g)
{
    if (!(g.proximalLength > 0.0) || !(g.distalLength > 0.0))
        throw std::invalid_argument("link lengths must be positive");
    for (int i = 0; i < kLegs; ++i)
        if (!std::isfinite(g.baseAnchors[i].x) || !std::isfinite(g.baseAnchors[i].y)
            || !std::isfinite(g.platformOffsets[i].x) || !std::isfinite(g.platformOffsets[i].y))
            throw std::invalid_argument("anchor coordinates must be finite");
}

inline MechanismGeometry equilateralGeometry(double baseSide, double platformSide,
                                             double proximal, double distal)
{
    if (!(baseSide > 0.0) || !(platformSide > 0.0))
        throw std::invalid_argument("triangle sides must be positive");
    MechanismGeometry g{equilateralTriangle(baseSide), equilateralTriangle(platformSide),
                        proximal, distal};
    validate(g);
    return g;
}

/// Base side 10, platform side 5, both links 3.
inline MechanismGeometry defaultGeometry() { return equilateralGeometry(10.0, 5.0, 3.0, 3.0); }

struct Pose
{
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0; ///< radians

    Vec2 position() const { return {x, y}; }
};

/// C_i = p + R(phi) c_i' in the base frame.
inline std::array<Vec2, kLegs> platformPoints(const MechanismGeometry &g, const Pose &pose)
{
    std::array<Vec2, kLegs> out;
    const double c = std::cos(pose.phi);
    const double s = std::sin(pose.phi);
    for (int i = 0; i < kLegs; ++i) {
        const Vec2 &o = g.platformOffsets[i];
        out[i] = {pose.x + c * o.x - s * o.y, pose.y + s * o.x + c * o.y};
    }
    return out;
}

enum class LegDrive : std::uint8_t { Proximal, Distal };

/// Which joint is driven in each leg. Numbering follows the usual table of
/// the eight modes: 1 drives every proximal link, 8 every distal link, and
/// 2-4 (5-7) have exactly one (two) distal legs.
class ActuatingMode
{
public:
    using Drives = std::array<LegDrive, kLegs>;

    constexpr ActuatingMode() = default;

    static constexpr ActuatingMode fromNumber(int number)
    {
        if (number < 1 || number > 8) throw std::out_of_range("actuating mode must be in 1..8");
        return ActuatingMode(number);
    }

    static constexpr ActuatingMode fromDrives(const Drives &d)
    {
        for (int n = 1; n <= 8; ++n)
            if (table()[n - 1] == d) return ActuatingMode(n);
        throw std::logic_error("unreachable drive combination");
    }

    static constexpr std::array<ActuatingMode, 8> all()
    {
        std::array<ActuatingMode, 8> out;
        for (int n = 1; n <= 8; ++n) out[n - 1] = ActuatingMode(n);
        return out;
    }

    constexpr int number() const { return number_; }
    constexpr Drives drives() const { return table()[number_ - 1]; }
    constexpr LegDrive drive(int leg) const { return drives()[leg]; }

    friend constexpr bool operator==(const ActuatingMode &, const ActuatingMode &) = default;

private:
    explicit constexpr ActuatingMode(int n) : number_(n) {}

    static constexpr std::array<Drives, 8> table()
    {
        constexpr auto P = LegDrive::Proximal;
        constexpr auto D = LegDrive::Distal;
        return {{
            {P, P, P},
            {P, P, D},
            {P, D, P},
            {D, P, P},
            {P, D, D},
            {D, D, P},
            {D, P, D},
            {D, D, D},
        }};
    }

    int number_ = 1;
};

/// Elbow branch of each leg: +1 puts B_i left of the ray A_i -> C_i.
struct WorkingMode
{
    std::array<int, kLegs> elbow{+1, +1, +1};

    static WorkingMode parse(const std::string &text)
    {
        if (text.size() != kLegs) throw std::invalid_argument("working mode needs three signs, e.g. +++");
        WorkingMode wm;
        for (int i = 0; i < kLegs; ++i) {
            if (text[i] == '+') wm.elbow[i] = +1;
            else if (text[i] == '-') wm.elbow[i] = -1;
            else throw std::invalid_argument("working mode signs must be '+' or '-'");
        }
        return wm;
    }

    std::string str() const
    {
        std::string s;
        for (int e : elbow) s.push_back(e > 0 ? '+' : '-');
        return s;
    }

    friend bool operator==(const WorkingMode &, const WorkingMode &) = default;
};

enum class LegStatus : std::uint8_t { Regular, SerialSingular, Unreachable };

struct LegSolution
{
    Vec2 elbowPoint;
    double alpha = 0.0; ///< direction of B - A
    double delta = 0.0; ///< direction of C - B
    LegStatus status = LegStatus::Regular;
};

/// Circle-circle intersection for one leg. On the reach boundary (within a
/// relative 1e-12) the stretched/folded solution is returned with
/// SerialSingular status.
inline LegSolution legIK(const Vec2 &anchor, const Vec2 &target, double lProx, double lDist, int elbow)
{
    if (!(lProx > 0.0) || !(lDist > 0.0)) throw std::invalid_argument("link lengths must be positive");
    LegSolution sol;
    const Vec2 d = target - anchor;
    const double r = norm(d);
    const double outer = lProx + lDist;
    const double inner = std::fabs(lProx - lDist);
    const double tol = 1e-12 * outer;

    if (r > outer + tol || r < inner - tol) {
        sol.status = LegStatus::Unreachable;
        return sol;
    }
    if (r < tol) {
        // Coincident anchor and target with equal links: any elbow works.
        sol.status = LegStatus::SerialSingular;
        sol.alpha = 0.0;
        sol.elbowPoint = anchor + Vec2{lProx, 0.0};
        sol.delta = angleOf(target - sol.elbowPoint);
        return sol;
    }
    const Vec2 u = d / r;
    const double along = (lProx * lProx - lDist * lDist + r * r) / (2.0 * r);
    const double h2 = lProx * lProx - along * along;
    const bool boundary = std::fabs(r - outer) <= tol || std::fabs(r - inner) <= tol;
    const double h = (boundary || h2 <= 0.0) ? 0.0 : std::sqrt(h2);

    sol.elbowPoint = anchor + along * u + (elbow >= 0 ? h : -h) * perp(u);
    sol.alpha = angleOf(sol.elbowPoint - anchor);
    sol.delta = angleOf(target - sol.elbowPoint);
    sol.status = boundary ? LegStatus::SerialSingular : LegStatus::Regular;
    return sol;
}

struct JointState
{
    std::array<double, kLegs> alpha{};
    std::array<double, kLegs> delta{};
    std::array<Vec2, kLegs> elbowPoints{};
    std::array<Vec2, kLegs> platformPoints{};
};

/// Solves all three legs; fails with the first unreachable leg.
inline Checked<JointState> fullIK(const MechanismGeometry &g, const Pose &pose, const WorkingMode &wm = {})
{
    JointState s;
    s.platformPoints = platformPoints(g, pose);
    for (int i = 0; i < kLegs; ++i) {
        const LegSolution leg = legIK(g.baseAnchors[i], s.platformPoints[i], g.proximalLength,
                                      g.distalLength, wm.elbow[i]);
        if (leg.status == LegStatus::Unreachable) return Checked<JointState>::fail(Fault::Unreachable, i);
        s.alpha[i] = leg.alpha;
        s.delta[i] = leg.delta;
        s.elbowPoints[i] = leg.elbowPoint;
    }
    return Checked<JointState>::ok(s);
}

/// Actuated joint coordinate of each leg: alpha_i for a proximal drive,
/// alpha_i - delta_i (the elbow angle) for a distal drive. These are the
/// coordinates whose rates satisfy A t = B qdot with the mode-independent B.
inline Vec3 actuatedCoordinates(const JointState &s, const ActuatingMode &mode)
{
    Vec3 q{};
    for (int i = 0; i < kLegs; ++i)
        q[i] = mode.drive(i) == LegDrive::Proximal ? s.alpha[i] : s.alpha[i] - s.delta[i];
    return q;
}

/// Point H_i that, with C_i, defines the transmitted force line of leg i.
inline Vec2 forceLinePivot(const MechanismGeometry &g, const JointState &s, int leg, LegDrive drive)
{
    return drive == LegDrive::Proximal ? s.elbowPoints[leg] : g.baseAnchors[leg];
}

/// Velocity relation A t = B qdot with t = [pdot; phidot].
struct JacobianPair
{
    Mat3 directA;
    Vec3 inverseB{}; ///< diagonal of B

    Mat3 inverseBMatrix() const { return Mat3::diagonal(inverseB); }
};

inline JacobianPair jacobianPair(const MechanismGeometry &g, const JointState &s, const Pose &pose,
                                 const ActuatingMode &mode)
{
    JacobianPair jp;
    const Vec2 p = pose.position();
    for (int i = 0; i < kLegs; ++i) {
        const Vec2 &a = g.baseAnchors[i];
        const Vec2 &b = s.elbowPoints[i];
        const Vec2 &c = s.platformPoints[i];
        const Vec2 f = c - forceLinePivot(g, s, i, mode.drive(i));
        jp.directA(i, 0) = f.x;
        jp.directA(i, 1) = f.y;
        jp.directA(i, 2) = -dot(f, perp(p - c));
        jp.inverseB[i] = dot(c - b, perp(b - a));
    }
    return jp;
}

/// Direct matrix with its moment column divided by the characteristic length.
inline Mat3 normalizedDirect(const JacobianPair &jp, double charLength)
{
    if (!(charLength > 0.0)) throw std::invalid_argument("characteristic length must be positive");
    Mat3 a = jp.directA;
    for (int i = 0; i < kLegs; ++i) a(i, 2) /= charLength;
    return a;
}

inline bool isParallelSingular(const Mat3 &aNorm)
{
    const double f = frobeniusNorm(aNorm);
    return !(std::fabs(determinant(aNorm)) >= kParallelDetTol * f * f * f);
}

inline bool isSerialSingular(const MechanismGeometry &g, double inverseBEntry)
{
    return std::fabs(inverseBEntry) < kSerialSinTol * g.proximalLength * g.distalLength;
}

/// J = A_norm^-1 B, mapping actuated rates to [pdot; L * phidot].
inline Checked<Mat3> kinematicJacobian(const JacobianPair &jp, double charLength = kDefaultCharLength)
{
    const Mat3 a = normalizedDirect(jp, charLength);
    if (isParallelSingular(a)) return Checked<Mat3>::fail(Fault::ParallelSingular);
    const auto inv = inverse(a, 0.0);
    if (!inv) return Checked<Mat3>::fail(Fault::ParallelSingular);
    return Checked<Mat3>::ok(*inv * jp.inverseBMatrix());
}

/// K = B^-1 A_norm, so qdot = K [pdot; L * phidot]. With the same
/// characteristic length, K J = I.
inline Checked<Mat3> rateInverse(const MechanismGeometry &g, const JacobianPair &jp,
                                 double charLength = 1.0)
{
    const Mat3 a = normalizedDirect(jp, charLength);
    Mat3 k;
    for (int i = 0; i < kLegs; ++i) {
        if (isSerialSingular(g, jp.inverseB[i])) return Checked<Mat3>::fail(Fault::SerialSingular, i);
        for (int j = 0; j < 3; ++j) k(i, j) = a(i, j) / jp.inverseB[i];
    }
    return Checked<Mat3>::ok(k);
}

struct SingularityFlags
{
    std::array<bool, kLegs> serial{};
    bool parallel = false;

    bool anySerial() const { return serial[0] || serial[1] || serial[2]; }
};

inline SingularityFlags singularityFlags(const MechanismGeometry &g, const JointState &s, const Pose &pose,
                                         const ActuatingMode &mode, double charLength = kDefaultCharLength)
{
    SingularityFlags f;
    for (int i = 0; i < kLegs; ++i)
        f.serial[i] = std::fabs(std::sin(s.delta[i] - s.alpha[i])) < kSerialSinTol;
    f.parallel = isParallelSingular(normalizedDirect(jacobianPair(g, s, pose, mode), charLength));
    return f;
}

} // namespace vamk

#pragma once

// Small fixed-size linear algebra for planar kinematics.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>

namespace vamk {

inline constexpr double kPi = std::numbers::pi;

constexpr double degToRad(double deg) { return deg * (kPi / 180.0); }
constexpr double radToDeg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle into (-pi, pi].
inline double wrapAngle(double a)
{
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 &operator+=(const Vec2 &r) { x += r.x; y += r.y; return *this; }
    constexpr Vec2 &operator-=(const Vec2 &r) { x -= r.x; y -= r.y; return *this; }
    constexpr Vec2 &operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2 &a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator/(const Vec2 &a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3-D cross product. Note a^T E b == cross(b, a).
constexpr double cross(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2 &a) { return std::hypot(a.x, a.y); }
inline double angleOf(const Vec2 &a) { return std::atan2(a.y, a.x); }
inline Vec2 unitFromAngle(double a) { return {std::cos(a), std::sin(a)}; }

/// Quarter-turn E = [0 -1; 1 0].
constexpr Vec2 perp(const Vec2 &a) { return {-a.y, a.x}; }

inline Vec2 rotate(const Vec2 &v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

template <std::size_t R, std::size_t C>
struct Mat
{
    std::array<std::array<double, C>, R> m{};

    static constexpr std::size_t rows = R;
    static constexpr std::size_t cols = C;

    constexpr double &operator()(std::size_t r, std::size_t c) { return m[r][c]; }
    constexpr double operator()(std::size_t r, std::size_t c) const { return m[r][c]; }

    static constexpr Mat identity()
        requires(R == C)
    {
        Mat out;
        for (std::size_t i = 0; i < R; ++i) out.m[i][i] = 1.0;
        return out;
    }

    static constexpr Mat diagonal(const std::array<double, R> &d)
        requires(R == C)
    {
        Mat out;
        for (std::size_t i = 0; i < R; ++i) out.m[i][i] = d[i];
        return out;
    }

    friend constexpr bool operator==(const Mat &, const Mat &) = default;
};

using Mat3 = Mat<3, 3>;
using Vec3 = std::array<double, 3>;

template <std::size_t R, std::size_t K, std::size_t C>
constexpr Mat<R, C> operator*(const Mat<R, K> &a, const Mat<K, C> &b)
{
    Mat<R, C> out;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < K; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

template <std::size_t R, std::size_t C>
constexpr std::array<double, R> operator*(const Mat<R, C> &a, const std::array<double, C> &v)
{
    std::array<double, R> out{};
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out[i] += a(i, j) * v[j];
    return out;
}

template <std::size_t R, std::size_t C>
constexpr Mat<R, C> operator*(double s, Mat<R, C> a)
{
    for (auto &row : a.m)
        for (auto &v : row) v *= s;
    return a;
}

template <std::size_t R, std::size_t C>
constexpr Mat<C, R> transpose(const Mat<R, C> &a)
{
    Mat<C, R> out;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) out(j, i) = a(i, j);
    return out;
}

template <std::size_t N>
constexpr double trace(const Mat<N, N> &a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += a(i, i);
    return s;
}

template <std::size_t R, std::size_t C>
inline double frobeniusNorm(const Mat<R, C> &a)
{
    double s = 0.0;
    for (const auto &row : a.m)
        for (double v : row) s += v * v;
    return std::sqrt(s);
}

template <std::size_t R, std::size_t C>
inline double maxAbsDiff(const Mat<R, C> &a, const Mat<R, C> &b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) d = std::fmax(d, std::fabs(a(i, j) - b(i, j)));
    return d;
}

constexpr double determinant(const Mat3 &a)
{
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
         - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
         + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Classical adjugate (transpose of the cofactor matrix).
constexpr Mat3 adjugate(const Mat3 &a)
{
    Mat3 c;
    c(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    c(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    c(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    c(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    c(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    c(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    c(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    c(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    c(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return c;
}

/// Gauss-Jordan inverse with partial pivoting. Empty when a pivot falls
/// below `relTol` times the largest absolute entry.
template <std::size_t N>
std::optional<Mat<N, N>> inverse(Mat<N, N> a, double relTol = 1e-14)
{
    double scale = 0.0;
    for (const auto &row : a.m)
        for (double v : row) scale = std::fmax(scale, std::fabs(v));
    if (!(scale > 0.0) || !std::isfinite(scale)) return std::nullopt;

    auto inv = Mat<N, N>::identity();
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) <= relTol * scale) return std::nullopt;
        std::swap(a.m[piv], a.m[col]);
        std::swap(inv.m[piv], inv.m[col]);
        const double p = a(col, col);
        for (std::size_t j = 0; j < N; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < N; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

} // namespace vamk

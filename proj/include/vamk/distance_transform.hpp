#pragma once

// Exact Euclidean distance transform on an anisotropic raster
// (Felzenszwalb & Huttenlocher lower-envelope method, one pass per axis).

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace vamk {

namespace detail {

/// In-place 1-D squared distance transform of f sampled at spacing h.
/// Entries equal to +inf are treated as "no feature".
inline void edt1d(std::span<double> f, double h, std::vector<int> &v, std::vector<double> &z,
                  std::vector<double> &out)
{
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    v.resize(n);
    z.resize(n + 1);
    out.resize(n);

    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        const double xq = q * h;
        const double fq = f[q] + xq * xq;
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        // z[0] is -inf, so k never drops below 0.
        double s;
        while (true) {
            const double xv = v[k] * h;
            s = (fq - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) out[q] = inf;
    } else {
        int j = 0;
        for (int q = 0; q < n; ++q) {
            const double xq = q * h;
            while (z[j + 1] < xq) ++j;
            const double d = xq - v[j] * h;
            out[q] = d * d + f[v[j]];
        }
    }
    for (int q = 0; q < n; ++q) f[q] = out[q];
}

} // namespace detail

/// Squared distance from every cell centre to the nearest feature cell
/// centre. `feature` is row-major with nx columns and ny rows; cell (i, j)
/// sits at (i*hx, j*hy). When `featureOutside` is set the grid is treated
/// as surrounded by a ring of feature cells one step beyond its edge.
inline std::vector<double> squaredDistanceTransform(std::span<const std::uint8_t> feature, int nx, int ny,
                                                    double hx, double hy, bool featureOutside = true)
{
    if (nx <= 0 || ny <= 0 || feature.size() != std::size_t(nx) * std::size_t(ny))
        throw std::invalid_argument("distance transform: raster size mismatch");
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int pad = featureOutside ? 1 : 0;
    const int wx = nx + 2 * pad;
    const int wy = ny + 2 * pad;

    std::vector<double> grid(std::size_t(wx) * wy, featureOutside ? 0.0 : inf);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            grid[std::size_t(j + pad) * wx + (i + pad)] = feature[std::size_t(j) * nx + i] ? 0.0 : inf;

    std::vector<int> v;
    std::vector<double> z, out, column(wy);
    for (int j = 0; j < wy; ++j)
        detail::edt1d(std::span<double>(grid.data() + std::size_t(j) * wx, wx), hx, v, z, out);
    for (int i = 0; i < wx; ++i) {
        for (int j = 0; j < wy; ++j) column[j] = grid[std::size_t(j) * wx + i];
        detail::edt1d(column, hy, v, z, out);
        for (int j = 0; j < wy; ++j) grid[std::size_t(j) * wx + i] = column[j];
    }

    std::vector<double> result(std::size_t(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            result[std::size_t(j) * nx + i] = grid[std::size_t(j + pad) * wx + (i + pad)];
    return result;
}

} // namespace vamk

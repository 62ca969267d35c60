#pragma once

// Raster scans of the workspace: zone classification over an orientation
// sweep, workspace-size ratios at fixed orientation, pointwise-best
// actuation (VAM) maps, regular dextrous workspace search and calibration
// of the characteristic length.

#include "vamk/distance_transform.hpp"
#include "vamk/kinetostatics.hpp"
#include "vamk/mechanism.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace vamk {

struct Interval
{
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    friend bool operator==(const Interval &, const Interval &) = default;
};

/// Samples are placed on nodes: x_i = lo + i (hi - lo) / (n - 1). A single
/// sample sits at the interval midpoint.
struct GridSpec
{
    Interval x{-9.0, 9.0};
    Interval y{-9.0, 9.0};
    int xRes = 400;
    int yRes = 400;
    Interval phi{degToRad(5.0), degToRad(25.0)};
    int phiRes = 21;

    static double sampleAt(const Interval &r, int n, int k)
    {
        if (n <= 1) return 0.5 * (r.lo + r.hi);
        return r.lo + r.width() * double(k) / double(n - 1);
    }
    static double stepOf(const Interval &r, int n) { return n <= 1 ? 0.0 : r.width() / double(n - 1); }

    double xAt(int i) const { return sampleAt(x, xRes, i); }
    double yAt(int j) const { return sampleAt(y, yRes, j); }
    double phiAt(int k) const { return sampleAt(phi, phiRes, k); }
    double dx() const { return stepOf(x, xRes); }
    double dy() const { return stepOf(y, yRes); }

    std::vector<double> phiSamples() const
    {
        std::vector<double> out(std::size_t(std::max(phiRes, 0)));
        for (int k = 0; k < phiRes; ++k) out[k] = phiAt(k);
        return out;
    }

    void validate() const
    {
        auto check = [](const Interval &r, int n, const char *name) {
            if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo)
                throw std::invalid_argument(std::string("empty or invalid range for ") + name);
            if (n < 1) throw std::invalid_argument(std::string("resolution must be positive for ") + name);
            if (r.hi > r.lo && n < 2)
                throw std::invalid_argument(std::string("a swept range needs at least 2 samples for ") + name);
        };
        check(x, xRes, "x");
        check(y, yRes, "y");
        check(phi, phiRes, "phi");
    }

    /// Same x/y raster at a single orientation.
    GridSpec atPhi(double angle) const
    {
        GridSpec g = *this;
        g.phi = {angle, angle};
        g.phiRes = 1;
        return g;
    }
};

enum class PerformanceIndex : std::uint8_t { InvCondition, TransmissionAngle };

inline const char *toString(PerformanceIndex i)
{
    return i == PerformanceIndex::InvCondition ? "cond" : "angle";
}

/// Pass rule: inverse condition number above the threshold, or transmission
/// angle (radians) below it.
struct Criterion
{
    PerformanceIndex index = PerformanceIndex::InvCondition;
    double threshold = 0.15;

    static Criterion condition(double t = 0.15) { return {PerformanceIndex::InvCondition, t}; }
    static Criterion angle(double radians = degToRad(75.0)) { return {PerformanceIndex::TransmissionAngle, radians}; }

    bool passes(double value) const
    {
        return index == PerformanceIndex::InvCondition ? value > threshold : value < threshold;
    }
    /// The better of two index values.
    double better(double a, double b) const
    {
        return index == PerformanceIndex::InvCondition ? std::max(a, b) : std::min(a, b);
    }
    double worse(double a, double b) const
    {
        return index == PerformanceIndex::InvCondition ? std::min(a, b) : std::max(a, b);
    }
    double worstPossible() const { return index == PerformanceIndex::InvCondition ? 0.0 : kPi / 2; }
    double bestPossible() const { return index == PerformanceIndex::InvCondition ? 1.0 : 0.0; }

    friend bool operator==(const Criterion &, const Criterion &) = default;
};

/// A single actuating mode, or the VAM (best mode chosen per sample).
struct ModeSelection
{
    std::optional<ActuatingMode> mode;

    static ModeSelection single(ActuatingMode m) { return {m}; }
    static ModeSelection single(int number) { return {ActuatingMode::fromNumber(number)}; }
    static ModeSelection vam() { return {}; }

    bool isVam() const { return !mode.has_value(); }
    std::string label() const { return mode ? std::to_string(mode->number()) : std::string("vam"); }

    friend bool operator==(const ModeSelection &, const ModeSelection &) = default;
};

enum class CellClass : std::uint8_t { Dark = 0, DarkGray = 1, LightGray = 2 };

template <class T>
struct Raster
{
    int nx = 0;
    int ny = 0;
    std::vector<T> data;

    Raster() = default;
    Raster(int nx_, int ny_, T fill) : nx(nx_), ny(ny_), data(std::size_t(nx_) * std::size_t(ny_), fill) {}

    T &at(int i, int j) { return data[std::size_t(j) * nx + i]; }
    const T &at(int i, int j) const { return data[std::size_t(j) * nx + i]; }
};

struct ScanSettings
{
    MechanismGeometry geometry = defaultGeometry();
    WorkingMode workingMode{};
    EvaluationOptions options{};
    int workers = 0; ///< 0: hardware concurrency
};

struct ScanResult
{
    GridSpec spec;
    ModeSelection mode;
    Criterion criterion;
    Raster<CellClass> cells;
    /// Worst index value over the orientation sweep; NaN in Dark cells.
    Raster<double> values;
    std::size_t reachableCells = 0; ///< reachable at every orientation sample
    std::size_t passingCells = 0;   ///< LightGray

    double ratio() const { return reachableCells ? double(passingCells) / double(reachableCells) : 0.0; }
};

struct EmptyWorkspace : std::runtime_error
{
    EmptyWorkspace() : std::runtime_error("no reachable cell in the scanned grid") {}
};

/// Index value for a solved, serially regular pose.
inline double indexValue(const MechanismGeometry &g, const JointState &s, const Pose &pose,
                         const ActuatingMode &mode, PerformanceIndex index, const EvaluationOptions &opt)
{
    if (index == PerformanceIndex::TransmissionAngle) return transmissionAngles(g, s, mode).psi;
    const JacobianPair jp = jacobianPair(g, s, pose, mode);
    SingularityFlags flags;
    flags.parallel = isParallelSingular(normalizedDirect(jp, opt.charLength));
    return inverseCondition(jp, flags, opt);
}

/// Outcome of sweeping one (x, y) cell over all orientation samples, for
/// every actuating mode at once. Slot 8 is the VAM.
struct CellSweep
{
    static constexpr int kSlots = 9;

    bool reachable = true;
    bool serialSingular = false;
    std::array<bool, kSlots> pass{};
    std::array<double, kSlots> worst{};

    bool dark() const { return !reachable || serialSingular; }

    CellClass classOf(int slot) const
    {
        if (dark()) return CellClass::Dark;
        return pass[slot] ? CellClass::LightGray : CellClass::DarkGray;
    }
};

/// Dark when some orientation sample is unreachable or serially singular in
/// the fixed working mode; otherwise pass[m] records whether mode m meets
/// the criterion at every sample. `modes` limits the single modes evaluated
/// (all eight are needed for the VAM slot).
inline CellSweep sweepCell(const ScanSettings &st, double x, double y, std::span<const double> phis,
                           const Criterion &crit, std::span<const ActuatingMode> modes)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    CellSweep out;
    out.pass.fill(true);
    out.worst.fill(crit.bestPossible());

    const MechanismGeometry &g = st.geometry;
    const double serialTol = kSerialSinTol;
    const bool withVam = modes.size() == 8;

    for (double phi : phis) {
        const Pose pose{x, y, phi};
        const auto s = fullIK(g, pose, st.workingMode);
        if (!s) {
            out.reachable = false;
            break;
        }
        for (int i = 0; i < kLegs; ++i)
            if (std::fabs(std::sin(s->delta[i] - s->alpha[i])) < serialTol) out.serialSingular = true;
        if (out.serialSingular) break;

        double vamBest = crit.worstPossible();
        bool vamPass = false;
        for (const ActuatingMode &m : modes) {
            const int slot = m.number() - 1;
            const double v = indexValue(g, *s, pose, m, crit.index, st.options);
            const bool ok = crit.passes(v);
            out.pass[slot] = out.pass[slot] && ok;
            out.worst[slot] = crit.worse(out.worst[slot], v);
            vamBest = crit.better(vamBest, v);
            vamPass = vamPass || ok;
        }
        if (withVam) {
            out.pass[8] = out.pass[8] && vamPass;
            out.worst[8] = crit.worse(out.worst[8], vamBest);
        }
    }
    if (out.dark()) out.worst.fill(nan);
    if (!withVam) out.pass[8] = false;
    return out;
}

namespace detail {

inline int workerCount(int requested)
{
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

/// Runs body(row) for every row, distributing rows across workers.
inline void parallelRows(int rows, int workers, const std::function<void(int)> &body)
{
    const int n = std::min(workerCount(workers), std::max(rows, 1));
    if (n <= 1) {
        for (int j = 0; j < rows; ++j) body(j);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (int t = 0; t < n; ++t)
        pool.emplace_back([&] {
            for (int j = next++; j < rows; j = next++) body(j);
        });
}

inline std::vector<ActuatingMode> modesFor(const ModeSelection &sel)
{
    if (sel.mode) return {*sel.mode};
    const auto all = ActuatingMode::all();
    return {all.begin(), all.end()};
}

} // namespace detail

struct CellEvaluation
{
    CellClass cls = CellClass::Dark;
    double worst = std::numeric_limits<double>::quiet_NaN();
};

inline CellEvaluation classifyCell(const ScanSettings &st, double x, double y, const ModeSelection &sel,
                                   const Interval &phiRange, int phiRes, const Criterion &crit)
{
    if (phiRes < 1 || (phiRange.hi > phiRange.lo && phiRes < 2))
        throw std::invalid_argument("orientation sweep needs at least 2 samples");
    std::vector<double> phis(static_cast<std::size_t>(phiRes));
    for (int k = 0; k < phiRes; ++k) phis[k] = GridSpec::sampleAt(phiRange, phiRes, k);
    const auto modes = detail::modesFor(sel);
    const CellSweep sw = sweepCell(st, x, y, phis, crit, modes);
    const int slot = sel.isVam() ? 8 : sel.mode->number() - 1;
    return {sw.classOf(slot), sw.worst[slot]};
}

inline CellEvaluation vamClassifyCell(const ScanSettings &st, double x, double y, const Interval &phiRange,
                                      int phiRes, const Criterion &crit)
{
    return classifyCell(st, x, y, ModeSelection::vam(), phiRange, phiRes, crit);
}

/// Classifies the raster for every selection in one pass; the result holds
/// modes 1..8 followed by the VAM.
inline std::vector<ScanResult> classifyAll(const ScanSettings &st, const GridSpec &spec, const Criterion &crit)
{
    spec.validate();
    const auto phis = spec.phiSamples();
    const auto modes = ActuatingMode::all();

    std::vector<ScanResult> out(CellSweep::kSlots);
    for (int slot = 0; slot < CellSweep::kSlots; ++slot) {
        auto &r = out[slot];
        r.spec = spec;
        r.mode = slot < 8 ? ModeSelection::single(slot + 1) : ModeSelection::vam();
        r.criterion = crit;
        r.cells = Raster<CellClass>(spec.xRes, spec.yRes, CellClass::Dark);
        r.values = Raster<double>(spec.xRes, spec.yRes, std::numeric_limits<double>::quiet_NaN());
    }
    std::vector<std::uint8_t> reachable(std::size_t(spec.xRes) * spec.yRes, 0);

    detail::parallelRows(spec.yRes, st.workers, [&](int j) {
        const double y = spec.yAt(j);
        for (int i = 0; i < spec.xRes; ++i) {
            const CellSweep sw = sweepCell(st, spec.xAt(i), y, phis, crit, modes);
            reachable[std::size_t(j) * spec.xRes + i] = sw.reachable;
            for (int slot = 0; slot < CellSweep::kSlots; ++slot) {
                out[slot].cells.at(i, j) = sw.classOf(slot);
                out[slot].values.at(i, j) = sw.worst[slot];
            }
        }
    });

    std::size_t nReach = 0;
    for (auto r : reachable) nReach += r;
    for (auto &r : out) {
        r.reachableCells = nReach;
        r.passingCells = std::size_t(std::count(r.cells.data.begin(), r.cells.data.end(), CellClass::LightGray));
    }
    return out;
}

/// Classified raster for one selection.
inline ScanResult classifyGrid(const ScanSettings &st, const GridSpec &spec, const ModeSelection &sel,
                               const Criterion &crit)
{
    if (sel.isVam()) return std::move(classifyAll(st, spec, crit)[8]);

    spec.validate();
    const auto phis = spec.phiSamples();
    const std::array<ActuatingMode, 1> modes{*sel.mode};
    const int slot = sel.mode->number() - 1;

    ScanResult r;
    r.spec = spec;
    r.mode = sel;
    r.criterion = crit;
    r.cells = Raster<CellClass>(spec.xRes, spec.yRes, CellClass::Dark);
    r.values = Raster<double>(spec.xRes, spec.yRes, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> reachable(std::size_t(spec.xRes) * spec.yRes, 0);

    detail::parallelRows(spec.yRes, st.workers, [&](int j) {
        const double y = spec.yAt(j);
        for (int i = 0; i < spec.xRes; ++i) {
            const CellSweep sw = sweepCell(st, spec.xAt(i), y, phis, crit, modes);
            reachable[std::size_t(j) * spec.xRes + i] = sw.reachable;
            r.cells.at(i, j) = sw.classOf(slot);
            r.values.at(i, j) = sw.worst[slot];
        }
    });
    for (auto v : reachable) r.reachableCells += v;
    r.passingCells = std::size_t(std::count(r.cells.data.begin(), r.cells.data.end(), CellClass::LightGray));
    return r;
}

/// Fraction of reachable cells meeting the criterion at a fixed orientation.
inline double scanConstantPhi(const ScanSettings &st, const ModeSelection &sel, double phi, const GridSpec &spec,
                              const Criterion &crit)
{
    const ScanResult r = classifyGrid(st, spec.atPhi(phi), sel, crit);
    if (r.reachableCells == 0) throw EmptyWorkspace();
    return r.ratio();
}

struct RdwResult
{
    Vec2 center;
    double radius = 0.0;
    bool empty = true;
    ModeSelection mode;
    Criterion criterion;
    Interval phi;
};

/// Largest circle centred on a grid node whose enclosed nodes are all
/// LightGray. The exact distance to the nearest non-LightGray node (cells
/// beyond the raster count as non-LightGray) is reduced by half a cell
/// diagonal. Ties go to the first node in row-major order.
inline RdwResult rdwSearch(const ScanResult &scan)
{
    RdwResult out;
    out.mode = scan.mode;
    out.criterion = scan.criterion;
    out.phi = scan.spec.phi;

    const int nx = scan.cells.nx;
    const int ny = scan.cells.ny;
    std::vector<std::uint8_t> feature(scan.cells.data.size());
    bool any = false;
    for (std::size_t k = 0; k < feature.size(); ++k) {
        feature[k] = scan.cells.data[k] != CellClass::LightGray;
        any = any || !feature[k];
    }
    if (!any) return out;

    const double hx = scan.spec.dx();
    const double hy = scan.spec.dy();
    const auto d2 = squaredDistanceTransform(feature, nx, ny, hx > 0 ? hx : 1.0, hy > 0 ? hy : 1.0);

    std::size_t best = 0;
    double bestD2 = -1.0;
    for (std::size_t k = 0; k < d2.size(); ++k)
        if (!feature[k] && d2[k] > bestD2) {
            bestD2 = d2[k];
            best = k;
        }
    const int bi = int(best % std::size_t(nx));
    const int bj = int(best / std::size_t(nx));
    out.empty = false;
    out.center = {scan.spec.xAt(bi), scan.spec.yAt(bj)};
    out.radius = std::max(0.0, std::sqrt(bestD2) - 0.5 * std::hypot(hx, hy));
    return out;
}

struct CompareRow
{
    ModeSelection mode;
    double ratioCondition = 0.0;
    double ratioAngle = 0.0;
    RdwResult rdwCondition;
    RdwResult rdwAngle;
};

/// Workspace ratios at `fixedPhi` and RDW radii over spec.phi for both
/// indices. Rows: modes 1..8 then the VAM.
inline std::vector<CompareRow> compareModes(const ScanSettings &st, const GridSpec &spec, double fixedPhi,
                                            const Criterion &cond, const Criterion &angle)
{
    const auto ratioCond = classifyAll(st, spec.atPhi(fixedPhi), cond);
    if (ratioCond.front().reachableCells == 0) throw EmptyWorkspace();
    const auto ratioAngle = classifyAll(st, spec.atPhi(fixedPhi), angle);
    const auto rdwCond = classifyAll(st, spec, cond);
    const auto rdwAngle = classifyAll(st, spec, angle);

    std::vector<CompareRow> rows(CellSweep::kSlots);
    for (int slot = 0; slot < CellSweep::kSlots; ++slot) {
        rows[slot].mode = ratioCond[slot].mode;
        rows[slot].ratioCondition = ratioCond[slot].ratio();
        rows[slot].ratioAngle = ratioAngle[slot].ratio();
        rows[slot].rdwCondition = rdwSearch(rdwCond[slot]);
        rows[slot].rdwAngle = rdwSearch(rdwAngle[slot]);
    }
    return rows;
}

struct CalibrationResult
{
    double charLength = kDefaultCharLength;
    double objective = 0.0;     ///< sum of squared ratio errors
    double absoluteError = 0.0; ///< sum of absolute ratio errors
    std::array<double, 8> ratios{};
    bool flat = false; ///< objective constant over the sweep; midpoint returned
};

/// Inverse-condition workspace ratios of all eight modes at a fixed
/// orientation for several characteristic lengths, reusing the inverse
/// kinematics.
class CharLengthObjective
{
public:
    CharLengthObjective(const ScanSettings &st, const GridSpec &spec, double phi, double threshold,
                        const std::array<double, 8> &targets)
        : st_(st), threshold_(threshold), targets_(targets)
    {
        const GridSpec g = spec.atPhi(phi);
        g.validate();
        for (int j = 0; j < g.yRes; ++j)
            for (int i = 0; i < g.xRes; ++i) {
                const Pose pose{g.xAt(i), g.yAt(j), phi};
                auto s = fullIK(st.geometry, pose, st.workingMode);
                if (!s) continue;
                bool serial = false;
                for (int l = 0; l < kLegs; ++l)
                    serial = serial || std::fabs(std::sin(s->delta[l] - s->alpha[l])) < kSerialSinTol;
                ++reachable_;
                if (!serial) solved_.push_back({pose, *s});
            }
    }

    std::size_t reachable() const { return reachable_; }

    std::array<double, 8> ratios(double charLength) const
    {
        std::array<double, 8> out{};
        if (reachable_ == 0) return out;
        EvaluationOptions opt = st_.options;
        opt.charLength = charLength;
        const auto modes = ActuatingMode::all();
        std::array<std::size_t, 8> pass{};
        for (const auto &[pose, s] : solved_)
            for (int m = 0; m < 8; ++m)
                if (indexValue(st_.geometry, s, pose, modes[m], PerformanceIndex::InvCondition, opt) > threshold_)
                    ++pass[m];
        for (int m = 0; m < 8; ++m) out[m] = double(pass[m]) / double(reachable_);
        return out;
    }

    double operator()(double charLength) const
    {
        const auto r = ratios(charLength);
        double sse = 0.0;
        for (int m = 0; m < 8; ++m) sse += (r[m] - targets_[m]) * (r[m] - targets_[m]);
        return sse;
    }

    const std::array<double, 8> &targets() const { return targets_; }

private:
    struct Solved
    {
        Pose pose;
        JointState state;
    };
    ScanSettings st_;
    double threshold_;
    std::array<double, 8> targets_;
    std::vector<Solved> solved_;
    std::size_t reachable_ = 0;
};

/// Reference inverse-condition ratios per mode (modes 2-4 and 5-7 share a value).
inline constexpr std::array<double, 8> kReferenceConditionRatios{0.8827, 0.7533, 0.7533, 0.7533,
                                                                 0.6226, 0.6226, 0.6226, 0.5215};

/// Coarse sweep of L over [lo, hi] followed by golden-section refinement
/// around the best coarse sample. Minimises the sum of squared ratio errors;
/// ties resolve to the smaller L.
inline CalibrationResult calibrateCharLength(const ScanSettings &st, const GridSpec &spec,
                                             const std::array<double, 8> &targets = kReferenceConditionRatios,
                                             double phi = degToRad(17.5), double threshold = 0.15,
                                             double lo = 0.5, double hi = 20.0, int coarseSamples = 40)
{
    if (!(lo > 0.0) || !(hi > lo) || coarseSamples < 3) throw std::invalid_argument("bad calibration bracket");
    const CharLengthObjective objective(st, spec, phi, threshold, targets);

    CalibrationResult res;
    // Geometric spacing: the index responds to L on a log scale.
    std::vector<double> ls(static_cast<std::size_t>(coarseSamples));
    std::vector<double> fs(ls.size());
    for (int k = 0; k < coarseSamples; ++k) {
        ls[k] = lo * std::pow(hi / lo, double(k) / double(coarseSamples - 1));
        fs[k] = objective(ls[k]);
    }
    const auto [mn, mx] = std::minmax_element(fs.begin(), fs.end());
    if (*mx - *mn <= 0.0) {
        res.flat = true;
        res.charLength = 0.5 * (lo + hi);
    } else {
        const std::size_t kBest = std::size_t(mn - fs.begin());
        double bestL = ls[kBest];
        double bestF = fs[kBest];
        double a = ls[kBest > 0 ? kBest - 1 : 0];
        double b = ls[std::min(kBest + 1, ls.size() - 1)];
        const double invPhi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - invPhi * (b - a);
        double d = a + invPhi * (b - a);
        double fc = objective(c);
        double fd = objective(d);
        auto consider = [&](double l, double f) {
            if (f < bestF || (f == bestF && l < bestL)) {
                bestF = f;
                bestL = l;
            }
        };
        for (int it = 0; it < 40 && (b - a) > 1e-4 * bestL; ++it) {
            consider(c, fc);
            consider(d, fd);
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - invPhi * (b - a);
                fc = objective(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + invPhi * (b - a);
                fd = objective(d);
            }
        }
        consider(c, fc);
        consider(d, fd);
        // Ratios are piecewise constant in L, so the minimum is a plateau:
        // walk to its left end.
        double left = ls[kBest > 0 ? kBest - 1 : 0];
        if (objective(left) == bestF) bestL = std::min(bestL, left);
        else
            for (int it = 0; it < 50 && bestL - left > 1e-6 * bestL; ++it) {
                const double mid = 0.5 * (left + bestL);
                const double fm = objective(mid);
                if (fm <= bestF) {
                    bestF = fm;
                    bestL = mid;
                } else {
                    left = mid;
                }
            }
        res.charLength = bestL;
    }
    res.ratios = objective.ratios(res.charLength);
    res.objective = 0.0;
    res.absoluteError = 0.0;
    for (int m = 0; m < 8; ++m) {
        const double e = res.ratios[m] - targets[m];
        res.objective += e * e;
        res.absoluteError += std::fabs(e);
    }
    return res;
}

} // namespace vamk

// vamk: command-line front end for the kinetostatic analysis of the 3-RRR
// mechanism with variable actuation.
//
// Exit codes: 0 success, 1 configuration or I/O error, 2 unreachable pose.

#include "vamk/vamk.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace vamk;
using json = nlohmann::json;

struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    ScanSettings settings;
    double baseSide = 10.0;
    double platformSide = 5.0;
    ModeSelection mode = ModeSelection::single(1);
    Criterion criterion = Criterion::condition();
    double phi = degToRad(17.5);
    GridSpec grid;
    bool calibrate = false;
    std::string out;
    std::string format = "csv";
    double x = 0.0;
    double y = 0.0;
};

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double toDouble(const std::string &key, const std::string &v)
{
    try {
        const double d = io::parseDouble(v);
        if (!std::isfinite(d)) throw std::invalid_argument("not finite");
        return d;
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

int toInt(const std::string &key, const std::string &v)
{
    const double d = toDouble(key, v);
    if (d != std::floor(d) || std::fabs(d) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return int(d);
}

/// "lo:hi:n"
std::pair<Interval, int> parseRange(const std::string &key, const std::string &v)
{
    const auto f = split(v, ':');
    if (f.size() != 3) throw ConfigError(key + ": expected lo:hi:n, got '" + v + "'");
    Interval r{toDouble(key, f[0]), toDouble(key, f[1])};
    const int n = toInt(key, f[2]);
    if (!(r.hi > r.lo)) throw ConfigError(key + ": empty range '" + v + "'");
    if (n < 2) throw ConfigError(key + ": need at least 2 samples");
    return {r, n};
}

/// Effective key/value settings: built-in defaults, then the config file,
/// then explicit flags.
using Settings = std::map<std::string, std::string>;

Settings defaults()
{
    return {
        {"mode", "1"},
        {"index", "cond"},
        {"phi", "17.5"},
        {"phi-range", "5:25:21"},
        {"grid", "-9:9:400,-9:9:400"},
        {"working-mode", "+++"},
        {"char-length", "3"},
        {"cond-matrix", "kinematic"},
        {"format", "csv"},
        {"workers", "0"},
        {"base-side", "10"},
        {"platform-side", "5"},
        {"proximal", "3"},
        {"distal", "3"},
    };
}

RunConfig buildConfig(const Settings &s)
{
    auto get = [&](const std::string &k) -> std::string {
        const auto it = s.find(k);
        return it == s.end() ? std::string() : it->second;
    };
    RunConfig c;

    c.baseSide = toDouble("base-side", get("base-side"));
    c.platformSide = toDouble("platform-side", get("platform-side"));
    try {
        c.settings.geometry = equilateralGeometry(c.baseSide, c.platformSide, toDouble("proximal", get("proximal")),
                                                  toDouble("distal", get("distal")));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("geometry: ") + e.what());
    }

    const std::string mode = get("mode");
    if (mode == "vam" || mode == "VAM") {
        c.mode = ModeSelection::vam();
    } else {
        const int n = toInt("mode", mode);
        if (n < 1 || n > 8) throw ConfigError("mode: expected 1..8 or vam, got '" + mode + "'");
        c.mode = ModeSelection::single(n);
    }

    const std::string index = get("index");
    const bool hasThreshold = s.contains("threshold");
    if (index == "cond") {
        c.criterion = Criterion::condition(hasThreshold ? toDouble("threshold", get("threshold")) : 0.15);
    } else if (index == "angle") {
        c.criterion = Criterion::angle(degToRad(hasThreshold ? toDouble("threshold", get("threshold")) : 75.0));
    } else {
        throw ConfigError("index: expected cond or angle, got '" + index + "'");
    }
    if (c.criterion.index == PerformanceIndex::InvCondition && !(c.criterion.threshold >= 0.0))
        throw ConfigError("threshold: must not be negative");

    c.phi = degToRad(toDouble("phi", get("phi")));
    const auto [phiRange, phiRes] = parseRange("phi-range", get("phi-range"));
    c.grid.phi = {degToRad(phiRange.lo), degToRad(phiRange.hi)};
    c.grid.phiRes = phiRes;

    const auto axes = split(get("grid"), ',');
    if (axes.size() != 2) throw ConfigError("grid: expected xlo:xhi:n,ylo:yhi:n");
    std::tie(c.grid.x, c.grid.xRes) = parseRange("grid", axes[0]);
    std::tie(c.grid.y, c.grid.yRes) = parseRange("grid", axes[1]);

    try {
        c.settings.workingMode = WorkingMode::parse(get("working-mode"));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("working-mode: ") + e.what());
    }

    const std::string cl = get("char-length");
    if (cl == "calibrate") {
        c.calibrate = true;
    } else {
        c.settings.options.charLength = toDouble("char-length", cl);
        if (!(c.settings.options.charLength > 0.0)) throw ConfigError("char-length: must be positive");
    }
    const std::string cm = get("cond-matrix");
    if (cm == "kinematic") c.settings.options.conditioned = ConditionedMatrix::Kinematic;
    else if (cm == "direct") c.settings.options.conditioned = ConditionedMatrix::Direct;
    else throw ConfigError("cond-matrix: expected kinematic or direct, got '" + cm + "'");

    c.out = get("out");
    c.format = get("format");
    if (c.format != "csv" && c.format != "kv") throw ConfigError("format: expected csv or kv");
    c.settings.workers = toInt("workers", get("workers"));
    if (c.settings.workers < 0) throw ConfigError("workers: must not be negative");

    if (s.contains("x")) c.x = toDouble("x", get("x"));
    if (s.contains("y")) c.y = toDouble("y", get("y"));
    return c;
}

std::string fmt(double v, int prec = 6)
{
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

std::string fixed(double v, int decimals)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::ofstream openOut(const std::string &path)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

void writeScanFile(const RunConfig &c, const ScanResult &scan)
{
    if (c.out.empty()) return;
    auto f = openOut(c.out);
    if (c.format == "csv") {
        io::writeGridCsv(f, scan);
    } else {
        for (int j = 0; j < scan.cells.ny; ++j)
            for (int i = 0; i < scan.cells.nx; ++i) {
                json rec;
                rec["x"] = scan.spec.xAt(i);
                rec["y"] = scan.spec.yAt(j);
                rec["class"] = int(scan.cells.at(i, j));
                const double v = io::exportedValue(scan.criterion, scan.values.at(i, j));
                rec["value"] = std::isnan(v) ? json(nullptr) : json(v);
                f << rec.dump() << '\n';
            }
    }
    if (!f) throw std::runtime_error("write failed for '" + c.out + "'");
}

/// Calibrates L against the reference inverse-condition ratios when asked.
void resolveCharLength(RunConfig &c, bool needed)
{
    if (!c.calibrate || !needed) return;
    const CalibrationResult cal = calibrateCharLength(c.settings, c.grid, kReferenceConditionRatios);
    c.settings.options.charLength = cal.charLength;
    std::cout << "char_length=" << fmt(cal.charLength) << " (calibrated)\n";
    if (cal.flat) std::cerr << "warning: calibration objective is flat; using the sweep midpoint\n";
}

int cmdSample(RunConfig c, const Pose &pose)
{
    if (!c.mode.mode) throw ConfigError("sample: --mode must be a single actuating mode (1..8)");
    resolveCharLength(c, true);
    const PerformanceSample s = evaluatePose(c.settings.geometry, pose, c.settings.workingMode, *c.mode.mode,
                                             c.settings.options);
    if (!s.reachable) {
        std::cerr << "unreachable: leg " << (s.unreachableLeg + 1) << '\n';
        return 2;
    }
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("reachable", "true");
    kv.emplace_back("x", fmt(pose.x));
    kv.emplace_back("y", fmt(pose.y));
    kv.emplace_back("phi_deg", fmt(radToDeg(pose.phi)));
    kv.emplace_back("mode", c.mode.label());
    kv.emplace_back("working_mode", c.settings.workingMode.str());
    kv.emplace_back("char_length", fmt(c.settings.options.charLength));
    for (int i = 0; i < kLegs; ++i) kv.emplace_back("alpha" + std::to_string(i + 1) + "_deg", fmt(radToDeg(s.joints.alpha[i])));
    for (int i = 0; i < kLegs; ++i) kv.emplace_back("delta" + std::to_string(i + 1) + "_deg", fmt(radToDeg(s.joints.delta[i])));
    kv.emplace_back("det_a_norm", fmt(s.detDirect));
    for (int i = 0; i < kLegs; ++i) kv.emplace_back("b" + std::to_string(i + 1), fmt(s.inverseB[i]));
    kv.emplace_back("inv_condition", fmt(s.invCondition));
    for (int i = 0; i < kLegs; ++i) kv.emplace_back("psi" + std::to_string(i + 1) + "_deg", fmt(radToDeg(s.transmissionAngles[i])));
    kv.emplace_back("psi_deg", fmt(radToDeg(s.transmissionAngle)));
    for (int i = 0; i < kLegs; ++i) kv.emplace_back("serial" + std::to_string(i + 1), s.serialLegs[i] ? "true" : "false");
    kv.emplace_back("serial_singular", s.serialSingular ? "true" : "false");
    kv.emplace_back("parallel_singular", s.parallelSingular ? "true" : "false");

    for (const auto &[k, v] : kv) std::cout << k << '=' << v << '\n';
    if (!c.out.empty()) {
        auto f = openOut(c.out);
        if (c.format == "kv") {
            json rec = json::object();
            for (const auto &[k, v] : kv) rec[k] = v;
            f << rec.dump() << '\n';
        } else {
            for (std::size_t i = 0; i < kv.size(); ++i) f << kv[i].first << (i + 1 < kv.size() ? "," : "\n");
            for (std::size_t i = 0; i < kv.size(); ++i) f << kv[i].second << (i + 1 < kv.size() ? "," : "\n");
        }
    }
    return 0;
}

int cmdScan(RunConfig c)
{
    resolveCharLength(c, c.criterion.index == PerformanceIndex::InvCondition);
    const ScanResult scan = classifyGrid(c.settings, c.grid.atPhi(c.phi), c.mode, c.criterion);
    if (scan.reachableCells == 0) throw EmptyWorkspace();
    writeScanFile(c, scan);
    std::cout << "ratio=" << fixed(100.0 * scan.ratio(), 2) << '\n';
    std::cout << "reachable_cells=" << scan.reachableCells << " passing_cells=" << scan.passingCells << '\n';
    return 0;
}

int cmdRdw(RunConfig c)
{
    resolveCharLength(c, c.criterion.index == PerformanceIndex::InvCondition);
    const ScanResult scan = classifyGrid(c.settings, c.grid, c.mode, c.criterion);
    writeScanFile(c, scan);
    const RdwResult r = rdwSearch(scan);
    if (r.empty) {
        std::cerr << "warning: no cell satisfies the criterion over the whole orientation range\n";
        std::cout << "center=(nan,nan) radius=0\n";
        return 0;
    }
    std::cout << "center=(" << fixed(r.center.x, 4) << ',' << fixed(r.center.y, 4) << ") radius=" << fixed(r.radius, 4)
              << '\n';
    return 0;
}

int cmdCompare(RunConfig c, double condThreshold, double angleThresholdDeg)
{
    resolveCharLength(c, true);
    const auto rows = compareModes(c.settings, c.grid, c.phi, Criterion::condition(condThreshold),
                                   Criterion::angle(degToRad(angleThresholdDeg)));

    if (!c.calibrate) std::cout << "char_length=" << fmt(c.settings.options.charLength) << '\n';
    std::cout << std::left << std::setw(6) << "mode" << std::right << std::setw(12) << "ratio_cond" << std::setw(12)
              << "ratio_angle" << std::setw(10) << "rdw_cond" << std::setw(11) << "rdw_angle" << '\n';
    for (const auto &r : rows)
        std::cout << std::left << std::setw(6) << r.mode.label() << std::right << std::setw(12)
                  << fixed(100.0 * r.ratioCondition, 2) << std::setw(12) << fixed(100.0 * r.ratioAngle, 2)
                  << std::setw(10) << fixed(r.rdwCondition.radius, 2) << std::setw(11) << fixed(r.rdwAngle.radius, 2)
                  << '\n';

    // Grouped as modes 1, 2-4, 5-7, 8 and the VAM.
    struct Group
    {
        const char *label;
        std::vector<int> slots;
    };
    const std::vector<Group> groups{{"1", {0}}, {"2,3,4", {1, 2, 3}}, {"5,6,7", {4, 5, 6}}, {"8", {7}}, {"VAM", {8}}};
    std::cout << "\ngrouped (mean over symmetric modes)\n";
    json groupedRecs = json::array();
    for (const auto &g : groups) {
        double rc = 0, ra = 0, dc = 0, da = 0;
        for (int s : g.slots) {
            rc += rows[s].ratioCondition;
            ra += rows[s].ratioAngle;
            dc += rows[s].rdwCondition.radius;
            da += rows[s].rdwAngle.radius;
        }
        const double n = double(g.slots.size());
        std::cout << std::left << std::setw(6) << g.label << std::right << std::setw(12) << fixed(100.0 * rc / n, 2)
                  << std::setw(12) << fixed(100.0 * ra / n, 2) << std::setw(10) << fixed(dc / n, 2) << std::setw(11)
                  << fixed(da / n, 2) << '\n';
    }

    if (!c.out.empty()) {
        auto f = openOut(c.out);
        if (c.format == "csv") {
            f << "mode,ratio_cond,ratio_angle,rdw_cond,rdw_angle,center_cond_x,center_cond_y,center_angle_x,"
                 "center_angle_y,char_length\n";
            for (const auto &r : rows)
                f << r.mode.label() << ',' << io::formatValue(r.ratioCondition) << ','
                  << io::formatValue(r.ratioAngle) << ',' << io::formatValue(r.rdwCondition.radius) << ','
                  << io::formatValue(r.rdwAngle.radius) << ',' << io::formatValue(r.rdwCondition.center.x) << ','
                  << io::formatValue(r.rdwCondition.center.y) << ',' << io::formatValue(r.rdwAngle.center.x) << ','
                  << io::formatValue(r.rdwAngle.center.y) << ',' << io::formatValue(c.settings.options.charLength)
                  << '\n';
        } else {
            for (const auto &r : rows) {
                json rec;
                rec["mode"] = r.mode.label();
                rec["ratio_cond"] = r.ratioCondition;
                rec["ratio_angle"] = r.ratioAngle;
                rec["rdw_cond"] = r.rdwCondition.radius;
                rec["rdw_angle"] = r.rdwAngle.radius;
                rec["center_cond"] = {r.rdwCondition.center.x, r.rdwCondition.center.y};
                rec["center_angle"] = {r.rdwAngle.center.x, r.rdwAngle.center.y};
                rec["char_length"] = c.settings.options.charLength;
                f << rec.dump() << '\n';
            }
        }
    }
    return 0;
}

int cmdCalibrate(RunConfig c, double threshold)
{
    const CalibrationResult cal =
        calibrateCharLength(c.settings, c.grid, kReferenceConditionRatios, c.phi, threshold);
    std::cout << "char_length=" << fmt(cal.charLength) << '\n';
    std::cout << "sum_squared_error=" << fmt(cal.objective) << " sum_abs_error_pp=" << fixed(100.0 * cal.absoluteError, 2)
              << '\n';
    for (int m = 0; m < 8; ++m)
        std::cout << "mode" << (m + 1) << "_ratio=" << fixed(100.0 * cal.ratios[m], 2)
                  << " target=" << fixed(100.0 * kReferenceConditionRatios[m], 2) << '\n';
    if (cal.flat) std::cerr << "warning: calibration objective is flat; using the sweep midpoint\n";
    if (!c.out.empty()) {
        auto f = openOut(c.out);
        json rec;
        rec["char_length"] = cal.charLength;
        rec["sum_squared_error"] = cal.objective;
        rec["ratios"] = cal.ratios;
        rec["flat"] = cal.flat;
        f << rec.dump() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Kinetostatic analysis of the 3-RRR planar mechanism with variable actuation"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    // Every flag is captured as text so config-file values can be layered underneath.
    std::map<std::string, std::string> flagValues;
    std::map<std::string, CLI::Option *> flagOptions;
    std::string configPath;

    struct FlagDef
    {
        const char *name;
        const char *help;
    };
    const std::vector<FlagDef> flags{
        {"mode", "Actuating mode 1..8 or 'vam'"},
        {"index", "Performance index: cond | angle"},
        {"threshold", "Index threshold (inverse condition number, or degrees for angle)"},
        {"phi", "Platform orientation in degrees for fixed-orientation scans and samples"},
        {"phi-range", "Orientation sweep lo:hi:steps in degrees"},
        {"grid", "Raster xlo:xhi:n,ylo:yhi:n"},
        {"working-mode", "Elbow signs, e.g. +++ or +-+"},
        {"char-length", "Characteristic length, or 'calibrate'"},
        {"cond-matrix", "Matrix whose condition number is used: kinematic (J) | direct (A)"},
        {"out", "Output path"},
        {"format", "Output format: csv | kv"},
        {"workers", "Worker threads (0 = all cores)"},
        {"base-side", "Base triangle side"},
        {"platform-side", "Platform triangle side"},
        {"proximal", "Proximal link length |AB|"},
        {"distal", "Distal link length |BC|"},
    };

    auto addCommon = [&](CLI::App *sub) {
        sub->add_option("--config", configPath, "Flat key = value configuration file");
        for (const auto &f : flags) {
            const std::string key = f.name;
            auto *opt = sub->add_option("--" + key, flagValues[key], f.help);
            flagOptions[std::string(sub->get_name()) + "/" + key] = opt;
        }
    };

    auto *sample = app.add_subcommand("sample", "Evaluate a single pose");
    std::vector<double> samplePos;
    sample->add_option("position", samplePos, "x y (platform point)")->expected(2);
    addCommon(sample);
    flagOptions["sample/x"] = sample->add_option("--x", flagValues["x"], "x of the platform point");
    flagOptions["sample/y"] = sample->add_option("--y", flagValues["y"], "y of the platform point");

    auto *scan = app.add_subcommand("scan", "Classify the raster at a fixed orientation and report the workspace ratio");
    addCommon(scan);
    auto *rdw = app.add_subcommand("rdw", "Regular dextrous workspace over an orientation range");
    addCommon(rdw);
    auto *compare = app.add_subcommand("compare", "Ratios and RDW radii of all modes and the VAM for both indices");
    addCommon(compare);
    double cmpCond = 0.15;
    double cmpAngle = 75.0;
    compare->add_option("--cond-threshold", cmpCond, "Inverse condition threshold for the comparison");
    compare->add_option("--angle-threshold", cmpAngle, "Transmission angle threshold in degrees");
    auto *calibrate = app.add_subcommand("calibrate", "Fit the characteristic length to the reference ratios");
    addCommon(calibrate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    CLI::App *active = app.get_subcommands().front();
    const std::string cmd = active->get_name();

    try {
        Settings eff = defaults();
        if (!configPath.empty()) {
            std::ifstream cf(configPath);
            if (!cf) throw ConfigError("cannot read config file '" + configPath + "'");
            for (const auto &[k, v] : io::parseConfig(cf)) {
                const bool known = std::any_of(flags.begin(), flags.end(), [&](const FlagDef &f) { return k == f.name; })
                                || k == "x" || k == "y";
                if (!known) throw ConfigError("config: unknown key '" + k + "'");
                eff[k] = v;
            }
        }
        for (const auto &[key, opt] : flagOptions) {
            const auto slash = key.find('/');
            if (key.substr(0, slash) != cmd || opt->count() == 0) continue;
            const std::string name = key.substr(slash + 1);
            eff[name] = flagValues[name];
        }
        if (cmd == "sample" && samplePos.size() == 2) {
            eff["x"] = fmt(samplePos[0], 17);
            eff["y"] = fmt(samplePos[1], 17);
        }

        RunConfig c = buildConfig(eff);
        if (cmd == "sample") return cmdSample(c, Pose{c.x, c.y, c.phi});
        if (cmd == "scan") return cmdScan(c);
        if (cmd == "rdw") return cmdRdw(c);
        if (cmd == "compare") return cmdCompare(c, cmpCond, cmpAngle);
        if (cmd == "calibrate") {
            const double t = c.criterion.index == PerformanceIndex::InvCondition ? c.criterion.threshold : 0.15;
            return cmdCalibrate(c, t);
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const EmptyWorkspace &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

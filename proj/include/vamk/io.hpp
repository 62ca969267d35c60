#pragma once

// Flat-file formats: classified grids as CSV, records as JSON lines and
// `key = value` configuration files.

#include "vamk/workspace.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vamk::io {

/// %.6g, with NaN spelled "nan".
inline std::string formatValue(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Transmission angles are written in degrees.
inline double exportedValue(const Criterion &c, double v)
{
    return c.index == PerformanceIndex::TransmissionAngle ? radToDeg(v) : v;
}

inline void writeGridCsv(std::ostream &os, const ScanResult &scan)
{
    os << "x,y,class,value\n";
    for (int j = 0; j < scan.cells.ny; ++j)
        for (int i = 0; i < scan.cells.nx; ++i)
            os << formatValue(scan.spec.xAt(i)) << ',' << formatValue(scan.spec.yAt(j)) << ','
               << int(scan.cells.at(i, j)) << ',' << formatValue(exportedValue(scan.criterion, scan.values.at(i, j)))
               << '\n';
}

struct GridRow
{
    double x = 0.0;
    double y = 0.0;
    CellClass cls = CellClass::Dark;
    double value = 0.0;
};

inline double parseDouble(const std::string &s)
{
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception &) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

inline std::vector<GridRow> readGridCsv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line != "x,y,class,value")
        throw std::runtime_error("grid csv: missing header x,y,class,value");
    std::vector<GridRow> rows;
    int lineNo = 1;
    while (std::getline(is, line)) {
        ++lineNo;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 4) throw std::runtime_error("grid csv: line " + std::to_string(lineNo) + " needs 4 fields");
        GridRow r;
        r.x = parseDouble(f[0]);
        r.y = parseDouble(f[1]);
        const int c = int(parseDouble(f[2]));
        if (c < 0 || c > 2) throw std::runtime_error("grid csv: bad class on line " + std::to_string(lineNo));
        r.cls = CellClass(c);
        r.value = parseDouble(f[3]);
        rows.push_back(r);
    }
    return rows;
}

/// Flat `key = value` text; `#` starts a comment. Later keys override
/// earlier ones.
inline std::map<std::string, std::string> parseConfig(std::istream &is)
{
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> out;
    std::string line;
    int lineNo = 0;
    while (std::getline(is, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineNo) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw std::runtime_error("config line " + std::to_string(lineNo) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

} // namespace vamk::io

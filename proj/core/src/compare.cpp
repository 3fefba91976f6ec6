#include "rydgate/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rydgate/common.hpp"

namespace rydgate::compare {
namespace {

std::vector<std::string> splitRow(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// Data rows only: metadata ('#') and blank lines carry no values.
std::vector<std::string> dataLines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractViolation("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

bool parseNumber(const std::string& text, double& value) {
    const char* begin = text.c_str();
    char* end = nullptr;
    value = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t') ++end;
    return *end == '\0';
}

}  // namespace

std::string CompareReport::summary() const {
    std::ostringstream out;
    out << (pass ? "PASS" : "FAIL");
    if (!worstWhere.empty()) {
        out << ": worst deviation " << worstDelta << " (" << worstRatio
            << "x tolerance) at " << worstWhere;
    }
    for (const auto& m : messages) out << "\n  " << m;
    return out.str();
}

CompareReport compareFiles(const std::string& pathA, const std::string& pathB,
                           const CompareOptions& options) {
    if (options.rtol < 0.0 || options.atol < 0.0) {
        throw ContractViolation("compare tolerances must be non-negative");
    }
    CompareReport report;
    const auto linesA = dataLines(pathA);
    const auto linesB = dataLines(pathB);
    if (linesA.empty() || linesB.empty()) {
        report.pass = false;
        report.messages.push_back("missing header row in " +
                                  (linesA.empty() ? pathA : pathB));
        return report;
    }

    const auto headerA = splitRow(linesA[0]);
    const auto headerB = splitRow(linesB[0]);
    if (headerA != headerB) {
        report.pass = false;
        for (const auto& col : headerA) {
            if (std::find(headerB.begin(), headerB.end(), col) == headerB.end()) {
                report.messages.push_back("column only in " + pathA + ": " + col);
            }
        }
        for (const auto& col : headerB) {
            if (std::find(headerA.begin(), headerA.end(), col) == headerA.end()) {
                report.messages.push_back("column only in " + pathB + ": " + col);
            }
        }
        if (report.messages.empty()) {
            report.messages.push_back("column order differs between files");
        }
        return report;
    }

    if (linesA.size() != linesB.size()) {
        report.pass = false;
        report.messages.push_back(
            "row count mismatch: " + std::to_string(linesA.size() - 1) + " vs " +
            std::to_string(linesB.size() - 1));
        return report;
    }

    for (std::size_t row = 1; row < linesA.size(); ++row) {
        const auto cellsA = splitRow(linesA[row]);
        const auto cellsB = splitRow(linesB[row]);
        if (cellsA.size() != headerA.size() || cellsB.size() != headerA.size()) {
            report.pass = false;
            report.messages.push_back("ragged row " + std::to_string(row) +
                                      ": cell count differs from header");
            return report;
        }
        for (std::size_t col = 0; col < cellsA.size(); ++col) {
            double a = 0.0;
            double b = 0.0;
            const bool numA = parseNumber(cellsA[col], a);
            const bool numB = parseNumber(cellsB[col], b);
            const std::string where =
                "row " + std::to_string(row) + ", column '" + headerA[col] + "'";
            if (numA != numB) {
                report.pass = false;
                report.messages.push_back("type mismatch at " + where + ": '" +
                                          cellsA[col] + "' vs '" + cellsB[col] + "'");
                continue;
            }
            if (!numA) {
                if (cellsA[col] != cellsB[col]) {
                    report.pass = false;
                    report.messages.push_back("text mismatch at " + where + ": '" +
                                              cellsA[col] + "' vs '" + cellsB[col] +
                                              "'");
                }
                continue;
            }
            if (std::isnan(a) && std::isnan(b)) continue;
            const double delta = std::abs(a - b);
            const double bound =
                options.atol + options.rtol * std::max(std::abs(a), std::abs(b));
            const double ratio = bound > 0.0 ? delta / bound
                                             : (delta > 0.0 ? HUGE_VAL : 0.0);
            if (ratio > report.worstRatio) {
                report.worstRatio = ratio;
                report.worstDelta = delta;
                report.worstWhere = where;
            }
            if (delta > bound) {
                report.pass = false;
                if (report.messages.size() < 16) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "value mismatch at " << where << ": " << a << " vs " << b
                        << " (|diff| " << delta << " > bound " << bound << ")";
                    report.messages.push_back(msg.str());
                }
            }
        }
    }
    return report;
}

}  // namespace rydgate::compare

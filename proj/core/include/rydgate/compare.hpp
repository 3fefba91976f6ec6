#pragma once

#include <string>
#include <vector>

namespace rydgate::compare {

struct CompareOptions {
    double rtol = 1e-9;
    double atol = 0.0;
};

// Cell-by-cell CSV comparison. '#' metadata lines are ignored; the header row
// must match exactly. Numeric cells pass when
// |a - b| <= atol + rtol * max(|a|, |b|); other cells must be identical.
struct CompareReport {
    bool pass = true;
    double worstRatio = 0.0;  // worst |a-b| relative to its tolerance bound
    double worstDelta = 0.0;
    std::string worstWhere;
    std::vector<std::string> messages;

    std::string summary() const;
};

CompareReport compareFiles(const std::string& pathA, const std::string& pathB,
                           const CompareOptions& options);

}  // namespace rydgate::compare

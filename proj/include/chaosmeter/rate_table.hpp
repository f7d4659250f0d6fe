#pragma once

#include <string>
#include <vector>

// The tabular exchange format between experiments and downstream analysis.
// Floating-point values round-trip losslessly (17 significant digits).

namespace chaosmeter {

struct RateRow {
    std::string experiment;
    double a = 0.0;
    double b = 0.0;
    int n = 0;
    int k = 0;
    double t = 0.0;
    std::string quantity;  ///< H | I | z | coupling-dist
    double value = 0.0;
    double stderr_value = 0.0;
    std::string source;  ///< closed-form | oracle | monte-carlo | ladder
};

/// Formats a double with 17 significant digits (shortest lossless form not
/// required; the same input always gives the same bytes).
std::string format_double(double value);

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows);
std::vector<RateRow> read_rate_csv(const std::string& path);

}  // namespace chaosmeter

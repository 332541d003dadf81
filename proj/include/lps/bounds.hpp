#pragma once

#include <string>
#include <vector>

#include "lps/mesh.hpp"

namespace lps::solver {

/// Result of checking a field against analytic lower/upper estimates.
struct BoundsReport {
    std::string name;
    double lower = 0.0;
    double upper = 0.0;
    double observed_min = 0.0;
    double observed_max = 0.0;
    double slack = 0.0;
    bool pass = false;

    std::string to_string() const;
};

/// pass iff every value lies in [lower - slack, upper + slack].
BoundsReport check_bounds(const mesh::Field& f, double lower, double upper, double slack,
                          std::string name = "");
BoundsReport check_bounds_scalar(double value, double lower, double upper, double slack,
                                 std::string name = "");

}  // namespace lps::solver

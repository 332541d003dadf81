#include "lps/bounds.hpp"

#include <cmath>
#include <sstream>

namespace lps::solver {

std::string BoundsReport::to_string() const {
    std::ostringstream os;
    os << "bound=" << name << " lower=" << lower << " upper=" << upper
       << " min=" << observed_min << " max=" << observed_max << " slack=" << slack
       << " pass=" << (pass ? 1 : 0);
    return os.str();
}

BoundsReport check_bounds(const mesh::Field& f, double lower, double upper, double slack,
                          std::string name) {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw InvalidInput("check_bounds: bounds must be finite");
    BoundsReport r;
    r.name = std::move(name);
    r.lower = lower;
    r.upper = upper;
    r.observed_min = f.min();
    r.observed_max = f.max();
    r.slack = slack;
    r.pass = f.finite() && r.observed_min >= lower - slack && r.observed_max <= upper + slack;
    return r;
}

BoundsReport check_bounds_scalar(double value, double lower, double upper, double slack,
                                 std::string name) {
    if (!std::isfinite(lower) || !std::isfinite(upper))
        throw InvalidInput("check_bounds: bounds must be finite");
    BoundsReport r;
    r.name = std::move(name);
    r.lower = lower;
    r.upper = upper;
    r.observed_min = r.observed_max = value;
    r.slack = slack;
    r.pass = std::isfinite(value) && value >= lower - slack && value <= upper + slack;
    return r;
}

}  // namespace lps::solver

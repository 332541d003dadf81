#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lps/cascade.hpp"
#include "lps/config.hpp"

namespace lps::scan {

struct ScanPoint {
    double x0 = 0.0;       ///< scaled laser position
    double uD2 = 0.0;      ///< scaled second-order voltage
    double uD_volts = 0.0; ///< V_th * delta^2 * uD2
    bool bounds_ok = false;
    int iters_phip0 = 0;
    std::string error;     ///< non-empty when the point failed
};

struct ScanResult {
    std::vector<ScanPoint> points;
    double elapsed_s = 0.0;
};

/// Laser scan: psi0 and w are laser independent and their factorizations
/// are reused across every point; points are dispatched to `threads`
/// workers, results are position-ordered and independent of the schedule.
ScanResult run_scan(const config::RunConfig& rc);

/// CSV with the columns
/// x0_scaled,x0_um,uD2_scaled,uD_volts,bounds_ok,iters_phip0
/// at 17 significant digits; byte-stable across thread counts.
void write_csv(std::ostream& os, const ScanResult& r, const config::RunConfig& rc);
std::string csv_string(const ScanResult& r, const config::RunConfig& rc);

}  // namespace lps::scan

#include "lps/scan.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

namespace lps::scan {

ScanResult run_scan(const config::RunConfig& rc) {
    const auto t0 = std::chrono::steady_clock::now();

    mesh::Grid grid = mesh::build_grid(rc.dim, rc.nx, rc.ny, rc.aspect);
    cascade::CascadeSolver solver(grid, rc.doping, rc.setup, rc.cascade_settings);

    std::vector<double> positions;
    // half-step tolerance keeps the endpoint when step divides the range
    for (double x = rc.scan_start; x <= rc.scan_stop + 0.5 * rc.scan_step; x += rc.scan_step)
        positions.push_back(x);

    ScanResult result;
    result.points.resize(positions.size());
    const double d2 = rc.setup.delta * rc.setup.delta;

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= positions.size() || abort.load()) return;
            ScanPoint& pt = result.points[i];
            pt.x0 = positions[i];
            physics::LaserSpec laser = rc.laser;
            laser.x0 = positions[i];
            try {
                const auto sol = solver.solve(laser);
                pt.uD2 = sol.uD2;
                pt.uD_volts = rc.V_th_V * d2 * sol.uD2;
                pt.bounds_ok = sol.bounds_pass();
                pt.iters_phip0 = sol.phip0_report.iterations;
            } catch (const Error& e) {
                pt.error = e.what();
                if (rc.fail_fast) abort.store(true);
            }
        }
    };

    if (rc.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < rc.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (rc.fail_fast)
        for (const auto& pt : result.points)
            if (!pt.error.empty())
                throw StageError("scan", "point x0=" + std::to_string(pt.x0) + ": " + pt.error);

    result.elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const ScanResult& r, const config::RunConfig& rc) {
    os << "x0_scaled,x0_um,uD2_scaled,uD_volts,bounds_ok,iters_phip0\n";
    for (const auto& pt : r.points) {
        if (!pt.error.empty()) {
            os << fmt17(pt.x0) << ",,,,error," << pt.error << "\n";
            continue;
        }
        os << fmt17(pt.x0) << ',' << fmt17(pt.x0 * rc.x_ref_m * 1e6) << ',' << fmt17(pt.uD2)
           << ',' << fmt17(pt.uD_volts) << ',' << (pt.bounds_ok ? 1 : 0) << ','
           << pt.iters_phip0 << "\n";
    }
}

std::string csv_string(const ScanResult& r, const config::RunConfig& rc) {
    std::ostringstream os;
    write_csv(os, r, rc);
    return os.str();
}

}  // namespace lps::scan

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "lps/config.hpp"
#include "lps/full_model.hpp"
#include "lps/scan.hpp"
#include "lps/series.hpp"
#include "lps/series_oracle.hpp"
#include "lps/validation.hpp"

namespace {

using lps::config::KeyValueFile;
using lps::config::Mode;
using lps::config::RunConfig;

constexpr int kExitConfigError = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitValidationError = 4;

void dump_if_requested(const RunConfig& rc, const std::string& name,
                       const lps::mesh::Field& f) {
    if (rc.out_dir.empty()) return;
    std::filesystem::create_directories(rc.out_dir);
    lps::mesh::dump_field_file(rc.out_dir + "/" + name + ".dat", f);
}

int run_mode(const RunConfig& rc) {
    std::cout.precision(12);
    switch (rc.mode) {
        case Mode::scale: {
            if (!rc.scaled)
                throw lps::InvalidInput(
                    "scale mode needs a material preset (material = si|gaas)");
            const auto& s = *rc.scaled;
            std::cout << "lambda = " << s.lambda << "\n"
                      << "delta = " << s.delta << "\n"
                      << "V_th_V = " << s.ref.V_th_V << "\n"
                      << "tau_s = " << s.ref.tau_s << "\n"
                      << "phi0 = " << s.phi0 << "\n"
                      << "n_i_per_cm3 = " << s.ref.n_i_per_cm3 << "\n"
                      << "i_ref_A = " << s.ref.i_ref_A << "\n"
                      << "mu_n_hat = " << s.mu_n << "\n"
                      << "mu_p_hat = " << s.mu_p << "\n"
                      << "Cd_hat = " << s.rec.Cd << "\n"
                      << "Cn_hat = " << s.rec.Cn << "\n"
                      << "Cp_hat = " << s.rec.Cp << "\n"
                      << "tau_n_hat = " << s.rec.tau_n << "\n"
                      << "tau_p_hat = " << s.rec.tau_p << "\n"
                      << "nT_hat = " << s.rec.nT << "\n"
                      << "pT_hat = " << s.rec.pT << "\n"
                      << "R_hat = " << s.R_hat << "\n"
                      << "kappa_hat = " << s.kappa_hat << "\n"
                      << "sigma_hat = " << s.sigma_hat << "\n"
                      << "dA_hat = " << s.dA_hat << "\n";
            return 0;
        }
        case Mode::solve_asym: {
            lps::mesh::Grid g = lps::mesh::build_grid(rc.dim, rc.nx, rc.ny, rc.aspect);
            const auto sol =
                lps::cascade::run_cascade(g, rc.doping, rc.laser, rc.setup, rc.cascade_settings);
            std::cout << "uD2_scaled = " << sol.uD2 << "\n"
                      << "uD2_flux_form = " << sol.uD2_flux_form << "\n"
                      << "uD_scaled = " << sol.uD << "\n"
                      << "uD_volts = " << rc.V_th_V * sol.uD << "\n"
                      << "psi0_newton_iters = " << sol.psi0_report.iterations << "\n"
                      << "phip0_newton_iters = " << sol.phip0_report.iterations << "\n";
            for (const auto& b : sol.bounds) std::cout << b.to_string() << "\n";
            dump_if_requested(rc, "psi0", sol.psi0);
            dump_if_requested(rc, "phip0", sol.phip0);
            dump_if_requested(rc, "w", sol.w);
            dump_if_requested(rc, "phin_star", sol.phin_star);
            dump_if_requested(rc, "phin2", sol.phin2);
            dump_if_requested(rc, "psi2", sol.psi2);
            dump_if_requested(rc, "n0", sol.n0);
            dump_if_requested(rc, "p0", sol.p0);
            dump_if_requested(rc, "generation", lps::physics::generation(g, rc.laser));
            return sol.bounds_pass() ? 0 : kExitValidationError;
        }
        case Mode::solve_full: {
            if (!(rc.setup.delta > 0))
                throw lps::InvalidInput("solve-full needs model.delta > 0");
            lps::mesh::Grid g = lps::mesh::build_grid(rc.dim, rc.nx, rc.ny, rc.aspect);
            const auto casc =
                lps::cascade::run_cascade(g, rc.doping, rc.laser, rc.setup, rc.cascade_settings);
            const auto sol =
                lps::full::solve_full(g, rc.doping, rc.laser, rc.setup, rc.full_settings);
            const double d2 = rc.setup.delta * rc.setup.delta;
            std::cout << "uD_scaled = " << sol.uD << "\n"
                      << "uD_volts = " << rc.V_th_V * sol.uD << "\n"
                      << "iD_scaled = " << sol.iD << "\n"
                      << "coupling_residual = " << sol.coupling_residual << "\n"
                      << "outer_iterations = " << sol.outer_iterations << "\n"
                      << "gummel_sweeps = " << sol.gummel_sweeps << "\n";
            std::cout << "consistency: delta = " << rc.setup.delta
                      << " uD_full = " << sol.uD << " uD_cascade = " << d2 * casc.uD2
                      << " ratio = "
                      << (casc.uD2 != 0 ? sol.uD / (d2 * casc.uD2) : 0.0) << "\n";
            dump_if_requested(rc, "psi", sol.psi);
            dump_if_requested(rc, "phin", sol.phi_n);
            dump_if_requested(rc, "phip", sol.phi_p);
            return 0;
        }
        case Mode::scan: {
            const auto result = lps::scan::run_scan(rc);
            if (rc.out_dir.empty()) {
                lps::scan::write_csv(std::cout, result, rc);
            } else {
                std::filesystem::create_directories(rc.out_dir);
                std::ofstream os(rc.out_dir + "/scan.csv");
                lps::scan::write_csv(os, result, rc);
                std::cout << "wrote " << rc.out_dir << "/scan.csv (" << result.points.size()
                          << " points, " << result.elapsed_s << " s)\n";
            }
            for (const auto& pt : result.points)
                if (!pt.error.empty()) return kExitSolverError;
            return 0;
        }
        case Mode::series_check: {
            const int K = std::min(rc.series_order, lps::series::kMaxOrder);
            std::mt19937_64 rng(rc.seed);
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            lps::series::SeriesInput in;
            for (int k = 0; k <= K; ++k) {
                in.psi.push_back(u(rng));
                in.phi_n.push_back(u(rng));
                in.phi_p.push_back(u(rng));
            }
            const auto c = lps::series::expand_nR(in, rc.setup.rec, K);
            std::cout << "k n p r R F_R oracle_dn oracle_dp oracle_dR\n";
            for (int k = 0; k <= K; ++k) {
                const double n_o = lps::series::oracle::taylor_coefficient(
                    [&](double d) { return lps::series::oracle::eval_n(in, d); }, k);
                const double p_o = lps::series::oracle::taylor_coefficient(
                    [&](double d) { return lps::series::oracle::eval_p_tilde(in, d); }, k);
                const double R_o = lps::series::oracle::taylor_coefficient(
                    [&](double d) {
                        return lps::series::oracle::eval_R_over_d2(in, rc.setup.rec, d);
                    },
                    k, lps::series::oracle::kStepCoarseRate);
                std::cout << k << " " << c.n[k] << " " << c.p[k] << " " << c.r[k] << " "
                          << c.R[k] << " " << c.F_R[k] << " " << c.n[k] - n_o << " "
                          << c.p[k] - p_o << " " << c.R[k] - R_o << "\n";
            }
            return 0;
        }
        case Mode::validate: {
            const auto results = lps::validation::run_all(rc.seed);
            bool all = true;
            for (const auto& r : results) {
                std::cout << "criterion=" << r.name << " pass=" << (r.pass ? 1 : 0)
                          << " time_s=" << r.elapsed_s << " detail=\"" << r.detail << "\"\n";
                all &= r.pass;
            }
            return all ? 0 : kExitValidationError;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward solver for the lateral photovoltage scanning model"};
    app.require_subcommand(1);

    std::string config_path, out_dir, material;
    int threads = 0;
    bool fail_fast = false, verbose = false;
    double spot_radius_um = 0.0;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "scan worker threads");
    app.add_flag("--fail-fast", fail_fast, "abort the scan on the first failed point");
    app.add_flag("--verbose", verbose, "structured solver diagnostics on stderr");
    app.add_option("--material", material, "material preset: si | gaas | scaled");
    app.add_option("--spot-radius-um", spot_radius_um,
                   "laser spot radius in micrometers (no built-in default)");

    static const char* kModes[] = {"scale",        "solve-asym", "solve-full",
                                   "scan",         "series-check", "validate"};
    for (const char* m : kModes) app.add_subcommand(m, "")->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        KeyValueFile kv = config_path.empty()
                              ? KeyValueFile::from_pairs({})
                              : KeyValueFile::parse_file(config_path);
        kv.set("mode", app.get_subcommands().front()->get_name());
        if (!material.empty()) kv.set("material", material);
        if (!out_dir.empty()) kv.set("output.dir", out_dir);
        if (threads > 0) kv.set("run.threads", std::to_string(threads));
        if (fail_fast) kv.set("run.fail_fast", "true");
        if (spot_radius_um > 0) kv.set("laser.spot_radius_um", std::to_string(spot_radius_um));

        RunConfig rc = lps::config::load_run_config(kv);
        if (verbose) rc.cascade_settings.newton.log = &std::cerr;
        return run_mode(rc);
    } catch (const lps::InvalidInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const lps::Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolverError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverError;
    }
}

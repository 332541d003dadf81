#include "lps/validation.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "lps/cascade.hpp"
#include "lps/full_model.hpp"
#include "lps/scan.hpp"
#include "lps/series.hpp"
#include "lps/series_oracle.hpp"
#include "lps/units.hpp"

namespace lps::validation {

namespace {

using cascade::CascadeSettings;
using cascade::CascadeSolver;
using cascade::ModelSetup;
using mesh::Field;
using mesh::Grid;
using physics::DopingProfile;
using physics::LaserSpec;
using physics::RecombinationParams;

class Timer {
public:
    Timer() : t0_(std::chrono::steady_clock::now()) {}
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_;
};

CriterionResult finish(const std::string& name, bool pass, const Timer& t,
                       const std::string& detail, double runtime_limit_s = 0.0) {
    const double elapsed = t.elapsed();
    if (runtime_limit_s > 0.0 && elapsed > runtime_limit_s)
        return {name, false, elapsed, detail + " [exceeded runtime limit]"};
    return {name, pass, elapsed, detail};
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

RecombinationParams unit_rec() {
    RecombinationParams r;
    r.Cd = r.Cn = r.Cp = 1.0;
    r.tau_n = r.tau_p = 1.0;
    r.nT = r.pT = 1.0;
    return r;
}

/// The six estimates enumerated by the bound criterion: psi0, phip0,
/// 0 <= w <= 1, phin2, |uD2| <= uD_bar, psi2. The phin* report stays
/// attached to every solve but is not part of this acceptance gate (its
/// stated lower bound collapses to 0 in the weak-laser regime Gbar < r_low
/// while the solution is correctly negative near the spot).
bool criterion3_bounds_pass(const cascade::AsymptoticSolution& sol, std::ostringstream& log,
                            int case_id) {
    bool ok = true;
    for (const char* name : {"psi0", "phip0", "w", "phin2", "uD2", "psi2"}) {
        const auto& b = sol.bound(name);
        if (!b.pass) {
            ok = false;
            log << "[case " << case_id << " " << b.to_string() << "] ";
        }
    }
    return ok;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

CriterionResult scaling_reproduction() {
    Timer t;
    std::ostringstream d;
    bool pass = true;

    const auto si = units::compute_scaling(units::preset(units::Material::silicon, 20e-6));
    pass &= rel_close(si.lambda, 1.249382e-5, 0.01);
    pass &= rel_close(si.delta, 5.528936e-7, 0.01);
    d << "si lambda=" << si.lambda << " delta=" << si.delta;

    const auto ga =
        units::compute_scaling(units::preset(units::Material::gallium_arsenide, 20e-6));
    pass &= rel_close(ga.lambda, 1.306319e-6, 0.01);
    pass &= rel_close(ga.delta, 2.154036e-12, 0.25);
    d << "; gaas lambda=" << ga.lambda << " delta=" << ga.delta;

    return finish("scaling_reproduction", pass, t, d.str(), 1.0);
}

CriterionResult dark_signal_identity() {
    Timer t;
    Grid g = mesh::build_grid(1, 200);
    DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 0.2);
    ModelSetup s;
    s.lambda = 1e-2;
    s.delta = 5.5e-7;
    s.phi0 = 0.0;
    s.mu_p = 0.35;
    s.rec = unit_rec();
    s.R_hat = 1.0;

    LaserSpec dark;
    dark.kappa = 0.0;
    dark.sigma = 0.05;
    dark.dA = 0.1;
    dark.x0 = 0.5;

    const auto sol = cascade::run_cascade(g, doping, dark, s);
    double phip_dev = 0.0, star_dev = 0.0;
    for (int c = 0; c < g.cell_count(); ++c) {
        phip_dev = std::max(phip_dev, std::abs(sol.phip0[c] - s.phi0));
        star_dev = std::max(star_dev, std::abs(sol.phin_star[c]));
    }
    const bool pass = std::abs(sol.uD2) <= 1e-10 && phip_dev <= 1e-9 && star_dev <= 1e-9;
    std::ostringstream d;
    d << "uD2=" << sol.uD2 << " max|phip0-phi0|=" << phip_dev << " max|phin*|=" << star_dev;
    return finish("dark_signal_identity", pass, t, d.str(), 5.0);
}

CriterionResult bound_suite(unsigned seed) {
    Timer t;
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };

    int failures = 0;
    std::ostringstream d;
    const int cases = 50;
    for (int i = 0; i < cases; ++i) {
        const bool two_d = (i % 3 == 2);
        Grid g = two_d ? mesh::build_grid(2, 8 * (3 + (i % 4)), 12 + (i % 8), uni(0.4, 1.0))
                       : mesh::build_grid(1, 80 + 8 * (i % 16));

        // doping range within [0.5, 1]
        DopingProfile doping;
        if (i % 2 == 0) {
            DopingProfile::Constant c;
            c.level = uni(0.5, 1.0);
            doping = DopingProfile(c);
        } else {
            DopingProfile::Sinusoidal sp;
            sp.mean = 0.75;
            sp.rel_amplitude = uni(0.0, 1.0 / 3.0);
            sp.period = uni(0.15, 0.5);
            sp.axis = 0;
            doping = DopingProfile(sp);
        }

        ModelSetup s;
        s.lambda = std::pow(10.0, uni(-3.0, -0.5));
        s.delta = uni(0.0, 1e-3);
        s.phi0 = uni(-0.5, 0.5);
        s.mu_p = uni(0.2, 1.0);
        s.rec.Cd = uni(0.1, 2.0);
        s.rec.Cn = uni(0.1, 2.0);
        s.rec.Cp = uni(0.1, 2.0);
        s.rec.tau_n = uni(0.5, 2.0);
        s.rec.tau_p = uni(0.5, 2.0);
        s.rec.nT = uni(0.5, 2.0);
        s.rec.pT = uni(0.5, 2.0);
        s.R_hat = uni(0.0, 10.0);

        LaserSpec laser;
        laser.sigma = uni(0.02, 0.08);
        laser.dA = uni(0.05, 0.2);
        laser.x0 = uni(0.15, 0.85);
        // dark every sixth case; otherwise generation dominating
        // recombination, the regime the estimates are written for
        if (i % 6 == 5) {
            laser.kappa = 0.0;
        } else {
            const double r_up_est = s.rec.Cd + s.rec.Cn + 1.0 / (0.5 * s.rec.tau_p);
            const double peak = uni(2.0, 20.0) * (r_up_est + 1.0);
            double shape_max = 1.0 / (2.5066282746310002 * laser.sigma);
            if (two_d) shape_max /= laser.dA;
            laser.kappa = peak / shape_max;
        }

        try {
            const auto sol = cascade::run_cascade(g, doping, laser, s);
            if (!criterion3_bounds_pass(sol, d, i)) ++failures;
        } catch (const Error& e) {
            ++failures;
            d << "[case " << i << " threw: " << e.what() << "] ";
        }
    }
    std::ostringstream head;
    head << cases - failures << "/" << cases << " randomized cases passed all bounds; ";
    return finish("bound_suite", failures == 0, t, head.str() + d.str(), 120.0);
}

CriterionResult asymptotic_consistency() {
    Timer t;
    Grid g = mesh::build_grid(1, 400);
    DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 0.25);
    LaserSpec laser;
    laser.kappa = 5.0;
    laser.sigma = 0.05;
    laser.dA = 0.1;
    laser.x0 = 0.4;

    // the delta = 1e-3 remainder is ~1e-10 in u_D units, so the full solve
    // must run well below the default coupling tolerance; the Newton floor
    // sits near 1e-12 on this grid
    full::FullSettings fs;
    fs.newton.abs_tol = 3e-12;
    fs.gummel_tol = 1e-12;
    fs.coupling_tol = 1e-11;

    const double deltas[3] = {1e-2, 3e-3, 1e-3};
    double errs[3] = {0, 0, 0};
    std::ostringstream d;
    bool solved = true;
    for (int i = 0; i < 3; ++i) {
        ModelSetup s;
        s.lambda = 1e-2;
        s.delta = deltas[i];
        s.mu_p = 0.35;
        s.rec = unit_rec();
        s.R_hat = 10.0;
        try {
            cascade::CascadeSettings cs;
            cs.newton.abs_tol = 3e-12;
            const auto casc = cascade::run_cascade(g, doping, laser, s, cs);
            const auto fullsol = full::solve_full(g, doping, laser, s, fs);
            errs[i] = std::abs(fullsol.uD - casc.uD) / (deltas[i] * deltas[i]);
            d << "delta=" << deltas[i] << " e=" << errs[i] << " uD2=" << casc.uD2
              << " uD_full=" << fullsol.uD << "; ";
        } catch (const Error& e) {
            solved = false;
            d << "delta=" << deltas[i] << " threw: " << e.what() << "; ";
        }
    }
    bool pass = solved && errs[0] > errs[1] && errs[1] > errs[2];
    double slope = 0.0;
    if (solved && errs[2] > 0) {
        slope = std::log(errs[0] / errs[2]) / std::log(deltas[0] / deltas[2]);
        d << "slope=" << slope;
        pass = pass && slope >= 0.7;
    }
    return finish("asymptotic_consistency", pass, t, d.str(), 180.0);
}

CriterionResult series_oracle_equivalence(unsigned seed) {
    Timer t;
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };

    bool pass = true;
    std::ostringstream d;
    double worst = 0.0;

    // partition counts p(k) for k = 1..6
    const int expected_counts[6] = {1, 2, 3, 5, 7, 11};
    for (int k = 1; k <= 6; ++k)
        if (series::partition_count(k) != expected_counts[k - 1]) {
            pass = false;
            d << "partition_count(" << k << ") wrong; ";
        }

    const int K = 3;
    for (int trial = 0; trial < 20; ++trial) {
        series::SeriesInput in;
        for (int k = 0; k <= K; ++k) {
            in.psi.push_back(uni(-0.5, 0.5));
            in.phi_n.push_back(uni(-0.5, 0.5));
            in.phi_p.push_back(uni(-0.5, 0.5));
        }
        RecombinationParams rec;
        rec.Cd = uni(0.2, 1.5);
        rec.Cn = uni(0.2, 1.5);
        rec.Cp = uni(0.2, 1.5);
        rec.tau_n = uni(0.5, 2.0);
        rec.tau_p = uni(0.5, 2.0);
        rec.nT = uni(0.2, 1.5);
        rec.pT = uni(0.2, 1.5);

        const auto coeffs = series::expand_nR(in, rec, K);
        for (int k = 0; k <= K; ++k) {
            const double n_o = series::oracle::taylor_coefficient(
                [&](double dd) { return series::oracle::eval_n(in, dd); }, k);
            const double p_o = series::oracle::taylor_coefficient(
                [&](double dd) { return series::oracle::eval_p_tilde(in, dd); }, k);
            const double R_o = series::oracle::taylor_coefficient(
                [&](double dd) { return series::oracle::eval_R_over_d2(in, rec, dd); }, k,
                series::oracle::kStepCoarseRate);
            const double en = std::abs(coeffs.n[k] - n_o) / std::max(1.0, std::abs(n_o));
            const double ep = std::abs(coeffs.p[k] - p_o) / std::max(1.0, std::abs(p_o));
            const double eR = std::abs(coeffs.R[k] - R_o) / std::max(1.0, std::abs(R_o));
            worst = std::max({worst, en, ep, eR});
        }

        // Cauchy-product identity of the reciprocal expansion
        std::vector<double> a;
        for (int k = 0; k <= K; ++k) a.push_back(k == 0 ? uni(0.5, 2.0) : uni(-1.0, 1.0));
        const auto rec_coeffs = series::expand_reciprocal(a);
        const auto prod = series::cauchy_product(a, rec_coeffs);
        for (int k = 0; k <= K; ++k) {
            const double want = k == 0 ? 1.0 : 0.0;
            if (std::abs(prod[k] - want) > 1e-12) {
                pass = false;
                d << "cauchy identity violated at order " << k << "; ";
            }
        }
    }
    pass = pass && worst <= 1e-6;
    d << "worst oracle mismatch=" << worst;
    return finish("series_oracle_equivalence", pass, t, d.str(), 30.0);
}

CriterionResult discretization_order() {
    Timer t;
    std::ostringstream d;
    bool pass = true;

    // -d/dx(a du/dx) = f with a = 1 + 0.5 sin(2 pi x), u = sin(pi x)
    auto afun = [](double x) { return 1.0 + 0.5 * std::sin(2 * M_PI * x); };
    auto dafun = [](double x) { return M_PI * std::cos(2 * M_PI * x); };
    auto ufun = [](double x) { return std::sin(M_PI * x); };
    auto dufun = [](double x) { return M_PI * std::cos(M_PI * x); };
    auto d2ufun = [](double x) { return -M_PI * M_PI * std::sin(M_PI * x); };

    {
        double prev_err = 0.0;
        std::vector<double> errs;
        for (int nx : {32, 64, 128, 256}) {
            Grid g = mesh::build_grid(1, nx);
            solver::EllipticProblem p;
            p.grid = &g;
            p.coeff = Field(g);
            p.rhs = Field(g);
            for (int c = 0; c < g.cell_count(); ++c) {
                const double x = g.cell_center(c)[0];
                p.coeff[c] = afun(x);
                p.rhs[c] = -(dafun(x) * dufun(x) + afun(x) * d2ufun(x));
            }
            p.dirichlet.d1 = ufun(0.0);
            p.dirichlet.d2 = ufun(1.0);
            auto sys = solver::assemble_diffusion(p);
            auto lu = sparse::BandedLU::factor(sys.A);
            auto u = lu.solve_copy(sys.b);
            double err = 0.0;
            for (int c = 0; c < g.cell_count(); ++c)
                err = std::max(err, std::abs(u[c] - ufun(g.cell_center(c)[0])));
            errs.push_back(err);
            prev_err = err;
        }
        (void)prev_err;
        double min_order = 1e9;
        for (std::size_t i = 1; i < errs.size(); ++i)
            min_order = std::min(min_order, std::log2(errs[i - 1] / errs[i]));
        d << "1d orders>=" << min_order << "; ";
        pass = pass && min_order >= 1.9;
    }

    {
        // 2D: u = sin(pi x) cos(pi y / Ly), zero normal derivative on the
        // Neumann sides, same smooth a(x)
        const double Ly = 0.5;
        std::vector<double> errs;
        for (int nx : {16, 32, 64, 128}) {
            Grid g = mesh::build_grid(2, nx, nx / 2, Ly);
            solver::EllipticProblem p;
            p.grid = &g;
            p.coeff = Field(g);
            p.rhs = Field(g);
            const double ky = M_PI / Ly;
            for (int c = 0; c < g.cell_count(); ++c) {
                const auto xy = g.cell_center(c);
                const double x = xy[0], y = xy[1];
                const double u = std::sin(M_PI * x) * std::cos(ky * y);
                const double ux = M_PI * std::cos(M_PI * x) * std::cos(ky * y);
                const double uxx = -M_PI * M_PI * u;
                const double uyy = -ky * ky * u;
                p.coeff[c] = afun(x);
                p.rhs[c] = -(dafun(x) * ux + afun(x) * (uxx + uyy));
            }
            p.dirichlet.per_face.assign(g.faces().size(), 0.0);
            for (mesh::Tag tag : {mesh::Tag::dirichlet1, mesh::Tag::dirichlet2})
                for (int k : g.tagged_faces(tag)) {
                    const auto& f = g.faces()[k];
                    p.dirichlet.per_face[k] =
                        std::sin(M_PI * f.center[0]) * std::cos(ky * f.center[1]);
                }
            auto sys = solver::assemble_diffusion(p);
            auto lu = sparse::BandedLU::factor(sys.A);
            auto u = lu.solve_copy(sys.b);
            double err = 0.0;
            for (int c = 0; c < g.cell_count(); ++c) {
                const auto xy = g.cell_center(c);
                err = std::max(err,
                               std::abs(u[c] - std::sin(M_PI * xy[0]) * std::cos(ky * xy[1])));
            }
            errs.push_back(err);
        }
        double min_order = 1e9;
        for (std::size_t i = 1; i < errs.size(); ++i)
            min_order = std::min(min_order, std::log2(errs[i - 1] / errs[i]));
        d << "2d orders>=" << min_order;
        pass = pass && min_order >= 1.9;
    }
    return finish("discretization_order", pass, t, d.str(), 60.0);
}

CriterionResult qualitative_reproduction() {
    Timer t;
    Grid g = mesh::build_grid(1, 600);
    // 0.2 relative amplitude with a 100 um period on the 3 mm crystal
    DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 1.0 / 30.0);
    ModelSetup s;
    s.lambda = 1.249382e-5;
    s.delta = 5.528936e-7;
    s.mu_p = 0.35;
    s.rec = unit_rec();
    s.R_hat = 1.0;

    LaserSpec laser;
    laser.kappa = 0.3;
    laser.sigma = 0.02;
    laser.dA = 0.1;
    laser.x0 = 0.37;

    const auto sol = cascade::run_cascade(g, doping, laser, s);

    std::vector<double> logC(g.cell_count()), psi0(g.cell_count());
    const Field C = doping.evaluate(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        logC[c] = std::log(C[c]);
        psi0[c] = sol.psi0[c];
    }
    const double corr = pearson(logC, psi0);

    int argmax = 0;
    for (int c = 1; c < g.cell_count(); ++c)
        if (sol.p0[c] > sol.p0[argmax]) argmax = c;
    const double xpeak = g.cell_center(argmax)[0];

    double n_dev = 0.0;  // max |n - n0| / n0 with n = n0 (1 + delta^2 (psi2 - phin2))
    const double d2 = s.delta * s.delta;
    for (int c = 0; c < g.cell_count(); ++c)
        n_dev = std::max(n_dev, d2 * std::abs(sol.psi2[c] - sol.phin2[c]));

    const bool pass = corr > 0.9 && std::abs(xpeak - laser.x0) <= 3.0 * laser.sigma &&
                      n_dev <= 10.0 * d2;
    std::ostringstream d;
    d << "pearson=" << corr << " |xpeak-x0|=" << std::abs(xpeak - laser.x0)
      << " (3sigma=" << 3 * laser.sigma << ") max|n-n0|/n0=" << n_dev
      << " (10 delta^2=" << 10 * d2 << ")";
    return finish("qualitative_reproduction", pass, t, d.str(), 60.0);
}

CriterionResult antisymmetry_determinism() {
    Timer t;
    config::RunConfig rc;
    rc.dim = 1;
    rc.nx = 200;
    rc.doping = DopingProfile(DopingProfile::Constant{1.0});
    rc.setup.lambda = 1e-2;
    rc.setup.delta = 1e-4;
    rc.setup.mu_p = 0.35;
    rc.setup.rec = unit_rec();
    rc.setup.R_hat = 1.0;
    rc.laser.kappa = 1.0;
    rc.laser.sigma = 0.05;
    rc.laser.dA = 0.1;
    rc.scan_start = 0.3;
    rc.scan_stop = 0.7;
    rc.scan_step = 0.05;
    rc.threads = 1;

    const auto serial = scan::run_scan(rc);
    rc.threads = 4;
    const auto parallel = scan::run_scan(rc);

    const std::string csv_a = scan::csv_string(serial, rc);
    const std::string csv_b = scan::csv_string(parallel, rc);
    const bool identical = csv_a == csv_b;

    double worst = 0.0;
    const std::size_t m = serial.points.size();
    for (std::size_t i = 0; i < m; ++i) {
        const auto& lo = serial.points[i];
        const auto& hi = serial.points[m - 1 - i];
        worst = std::max(worst, std::abs(lo.uD2 + hi.uD2));
    }
    const bool pass = identical && worst <= 1e-8;
    std::ostringstream d;
    d << "max|u(c+s)+u(c-s)|=" << worst << " serial/parallel byte-identical=" << identical;
    return finish("antisymmetry_determinism", pass, t, d.str());
}

std::vector<CriterionResult> run_all(unsigned seed) {
    std::vector<CriterionResult> out;
    out.push_back(scaling_reproduction());
    out.push_back(dark_signal_identity());
    out.push_back(bound_suite(seed));
    out.push_back(asymptotic_consistency());
    out.push_back(series_oracle_equivalence(seed + 1));
    out.push_back(discretization_order());
    out.push_back(qualitative_reproduction());
    out.push_back(antisymmetry_determinism());
    return out;
}

}  // namespace lps::validation

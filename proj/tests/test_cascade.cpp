#include <doctest.h>

#include <cmath>
#include <random>

#include "fd_check.hpp"
#include "lps/cascade.hpp"

using namespace lps;
using cascade::CascadeSettings;
using cascade::CascadeSolver;
using cascade::ModelSetup;
using mesh::Field;
using mesh::Grid;
using physics::DopingProfile;
using physics::LaserSpec;

namespace {

ModelSetup base_setup() {
    ModelSetup s;
    s.lambda = 1e-2;
    s.delta = 1e-3;
    s.phi0 = 0.0;
    s.mu_p = 0.35;
    s.rec.Cd = 1.0;
    s.rec.Cn = 1.0;
    s.rec.Cp = 1.0;
    s.rec.tau_n = 1.0;
    s.rec.tau_p = 1.0;
    s.rec.nT = 1.0;
    s.rec.pT = 1.0;
    s.R_hat = 1.0;
    return s;
}

LaserSpec base_laser(double kappa = 1.0, double x0 = 0.4) {
    LaserSpec l;
    l.kappa = kappa;
    l.sigma = 0.05;
    l.dA = 0.1;
    l.x0 = x0;
    return l;
}

}  // namespace

TEST_CASE("psi0 is the electroneutral constant for uniform doping") {
    Grid g = mesh::build_grid(1, 100);
    ModelSetup s = base_setup();
    s.phi0 = 0.25;
    s.contact_data = ModelSetup::ContactData::strict_limit;
    CascadeSolver solver(g, DopingProfile(DopingProfile::Constant{1.0}), s);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(std::abs(solver.psi0()[c] - s.phi0) <= 1e-10);
}

TEST_CASE("psi0 respects the order-0 maximum principle bounds") {
    Grid g = mesh::build_grid(1, 160);
    // sinusoidal profile between 0.8 and 1.2
    DopingProfile::Sinusoidal sp;
    sp.mean = 1.0;
    sp.rel_amplitude = 0.2;
    sp.period = 0.25;
    CascadeSolver solver(g, DopingProfile(sp), base_setup());
    const auto sol = solver.solve(base_laser(0.0));
    const auto& b = sol.bound("psi0");
    CHECK(b.pass);
    // interior values between phi0 + ln 0.8 and phi0 + ln 1.2 up to contact data
    CHECK(sol.psi0.min() >= std::min(std::log(0.8), b.lower) - 1e-8);
    CHECK(sol.psi0.max() <= std::max(std::log(1.2), b.upper) + 1e-8);
}

TEST_CASE("large lambda turns psi0 into the harmonic interpolant") {
    Grid g = mesh::build_grid(1, 120);
    ModelSetup s = base_setup();
    s.lambda = 1e3;
    DopingProfile::Sinusoidal sp;
    sp.mean = 1.0;
    sp.rel_amplitude = 0.15;
    sp.period = 0.3;
    DopingProfile doping(sp);
    CascadeSettings cs;
    cs.newton.rel_tol = 1e-12;  // residual scale carries the lambda^2 factor
    CascadeSolver solver(g, doping, s, cs);

    // reference: a = eps Laplace solve with the same contact data
    solver::EllipticProblem p;
    p.grid = &g;
    p.coeff = Field(g, s.eps);
    p.rhs = Field(g, 0.0);
    p.dirichlet = cascade::electroneutral_contact_data(g, doping, s);
    auto sys = solver::assemble_diffusion(p);
    auto harmonic = sparse::BandedLU::factor(sys.A).solve_copy(sys.b);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(std::abs(solver.psi0()[c] - harmonic[c]) <= 1e-3);
}

TEST_CASE("psi0 newton shows a quadratic tail") {
    Grid g = mesh::build_grid(1, 200);
    ModelSetup s = base_setup();
    s.lambda = 0.5;
    DopingProfile::Sinusoidal sp;
    sp.mean = 0.6;
    sp.rel_amplitude = 0.3;
    sp.period = 0.21;
    CascadeSolver solver(g, DopingProfile(sp), s);
    const auto& hist = solver.psi0_report().residual_history;
    REQUIRE(hist.size() >= 3);
    int checked = 0;
    for (std::size_t i = 1; i + 1 < hist.size(); ++i) {
        if (hist[i] < 1e-13 || hist[i + 1] < 1e-14) continue;  // roundoff floor
        const double ratio = hist[i + 1] / (hist[i] * hist[i]);
        CHECK(ratio <= 1e3);
        ++checked;
    }
    CHECK(checked >= 1);
}

TEST_CASE("dark case solves every stage trivially") {
    Grid g = mesh::build_grid(1, 200);
    CascadeSolver solver(g, DopingProfile::sinusoidal_normalized(0.2, 0.2), base_setup());
    const auto sol = solver.solve(base_laser(0.0));
    CHECK(std::abs(sol.uD2) <= 1e-10);
    CHECK(std::abs(sol.uD) <= 1e-10);
    for (int c = 0; c < g.cell_count(); ++c) {
        CHECK(std::abs(sol.phip0[c] - 0.0) <= 1e-10);
        CHECK(std::abs(sol.phin_star[c]) <= 1e-10);
        CHECK(std::abs(sol.phi_n[c] - 0.0) <= 1e-10);
    }
    CHECK(sol.bounds_pass());
    // dark psi2 solves an M-matrix system with positive load: interior > 0
    CHECK(sol.psi2.min() > 0.0);
}

TEST_CASE("phip0 under illumination") {
    Grid g = mesh::build_grid(1, 200);
    CascadeSolver solver(g, DopingProfile::sinusoidal_normalized(0.2, 0.25), base_setup());
    const auto sol = solver.solve(base_laser(2.0, 0.45));
    CHECK(sol.bound("phip0").pass);
    // minimum principle: G >= 0 keeps phip0 above phi0 (discrete argument)
    CHECK(sol.phip0.min() >= 0.0 - 1e-10);
    // hole density peaks within 3 sigma of the spot
    int argmax = 0;
    for (int c = 1; c < g.cell_count(); ++c)
        if (sol.p0[c] > sol.p0[argmax]) argmax = c;
    CHECK(std::abs(g.cell_center(argmax)[0] - 0.45) <= 3 * 0.05);
}

TEST_CASE("w problem with constant coefficient is the linear interpolant") {
    Grid g = mesh::build_grid(1, 64);
    const Field w = cascade::solve_w(g, Field(g, 2.5), 1.0);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(w[c] == doctest::Approx(g.cell_center(c)[0]).epsilon(1e-12));
}

TEST_CASE("w stays within [0,1] for rough coefficients") {
    Grid g = mesh::build_grid(2, 24, 16, 0.7);
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> uni(0.05, 20.0);
    Field n0(g);
    for (int c = 0; c < g.cell_count(); ++c) n0[c] = uni(rng);
    const Field w = cascade::solve_w(g, n0, 0.8);
    CHECK(w.min() >= -1e-12);
    CHECK(w.max() <= 1.0 + 1e-12);
}

TEST_CASE("two-resistor formula at the material interface") {
    // n0 = 1 on the left half, 2 on the right: w(1/2) = (1/1)/((1/1)+(1/2)) = 2/3
    double prev_err = 0.0;
    for (int nx : {80, 160, 320}) {
        Grid g = mesh::build_grid(1, nx);
        Field n0(g);
        for (int c = 0; c < g.cell_count(); ++c)
            n0[c] = g.cell_center(c)[0] < 0.5 ? 1.0 : 2.0;
        const Field w = cascade::solve_w(g, n0, 1.0);
        const double w_mid = 0.5 * (w[nx / 2 - 1] + w[nx / 2]);
        const double err = std::abs(w_mid - 2.0 / 3.0);
        CHECK(err <= 2.0 / nx);
        if (prev_err > 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("phin* with constant source is the closed-form parabola") {
    const double c0 = 3.0, mu_n = 0.7;
    double prev_err = 0.0;
    for (int nx : {64, 128}) {
        Grid g = mesh::build_grid(1, nx);
        const Field star = cascade::solve_zero_contact(g, Field(g, 1.0), mu_n, Field(g, c0));
        double err = 0.0;
        for (int c = 0; c < g.cell_count(); ++c) {
            const double x = g.cell_center(c)[0];
            err = std::max(err, std::abs(star[c] - c0 * x * (1.0 - x) / (2.0 * mu_n)));
        }
        CHECK(err <= 2.0 * c0 / mu_n / (nx * nx));
        if (prev_err > 0) CHECK(prev_err / err > 3.0);
        prev_err = err;
    }
}

TEST_CASE("phin* sign near the spot follows the local source sign") {
    Grid g = mesh::build_grid(1, 200);
    CascadeSolver solver(g, DopingProfile(DopingProfile::Constant{1.0}), base_setup());
    const auto sol = solver.solve(base_laser(2.0, 0.5));
    // at the spot the generation dominates recombination, so R0 - G < 0
    const int spot = g.cell_count() / 2;
    const Field G = physics::generation(g, base_laser(2.0, 0.5));
    const double R0 = physics::r0(sol.n0[spot], solver.setup().rec) *
                      std::expm1(sol.phip0[spot] - solver.setup().phi0);
    REQUIRE(R0 - G[spot] < 0.0);
    CHECK(sol.phin_star[spot] < 0.0);
}

TEST_CASE("uD2 closed form: zero resistance and dark limits") {
    Grid g = mesh::build_grid(1, 150);
    ModelSetup s = base_setup();
    s.R_hat = 0.0;
    CascadeSolver solver(g, DopingProfile::sinusoidal_normalized(0.2, 0.25), s);
    CHECK(solver.solve(base_laser(1.5, 0.4)).uD2 == 0.0);

    ModelSetup s2 = base_setup();
    s2.R_hat = 5.0;
    CascadeSolver solver2(g, DopingProfile::sinusoidal_normalized(0.2, 0.25), s2);
    CHECK(std::abs(solver2.solve(base_laser(0.0)).uD2) <= 1e-12);
}

TEST_CASE("uD2 approaches the infinite-resistance limit monotonically") {
    Grid g = mesh::build_grid(1, 150);
    const DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 0.25);
    double u3 = 0, u6 = 0, u9 = 0;
    for (double* u : {&u3, &u6, &u9}) {
        ModelSetup s = base_setup();
        s.R_hat = (u == &u3) ? 1e3 : (u == &u6 ? 1e6 : 1e9);
        CascadeSolver solver(g, doping, s);
        *u = solver.solve(base_laser(1.0, 0.4)).uD2;
    }
    CHECK(std::abs(u3) < std::abs(u6));
    CHECK(std::abs(u6) < std::abs(u9));
    CHECK(std::abs(u9 - u6) < 1e-2 * std::abs(u9));
    CHECK(u3 * u9 > 0.0);
}

TEST_CASE("uD2 derivative in the resistance at zero") {
    Grid g = mesh::build_grid(1, 150);
    const DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 0.25);
    const LaserSpec laser = base_laser(1.2, 0.42);

    ModelSetup s = base_setup();
    s.R_hat = 1e-4;
    CascadeSolver sa(g, doping, s);
    const auto sola = sa.solve(laser);
    s.R_hat = 2e-4;
    CascadeSolver sb(g, doping, s);
    const auto solb = sb.solve(laser);

    // numerator integral from the solved fields
    Field an(g), ap(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        an[c] = sola.n0[c];
        ap[c] = s.mu_p * sola.p0[c];
    }
    solver::DirichletData wd, zero, phipd;
    wd.d2 = 1.0;
    phipd.d1 = phipd.d2 = 0.0;
    const auto an_f = solver::face_coefficients(g, an);
    const auto ap_f = solver::face_coefficients(g, ap);
    const double num =
        solver::gradient_form(g, an_f, sola.phin_star, zero, sola.w, wd) +
        solver::gradient_form(g, ap_f, sola.phip0, phipd, sola.w, wd);

    const double fd = (solb.uD2 - sola.uD2) / 1e-4;  // second-order term cancels slowly
    const double analytic = -num;
    CHECK(fd == doctest::Approx(analytic).epsilon(1e-3));
    CHECK(sola.uD2 / 1e-4 == doctest::Approx(analytic).epsilon(1e-3));
}

TEST_CASE("phin2 superposition and coupled residual") {
    Grid g = mesh::build_grid(1, 180);
    CascadeSolver solver(g, DopingProfile::sinusoidal_normalized(0.2, 0.25), base_setup());
    const auto sol = solver.solve(base_laser(1.0, 0.35));
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(sol.phin2[c] ==
              doctest::Approx(sol.phin_star[c] + sol.uD2 * sol.w[c]).epsilon(1e-14));
    CHECK(sol.phin2_residual_inf <= 1e-10);
    CHECK(sol.bound("phin2").pass);
    // volume and contact-flux forms of the coupling agree
    CHECK(std::abs(sol.uD2 - sol.uD2_flux_form) <= 1e-10);
}

TEST_CASE("psi2 with a constant compatible load is constant") {
    // p0 = n0 k with phin2 = 0 and both contacts forcing k admits the
    // constant solution psi2 = k exactly
    Grid g = mesh::build_grid(1, 90);
    const double k = 0.8;
    Field n0(g);
    std::mt19937_64 rng(89);
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    for (int c = 0; c < g.cell_count(); ++c) n0[c] = uni(rng);
    ModelSetup s = base_setup();

    solver::EllipticProblem p;
    p.grid = &g;
    p.coeff = Field(g, s.eps);
    p.rhs = Field(g, 0.0);
    p.dirichlet.d1 = k;
    p.dirichlet.d2 = k;
    auto sys = solver::assemble_diffusion(p);
    const double l2 = s.lambda * s.lambda;
    const double vol = g.cell_volume();
    std::vector<int> ri, ci;
    std::vector<double> vv;
    for (int i = 0; i < sys.A.size(); ++i)
        for (int q = sys.A.row_ptr()[i]; q < sys.A.row_ptr()[i + 1]; ++q) {
            ri.push_back(i);
            ci.push_back(sys.A.col()[q]);
            vv.push_back(l2 * sys.A.val()[q]);
        }
    std::vector<double> b(g.cell_count());
    for (int c = 0; c < g.cell_count(); ++c) {
        ri.push_back(c);
        ci.push_back(c);
        vv.push_back(vol * n0[c]);
        b[c] = l2 * sys.b[c] + vol * (n0[c] * k);  // source = p0 = n0 k
    }
    auto op = sparse::SparseMatrix::from_triplets(g.cell_count(), ri, ci, vv);
    auto psi2 = sparse::BandedLU::factor(op).solve_copy(b);
    for (int c = 0; c < g.cell_count(); ++c)
        CHECK(psi2[c] == doctest::Approx(k).epsilon(1e-12));

    // and the exposed stage solve satisfies its defining residual
    Field source(g);
    for (int c = 0; c < g.cell_count(); ++c) source[c] = n0[c] * k;
    const Field staged = cascade::solve_psi2_system(g, s, n0, source, k);
    solver::EllipticProblem p2 = p;
    p2.dirichlet.d1 = 0.0;
    auto sys2 = solver::assemble_diffusion(p2);
    auto Au = sys2.A.multiply(staged.values());
    for (int c = 0; c < g.cell_count(); ++c) {
        const double res = l2 * (Au[c] - sys2.b[c]) + vol * (n0[c] * staged[c] - source[c]);
        CHECK(std::abs(res) <= 1e-11);
    }
}

TEST_CASE("run_cascade reconstruction uses only even orders") {
    Grid g = mesh::build_grid(1, 120);
    CascadeSolver solver(g, DopingProfile::sinusoidal_normalized(0.2, 0.25), base_setup());
    const auto sol = solver.solve(base_laser(1.0, 0.55));
    const double d2 = sol.delta * sol.delta;
    for (int c = 0; c < g.cell_count(); ++c) {
        CHECK(sol.psi[c] == doctest::Approx(sol.psi0[c] + d2 * sol.psi2[c]).epsilon(1e-14));
        CHECK(sol.phi_n[c] == doctest::Approx(d2 * sol.phin2[c]).epsilon(1e-14));
        CHECK(sol.phi_p[c] == doctest::Approx(sol.phip0[c]).epsilon(1e-14));
        CHECK(sol.n2[c] ==
              doctest::Approx(sol.n0[c] * (sol.psi2[c] - sol.phin2[c])).epsilon(1e-14));
    }
    CHECK(sol.uD == doctest::Approx(d2 * sol.uD2).epsilon(1e-14));
}

TEST_CASE("gauge invariance of the cascade") {
    Grid g = mesh::build_grid(1, 140);
    const DopingProfile doping = DopingProfile::sinusoidal_normalized(0.2, 0.25);
    const LaserSpec laser = base_laser(1.0, 0.45);
    ModelSetup s = base_setup();
    CascadeSolver sa(g, doping, s);
    const auto sola = sa.solve(laser);
    const double shift = 0.9;
    s.phi0 += shift;
    CascadeSolver sb(g, doping, s);
    const auto solb = sb.solve(laser);
    for (int c = 0; c < g.cell_count(); ++c) {
        CHECK(std::abs(solb.psi0[c] - sola.psi0[c] - shift) <= 1e-10);
        CHECK(std::abs(solb.phip0[c] - sola.phip0[c] - shift) <= 1e-10);
        CHECK(std::abs(solb.n0[c] - sola.n0[c]) <= 1e-10 * sola.n0[c]);
        CHECK(std::abs(solb.p0[c] - sola.p0[c]) <= 1e-10 * std::max(1.0, sola.p0[c]));
        CHECK(std::abs(solb.w[c] - sola.w[c]) <= 1e-10);
        CHECK(std::abs(solb.phin_star[c] - sola.phin_star[c]) <= 1e-10);
        CHECK(std::abs(solb.phin2[c] - sola.phin2[c]) <= 1e-10);
    }
    CHECK(std::abs(solb.uD2 - sola.uD2) <= 1e-10 * std::max(1.0, std::abs(sola.uD2)));
}

TEST_CASE("scan signal oscillates with the doping gradient") {
    Grid g = mesh::build_grid(1, 200);
    DopingProfile::Sinusoidal sp;
    sp.mean = 0.8;
    sp.rel_amplitude = 0.2;
    sp.period = 0.5;
    CascadeSolver solver(g, DopingProfile(sp), base_setup());

    std::vector<double> u, minus_dC;
    for (double x0 = 0.1; x0 <= 0.901; x0 += 0.05) {
        u.push_back(solver.solve(base_laser(1.0, x0)).uD2);
        minus_dC.push_back(-sp.mean * sp.rel_amplitude * 2 * M_PI / sp.period *
                           std::cos(2 * M_PI * x0 / sp.period));
    }
    // the signal changes sign as the scan sweeps across gradient reversals
    bool flips = false;
    for (std::size_t i = 1; i < u.size(); ++i) flips |= (u[i - 1] * u[i] < 0.0);
    CHECK(flips);
    // and its oscillation tracks the negative doping gradient
    double mu = 0.0;
    for (double v : u) mu += v;
    mu /= u.size();
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sab += (u[i] - mu) * minus_dC[i];
        saa += (u[i] - mu) * (u[i] - mu);
        sbb += minus_dC[i] * minus_dC[i];
    }
    CHECK(sab / std::sqrt(saa * sbb) > 0.8);
}

TEST_CASE("jacobians of the cascade stage problems match finite differences") {
    Grid g = mesh::build_grid(1, 12);
    const DopingProfile doping = DopingProfile::sinusoidal_normalized(0.3, 0.4);
    const Field C = doping.evaluate(g);
    ModelSetup s = base_setup();
    const auto data = cascade::electroneutral_contact_data(g, doping, s);

    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> uni(-0.4, 0.4);

    auto psi_problem = cascade::make_psi0_problem(g, C, data, s);
    std::vector<double> x(g.cell_count());
    for (auto& v : x) v = uni(rng);
    CHECK(jacobian_fd_mismatch(*psi_problem, x) <= 1e-6);

    Field psi0(g), r0f(g);
    for (int c = 0; c < g.cell_count(); ++c) {
        psi0[c] = std::log(C[c]);
        r0f[c] = physics::r0(std::exp(psi0[c]), s.rec);
    }
    const Field G = physics::generation(g, base_laser(1.0, 0.5));
    auto phip_problem = cascade::make_phip0_problem(g, psi0, r0f, G, s);
    for (auto& v : x) v = uni(rng);
    CHECK(jacobian_fd_mismatch(*phip_problem, x) <= 1e-6);
}

TEST_CASE("stage failures carry the stage identity") {
    Grid g = mesh::build_grid(1, 60);
    CascadeSettings cs;
    cs.newton.max_iters = 1;
    cs.newton.abs_tol = 1e-14;
    CascadeSolver solver(g, DopingProfile(DopingProfile::Constant{1.0}), base_setup(), cs);
    try {
        solver.solve(base_laser(50.0, 0.5));
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "phip0");
    }
}

TEST_CASE("2d cascade: bounds, coupling consistency and y-decay") {
    Grid g = mesh::build_grid(2, 36, 20, 0.6);
    DopingProfile::Sinusoidal sp;
    sp.mean = 0.8;
    sp.rel_amplitude = 0.2;
    sp.period = 0.3;
    CascadeSolver solver(g, DopingProfile(sp), base_setup());
    physics::LaserSpec laser;
    laser.kappa = 1.5;
    laser.sigma = 0.06;
    laser.dA = 0.15;
    laser.x0 = 0.45;
    const auto sol = solver.solve(laser);
    CHECK(sol.bounds_pass());
    CHECK(std::abs(sol.uD2 - sol.uD2_flux_form) <= 1e-10);
    CHECK(sol.phin2_residual_inf <= 1e-10);
    // holes concentrate near the illuminated y = 0 surface
    int argmax = 0;
    for (int c = 1; c < g.cell_count(); ++c)
        if (sol.p0[c] > sol.p0[argmax]) argmax = c;
    CHECK(g.cell_center(argmax)[1] < 0.5 * g.length_y());
    CHECK(std::abs(g.cell_center(argmax)[0] - laser.x0) <= 3 * laser.sigma);
}

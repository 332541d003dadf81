#include <doctest.h>

#include <cmath>
#include <cstring>

#include "lps/units.hpp"

using namespace lps;
using units::Material;
using units::PhysicalParams;

namespace {
const double kSpot = 20e-6;
}

TEST_CASE("intrinsic density of the silicon preset") {
    const PhysicalParams p = units::preset(Material::silicon, kSpot);
    const double ni = units::intrinsic_density_per_cm3(p);
    // direct evaluation of the closed form; the resulting delta = ni/Cbar
    // must land on the published value
    CHECK(ni == doctest::Approx(6.6e9).epsilon(0.02));
    CHECK(ni / p.C_ref_per_cm3 == doctest::Approx(5.528936e-7).epsilon(0.01));
}

TEST_CASE("zero band gap kills the exponential") {
    PhysicalParams p = units::preset(Material::silicon, kSpot);
    p.E_c_eV = p.E_v_eV = 0.5;
    const double ni = units::intrinsic_density_per_cm3(p);
    CHECK(ni == doctest::Approx(std::sqrt(p.N_c_per_cm3 * p.N_v_per_cm3)).epsilon(1e-14));
}

TEST_CASE("gallium arsenide delta ratio") {
    const PhysicalParams p = units::preset(Material::gallium_arsenide, kSpot);
    const double ni = units::intrinsic_density_per_cm3(p);
    CHECK(ni / 1.2e18 == doctest::Approx(2.154036e-12).epsilon(0.25));
}

TEST_CASE("published scaling constants") {
    const auto si = units::compute_scaling(units::preset(Material::silicon, kSpot));
    CHECK(si.lambda == doctest::Approx(1.249382e-5).epsilon(0.01));
    CHECK(si.delta == doctest::Approx(5.528936e-7).epsilon(0.01));

    const auto ga = units::compute_scaling(units::preset(Material::gallium_arsenide, kSpot));
    CHECK(ga.lambda == doctest::Approx(1.306319e-6).epsilon(0.01));
    CHECK(ga.delta == doctest::Approx(2.154036e-12).epsilon(0.25));
}

TEST_CASE("lambda scales as the inverse square root of the doping reference") {
    PhysicalParams p = units::preset(Material::silicon, kSpot);
    const auto s1 = units::compute_scaling(p);
    p.C_ref_per_cm3 *= 4.0;
    const auto s2 = units::compute_scaling(p);
    CHECK(s2.lambda == doctest::Approx(0.5 * s1.lambda).epsilon(1e-14));
    // delta = ni/Cbar exactly: doubling Cbar halves delta
    PhysicalParams q = units::preset(Material::silicon, kSpot);
    const auto t1 = units::compute_scaling(q);
    q.C_ref_per_cm3 *= 2.0;
    const auto t2 = units::compute_scaling(q);
    CHECK(t2.delta == doctest::Approx(0.5 * t1.delta).epsilon(1e-14));
}

TEST_CASE("signal descaling") {
    const auto s = units::compute_scaling(units::preset(Material::silicon, kSpot));
    CHECK(units::descale_signal(0.0, 0.0, s).voltage_V == 0.0);

    // V_th = kB T / q with the CODATA constants, computed independently
    const double vth = 1.380649e-23 * 300.0 / 1.602176634e-19;
    CHECK(units::descale_signal(1.0, 0.0, s).voltage_V == doctest::Approx(vth).epsilon(1e-12));
    CHECK(vth == doctest::Approx(0.02585).epsilon(1e-3));

    // i_ref = q mu C V_th x as a direct product (SI units)
    const double iref = 1.602176634e-19 * (1323.0 * 1e-4) * 1.2e22 * vth * 3e-3;
    CHECK(units::descale_signal(0.0, 1.0, s).current_A ==
          doctest::Approx(iref).epsilon(1e-12));
    CHECK(iref == doctest::Approx(0.019727).epsilon(1e-4));
}

TEST_CASE("round trip dimensional -> scaled -> dimensional") {
    PhysicalParams p = units::preset(Material::silicon, kSpot);
    p.resistance_Ohm = 2.2e6;
    p.n_T_per_cm3 = 8e9;
    p.p_T_per_cm3 = 5e9;
    const auto s = units::compute_scaling(p);
    const PhysicalParams q = units::invert_scaling(s, p);

    auto close = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
    };
    CHECK(close(q.temperature_K, p.temperature_K));
    CHECK(close(q.rel_permittivity, p.rel_permittivity));
    CHECK(close(q.E_c_eV, p.E_c_eV));
    CHECK(close(q.E_v_eV, p.E_v_eV));
    CHECK(close(q.mu_n_cm2_per_Vs, p.mu_n_cm2_per_Vs));
    CHECK(close(q.mu_p_cm2_per_Vs, p.mu_p_cm2_per_Vs));
    CHECK(close(q.C_ref_per_cm3, p.C_ref_per_cm3));
    CHECK(close(q.domain_diameter_m, p.domain_diameter_m));
    CHECK(close(q.laser_power_W, p.laser_power_W));
    CHECK(close(q.spot_radius_m, p.spot_radius_m));
    CHECK(close(q.penetration_depth_m, p.penetration_depth_m));
    CHECK(close(q.C_d_cm3_per_s, p.C_d_cm3_per_s));
    CHECK(close(q.C_n_cm6_per_s, p.C_n_cm6_per_s));
    CHECK(close(q.C_p_cm6_per_s, p.C_p_cm6_per_s));
    CHECK(close(q.tau_n_s, p.tau_n_s));
    CHECK(close(q.tau_p_s, p.tau_p_s));
    CHECK(close(q.n_T_per_cm3, p.n_T_per_cm3));
    CHECK(close(q.p_T_per_cm3, p.p_T_per_cm3));
    CHECK(close(q.resistance_Ohm, p.resistance_Ohm));
}

TEST_CASE("dimensionless outputs do not depend on the unit system") {
    // same physics entered from CGS-sourced numbers, converted on entry
    PhysicalParams p = units::preset(Material::silicon, kSpot);
    PhysicalParams q = p;
    q.domain_diameter_m = 0.3 /*cm*/ * 1e-2;
    q.spot_radius_m = 0.002 /*cm*/ * 1e-2;
    q.penetration_depth_m = 4.8e-4 /*cm*/ * 1e-2;
    q.laser_wavelength_m = 685e-7 /*cm*/ * 1e-2;
    const auto sp = units::compute_scaling(p);
    const auto sq = units::compute_scaling(q);
    CHECK(sq.lambda == doctest::Approx(sp.lambda).epsilon(1e-12));
    CHECK(sq.delta == doctest::Approx(sp.delta).epsilon(1e-12));
    CHECK(sq.kappa_hat == doctest::Approx(sp.kappa_hat).epsilon(1e-12));
}

TEST_CASE("scaling map is deterministic") {
    const PhysicalParams p = units::preset(Material::silicon, kSpot);
    const auto a = units::compute_scaling(p);
    const auto b = units::compute_scaling(p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("parameter validation") {
    PhysicalParams p = units::preset(Material::silicon, kSpot);
    p.temperature_K = -1;
    CHECK_THROWS_AS(units::compute_scaling(p), InvalidInput);

    p = units::preset(Material::silicon, kSpot);
    p.spot_radius_m = 0.0;  // garbled in the published table, so never defaulted
    CHECK_THROWS_AS(units::compute_scaling(p), InvalidInput);

    p = units::preset(Material::silicon, kSpot);
    p.reflectivity = 1.0;
    CHECK_THROWS_AS(units::compute_scaling(p), InvalidInput);

    p = units::preset(Material::silicon, kSpot);
    p.E_v_eV = p.E_c_eV + 0.1;
    CHECK_THROWS_AS(units::compute_scaling(p), InvalidInput);

    p = units::preset(Material::silicon, kSpot);
    p.C_ref_per_cm3 = 0.0;
    CHECK_THROWS_AS(units::compute_scaling(p), InvalidInput);

    CHECK_THROWS_AS(units::material_from_string("germanium"), InvalidInput);
}

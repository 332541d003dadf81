#include "lps/units.hpp"

#include <cmath>

namespace lps::units {

namespace {

bool pos(double x) { return std::isfinite(x) && x > 0; }
bool nonneg(double x) { return std::isfinite(x) && x >= 0; }

}  // namespace

void PhysicalParams::validate() const {
    if (!pos(temperature_K)) throw InvalidInput("temperature must be positive");
    if (!pos(q_C) || !pos(k_B_J_per_K) || !pos(h_Js) || !pos(c_m_per_s) || !pos(eps0_F_per_m))
        throw InvalidInput("fundamental constants must be positive");
    if (!pos(rel_permittivity)) throw InvalidInput("relative permittivity must be positive");
    if (!(std::isfinite(E_c_eV) && std::isfinite(E_v_eV) && E_c_eV > E_v_eV))
        throw InvalidInput("band edges must satisfy E_c > E_v");
    if (!pos(N_c_per_cm3) || !pos(N_v_per_cm3))
        throw InvalidInput("densities of states must be positive");
    if (!pos(mu_n_cm2_per_Vs) || !pos(mu_p_cm2_per_Vs) || !pos(mu_ref_cm2_per_Vs))
        throw InvalidInput("mobilities must be positive");
    if (!pos(C_ref_per_cm3)) throw InvalidInput("doping reference must be positive");
    if (!pos(domain_diameter_m)) throw InvalidInput("domain diameter must be positive");
    if (!nonneg(laser_power_W)) throw InvalidInput("laser power must be nonnegative");
    if (!pos(laser_wavelength_m)) throw InvalidInput("laser wavelength must be positive");
    if (!pos(penetration_depth_m)) throw InvalidInput("penetration depth must be positive");
    if (!pos(spot_radius_m))
        throw InvalidInput("laser spot radius must be set and positive (no built-in default)");
    if (!(std::isfinite(reflectivity) && reflectivity >= 0 && reflectivity < 1))
        throw InvalidInput("reflectivity must lie in [0,1)");
    if (!nonneg(C_d_cm3_per_s) || !nonneg(C_n_cm6_per_s) || !nonneg(C_p_cm6_per_s))
        throw InvalidInput("recombination constants must be nonnegative");
    if (!pos(tau_n_s) || !pos(tau_p_s)) throw InvalidInput("SRH lifetimes must be positive");
    if (!nonneg(n_T_per_cm3) || !nonneg(p_T_per_cm3))
        throw InvalidInput("trap densities must be nonnegative");
    if (!nonneg(resistance_Ohm)) throw InvalidInput("resistance must be nonnegative");
}

PhysicalParams preset(Material m, double spot_radius_m) {
    PhysicalParams p;
    p.spot_radius_m = spot_radius_m;
    switch (m) {
        case Material::silicon:
            p.rel_permittivity = 11.8;
            p.N_c_per_cm3 = 1.04e19;
            p.N_v_per_cm3 = 2.8e19;
            p.mu_n_cm2_per_Vs = p.mu_ref_cm2_per_Vs = 1323.0;
            p.mu_p_cm2_per_Vs = 460.0;
            p.C_ref_per_cm3 = 1.2e16;
            // E_c chosen as V_th ln(Nc/Cbar), which places the quasi-Fermi
            // gauge phi0 at zero; E_v follows from the 1.12 eV gap.
            p.E_c_eV = p.thermal_voltage_V() * std::log(p.N_c_per_cm3 / p.C_ref_per_cm3);
            p.E_v_eV = p.E_c_eV - 1.12;
            p.C_d_cm3_per_s = 4.73e-15;
            p.C_n_cm6_per_s = 2.8e-31;
            p.C_p_cm6_per_s = 9.9e-32;
            p.tau_n_s = p.tau_p_s = 1e-5;
            break;
        case Material::gallium_arsenide:
            p.rel_permittivity = 12.9;
            p.N_c_per_cm3 = 4.7e17;
            p.N_v_per_cm3 = 9e18;
            p.mu_n_cm2_per_Vs = p.mu_ref_cm2_per_Vs = 9400.0;
            p.mu_p_cm2_per_Vs = 400.0;
            p.C_ref_per_cm3 = 1.2e18;
            p.E_c_eV = p.thermal_voltage_V() * std::log(p.N_c_per_cm3 / p.C_ref_per_cm3);
            p.E_v_eV = p.E_c_eV - 1.424;
            p.C_d_cm3_per_s = 7.2e-10;
            p.C_n_cm6_per_s = 1e-30;
            p.C_p_cm6_per_s = 1e-30;
            p.tau_n_s = p.tau_p_s = 1e-8;
            break;
    }
    return p;
}

Material material_from_string(const std::string& name) {
    if (name == "si" || name == "silicon") return Material::silicon;
    if (name == "gaas" || name == "gallium_arsenide") return Material::gallium_arsenide;
    throw InvalidInput("unknown material preset: " + name);
}

double intrinsic_density_per_cm3(const PhysicalParams& p) {
    const double V_th = p.thermal_voltage_V();
    return std::sqrt(p.N_c_per_cm3 * p.N_v_per_cm3) *
           std::exp(-p.band_gap_eV() / (2.0 * V_th));
}

void ScaledParams::validate() const {
    if (!pos(lambda) || !pos(delta)) throw InvalidInput("lambda and delta must be positive");
    if (!pos(ref.tau_s)) throw InvalidInput("time scale must be positive");
    rec.validate();
}

ScaledParams compute_scaling(const PhysicalParams& p) {
    p.validate();

    const double V_th = p.thermal_voltage_V();
    const double C_ref_m3 = p.C_ref_per_cm3 * 1e6;
    const double mu_ref_SI = p.mu_ref_cm2_per_Vs * 1e-4;
    const double xbar = p.domain_diameter_m;
    const double eps_bar = p.rel_permittivity * p.eps0_F_per_m;
    const double n_i = intrinsic_density_per_cm3(p);

    ScaledParams s;
    s.lambda = std::sqrt(eps_bar * V_th / (p.q_C * C_ref_m3 * xbar * xbar));
    s.delta = n_i / p.C_ref_per_cm3;
    s.phi0 = p.E_c_eV / V_th - std::log(p.N_c_per_cm3 / p.C_ref_per_cm3);

    s.mu_n = p.mu_n_cm2_per_Vs / p.mu_ref_cm2_per_Vs;
    s.mu_p = p.mu_p_cm2_per_Vs / p.mu_ref_cm2_per_Vs;

    const double tau = xbar * xbar / (mu_ref_SI * V_th);
    s.rec.Cd = tau * p.C_ref_per_cm3 * p.C_d_cm3_per_s;
    s.rec.Cn = tau * p.C_ref_per_cm3 * p.C_ref_per_cm3 * p.C_n_cm6_per_s;
    s.rec.Cp = tau * p.C_ref_per_cm3 * p.C_ref_per_cm3 * p.C_p_cm6_per_s;
    s.rec.tau_n = p.tau_n_s / tau;
    s.rec.tau_p = p.tau_p_s / tau;
    s.rec.nT = (p.n_T_per_cm3 > 0 ? p.n_T_per_cm3 : n_i) / n_i;
    s.rec.pT = (p.p_T_per_cm3 > 0 ? p.p_T_per_cm3 : n_i) / n_i;

    s.R_hat = p.q_C * mu_ref_SI * C_ref_m3 * xbar * p.resistance_Ohm;

    // photon rate kappa = P lambda_L (1-rho)/(h c), scaled against the
    // generation reference Gbar = n_i^2/(Cbar tau) over the volume xbar^3
    const double kappa =
        p.laser_power_W * p.laser_wavelength_m * (1.0 - p.reflectivity) / (p.h_Js * p.c_m_per_s);
    const double xbar_cm = xbar * 100.0;
    const double G_bar = n_i * n_i / (p.C_ref_per_cm3 * tau);
    s.kappa_hat = kappa / (G_bar * xbar_cm * xbar_cm * xbar_cm);

    s.sigma_hat = p.spot_radius_m / xbar;
    s.dA_hat = p.penetration_depth_m / xbar;

    s.ref.V_th_V = V_th;
    s.ref.tau_s = tau;
    s.ref.x_ref_m = xbar;
    s.ref.C_ref_per_cm3 = p.C_ref_per_cm3;
    s.ref.mu_ref_cm2_per_Vs = p.mu_ref_cm2_per_Vs;
    s.ref.n_i_per_cm3 = n_i;
    s.ref.i_ref_A = p.q_C * mu_ref_SI * C_ref_m3 * V_th * xbar;

    s.validate();
    return s;
}

DimensionalSignal descale_signal(double u_scaled, double i_scaled, const ScaledParams& s) {
    if (!std::isfinite(u_scaled) || !std::isfinite(i_scaled))
        throw InvalidInput("descale_signal: scaled values must be finite");
    return {s.ref.V_th_V * u_scaled, s.ref.i_ref_A * i_scaled};
}

PhysicalParams invert_scaling(const ScaledParams& s, const PhysicalParams& passthrough) {
    PhysicalParams p = passthrough;
    const double V_th = s.ref.V_th_V;
    const double tau = s.ref.tau_s;
    const double xbar = s.ref.x_ref_m;
    const double C_ref = s.ref.C_ref_per_cm3;
    const double C_ref_m3 = C_ref * 1e6;
    const double mu_ref_SI = s.ref.mu_ref_cm2_per_Vs * 1e-4;
    const double n_i = s.ref.n_i_per_cm3;

    p.temperature_K = V_th * p.q_C / p.k_B_J_per_K;
    p.domain_diameter_m = xbar;
    p.C_ref_per_cm3 = C_ref;
    p.mu_ref_cm2_per_Vs = s.ref.mu_ref_cm2_per_Vs;
    p.mu_n_cm2_per_Vs = s.mu_n * s.ref.mu_ref_cm2_per_Vs;
    p.mu_p_cm2_per_Vs = s.mu_p * s.ref.mu_ref_cm2_per_Vs;
    p.rel_permittivity = s.lambda * s.lambda * p.q_C * C_ref_m3 * xbar * xbar /
                         (V_th * p.eps0_F_per_m);

    p.C_d_cm3_per_s = s.rec.Cd / (tau * C_ref);
    p.C_n_cm6_per_s = s.rec.Cn / (tau * C_ref * C_ref);
    p.C_p_cm6_per_s = s.rec.Cp / (tau * C_ref * C_ref);
    p.tau_n_s = s.rec.tau_n * tau;
    p.tau_p_s = s.rec.tau_p * tau;
    p.n_T_per_cm3 = s.rec.nT * n_i;
    p.p_T_per_cm3 = s.rec.pT * n_i;

    p.resistance_Ohm = s.R_hat / (p.q_C * mu_ref_SI * C_ref_m3 * xbar);
    p.spot_radius_m = s.sigma_hat * xbar;
    p.penetration_depth_m = s.dA_hat * xbar;

    const double xbar_cm = xbar * 100.0;
    const double G_bar = n_i * n_i / (C_ref * tau);
    const double kappa = s.kappa_hat * G_bar * xbar_cm * xbar_cm * xbar_cm;
    p.laser_power_W = kappa * p.h_Js * p.c_m_per_s /
                      (p.laser_wavelength_m * (1.0 - p.reflectivity));

    p.E_c_eV = (s.phi0 + std::log(p.N_c_per_cm3 / C_ref)) * V_th;
    const double E_g = -2.0 * V_th * std::log(n_i / std::sqrt(p.N_c_per_cm3 * p.N_v_per_cm3));
    p.E_v_eV = p.E_c_eV - E_g;
    return p;
}

}  // namespace lps::units

#pragma once

#include <string>

#include "lps/constants.hpp"
#include "lps/physics.hpp"

namespace lps::units {

/// Dimensional inputs. Units are fixed per field (documented in the
/// README config reference); densities are per cm^3 and mobilities in
/// cm^2/(V s) following semiconductor convention, lengths in m.
struct PhysicalParams {
    double temperature_K = 300.0;

    // fundamental constants, CODATA 2018
    double q_C = constants::elementary_charge_C;
    double k_B_J_per_K = constants::boltzmann_J_per_K;
    double h_Js = constants::planck_Js;
    double c_m_per_s = constants::light_speed_m_per_s;
    double eps0_F_per_m = constants::vacuum_permittivity_F_per_m;

    // material
    double rel_permittivity = 11.8;
    double E_c_eV = 0.0;  ///< conduction band edge
    double E_v_eV = 0.0;  ///< valence band edge
    double N_c_per_cm3 = 0.0;
    double N_v_per_cm3 = 0.0;
    double mu_n_cm2_per_Vs = 0.0;
    double mu_p_cm2_per_Vs = 0.0;
    double mu_ref_cm2_per_Vs = 0.0;  ///< reference mobility (sup of both)
    double C_ref_per_cm3 = 0.0;      ///< doping reference \bar C = sup C

    // geometry
    double domain_diameter_m = 3e-3;  ///< \bar x; 3 mm reproduces both published lambdas

    // laser
    double laser_power_W = 2e-3;
    double laser_wavelength_m = 685e-9;
    double penetration_depth_m = 4.8e-6;
    double spot_radius_m = 0.0;  ///< no trustworthy tabulated value; must be set
    double reflectivity = 0.3;

    // recombination (dimensional)
    double C_d_cm3_per_s = 0.0;
    double C_n_cm6_per_s = 0.0;
    double C_p_cm6_per_s = 0.0;
    double tau_n_s = 1e-5;
    double tau_p_s = 1e-5;
    double n_T_per_cm3 = 0.0;  ///< 0 means "use n_i" (midgap trap)
    double p_T_per_cm3 = 0.0;

    // circuit
    double resistance_Ohm = 0.0;

    double band_gap_eV() const { return E_c_eV - E_v_eV; }
    double thermal_voltage_V() const { return k_B_J_per_K * temperature_K / q_C; }

    /// Throws InvalidInput when any invariant is violated.
    void validate() const;
};

/// Built-in material presets embedding the published parameter tables.
/// The spot radius has no usable published value and must be supplied.
enum class Material { silicon, gallium_arsenide };
PhysicalParams preset(Material m, double spot_radius_m);
Material material_from_string(const std::string& name);

/// Reference values of the nondimensionalization, kept so the scaling map
/// can be inverted.
struct ScaleReferences {
    double V_th_V = 0.0;      ///< thermal voltage (voltage scale)
    double tau_s = 0.0;       ///< time scale xbar^2/(mu_ref V_th)
    double x_ref_m = 0.0;     ///< \bar x
    double C_ref_per_cm3 = 0.0;
    double mu_ref_cm2_per_Vs = 0.0;
    double n_i_per_cm3 = 0.0;
    double i_ref_A = 0.0;     ///< current scale q mu_ref Cbar V_th xbar
};

/// Nondimensional parameters of the scaled model.
struct ScaledParams {
    double lambda = 0.0;  ///< Debye-type parameter
    double delta = 0.0;   ///< n_i / Cbar, the small parameter
    double phi0 = 0.0;    ///< scaled quasi-Fermi gauge E_c/(q V_th) - ln(N_c/Cbar)

    double mu_n = 1.0;  ///< mu_n / mu_ref
    double mu_p = 1.0;  ///< mu_p / mu_ref

    physics::RecombinationParams rec;  ///< hatted recombination constants

    double R_hat = 0.0;      ///< q mu_ref Cbar xbar R
    double kappa_hat = 0.0;  ///< scaled generation amplitude
    double sigma_hat = 0.0;  ///< spot radius / xbar
    double dA_hat = 0.0;     ///< penetration depth / xbar

    ScaleReferences ref;

    void validate() const;
};

/// Intrinsic carrier density n_i = sqrt(Nc Nv) exp(-(Ec-Ev)/(2 kB T)), per cm^3.
double intrinsic_density_per_cm3(const PhysicalParams& p);

/// Nondimensionalizes the physical parameters. Rejects non-finite or
/// non-positive reference values.
ScaledParams compute_scaling(const PhysicalParams& p);

/// Maps a scaled (voltage, current) sample back to volts and amperes.
struct DimensionalSignal {
    double voltage_V;
    double current_A;
};
DimensionalSignal descale_signal(double u_scaled, double i_scaled, const ScaledParams& s);

/// Inverts the scaling map. Fields without a scaled counterpart (band
/// structure, wavelength, reflectivity, ...) are copied from `passthrough`.
PhysicalParams invert_scaling(const ScaledParams& s, const PhysicalParams& passthrough);

}  // namespace lps::units

#pragma once

namespace lps::constants {

// CODATA 2018 values. q, k_B, h and c are exact by the 2019 SI definition.
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double boltzmann_J_per_K = 1.380649e-23;
inline constexpr double planck_Js = 6.62607015e-34;
inline constexpr double light_speed_m_per_s = 299792458.0;
inline constexpr double vacuum_permittivity_F_per_m = 8.8541878128e-12;

}  // namespace lps::constants

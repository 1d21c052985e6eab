#pragma once

#include <numbers>

namespace cslsim::constants {

// CODATA 2018, truncated to 10 significant digits.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_B = 1.380649e-23;          // J/K
inline constexpr double m0 = 1.660539067e-27;        // kg (atomic mass unit)
inline constexpr double gas_constant = 8.314462618;  // J/(mol K)

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double molar_mass_air = 0.02897;    // kg/mol
inline constexpr double molar_mass_helium = 0.004;   // kg/mol

inline constexpr double pa_per_mbar = 100.0;

}  // namespace cslsim::constants

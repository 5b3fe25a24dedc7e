#pragma once

// Physical constants in the cgs-emu unit system used throughout:
// susceptibilities in cm^3/mol, temperatures in kelvin, exchange constants
// as J/k_B in kelvin, magnetic fields in gauss.

namespace spindimer::constants {

// N_A * mu_B^2 / k_B  [cm^3 K mol^-1]. The single prefactor of every molar
// susceptibility formula in the library; keeping one shared bundle makes the
// closed forms and the Zeeman oracle agree to machine precision.
inline constexpr double na_mub2_over_kb = 0.375125;

// mu_B / k_B  [K/G]; converts a field to a temperature scale. Only enters
// the finite-field oracle, where it cancels in the zero-field limit.
inline constexpr double mub_over_kb = 6.7171382e-5;

inline constexpr double ln3 = 1.0986122886681098;

}  // namespace spindimer::constants

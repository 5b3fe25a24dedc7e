#pragma once

#include "spindimer/entanglement.hpp"
#include "spindimer/spin_core.hpp"

// Closed-form magnetochemistry: Bleaney-Bowers susceptibility, Curie laws,
// Lambert-W peak analysis, the susceptibility -> concurrence map, macroscopic
// entanglement witnesses, and the effective-moment representation.
// All susceptibilities are molar, cgs-emu (cm^3/mol).

namespace spindimer {

// A mole of n-nuclear clusters of spin-s centers with a common g-factor.
struct ClusterSpec {
  int n = 1;
  double s = 0.5;  // half-integral spin quantum number
  double g = 2.0;
};

void validate(const ClusterSpec& spec);

struct PeakCoordinates {
  double t_max = 0.0;    // K
  double chi_max = 0.0;  // cm^3/mol
};

struct WitnessResult {
  bool entangled = false;
  double threshold = 0.0;  // cm^3/mol; strict chi < threshold certifies
};

struct ChiConcurrence {
  Concurrence value;
  bool clamped = false;  // raw 1 - (3/2) chi/chi_Curie fell outside [0, 1]
};

// Bleaney-Bowers: chi = 2 C1 g^2 / (T (3 + exp(-2J/k_B T))). The exponent is
// clamped to +-700 so the expression stays finite for any J/k_B.
double bleaney_bowers_chi(const DimerParams& params, double t_kelvin);

// Powder average sqrt((gx^2 + gy^2 + gz^2)/3) for polycrystalline samples.
double powder_g(double gx, double gy, double gz);

// Curie law of two free S = 1/2 spins, N_A g^2 mu_B^2 / (2 k_B T); the high
// temperature limit of Bleaney-Bowers.
double curie_chi_dimer(double g, double t_kelvin);

// Curie law of a mole of n-nuclear spin-s clusters,
// n N_A g^2 mu_B^2 S(S+1) / (3 k_B T).
double curie_chi_cluster(const ClusterSpec& spec, double t_kelvin);

// Principal branch of W e^W = x, by Halley iteration (branch-point series
// seed for x < 0, log1p seed otherwise). Domain x >= -1/e.
double lambert_w(double x);

// Susceptibility maximum of the antiferromagnetic dimer:
//   t_max = 2|J| / (k_B (1 + W(3/e))),  chi_max = W(3/e)/3 * g^2 C1 k_B/|J|.
// Requires J < 0 (no interior maximum otherwise).
PeakCoordinates chi_peak(const DimerParams& params);

// T_E = (1 + W(3/e))/ln 3 * t_max = 1.4596 t_max; reads the entanglement
// temperature straight off the susceptibility peak.
double te_from_tmax(double t_max_kelvin);

// C = 1 - (3/2) chi / chi_Curie, clamped to [0, 1] with a flag instead of an
// error so scattered measured points pass through.
ChiConcurrence concurrence_from_chi(double chi, double t_kelvin, double g);

// Macroscopic witness: entangled iff chi_p < chi_Curie_cluster/(1+S)
// (strict; the boundary state is separable).
WitnessResult witness_chi(double chi_p, double t_kelvin,
                          const ClusterSpec& spec);

// Effective moment sqrt(3 k_B T chi / N_A)/mu_B in Bohr magnetons.
double mu_eff(double chi, double t_kelvin);

// Witness line in the mu_eff representation: entangled iff mu_eff < g sqrt(nS).
double mu_eff_threshold(const ClusterSpec& spec);

}  // namespace spindimer

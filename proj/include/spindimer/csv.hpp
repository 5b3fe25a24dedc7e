#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "spindimer/analysis.hpp"

// Curve CSV format: header `temperature_K,chi_cm3_per_mol[,sigma_chi]`,
// `#`-prefixed comment lines, decimal point only, scientific notation
// accepted. Values are written in shortest round-trip form, so
// parse -> serialize reproduces a written file byte for byte.

namespace spindimer {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v);

SusceptibilityCurve read_curve_csv(std::istream& in, std::string label = "");
SusceptibilityCurve read_curve_csv(const std::filesystem::path& path);

void write_curve_csv(std::ostream& out, const SusceptibilityCurve& curve);
void write_curve_csv(const std::filesystem::path& path,
                     const SusceptibilityCurve& curve);

// profile.csv: t, chi, C, E, clamped plus the theoretical overlay columns
// when a fitted model is supplied.
void write_profile_csv(std::ostream& out, const EntanglementProfile& profile,
                       const std::vector<double>* c_theory = nullptr,
                       const std::vector<double>* e_theory = nullptr);

void write_residuals_csv(std::ostream& out, const SusceptibilityCurve& curve,
                         const CompositeModel& model);

}  // namespace spindimer

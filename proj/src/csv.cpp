#include "spindimer/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace spindimer {

namespace {

constexpr const char* kHeader2 = "temperature_K,chi_cm3_per_mol";
constexpr const char* kHeader3 = "temperature_K,chi_cm3_per_mol,sigma_chi";

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& field, int line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_no) +
                     ": cannot parse number '" + field + "'");
  return value;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

SusceptibilityCurve read_curve_csv(std::istream& in, std::string label) {
  SusceptibilityCurve curve;
  curve.label = std::move(label);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  bool with_sigma = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    if (!header_seen) {
      if (stripped == kHeader3)
        with_sigma = true;
      else if (stripped != kHeader2)
        throw ParseError("line " + std::to_string(line_no) +
                         ": unexpected header '" + stripped + "'");
      header_seen = true;
      continue;
    }
    const std::vector<std::string> fields = split_fields(stripped);
    if (fields.size() != (with_sigma ? 3u : 2u))
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected " + (with_sigma ? "3" : "2") + " fields");
    CurvePoint pt;
    pt.t = parse_double(fields[0], line_no);
    pt.chi = parse_double(fields[1], line_no);
    if (with_sigma) pt.sigma = parse_double(fields[2], line_no);
    curve.points.push_back(pt);
  }
  if (!header_seen) throw ParseError("missing header line");
  try {
    curve.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return curve;
}

SusceptibilityCurve read_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_curve_csv(in, path.stem().string());
}

void write_curve_csv(std::ostream& out, const SusceptibilityCurve& curve) {
  const bool with_sigma = curve.has_sigma();
  out << (with_sigma ? kHeader3 : kHeader2) << '\n';
  for (const CurvePoint& pt : curve.points) {
    out << format_double(pt.t) << ',' << format_double(pt.chi);
    if (with_sigma) out << ',' << format_double(pt.sigma.value_or(0.0));
    out << '\n';
  }
}

void write_curve_csv(const std::filesystem::path& path,
                     const SusceptibilityCurve& curve) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  write_curve_csv(out, curve);
}

void write_profile_csv(std::ostream& out, const EntanglementProfile& profile,
                       const std::vector<double>* c_theory,
                       const std::vector<double>* e_theory) {
  const bool overlay = c_theory && e_theory;
  out << "temperature_K,chi_cm3_per_mol,concurrence,entanglement,clamped";
  if (overlay) out << ",concurrence_theory,entanglement_theory";
  out << '\n';
  for (std::size_t i = 0; i < profile.rows.size(); ++i) {
    const ProfileRow& row = profile.rows[i];
    out << format_double(row.t) << ',' << format_double(row.chi) << ','
        << format_double(row.concurrence) << ','
        << format_double(row.entanglement) << ',' << (row.clamped ? 1 : 0);
    if (overlay)
      out << ',' << format_double((*c_theory)[i]) << ','
          << format_double((*e_theory)[i]);
    out << '\n';
  }
}

void write_residuals_csv(std::ostream& out, const SusceptibilityCurve& curve,
                         const CompositeModel& model) {
  out << "temperature_K,chi_observed,chi_model,residual\n";
  for (const CurvePoint& pt : curve.points) {
    const double fitted = model_chi(model, pt.t);
    out << format_double(pt.t) << ',' << format_double(pt.chi) << ','
        << format_double(fitted) << ',' << format_double(pt.chi - fitted)
        << '\n';
  }
}

}  // namespace spindimer

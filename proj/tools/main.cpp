// spindimer: Heisenberg spin-dimer magnetochemistry and thermal-entanglement
// toolkit. Subcommands: simulate | fit | entangle | verify.
//
// Exit codes: 0 success, 1 verification failure, 2 input/domain error,
// 3 fit non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spindimer/analysis.hpp"
#include "spindimer/csv.hpp"
#include "spindimer/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

struct CommonOptions {
  std::string outdir = ".";
  std::string units = "cgs";
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--outdir", common.outdir, "Output directory")
      ->envname("SPINDIMER_OUTDIR")
      ->capture_default_str();
  cmd->add_option("--units", common.units, "Unit system (fixed)")
      ->check(CLI::IsMember({"cgs"}))
      ->capture_default_str();
}

fs::path prepare_outdir(const CommonOptions& common) {
  fs::path dir(common.outdir);
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, json manifest) {
  manifest["units"] = "cgs";
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

json model_to_json(const spindimer::CompositeModel& model) {
  const spindimer::ClusterSpec imp = model.effective_impurity();
  return json{{"j_over_kb", model.dimer.j_over_kb},
              {"g", model.dimer.g},
              {"impurity_fraction", model.impurity_fraction},
              {"weiss_theta", model.weiss_theta},
              {"impurity", {{"n", imp.n}, {"s", imp.s}, {"g", imp.g}}}};
}

spindimer::CompositeModel model_from_json(const json& j) {
  spindimer::CompositeModel model;
  model.dimer.j_over_kb = j.at("j_over_kb").get<double>();
  model.dimer.g = j.at("g").get<double>();
  model.impurity_fraction = j.at("impurity_fraction").get<double>();
  model.weiss_theta = j.at("weiss_theta").get<double>();
  if (j.contains("impurity")) {
    model.impurity.n = j["impurity"].at("n").get<int>();
    model.impurity.s = j["impurity"].at("s").get<double>();
    model.impurity.g = j["impurity"].at("g").get<double>();
    model.impurity_g_follows_dimer = false;
  }
  return model;
}

json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  CommonOptions common;
  double j_over_kb = 0.0;
  double g = 2.0;
  double p = 0.0;
  double theta = 0.0;
  double tmin = 5.0;
  double tmax = 300.0;
  double step = 2.5;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& args) {
  if (!(args.step > 0.0))
    throw std::domain_error("simulate: grid step must be > 0");
  spindimer::CompositeModel model;
  model.dimer = {args.j_over_kb, args.g};
  model.impurity_fraction = args.p;
  model.weiss_theta = args.theta;

  std::vector<double> grid;
  for (double t = args.tmin; t <= args.tmax + 1e-9; t += args.step)
    grid.push_back(t);

  const spindimer::SusceptibilityCurve curve =
      spindimer::synthesize_curve(model, grid, args.noise, args.seed);

  const fs::path dir = prepare_outdir(args.common);
  spindimer::write_curve_csv(dir / "curve.csv", curve);
  write_manifest(dir, json{{"command", "simulate"},
                           {"model", model_to_json(model)},
                           {"tmin", args.tmin},
                           {"tmax", args.tmax},
                           {"step", args.step},
                           {"noise", args.noise},
                           {"seed", args.seed},
                           {"outputs", {"curve.csv"}}});
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  CommonOptions common;
  std::string input;
  std::string free_list = "j,g,p";
  std::vector<std::string> freeze;
  std::optional<double> init_j, init_g, init_p, init_theta;
  double tol = 1e-8;
  int max_iter = 200;
};

int run_fit(const FitArgs& args) {
  const spindimer::SusceptibilityCurve curve =
      spindimer::read_curve_csv(fs::path(args.input));

  std::set<std::string> free;
  {
    std::istringstream in(args.free_list);
    std::string name;
    while (std::getline(in, name, ','))
      if (!name.empty()) free.insert(name);
  }

  spindimer::CompositeModel init = spindimer::default_initial_model(curve);
  if (args.init_j) init.dimer.j_over_kb = *args.init_j;
  if (args.init_g) init.dimer.g = *args.init_g;
  if (args.init_p) init.impurity_fraction = *args.init_p;
  if (args.init_theta) init.weiss_theta = *args.init_theta;

  for (const std::string& item : args.freeze) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--freeze expects name=value, got '" +
                                  item + "'");
    const std::string name = item.substr(0, eq);
    const double value = std::stod(item.substr(eq + 1));
    if (name == "j")
      init.dimer.j_over_kb = value;
    else if (name == "g")
      init.dimer.g = value;
    else if (name == "p")
      init.impurity_fraction = value;
    else if (name == "theta")
      init.weiss_theta = value;
    else
      throw std::invalid_argument("--freeze: unknown parameter '" + name +
                                  "'");
    free.erase(name);
  }

  spindimer::FitConfig config;
  config.tol = args.tol;
  config.max_iter = args.max_iter;
  const spindimer::FitResult result =
      spindimer::fit_curve(curve, free, init, config);

  const fs::path dir = prepare_outdir(args.common);
  {
    json out{{"model", model_to_json(result.model)},
             {"standard_errors", result.standard_errors},
             {"rss", result.rss},
             {"iterations", result.iterations},
             {"converged", result.converged},
             {"gradient_norm", result.gradient_norm},
             {"free", std::vector<std::string>(free.begin(), free.end())}};
    if (!result.message.empty()) out["message"] = result.message;
    std::ofstream fit_json(dir / "fit.json");
    fit_json << out.dump(2) << '\n';
  }
  {
    std::ofstream res_csv(dir / "residuals.csv");
    spindimer::write_residuals_csv(res_csv, curve, result.model);
  }
  const spindimer::SubtractionResult corrected =
      spindimer::subtract_impurity(curve, result.model);
  spindimer::write_curve_csv(dir / "corrected_curve.csv", corrected.curve);

  write_manifest(
      dir, json{{"command", "fit"},
                {"input", args.input},
                {"free", std::vector<std::string>(free.begin(), free.end())},
                {"init", model_to_json(init)},
                {"tol", config.tol},
                {"max_iter", config.max_iter},
                {"outputs", {"fit.json", "residuals.csv",
                             "corrected_curve.csv"}}});

  if (!result.converged) {
    std::cerr << "fit did not converge: " << result.message << '\n';
    return kExitNoConvergence;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EntangleArgs {
  CommonOptions common;
  std::string input;
  std::optional<double> g;
  std::string fit_json;
};

int run_entangle(const EntangleArgs& args) {
  const spindimer::SusceptibilityCurve curve =
      spindimer::read_curve_csv(fs::path(args.input));

  std::optional<spindimer::FitResult> fitted;
  if (!args.fit_json.empty()) {
    std::ifstream in(args.fit_json);
    if (!in)
      throw spindimer::ParseError("cannot open '" + args.fit_json + "'");
    json j = json::parse(in);
    spindimer::FitResult fr;
    fr.model = model_from_json(j.at("model"));
    fr.converged = j.value("converged", true);
    fitted = fr;
  }

  const double g = args.g ? *args.g
                          : (fitted ? fitted->model.dimer.g : 2.0);

  const spindimer::EntanglementProfile profile =
      spindimer::entanglement_profile(curve, g);
  const spindimer::TeEstimates te =
      spindimer::estimate_te(curve, g, fitted ? &*fitted : nullptr);

  const fs::path dir = prepare_outdir(args.common);
  {
    std::ofstream out(dir / "profile.csv");
    if (fitted) {
      std::vector<double> c_theory, e_theory;
      for (const spindimer::ProfileRow& row : profile.rows) {
        const spindimer::Concurrence c =
            spindimer::dimer_concurrence(fitted->model.dimer, row.t);
        c_theory.push_back(c.value());
        e_theory.push_back(spindimer::entanglement_of_formation(c));
      }
      spindimer::write_profile_csv(out, profile, &c_theory, &e_theory);
    } else {
      spindimer::write_profile_csv(out, profile);
    }
  }
  {
    std::ofstream out(dir / "te.json");
    out << json{{"from_crossing", optional_to_json(te.from_crossing)},
                {"from_fit", optional_to_json(te.from_fit)},
                {"from_peak", optional_to_json(te.from_peak)}}
               .dump(2)
        << '\n';
  }
  write_manifest(dir, json{{"command", "entangle"},
                           {"input", args.input},
                           {"g", g},
                           {"fit", args.fit_json},
                           {"outputs", {"profile.csv", "te.json"}}});
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  CommonOptions common;
  std::string grid = "coarse";
  std::optional<int> perturb_term;
};

int run_verify(const VerifyArgs& args) {
  spindimer::VerifyOptions options;
  options.fine_grid = (args.grid == "fine");
  options.perturb_term = args.perturb_term;

  const std::vector<spindimer::CheckResult> results =
      spindimer::run_verification(options);
  bool ok = true;
  for (const spindimer::CheckResult& r : results) {
    std::printf("[%s] %-38s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    ok = ok && r.pass;
  }

  const fs::path dir = prepare_outdir(args.common);
  write_manifest(dir, json{{"command", "verify"},
                           {"grid", args.grid},
                           {"all_passed", ok}});
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Heisenberg spin-dimer susceptibility and thermal-entanglement "
      "toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Config file; command-line flags win");

  SimulateArgs sim;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate a synthetic chi(T) curve");
  simulate->configurable();
  simulate->fallthrough();
  simulate->add_option("--j-over-kb", sim.j_over_kb,
                       "Exchange constant J/k_B in kelvin")
      ->required();
  simulate->add_option("--g", sim.g, "g-factor")->capture_default_str();
  simulate->add_option("--p", sim.p, "Impurity fraction in [0, 1)")
      ->capture_default_str();
  simulate->add_option("--theta", sim.theta, "Impurity Weiss temperature (K)")
      ->capture_default_str();
  simulate->add_option("--tmin", sim.tmin, "Grid start (K)")
      ->capture_default_str();
  simulate->add_option("--tmax", sim.tmax, "Grid end (K)")
      ->capture_default_str();
  simulate->add_option("--step", sim.step, "Grid step (K)")
      ->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Gaussian noise sigma (cm^3/mol)")
      ->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
  add_common(simulate, sim.common);

  FitArgs fit;
  CLI::App* fit_cmd =
      app.add_subcommand("fit", "Fit the dimer + impurity model to a curve");
  fit_cmd->configurable();
  fit_cmd->fallthrough();
  fit_cmd->add_option("--input", fit.input, "Input curve CSV")->required();
  fit_cmd->add_option("--free", fit.free_list,
                      "Comma list of free parameters (j,g,p,theta)")
      ->capture_default_str();
  fit_cmd->add_option("--freeze", fit.freeze,
                      "name=value; fix a parameter (may repeat)");
  fit_cmd->add_option("--init-j", fit.init_j, "Initial J/k_B (K)");
  fit_cmd->add_option("--init-g", fit.init_g, "Initial g");
  fit_cmd->add_option("--init-p", fit.init_p, "Initial impurity fraction");
  fit_cmd->add_option("--init-theta", fit.init_theta, "Initial Weiss theta");
  fit_cmd->add_option("--tol", fit.tol, "Convergence tolerance")
      ->capture_default_str();
  fit_cmd->add_option("--max-iter", fit.max_iter, "Iteration cap")
      ->capture_default_str();
  add_common(fit_cmd, fit.common);

  EntangleArgs ent;
  CLI::App* entangle = app.add_subcommand(
      "entangle", "Concurrence/entanglement profile and T_E estimates");
  entangle->configurable();
  entangle->fallthrough();
  entangle->add_option("--input", ent.input, "Input curve CSV")->required();
  entangle->add_option("--g", ent.g, "g-factor (default: fit value or 2)");
  entangle->add_option("--fit", ent.fit_json,
                       "fit.json for the theoretical overlay");
  add_common(entangle, ent.common);

  VerifyArgs ver;
  CLI::App* verify =
      app.add_subcommand("verify", "Run the built-in consistency checks");
  verify->configurable();
  verify->fallthrough();
  verify->add_option("--grid", ver.grid, "Sweep density")
      ->check(CLI::IsMember({"coarse", "fine"}))
      ->capture_default_str();
  verify
      ->add_option("--perturb-decomposition", ver.perturb_term,
                   "Test hook: damage the given decomposition term")
      ->group("");  // hidden
  add_common(verify, ver.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fit);
    if (entangle->parsed()) return run_entangle(ent);
    if (verify->parsed()) return run_verify(ver);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

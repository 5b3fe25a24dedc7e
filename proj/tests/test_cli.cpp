// End-to-end checks of the command-line surface via subprocesses. The ctest
// harness exports SPINDIMER_CLI with the binary path.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "spindimer/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* path = std::getenv("SPINDIMER_CLI");
  REQUIRE_MESSAGE(path != nullptr,
                  "SPINDIMER_CLI must point at the spindimer binary");
  return path;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("spindimer-test-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd =
      cli_path() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("simulate is deterministic for a fixed seed") {
  const fs::path a = fresh_dir("sim-a");
  const fs::path b = fresh_dir("sim-b");
  const fs::path c = fresh_dir("sim-c");
  const std::string flags =
      "simulate --j-over-kb -68 --g 2 --p 0.017 --tmin 5 --tmax 300 "
      "--step 2.5 --noise 1e-5";

  CHECK(run(flags + " --seed 42 --outdir " + a.string(), a / "log") == 0);
  CHECK(run(flags + " --seed 42 --outdir " + b.string(), b / "log") == 0);
  CHECK(run(flags + " --seed 7 --outdir " + c.string(), c / "log") == 0);

  CHECK(slurp(a / "curve.csv") == slurp(b / "curve.csv"));
  CHECK(slurp(a / "curve.csv") != slurp(c / "curve.csv"));
  CHECK(fs::exists(a / "manifest.json"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
}

TEST_CASE("simulate with zero coupling reproduces the Curie law") {
  const fs::path dir = fresh_dir("sim-curie");
  CHECK(run("simulate --j-over-kb 0 --p 0 --noise 0 --outdir " + dir.string(),
            dir / "log") == 0);
  const spindimer::SusceptibilityCurve curve =
      spindimer::read_curve_csv(dir / "curve.csv");
  for (const auto& pt : curve.points)
    CHECK(pt.chi ==
          doctest::Approx(spindimer::curie_chi_dimer(2.0, pt.t))
              .epsilon(1e-12));
}

TEST_CASE("fit recovers the reference parameters and writes its outputs") {
  const fs::path dir = fresh_dir("fit");
  REQUIRE(run("simulate --j-over-kb -68 --g 2 --p 0.017 --tmin 5 --tmax 300 "
              "--step 2.5 --noise 1e-5 --seed 42 --outdir " +
                  dir.string(),
              dir / "sim.log") == 0);
  CHECK(run("fit --input " + (dir / "curve.csv").string() + " --outdir " +
                dir.string(),
            dir / "fit.log") == 0);

  const json fit = json::parse(std::ifstream(dir / "fit.json"));
  CHECK(fit.at("converged").get<bool>());
  CHECK(std::abs(fit["model"]["j_over_kb"].get<double>() + 68.0) < 1.0);
  CHECK(std::abs(fit["model"]["g"].get<double>() - 2.0) < 0.02);
  CHECK(std::abs(fit["model"]["impurity_fraction"].get<double>() - 0.017) <
        0.003);
  CHECK(fs::exists(dir / "residuals.csv"));
  CHECK(fs::exists(dir / "corrected_curve.csv"));

  // Frozen g stays frozen.
  const fs::path frozen = fresh_dir("fit-frozen");
  CHECK(run("fit --input " + (dir / "curve.csv").string() +
                " --freeze g=2 --outdir " + frozen.string(),
            frozen / "log") == 0);
  const json fit2 = json::parse(std::ifstream(frozen / "fit.json"));
  CHECK(fit2["model"]["g"].get<double>() == 2.0);
  for (const auto& name : fit2["free"])
    CHECK(name.get<std::string>() != "g");
}

TEST_CASE("fit error paths use the documented exit codes") {
  const fs::path dir = fresh_dir("fit-errors");

  // Missing input file -> 2.
  CHECK(run("fit --input " + (dir / "nope.csv").string() + " --outdir " +
                dir.string(),
            dir / "log1") == 2);

  // 3 points with 4 free parameters -> 2, "insufficient points".
  {
    std::ofstream tiny(dir / "tiny.csv");
    tiny << "temperature_K,chi_cm3_per_mol\n40,3e-3\n50,3.5e-3\n60,3.2e-3\n";
  }
  CHECK(run("fit --input " + (dir / "tiny.csv").string() +
                " --free j,g,p,theta --outdir " + dir.string(),
            dir / "log2") == 2);
  CHECK(slurp(dir / "log2").find("insufficient points") != std::string::npos);

  // Unknown subcommand/flag -> 2.
  CHECK(run("fit --no-such-flag", dir / "log3") == 2);
}

TEST_CASE("fit non-convergence exits 3 but still writes its files") {
  const fs::path dir = fresh_dir("fit-nonconv");
  REQUIRE(run("simulate --j-over-kb -68 --g 2 --p 0.017 --tmin 5 --tmax 300 "
              "--step 2.5 --noise 1e-5 --seed 9 --outdir " +
                  dir.string(),
              dir / "sim.log") == 0);
  // One iteration cannot converge from the default starting point.
  CHECK(run("fit --input " + (dir / "curve.csv").string() +
                " --max-iter 1 --outdir " + dir.string(),
            dir / "fit.log") == 3);
  const json fit = json::parse(std::ifstream(dir / "fit.json"));
  CHECK_FALSE(fit.at("converged").get<bool>());
  CHECK(fs::exists(dir / "residuals.csv"));
  CHECK(fs::exists(dir / "corrected_curve.csv"));
}

TEST_CASE("entangle emits the profile, estimates, and theory overlay") {
  const fs::path dir = fresh_dir("entangle");
  REQUIRE(run("simulate --j-over-kb -68 --g 2 --p 0.017 --tmin 5 --tmax 300 "
              "--step 2.5 --noise 1e-5 --seed 42 --outdir " +
                  dir.string(),
              dir / "sim.log") == 0);
  REQUIRE(run("fit --input " + (dir / "curve.csv").string() + " --outdir " +
                  dir.string(),
              dir / "fit.log") == 0);
  CHECK(run("entangle --input " + (dir / "corrected_curve.csv").string() +
                " --fit " + (dir / "fit.json").string() + " --outdir " +
                dir.string(),
            dir / "ent.log") == 0);

  const json te = json::parse(std::ifstream(dir / "te.json"));
  for (const char* key : {"from_crossing", "from_fit", "from_peak"}) {
    REQUIRE_FALSE(te.at(key).is_null());
    CHECK(std::abs(te[key].get<double>() - 123.79) / 123.79 < 0.01);
  }

  std::ifstream profile(dir / "profile.csv");
  std::string header;
  std::getline(profile, header);
  CHECK(header ==
        "temperature_K,chi_cm3_per_mol,concurrence,entanglement,clamped,"
        "concurrence_theory,entanglement_theory");

  // Row nearest 25 K carries E in the 0.90..1.0 band.
  std::string line;
  bool found = false;
  while (std::getline(profile, line)) {
    if (line.rfind("25,", 0) == 0) {
      std::istringstream fields(line);
      std::string field;
      std::getline(fields, field, ',');  // t
      std::getline(fields, field, ',');  // chi
      std::getline(fields, field, ',');  // C
      std::getline(fields, field, ',');  // E
      const double e = std::stod(field);
      CHECK(e >= 0.90);
      CHECK(e <= 1.0);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("entangle on a ferromagnetic curve reports no entanglement") {
  const fs::path dir = fresh_dir("entangle-fm");
  REQUIRE(run("simulate --j-over-kb 68 --g 2 --p 0 --noise 0 --outdir " +
                  dir.string(),
              dir / "sim.log") == 0);
  CHECK(run("entangle --input " + (dir / "curve.csv").string() +
                " --outdir " + dir.string(),
            dir / "ent.log") == 0);

  const json te = json::parse(std::ifstream(dir / "te.json"));
  CHECK(te["from_crossing"].is_null());
  CHECK(te["from_fit"].is_null());
  CHECK(te["from_peak"].is_null());

  const spindimer::SusceptibilityCurve curve =
      spindimer::read_curve_csv(dir / "curve.csv");
  const auto profile = spindimer::entanglement_profile(curve, 2.0);
  for (const auto& row : profile.rows) {
    CHECK(row.concurrence == 0.0);
    CHECK(row.entanglement == 0.0);
  }
}

TEST_CASE("complex-I-like fixture puts the peak estimate near 92 K") {
  const fs::path dir = fresh_dir("complex-i");
  REQUIRE(run("simulate --j-over-kb -50.51 --g 2 --p 0.023 --tmin 5 "
              "--tmax 300 --step 2.5 --noise 1e-5 --seed 3 --outdir " +
                  dir.string(),
              dir / "sim.log") == 0);
  CHECK(run("entangle --input " + (dir / "curve.csv").string() +
                " --outdir " + dir.string(),
            dir / "ent.log") == 0);
  const json te = json::parse(std::ifstream(dir / "te.json"));
  REQUIRE_FALSE(te["from_peak"].is_null());
  CHECK(std::abs(te["from_peak"].get<double>() - 92.0) < 3.0);
}

TEST_CASE("verify passes clean and fails on the perturbation hook") {
  const fs::path dir = fresh_dir("verify");
  CHECK(run("verify --outdir " + dir.string(), dir / "log1") == 0);
  const std::string output = slurp(dir / "log1");
  CHECK(output.find("1.2472") != std::string::npos);
  CHECK(output.find("0.2011") != std::string::npos);
  CHECK(output.find("1.4596") != std::string::npos);
  CHECK(output.find("FAIL") == std::string::npos);

  CHECK(run("verify --perturb-decomposition 3 --outdir " + dir.string(),
            dir / "log2") == 1);
  const std::string failed = slurp(dir / "log2");
  CHECK(failed.find("FAIL") != std::string::npos);
  CHECK(failed.find("term 3") != std::string::npos);

  CHECK(run("verify --grid fine --outdir " + dir.string(), dir / "log3") == 0);
}

TEST_CASE("simulate rejects invalid model parameters with exit 2") {
  const fs::path dir = fresh_dir("sim-invalid");
  CHECK(run("simulate --j-over-kb -68 --p 1.5 --outdir " + dir.string(),
            dir / "log1") == 2);
  CHECK(run("simulate --j-over-kb -68 --g -1 --outdir " + dir.string(),
            dir / "log2") == 2);
  // Empty temperature grid.
  CHECK(run("simulate --j-over-kb -68 --tmin 100 --tmax 50 --outdir " +
                dir.string(),
            dir / "log3") == 2);
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path dir = fresh_dir("config");
  {
    std::ofstream cfg(dir / "run.ini");
    cfg << "[simulate]\nj-over-kb=-68\ng=2\nnoise=0\np=0\n";
  }
  CHECK(run("simulate --config " + (dir / "run.ini").string() +
                " --tmin 50 --tmax 60 --step 5 --outdir " + dir.string(),
            dir / "log") == 0);
  const spindimer::SusceptibilityCurve curve =
      spindimer::read_curve_csv(dir / "curve.csv");
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points.front().t == 50.0);

  // Flag beats config: override J on the command line.
  const fs::path dir2 = fresh_dir("config2");
  CHECK(run("simulate --config " + (dir / "run.ini").string() +
                " --j-over-kb 0 --tmin 50 --tmax 60 --step 5 --outdir " +
                dir2.string(),
            dir2 / "log") == 0);
  const json manifest = json::parse(std::ifstream(dir2 / "manifest.json"));
  CHECK(manifest["model"]["j_over_kb"].get<double>() == 0.0);
}

// End-to-end exercises of the command-line surface via subprocesses.
// The binary path comes from SHOCKCAST_BIN (set by CTest).
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "shockcast/manifest.hpp"

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* env = std::getenv("SHOCKCAST_BIN");
  REQUIRE_MESSAGE(env != nullptr, "SHOCKCAST_BIN must point at the CLI binary");
  return env;
}

fs::path workdir() {
  fs::path dir = fs::temp_directory_path() / "shockcast_cli_test";
  return dir;
}

int run(const std::string& args) {
  std::string cmd = bin() + " " + args + " > " + (workdir() / "stdout.log").string() + " 2> " +
                    (workdir() / "stderr.log").string();
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return s;
}

}  // namespace

TEST_CASE("full pipeline: simulate, fit, detect, project, tune-prior, report") {
  fs::remove_all(workdir());
  fs::create_directories(workdir());
  std::string wd = workdir().string();

  // simulate a small panel with one large injected shock
  REQUIRE(run("simulate --demo --countries 4 --periods 8 --seed 3 --tau-eps 0.5 "
              "--shock 1:4:9 --out " + wd + "/sim") == 0);
  CHECK(fs::exists(workdir() / "sim/panel.csv"));
  CHECK(fs::exists(workdir() / "sim/truth.json"));

  // fast fit (small panel keeps this quick; allow-unconverged guards CI noise)
  REQUIRE(run("fit --data " + wd + "/sim/panel.csv --out " + wd +
              "/fit --seed 5 --chains 2 --warmup 400 --sampling 400 --allow-unconverged") == 0);
  for (const char* f : {"draws.csv", "diagnostics.json", "manifest.json", "layout.json"}) {
    CHECK(fs::exists(workdir() / "fit" / f));
  }

  // rerunning without --force refuses to overwrite
  CHECK(run("fit --data " + wd + "/sim/panel.csv --out " + wd +
            "/fit --seed 5 --chains 2 --warmup 400 --sampling 400 --allow-unconverged") == 1);

  // determinism: a re-run with the same seed reproduces draws.csv bit for bit
  REQUIRE(run("fit --data " + wd + "/sim/panel.csv --out " + wd +
              "/fit_again --seed 5 --chains 2 --warmup 400 --sampling 400 --allow-unconverged") ==
          0);
  CHECK(shockcast::hash_file((workdir() / "fit/draws.csv").string()) ==
        shockcast::hash_file((workdir() / "fit_again/draws.csv").string()));

  REQUIRE(run("detect --fit " + wd + "/fit --out " + wd + "/det") == 0);
  CHECK(fs::exists(workdir() / "det/shocks.csv"));
  std::string shocks_csv = slurp(workdir() / "det/shocks.csv");
  CHECK(shocks_csv.find("S002,1970-1975") != std::string::npos);

  REQUIRE(run("project --fit " + wd + "/fit --horizon 4 --mode shock-free --seed 2 "
              "--allow-unconverged --out " + wd + "/proj") == 0);
  CHECK(fs::exists(workdir() / "proj/fan.csv"));
  CHECK(fs::exists(workdir() / "proj/fan_S001.svg"));
  std::string fan_csv = slurp(workdir() / "proj/fan.csv");
  CHECK(fan_csv.rfind("country,region,period,mode,q10,q50,q90", 0) == 0);

  // projection reproducibility through the manifest seed
  REQUIRE(run("project --fit " + wd + "/fit --horizon 4 --mode shock-free --seed 2 "
              "--allow-unconverged --out " + wd + "/proj2") == 0);
  CHECK(shockcast::hash_file((workdir() / "proj/fan.csv").string()) ==
        shockcast::hash_file((workdir() / "proj2/fan.csv").string()));

  REQUIRE(run("tune-prior --delta-star 1.64 --grid 0.001,0.01,0.1 --sims 100000 --seed 9 --out " +
              wd + "/tune") == 0);
  std::string tuning = slurp(workdir() / "tune/tuning.csv");
  CHECK(tuning.rfind("tau0,estimate,mc_se", 0) == 0);
  CHECK(std::count(tuning.begin(), tuning.end(), '\n') == 4);  // header + 3 rows

  REQUIRE(run("report --fit " + wd + "/fit") == 0);
  std::string report = slurp(workdir() / "stdout.log");
  CHECK(report.find("delta*") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2 and name the problem") {
  fs::create_directories(workdir());
  CHECK(run("fit --data /nonexistent/panel.csv --out " + workdir().string() + "/x") == 2);
  std::string err = slurp(workdir() / "stderr.log");
  CHECK(err.find("/nonexistent/panel.csv") != std::string::npos);

  CHECK(run("fit --data also_missing.csv --config /missing/config.json --out " +
            workdir().string() + "/x") == 2);
  CHECK(run("tune-prior --grid 0.01") == 2);       // neither delta-star nor from-fit
  CHECK(run("frobnicate") == 2);                   // unknown subcommand
  CHECK(run("simulate --out " + workdir().string() + "/y") == 2);  // no spec, no demo
}

TEST_CASE("the convergence gate exits with code 3") {
  fs::path dir = workdir() / "gate";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string wd = workdir().string();
  REQUIRE(run("simulate --demo --countries 3 --periods 6 --seed 8 --out " + wd + "/gate/sim") == 0);
  // 2x30 iterations cannot converge
  CHECK(run("fit --data " + wd + "/gate/sim/panel.csv --out " + wd +
            "/gate/fit --chains 2 --warmup 30 --sampling 30 --seed 1") == 3);
}

// End-to-end runs of the command-line tool. RLBRIDGE_BIN names the binary.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("rlbridge_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& env = {}) {
  const char* bin = std::getenv("RLBRIDGE_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "RLBRIDGE_BIN is not set");
  const std::string cmd = env + " \"" + bin + "\" " + args + " > \"" + (work_dir() / "stdout.txt").string() +
                          "\" 2> \"" + (work_dir() / "stderr.txt").string() + "\"";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path atoms_file() {
  const auto p = work_dir() / "atoms.json";
  std::ofstream(p) << R"({"atoms":[{"r":1.0,"p":0.5},{"r":2.0,"p":0.5}]})";
  return p;
}

}  // namespace

TEST_CASE("density subcommand writes the Cauchy table") {
  const auto out = work_dir() / "density.csv";
  REQUIRE(run("density --model cauchy --t 1 --x-max 10 --out " + out.string()) == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,f");
  bool found = false;
  double x_lo = 0.0, x_hi = 0.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double x = std::stod(line.substr(0, comma));
    const double f = std::stod(line.substr(comma + 1));
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    if (x == 0.0) {
      found = true;
      CHECK(f == doctest::Approx(0.3183099).epsilon(1e-7));
    }
  }
  CHECK(found);
  CHECK(x_hi == doctest::Approx(10.0));
  CHECK(x_lo == doctest::Approx(-10.0));
  CHECK(slurp(work_dir() / "stdout.txt").find("density:") == 0);
}

TEST_CASE("posterior subcommand gives the Bayes weights") {
  const auto out = work_dir() / "posterior.csv";
  REQUIRE(run("posterior --model cauchy --z 0 --tau " + atoms_file().string() + " --obs 0.5:0.0 --out " +
              out.string()) == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "part,r,value");
  std::getline(in, line);
  CHECK(line.rfind("atom,1,", 0) == 0);
  CHECK(std::stod(line.substr(7)) == doctest::Approx(0.6).epsilon(1e-10));
  std::getline(in, line);
  CHECK(line.rfind("atom,2,", 0) == 0);
  CHECK(std::stod(line.substr(7)) == doctest::Approx(0.4).epsilon(1e-10));

  const auto json_out = work_dir() / "posterior.json";
  REQUIRE(run("posterior --model cauchy --tau " + atoms_file().string() + " --obs 0.5:0.3,1.5:z --format json --out " +
              json_out.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(json_out));
  REQUIRE(j["posterior"]["atoms"].size() == 1);
  CHECK(j["posterior"]["atoms"][0]["r"] == 1.0);
  CHECK(j["config"]["obs"] == "0.5:0.3,1.5:z");
}

TEST_CASE("exit codes") {
  CHECK(run("density --model nosuch --out " + (work_dir() / "x.csv").string()) == 2);
  CHECK(run("density --bogus-flag") == 2);
  CHECK(run("") == 2);
  CHECK(run("posterior --model cauchy --tau " + atoms_file().string() + " --obs 0.5:z --out " +
            (work_dir() / "p.csv").string()) == 3);
  CHECK(slurp(work_dir() / "stderr.txt").find("zero-normalizer") != std::string::npos);
  CHECK(run("posterior --model cauchy --tau " + atoms_file().string() + " --obs 0.5:z,0.7:0.1 --out " +
            (work_dir() / "p.csv").string()) == 2);
  CHECK(run("verify --models nig --paths 1") == 2);
  CHECK(run("--help") == 0);
}

TEST_CASE("sampling output is byte-identical for identical seeds") {
  const auto a = work_dir() / "a.csv";
  const auto b = work_dir() / "b.csv";
  const std::string args = "bridge-sample --model gaussian:sigma=1 --r 1 --z 0.5 --steps 8 --n-paths 25 --seed 5";
  REQUIRE(run(args + " --out " + a.string()) == 0);
  REQUIRE(run(args + " --threads 2 --out " + b.string()) == 0);
  const auto text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.rfind("path_id,t,value,absorbed\n0,0,0,0\n", 0) == 0);
  CHECK(text.find("\n24,1,0.5,1\n") != std::string::npos);

  const auto c = work_dir() / "c.json";
  REQUIRE(run("rlb-sample --model cauchy --z 0 --tau " + atoms_file().string() +
              " --t-max 2 --steps 4 --n-paths 30 --seed 11 --format json --out " + c.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(c));
  CHECK(j["paths"].size() == 30);
  for (const auto& p : j["paths"]) {
    const double len = p["realized_length"];
    for (std::size_t k = 0; k < 5; ++k) {
      const bool at_z = p["values"][k].get<double>() == 0.0 && k > 0;
      CHECK(at_z == (len <= j["times"][k].get<double>()));
      CHECK(p["absorbed"][k].get<bool>() == (len <= j["times"][k].get<double>()));
    }
  }
}

TEST_CASE("kernel subcommand and default output directory") {
  const auto dir = work_dir() / "env_out";
  fs::create_directories(dir);
  REQUIRE(run("kernel --model cauchy --z 0 --tau " + atoms_file().string() + " --t 0.5 --x 0 --u 1.5",
              "RLB_OUTPUT_DIR=" + dir.string()) == 0);
  std::istringstream in(slurp(dir / "kernel.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "part,y,value");
  std::getline(in, line);
  CHECK(line.rfind("atom,0,", 0) == 0);
  CHECK(std::stod(line.substr(7)) == doctest::Approx(0.6).epsilon(1e-9));

  REQUIRE(run("kernel --model cauchy --tau " + atoms_file().string() + " --t 1.2 --x z --u 1.5 --format json",
              "RLB_OUTPUT_DIR=" + dir.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "kernel.json"));
  CHECK(j["transition"]["atom_mass"] == 1.0);
  CHECK(j["transition"]["grid"].empty());
}

TEST_CASE("verify subcommand with a reduced model list") {
  const auto out = work_dir() / "report.json";
  const int code = run("verify --models nig --paths 300 --seed 3 --out " + out.string());
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(code == (j["passed"].get<bool>() ? 0 : 1));
  CHECK(j["seed"] == 3);
  CHECK(j["models"] == nlohmann::json::array({"nig"}));
  CHECK(j["checks"].size() == 21);
  CHECK(slurp(work_dir() / "stdout.txt").find("verify: ") == 0);
  REQUIRE(run("verify --models --out " + out.string()) == 2);
}

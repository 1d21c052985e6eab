#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cslsim/cli.hpp"

using namespace cslsim;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cslsim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("cslsim_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
};

const std::string kRun = R"([sphere]
radius_m = 1.0e-6
mass_kg = 4.7e-15

[mode1]
frequency_hz = 12.9

[simulation]
gamma_over_2pi_hz = 0.4
duration_s = 60
record_stride = 4
seed = 3
)";

const std::string kReplay = R"([sphere]
radius_m = 1.0e-6
mass_kg = 4.7e-15

[mode1]
frequency_hz = 12.9

[simulation]
gamma_over_2pi_hz = 34e-6

[replay]
delta_t_k = %DT%
sigma_delta_t_k = 39.2525171

[analysis]
r_c_grid_m = [1e-7, 1e-6]
)";

std::string replay_config(const std::string& dt) {
  std::string s = kReplay;
  s.replace(s.find("%DT%"), 4, dt);
  return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"reproduce", "--table", "9"}).code == 1);
  CHECK(run({"simulate", "/nonexistent/run.toml"}).code == 1);
  const auto v = run({"--version"});
  CHECK(v.code == 0);
  CHECK(v.out.find(CSLSIM_VERSION) != std::string::npos);
}

TEST_CASE("config errors exit 1 with the location") {
  Scratch s("config");
  const auto bad = s.write("bad.toml", "[sphere]\nradius_m = 1e-6\nmass_kg = 4.7e-15\nwat = 2\n[mode1]\nfrequency_hz = 1\n");
  const auto r = run({"simulate", bad, "--out", (s.dir / "o").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("bad.toml:4: unknown key 'wat'") != std::string::npos);
}

TEST_CASE("simulate is byte-identical across runs and analyze reads it back") {
  Scratch s("simulate");
  const auto cfg = s.write("run.toml", kRun);
  const auto a = (s.dir / "a").string(), b = (s.dir / "b").string();
  REQUIRE(run({"simulate", cfg, "--out", a}).code == 0);
  REQUIRE(run({"simulate", cfg, "--out", b}).code == 0);
  CHECK(slurp(fs::path(a) / "trajectory.csv") == slurp(fs::path(b) / "trajectory.csv"));
  CHECK(slurp(fs::path(a) / "trajectory.json") == slurp(fs::path(b) / "trajectory.json"));
  CHECK(slurp(fs::path(a) / "trajectory.csv").rfind("# tool=cslsim " CSLSIM_VERSION " digest=", 0) == 0);

  const auto other = (s.dir / "c").string();
  REQUIRE(run({"simulate", cfg, "--out", other, "--seed", "4"}).code == 0);
  CHECK(slurp(fs::path(a) / "trajectory.csv") != slurp(fs::path(other) / "trajectory.csv"));

  const auto an = run({"analyze", (fs::path(a) / "trajectory.csv").string(), "--json", "--out", (s.dir / "an").string()});
  REQUIRE(an.code == 0);
  const auto j = nlohmann::json::parse(an.out);
  CHECK(j["version"] == CSLSIM_VERSION);
  CHECK_FALSE(j["config_digest"].get<std::string>().empty());
  CHECK(j["temperatures"].size() == 1);
  CHECK(fs::exists(s.dir / "an" / "psd.csv"));
  CHECK(fs::exists(s.dir / "an" / "autocorrelation.csv"));
}

TEST_CASE("numeric failures exit 2") {
  Scratch s("numeric");
  const auto cfg = s.write("run.toml", kRun);
  REQUIRE(run({"simulate", cfg, "--out", s.dir.string()}).code == 0);
  const auto r = run({"analyze", (s.dir / "trajectory.csv").string(), "--segment", "100000000", "--out",
                      (s.dir / "an").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("numeric error") == 0);
}

TEST_CASE("bound from a replay, including a cold high-vacuum reading") {
  Scratch s("bound");
  const auto warm = s.write("warm.toml", replay_config("6.5"));
  const auto r = run({"bound", warm, "--json", "--out", (s.dir / "w").string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["version"] == CSLSIM_VERSION);
  CHECK(j.contains("inputs_digest"));
  CHECK(fs::exists(s.dir / "w" / "exclusion.csv"));
  CHECK(slurp(s.dir / "w" / "exclusion.csv").rfind("# tool=cslsim", 0) == 0);

  const auto cold = s.write("cold.toml", replay_config("-12"));
  const auto c = run({"bound", cold, "--json", "--out", (s.dir / "c").string()});
  CHECK(c.code == 0);
  CHECK(c.out.find("negative-delta-t-clamped") != std::string::npos);
}

TEST_CASE("exclude writes a CSV to standard output") {
  const auto r = run({"exclude", "--sqrt-excess-psd", "3.3301589e-20", "--mass", "4.7e-15", "--grid", "1e-7,1e-6"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# tool=cslsim", 0) == 0);
  CHECK(r.out.find("1e-07,") != std::string::npos);
  CHECK(run({"exclude", "--mass", "4.7e-15"}).code == 1);
  CHECK(run({"exclude", "--excess-psd", "1e-40", "--grid", "1e-7:x:3"}).code == 1);
}

}  // TEST_SUITE

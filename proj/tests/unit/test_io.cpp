#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "cslsim/dynamics.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/report.hpp"
#include "cslsim/trajectory_io.hpp"

using namespace cslsim;

namespace {

SimulationConfig small_run() {
  SimulationConfig c;
  c.sphere = SphereParams::from_mass(1e-6, 4.7e-15);
  c.modes = {OscillatorMode{12.9, 0.0, "mode1"}, OscillatorMode{9.3, 0.0, "mode2"}};
  c.gamma = 2.0;
  c.noise.assign(2, thermal_noise(2.0, 4.7e-15, 298.0));
  c.duration = 2.0;
  c.record_stride = 10;
  c.seed = 42;
  return c;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("provenance line") {
  CHECK(provenance_line("abc") == std::string("# tool=cslsim ") + CSLSIM_VERSION + " digest=abc");
}

TEST_CASE("trajectory CSV round trip is exact") {
  const auto c = small_run();
  const auto t = simulate(c);
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  std::string first;
  std::getline(std::istringstream(ss.str()), first);
  CHECK(first == provenance_line(c.digest()));
  const auto back = read_trajectory_csv(ss);
  CHECK(back.samples == t.samples);
  CHECK(back.dt == doctest::Approx(t.dt).epsilon(1e-12));
  CHECK(back.seed == 42);
  CHECK(back.config_digest == t.config_digest);
  CHECK(back.burn_in == t.burn_in);
}

TEST_CASE("malformed trajectories") {
  std::istringstream no_header("1,2\n3,4\n");
  CHECK_THROWS_AS(read_trajectory_csv(no_header), ConfigError);
  std::istringstream wrong_column("t_s,y_m\n0,1\n1,2\n");
  CHECK_THROWS_AS(read_trajectory_csv(wrong_column), ConfigError);
  std::istringstream ragged("t_s,x1_m\n0,1\n1\n");
  try {
    read_trajectory_csv(ragged);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream garbage("t_s,x1_m\n0,1\n1,abc\n");
  CHECK_THROWS_AS(read_trajectory_csv(garbage), ConfigError);
  std::istringstream one("t_s,x1_m\n0,1\n");
  CHECK_THROWS_AS(read_trajectory_csv(one), SizeError);
}

TEST_CASE("sidecar carries the config") {
  const auto dir = std::filesystem::temp_directory_path() / "cslsim_io_test";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "run.csv";
  const auto c = small_run();
  const auto t = simulate(c);
  save_trajectory(csv, t, c);
  CHECK(sidecar_path(csv) == dir / "run.json");
  const auto st = load_trajectory(csv);
  REQUIRE(st.config);
  CHECK(st.config->digest() == c.digest());
  CHECK(st.trajectory.dt == t.dt);
  CHECK(st.trajectory.samples == t.samples);
  // Without the sidecar the CSV alone still loads.
  std::filesystem::remove(sidecar_path(csv));
  CHECK_FALSE(load_trajectory(csv).config);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_trajectory(dir / "missing.csv"), ConfigError);
}

TEST_CASE("CSV artifacts start with the provenance line") {
  PsdEstimate psd;
  psd.frequencies = {0.0, 1.0};
  psd.values = {1e-40, 2e-40};
  std::ostringstream out;
  write_psd_csv(out, psd, "d1g");
  CHECK(out.str().rfind(provenance_line("d1g") + "\n", 0) == 0);
}

}  // TEST_SUITE

#include <cmath>
#include <string>

#include "doctest.h"

#include "cslsim/errors.hpp"
#include "cslsim/run_config.hpp"

using namespace cslsim;

namespace {

const std::string kBase = R"(# desk experiment
[sphere]
radius_m = 1.0e-6
density_kg_m3 = 1100

[environment]
temperature_k = 298
pressure_pa = 0.1
gas = "air"

[mode1]
frequency_hz = 12.9

[simulation]
duration_s = 10
seed = 7
)";

RunConfig from(const std::string& text) { return run_config_from(parse_config(text, "test.toml")); }

// ConfigError message for `text`, or "" if it parses.
std::string error_of(const std::string& text) {
  try {
    from(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("run_config") {

TEST_CASE("value types") {
  const auto doc = parse_config("[a]\nx = 1.5e-3 # trailing\ns = \"has # hash\"\nb = false\nv = [1, 2.5, -3e2]\n");
  const auto& a = doc.sections.at("a");
  CHECK(std::get<double>(a.at("x").value) == 1.5e-3);
  CHECK(std::get<std::string>(a.at("s").value) == "has # hash");
  CHECK_FALSE(std::get<bool>(a.at("b").value));
  CHECK(std::get<std::vector<double>>(a.at("v").value) == std::vector<double>{1.0, 2.5, -300.0});
  CHECK(a.at("v").line == 5);
  CHECK(doc.section_lines.at("a") == 1);
}

TEST_CASE("syntax errors carry file and line") {
  CHECK(error_of("[sphere]\nradius_m = 1e-6\noops\n").find("test.toml:3:") == 0);
  CHECK(error_of("x = 1\n").find("test.toml:1: key outside") == 0);
  CHECK(error_of("[a]\nx = \"open\n").find(":2: unterminated string") != std::string::npos);
  CHECK(error_of("[a]\nv = [1, b]\n").find(":2: array element 'b'") != std::string::npos);
  CHECK(error_of("[a\n").find(":1: malformed section header") != std::string::npos);
  CHECK(error_of("[a]\nx = 1\nx = 2\n").find(":3: duplicate key 'x'") != std::string::npos);
  CHECK(error_of("[a]\n[a]\n").find(":2: duplicate section") != std::string::npos);
}

TEST_CASE("schema errors") {
  CHECK(error_of(kBase + "[bogus]\nx = 1\n").find("unknown section [bogus]") != std::string::npos);
  CHECK(error_of(kBase + "[coupling]\nbeta = 1\n").find(":18: unknown key 'beta'") != std::string::npos);
  CHECK(error_of(kBase + "[output]\ndir = 3\n").find("'dir' must be a string") != std::string::npos);
  CHECK(error_of(kBase + "[analysis]\nmode = 2\n").find("existing mode") != std::string::npos);
  CHECK(error_of(kBase + "[analysis]\nconfidence = 1.5\n").find(":18:") != std::string::npos);
  CHECK(error_of(kBase + "[medium_vacuum]\ngamma_per_s = 2\n").find("together") != std::string::npos);
  CHECK(error_of(kBase + "[replay]\nt_hv_k = 300\n").find("[replay] needs") != std::string::npos);
  CHECK(error_of("[mode1]\nfrequency_hz = 10\n").find("missing section [sphere]") != std::string::npos);
  CHECK_FALSE(error_of(kBase).size());
}

TEST_CASE("physical validation is reported at the offending key") {
  std::string bad = kBase;
  bad.replace(bad.find("radius_m = 1.0e-6"), 17, "radius_m = -1.0e-6");
  CHECK(error_of(bad).find("test.toml:3:") == 0);
  std::string cold = kBase;
  cold.replace(cold.find("temperature_k = 298"), 19, "temperature_k = -5");
  CHECK(error_of(cold).find("test.toml:7:") == 0);
}

TEST_CASE("damping from pressure or explicit") {
  const auto rc = from(kBase);
  const double nu = mean_gas_speed(298.0, constants::molar_mass_air);
  CHECK(rc.resolved_gamma() == doctest::Approx(damping_from_pressure(0.1, nu, 1e-6, 1100.0)).epsilon(1e-14));
  const auto explicit_rc = from(kBase + "gamma_over_2pi_hz = 0.4\n");
  CHECK(explicit_rc.resolved_gamma() == doctest::Approx(2.0 * constants::pi * 0.4).epsilon(1e-14));
  CHECK(error_of(kBase + "gamma_per_s = 1\ngamma_over_2pi_hz = 0.4\n").find("not both") != std::string::npos);

  std::string no_pressure = kBase;
  no_pressure.replace(no_pressure.find("pressure_pa = 0.1"), 17, "pressure_mbar = 0");
  CHECK_THROWS_AS(from(no_pressure).resolved_gamma(), ConfigError);
}

TEST_CASE("regimes and the simulation config") {
  const auto rc = from(kBase +
                       "[medium_vacuum]\ngamma_over_2pi_hz = 0.4\nduration_s = 100\n"
                       "[high_vacuum]\npressure_pa = 1e-5\nseed = 99\n");
  REQUIRE(rc.medium_vacuum);
  REQUIRE(rc.high_vacuum);
  const auto mv = rc.regime(*rc.medium_vacuum);
  CHECK(mv.gamma == doctest::Approx(2.0 * constants::pi * 0.4));
  CHECK(mv.duration == 100.0);
  CHECK(mv.seed == 7);
  CHECK(mv.noise[0].thermal_psd == doctest::Approx(thermal_force_psd(mv.gamma, mv.sphere.mass(), 298.0)));
  const auto hv = rc.regime(*rc.high_vacuum);
  CHECK(hv.gamma == doctest::Approx(rc.resolved_gamma() * 1e-4).epsilon(1e-12));
  CHECK(hv.seed == 99);
  CHECK(hv.duration == 10.0);
}

TEST_CASE("regimes need neither a base damping nor a base duration") {
  const auto rc = from("[sphere]\nradius_m = 1e-6\nmass_kg = 4.7e-15\n[mode1]\nfrequency_hz = 12.9\n"
                       "[medium_vacuum]\ngamma_per_s = 2\nduration_s = 50\n"
                       "[high_vacuum]\ngamma_per_s = 0.02\nduration_s = 5000\n");
  CHECK(rc.regime(*rc.medium_vacuum).gamma == 2.0);
  CHECK(rc.regime(*rc.high_vacuum).duration == 5000.0);
  CHECK_THROWS_AS(rc.simulation(), ConfigError);
}

TEST_CASE("CSL noise from lambda and r_C") {
  const auto rc = from(kBase + "[noise]\ncsl_lambda_per_s = 1e-8\ncsl_r_c_m = 1e-7\n");
  REQUIRE(rc.csl);
  const auto n = rc.noise_at(1.0);
  CHECK(n.csl_psd == doctest::Approx(csl_force_psd(diffusion_constant_sphere({1e-8, 1e-7}, rc.sphere))));
  CHECK(error_of(kBase + "[noise]\ncsl_r_c_m = 1e-7\n").find("requires csl_lambda_per_s") != std::string::npos);
}

TEST_CASE("analysis grid and mode index") {
  const auto rc = from(kBase + "[mode2]\nfrequency_hz = 9.3\n[analysis]\nmode = 2\nr_c_min_m = 1e-8\nr_c_max_m = "
                               "1e-6\nr_c_points = 3\n");
  CHECK(rc.analysis.mode == 1);
  REQUIRE(rc.analysis.r_c_grid.size() == 3);
  CHECK(rc.analysis.r_c_grid[1] == doctest::Approx(1e-7).epsilon(1e-12));
  CHECK(rc.modes.size() == 2);
  CHECK(rc.modes[1].label == "mode2");
}

}  // TEST_SUITE

#include <cmath>

#include "doctest.h"

#include "cslsim/errors.hpp"
#include "cslsim/model.hpp"

using namespace cslsim;

TEST_SUITE("model") {

TEST_CASE("constants are the fixed CODATA values") {
  CHECK(constants::hbar == 1.054571817e-34);
  CHECK(constants::k_B == 1.380649e-23);
  CHECK(constants::m0 == 1.660539067e-27);
  CHECK(constants::gas_constant == 8.314462618);
}

TEST_CASE("thermal force psd at the Table I parameters") {
  const double gamma = hz_to_angular(34e-6);
  const double s = thermal_force_psd(gamma, 4.7e-15, 298.0);
  CHECK(s == doctest::Approx(8.26201893e-39).epsilon(1e-8));
  CHECK(std::sqrt(s) == doctest::Approx(9.0895649e-20).epsilon(1e-7));
  CHECK(thermal_force_psd(gamma, 4.7e-15, 0.0) == 0.0);
  CHECK(thermal_force_psd(2.0 * gamma, 4.7e-15, 298.0) == doctest::Approx(2.0 * s).epsilon(1e-15));
}

TEST_CASE("thermal force psd is linear in each argument") {
  const double base = thermal_force_psd(1.3, 2e-15, 77.0);
  for (double c : {0.5, 3.0, 17.0}) {
    CHECK(thermal_force_psd(1.3 * c, 2e-15, 77.0) == doctest::Approx(c * base).epsilon(1e-14));
    CHECK(thermal_force_psd(1.3, 2e-15 * c, 77.0) == doctest::Approx(c * base).epsilon(1e-14));
    CHECK(thermal_force_psd(1.3, 2e-15, 77.0 * c) == doctest::Approx(c * base).epsilon(1e-14));
  }
}

TEST_CASE("thermal force psd rejects non-positive inputs by name") {
  CHECK_THROWS_AS(thermal_force_psd(0.0, 1e-15, 300.0), DomainError);
  CHECK_THROWS_AS(thermal_force_psd(1.0, -1e-15, 300.0), DomainError);
  CHECK_THROWS_AS(thermal_force_psd(1.0, 1e-15, -1.0), DomainError);
  try {
    thermal_force_psd(1.0, 0.0, 300.0);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("mass") != std::string::npos);
  }
}

TEST_CASE("mean gas speed") {
  CHECK(mean_gas_speed(298.0, constants::molar_mass_air) == doctest::Approx(466.68198).epsilon(1e-7));
  CHECK(mean_gas_speed(298.0, 0.004) == doctest::Approx(1255.92957).epsilon(1e-7));
  CHECK(mean_gas_speed(4.0 * 298.0, 0.004) == doctest::Approx(2.0 * mean_gas_speed(298.0, 0.004)).epsilon(1e-14));
  CHECK_THROWS_AS(mean_gas_speed(0.0, 0.004), DomainError);
  CHECK_THROWS_AS(mean_gas_speed(300.0, 0.0), DomainError);
}

TEST_CASE("mean gas speed is invariant under joint scaling of T and M") {
  const double v = mean_gas_speed(300.0, 0.028);
  for (double c : {1e-3, 0.5, 7.0, 1e4}) CHECK(mean_gas_speed(300.0 * c, 0.028 * c) == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("sphere mass is derived from radius and density") {
  for (double r : {1e-8, 3e-7, 1e-6, 2.5e-5}) {
    for (double rho : {500.0, 1100.0, 19300.0}) {
      const SphereParams s(r, rho);
      const double expect = 4.0 / 3.0 * constants::pi * rho * r * r * r;
      CHECK(std::abs(s.mass() - expect) <= 1e-12 * expect);
    }
  }
  const auto t1 = SphereParams::from_mass(1e-6, 4.7e-15);
  CHECK(std::abs(t1.mass() - 4.7e-15) <= 1e-12 * 4.7e-15);
  CHECK(t1.density() == doctest::Approx(1122.04).epsilon(1e-5));
  CHECK_THROWS_AS(SphereParams(0.0, 1000.0), DomainError);
  CHECK_THROWS_AS(SphereParams(1e-6, -1.0), DomainError);
}

TEST_CASE("mode spring constant and validation") {
  OscillatorMode m{12.9, 0.0, "x"};
  const double w = 2.0 * constants::pi * 12.9;
  CHECK(m.spring_constant(4.7e-15) == doctest::Approx(4.7e-15 * w * w).epsilon(1e-15));
  m.frequency = 0.0;
  CHECK_THROWS_AS(m.validate(), DomainError);
  Environment env;
  env.pressure = -1.0;
  CHECK_THROWS_AS(env.validate(), DomainError);
  NoiseConfig n;
  n.parametric_strength = -1e-3;
  CHECK_THROWS_AS(n.validate(), DomainError);
}

}  // TEST_SUITE

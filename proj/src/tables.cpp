#include <cmath>
#include <cstdio>

#include "cslsim/constants.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/parallel.hpp"
#include "cslsim/pipeline.hpp"

namespace cslsim {

std::optional<double> TableCell::deviation() const {
  if (!paper || *paper == 0.0) return std::nullopt;
  return (computed - *paper) / std::abs(*paper);
}

std::optional<bool> TableCell::pass() const {
  if (!reference || !tolerance) return std::nullopt;
  const double err = std::abs(computed - *reference);
  return relative_tolerance ? err <= *tolerance * std::abs(*reference) : err <= *tolerance;
}

bool TableReport::all_pass() const {
  for (const auto& c : cells) {
    if (auto p = c.pass(); p && !*p) return false;
  }
  return true;
}

namespace {

TableCell cell(std::string name, std::string unit, std::optional<double> paper, double computed,
               std::optional<double> reference, std::optional<double> tol, bool relative, std::string note = {}) {
  return TableCell{std::move(name), std::move(unit), paper, computed, reference, tol, relative, std::move(note)};
}

constexpr double kPaperSigmaDeltaT = 40.0;  // K

TableReport table_one() {
  TableReport t{"1", "Upper bounds on the CSL collapse rate", {}, {}};
  const auto in = table_one_inputs();
  const double m = in.sphere.mass();
  const auto chain = replay(in);
  // Bound inversion from the published 95% budget.
  const auto published = bound_from_excess(6.5, kPaperSigmaDeltaT, in.sphere, in.gamma, {1e-7, 1e-6}, 0.95);

  t.cells.push_back(cell("delta_t", "K", 6.5, chain.delta_t, 6.5, 0.05, false, "from the high/medium vacuum temperatures"));
  t.cells.push_back(cell("sigma_delta_t", "K", kPaperSigmaDeltaT, chain.sigma_delta_t, kPaperSigmaDeltaT, 0.05, true,
                         "from the published temperature uncertainties"));
  t.cells.push_back(cell("sqrt_delta_s", "N/sqrt(Hz)", 1.3e-20, std::sqrt(excess_force_psd(6.5, m, in.gamma).psd),
                         1.3e-20, 0.05, true));
  t.cells.push_back(cell("sqrt_delta_s_bound", "N/sqrt(Hz)", 3.3e-20, std::sqrt(published.excess_psd_bound), 3.3e-20,
                         0.05, true, "sigma_delta_t = 40 K"));
  t.cells.push_back(cell("log10_lambda_rc_1e-7", "log10(1/s)", -6.4, std::log10(published.lambda_at(1e-7)), -6.4, 0.1,
                         false, "sigma_delta_t = 40 K"));
  t.cells.push_back(cell("log10_lambda_rc_1e-6", "log10(1/s)", -7.4, std::log10(published.lambda_at(1e-6)), -7.4, 0.1,
                         false, "sigma_delta_t = 40 K"));
  t.cells.push_back(cell("log10_lambda_rc_1e-7_chain", "log10(1/s)", -6.4, std::log10(chain.lambda_at(1e-7)), -6.4,
                         0.1, false, "end to end from the published temperatures"));
  t.cells.push_back(cell("log10_lambda_rc_1e-6_chain", "log10(1/s)", -7.4, std::log10(chain.lambda_at(1e-6)), -7.4,
                         0.1, false, "end to end from the published temperatures"));
  t.notes.push_back(std::string("convention: ") + kExcessBoundConvention);
  t.notes.push_back("sphere: m = 4.7e-15 kg, R = 1.0e-6 m; gamma/2pi = 34 uHz");
  return t;
}

TableReport table_two(const ReproduceOptions& opts) {
  TableReport t{"2", "Comparison of the damping rates", {}, {}};
  struct Job {
    std::string regime;
    double hz;
    double duration;
    bool nonlinear;
    std::optional<double> paper;
  };
  // Medium vacuum runs for gamma t ~ 5e4: the lock-in memory is comparable to
  // 1/gamma there, so the fit sees a small slice of the decay and needs the
  // longer record. High vacuum CI preset: gamma t ~ 5000. The full run uses
  // the published 0.4 mHz rate with gamma t ~ 1.6e4: the fitted rate scatters
  // by ~7% per run at gamma t = 2000, too wide for the 0.37-0.42 mHz band.
  // Keep the default lock-in bandwidth: a 0.5 Hz lock-in clips the Duffing
  // frequency wander and reads the nonlinear rate ~20% high.
  std::vector<Job> jobs{{"mv", 0.4, 20000.0, true, 0.39}, {"mv", 0.4, 20000.0, false, 0.38}};
  if (opts.full) {
    jobs.push_back({"hv", 4e-4, 6.4e6, true, 0.00037});
    jobs.push_back({"hv", 4e-4, 6.4e6, false, 0.00038});
  } else {
    jobs.push_back({"hv", 0.04, 20000.0, true, std::nullopt});
    jobs.push_back({"hv", 0.04, 20000.0, false, std::nullopt});
  }
  auto results = parallel_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        const auto cfg = table_two_config(j.hz, j.nonlinear, j.duration, derive_seed(opts.seed, i));
        return measure_regime(cfg, j.regime, {});
      },
      opts.threads);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    const double fitted = angular_to_hz(results[i].damping->gamma);
    const std::string name = j.regime + (j.nonlinear ? "_nonlinear" : "_linear") + "_gamma_over_2pi";
    char note[96];
    std::snprintf(note, sizeof note, "input %g Hz, duration %g s", j.hz, j.duration);
    if (opts.full && j.regime == "hv") {
      // Acceptance band for the published high-vacuum case: 0.37-0.42 mHz.
      t.cells.push_back(cell(name, "Hz", j.paper, fitted, 3.95e-4, 2.5e-5, false, note));
    } else {
      t.cells.push_back(cell(name, "Hz", j.paper, fitted, j.hz, 0.10, true, note));
    }
  }
  t.notes.push_back("mode 1 energy autocorrelation, R(t) = c + (1 - c) (C(t)/C(0))^2 with C the lock-in-smoothed "
                    "exp(-gamma t / 2)");
  char scale[96];
  std::snprintf(scale, sizeof scale, "nonlinear coefficients: published alpha1, alpha2, beta scaled by %g",
                kTableTwoNonlinearScale);
  t.notes.push_back(scale);
  if (!opts.full) t.notes.push_back("high-vacuum rows use the 0.04 Hz CI preset; --full runs 0.4 mHz");
  return t;
}

TableReport table_three() {
  TableReport t{"3", "Measured effective temperature of the oscillator (replay)", {}, {}};
  const auto in = table_one_inputs();
  const double sigma_hv = temperature_uncertainty(in.hv.t_eff, in.gamma, 9.5e5);
  const auto ex = excess_temperature_bound(in.hv, in.mv, 0.95);
  t.cells.push_back(cell("t_eff_hv", "K", 297.9, in.hv.t_eff, std::nullopt, std::nullopt, true, "input"));
  t.cells.push_back(cell("sigma_t_eff_hv", "K", 16.2, sigma_hv, std::nullopt, std::nullopt, true,
                         "square-root law, one standard deviation, t_mea = 9.5e5 s; see notes"));
  t.cells.push_back(cell("t_eff_mv", "K", 291.4, in.mv.t_eff, std::nullopt, std::nullopt, true, "input"));
  t.cells.push_back(cell("delta_t", "K", 6.5, ex.delta_t, 6.5, 0.05, false));
  t.cells.push_back(cell("sigma_delta_t", "K", kPaperSigmaDeltaT, ex.sigma_delta_t, kPaperSigmaDeltaT, 0.05, true,
                         "published uncertainties read as one standard deviation"));
  t.cells.push_back(cell("gamma_over_2pi_from_tau", "Hz", 34e-6, 1.0 / (constants::two_pi * 4700.0), 34e-6, 0.01, true,
                         "tau = 4700 s"));
  t.notes.push_back("the published 16.2 K is labelled a 95% bound, yet the square-root law gives 29.6 K at one "
                    "standard deviation for the stated damping and duration; no single reading makes both agree");
  t.notes.push_back("the medium-vacuum uncertainty cannot be recomputed: its record length is not stated");
  return t;
}

TableReport projection() {
  TableReport t{"projection", "Projected bound for a cryogenic experiment", {}, {}};
  const SphereParams sphere(0.3e-6, 1100.0);
  const double gamma = hz_to_angular(1e-6);
  const auto rep = bound_from_excess(0.01, 0.01, sphere, gamma, {1e-7}, 0.95);
  t.cells.push_back(cell("log10_lambda_rc_1e-7", "log10(1/s)", -11.9, std::log10(rep.lambda_at(1e-7)), -11.9, 0.2,
                         false, "R = 0.3 um, rho = 1100 kg/m^3, gamma/2pi = 1 uHz, delta_t = 10 mK"));
  t.cells.push_back(cell("mass", "kg", std::nullopt, sphere.mass(), std::nullopt, std::nullopt, true));
  return t;
}

}  // namespace

TableReport reproduce_paper_tables(const std::string& which, const ReproduceOptions& opts) {
  if (which == "1" || which == "table1") return table_one();
  if (which == "2" || which == "table2") return table_two(opts);
  if (which == "3" || which == "table3" || which == "table3-replay") return table_three();
  if (which == "projection") return projection();
  throw ConfigError("unknown table '" + which + "' (expected 1, 2, 3 or projection)");
}

}  // namespace cslsim

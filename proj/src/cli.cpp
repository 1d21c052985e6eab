#include "cslsim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cslsim/analysis.hpp"
#include "cslsim/errors.hpp"
#include "cslsim/pipeline.hpp"
#include "cslsim/reference_curves.hpp"
#include "cslsim/report.hpp"
#include "cslsim/run_config.hpp"
#include "cslsim/trajectory_io.hpp"

namespace cslsim {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool json = false;
};

fs::path prepare_dir(const std::string& requested, const fs::path& fallback) {
  fs::path dir = requested.empty() ? fallback : fs::path(requested);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("--grid: cannot parse '" + s + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::stringstream ss(spec);
    std::string a, b, n;
    std::getline(ss, a, ':');
    std::getline(ss, b, ':');
    std::getline(ss, n);
    if (a.empty() || b.empty() || n.empty()) throw ConfigError("--grid expects lo:hi:n or a comma list");
    return log_grid(number(a), number(b), static_cast<int>(number(n)));
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number(item));
  if (out.empty()) throw ConfigError("--grid is empty");
  return out;
}

int cmd_simulate(const std::string& config_path, const Common& c, std::ostream& out) {
  auto rc = load_run_config(config_path);
  if (c.seed) rc.seed = *c.seed;
  const auto sim = rc.simulation();
  const auto dir = prepare_dir(c.out_dir, rc.output_dir);
  const auto traj = simulate(sim);
  const auto csv = dir / "trajectory.csv";
  save_trajectory(csv, traj, sim);
  nlohmann::ordered_json j{{"trajectory", csv.string()},
                           {"metadata", sidecar_path(csv).string()},
                           {"samples", traj.length()},
                           {"modes", traj.mode_count()},
                           {"sample_interval_s", traj.dt},
                           {"seed", traj.seed},
                           {"config_digest", traj.config_digest}};
  if (c.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "wrote " << traj.length() << " samples x " << traj.mode_count() << " modes to " << csv.string()
        << " (digest " << traj.config_digest << ")\n";
  }
  return 0;
}

struct AnalyzeArgs {
  std::string trajectory;
  std::string config;
  std::size_t mode = 1;
  double bandwidth = 0.0;
  std::size_t segment = 0;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  auto stored = load_trajectory(a.trajectory);
  std::optional<SimulationConfig> sim = stored.config;
  if (!a.config.empty()) sim = load_run_config(a.config).simulation();
  if (!sim) throw ConfigError("no physical parameters: the metadata sidecar is missing; pass --config");
  const auto& traj = stored.trajectory;
  if (sim->modes.size() != traj.mode_count()) throw ConfigError("config and trajectory disagree on the mode count");
  if (a.mode < 1 || a.mode > traj.mode_count()) throw ConfigError("--mode out of range");
  const std::size_t idx = a.mode - 1;
  const auto& mode = sim->modes[idx];
  const double mass = sim->sphere.mass();
  const auto dir = prepare_dir(c.out_dir, fs::path(a.trajectory).parent_path() / "analysis");

  nlohmann::ordered_json j;
  j["tool"] = "cslsim";
  j["version"] = CSLSIM_VERSION;
  j["config_digest"] = traj.config_digest;
  j["mode"] = mode.label;

  // Damping from the energy autocorrelation.
  double gamma = sim->gamma;
  const double bw = a.bandwidth > 0.0 ? a.bandwidth : default_envelope_bandwidth(mode.frequency);
  try {
    const auto env = envelope_squared(traj, idx, mode.frequency, bw);
    const auto r = normalized_energy_autocorrelation(env, static_cast<double>(env.x2.size()) * env.dt / 10.0);
    const auto d = fit_envelope_decay(r, env.kernel);
    gamma = d.gamma;
    j["damping"] = to_json(d);
    auto f = open_out(dir / "autocorrelation.csv");
    write_autocorrelation_csv(f, r, traj.config_digest);
  } catch (const SizeError& e) {
    err << "warning: damping not measured (" << e.what() << "); using the configured value\n";
    j["damping"] = nullptr;
  }
  j["gamma_used_per_s"] = gamma;

  j["temperatures"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < traj.mode_count(); ++i)
    j["temperatures"].push_back(to_json(measure_temperature(traj.mode(i), traj.dt, sim->modes[i], mass, gamma)));

  const std::size_t seg = a.segment ? a.segment : default_segment_length(traj.dt, gamma, traj.length());
  const auto psd = psd_welch(traj, idx, seg);
  {
    auto f = open_out(dir / "psd.csv");
    write_psd_csv(f, psd, traj.config_digest);
  }
  const auto peak = analyze_peak(psd, 0.8 * mode.frequency, 1.2 * mode.frequency);
  j["psd"] = {{"segment_length", psd.segment_length},
              {"resolution_hz", psd.resolution()},
              {"integral_m2", psd.integral()},
              {"peak_hz", peak.peak_frequency},
              {"fwhm_hz", peak.fwhm},
              {"centroid_hz", peak.centroid},
              {"skewness", peak.skewness}};
  try {
    const auto lf = fit_lorentzian(psd, mode.frequency - 5.0 * peak.fwhm, mode.frequency + 5.0 * peak.fwhm);
    j["psd"]["lorentzian"] = {{"center_hz", lf.center}, {"fwhm_hz", lf.fwhm}};
  } catch (const FitError& e) {
    err << "warning: Lorentzian fit failed (" << e.what() << ")\n";
  }
  j["radius_from_equipartition_m"] = radius_from_equipartition(fit_gaussian(traj.mode(idx)).sigma, mode.frequency,
                                                               sim->sphere.density(), kRoomTemperature);
  j["constants"] = decision_constants();
  {
    auto f = open_out(dir / "analysis.json");
    f << j.dump(2) << '\n';
  }
  if (c.json) {
    out << j.dump(2) << '\n';
  } else {
    out << "analysis of " << a.trajectory << " (" << traj.length() << " samples)\n";
    if (!j["damping"].is_null())
      out << "  gamma/2pi = " << angular_to_hz(gamma) << " Hz from the energy autocorrelation\n";
    for (const auto& t : j["temperatures"])
      out << "  T_eff(" << t["mode"].get<std::string>() << ") = " << t["t_eff_k"].get<double>() << " K +- "
          << t["sigma_1s_k"].get<double>() << " K\n";
    out << "  PSD peak " << peak.peak_frequency << " Hz, FWHM " << peak.fwhm << " Hz\n";
    out << "  outputs in " << dir.string() << '\n';
  }
  return 0;
}

int cmd_bound(const std::string& config_path, const Common& c, unsigned threads, std::ostream& out) {
  auto rc = load_run_config(config_path);
  if (c.seed) rc.seed = *c.seed;
  const auto& grid = rc.analysis.r_c_grid;
  BoundReport rep;
  if (rc.replay) {
    const auto& s = *rc.replay;
    const double gamma = rc.resolved_gamma();
    if (s.delta_t) {
      rep = bound_from_excess(*s.delta_t, *s.sigma_delta_t, rc.sphere, gamma, grid, rc.analysis.confidence);
      rep.kind = "replay";
    } else {
      ReplayInputs in;
      in.sphere = rc.sphere;
      in.gamma = gamma;
      in.hv = TemperatureEstimate{*s.t_hv, *s.sigma_hv, 0.0, rc.modes[rc.analysis.mode].label};
      in.mv = TemperatureEstimate{*s.t_mv, *s.sigma_mv, 0.0, rc.modes[rc.analysis.mode].label};
      in.confidence = rc.analysis.confidence;
      in.r_c_grid = grid;
      rep = replay(in);
    }
  } else if (rc.medium_vacuum && rc.high_vacuum) {
    auto mv_spec = *rc.medium_vacuum;
    auto hv_spec = *rc.high_vacuum;
    if (!mv_spec.seed || c.seed) mv_spec.seed = derive_seed(rc.seed, 0);
    if (!hv_spec.seed || c.seed) hv_spec.seed = derive_seed(rc.seed, 1);
    VirtualExperimentOptions opts;
    opts.confidence = rc.analysis.confidence;
    opts.mode = rc.analysis.mode;
    opts.bandwidth = rc.analysis.bandwidth;
    opts.environment_temperature = rc.environment.temperature;
    opts.gas_molar_mass = rc.environment.gas_molar_mass;
    opts.threads = threads;
    if (!mv_spec.gamma) opts.mv_pressure = mv_spec.pressure;
    rep = run_virtual_experiment(rc.regime(mv_spec), rc.regime(hv_spec), grid, rc.analysis.confidence, opts);
  } else {
    throw ConfigError(config_path + ": bound needs a [replay] section or [medium_vacuum] and [high_vacuum]");
  }
  const auto dir = prepare_dir(c.out_dir, rc.output_dir);
  const auto j = to_json(rep);
  {
    auto f = open_out(dir / "bound_report.json");
    f << j.dump(2) << '\n';
  }
  if (rep.curve) {
    auto f = open_out(dir / "exclusion.csv");
    write_exclusion_csv(f, *rep.curve, rep.inputs_digest);
  }
  if (c.json) out << j.dump(2) << '\n';
  else {
    write_bound_text(out, rep);
    out << "  outputs in " << dir.string() << '\n';
  }
  return 0;
}

struct ExcludeArgs {
  std::string grid = "1e-8:1e-4:25";
  std::optional<double> excess_psd, sqrt_excess_psd, sigma_delta_t, gamma_hz;
  double radius = 1e-6;
  std::optional<double> density, mass;
  double confidence = 0.95;
  bool reference = false;
};

int cmd_exclude(const ExcludeArgs& a, const Common& c, std::ostream& out) {
  const int given = int(a.excess_psd.has_value()) + int(a.sqrt_excess_psd.has_value()) + int(a.sigma_delta_t.has_value());
  if (given != 1) throw ConfigError("exclude needs exactly one of --excess-psd, --sqrt-excess-psd, --sigma-delta-t");
  if (a.density && a.mass) throw ConfigError("give --density or --mass, not both");
  const SphereParams sphere = a.mass ? SphereParams::from_mass(a.radius, *a.mass)
                                     : SphereParams(a.radius, a.density.value_or(1100.0));
  double psd = 0.0;
  if (a.excess_psd) psd = *a.excess_psd;
  if (a.sqrt_excess_psd) psd = *a.sqrt_excess_psd * *a.sqrt_excess_psd;
  if (a.sigma_delta_t) {
    if (!a.gamma_hz) throw ConfigError("--sigma-delta-t requires --gamma-over-2pi-hz");
    psd = excess_force_psd(*a.sigma_delta_t, sphere.mass(), hz_to_angular(*a.gamma_hz)).psd;
  }
  const auto grid = parse_grid(a.grid);
  two_sided_z(a.confidence);
  const auto curve = exclusion_curve(psd, sphere, grid, a.confidence);
  const nlohmann::ordered_json in{{"psd", psd}, {"radius", sphere.radius()}, {"density", sphere.density()},
                                  {"grid", grid}, {"confidence", a.confidence}};
  const std::string digest = fnv1a_hex(in.dump());
  std::vector<ExclusionCurve> refs;
  if (a.reference) refs = load_reference_curves(default_reference_dir() / "theory_points.csv", a.confidence);

  auto emit = [&](std::ostream& o) {
    if (c.json) {
      nlohmann::ordered_json j;
      j["tool"] = "cslsim";
      j["version"] = CSLSIM_VERSION;
      j["inputs_digest"] = digest;
      j["excess_psd_n2_per_hz"] = psd;
      j["confidence"] = a.confidence;
      j["points"] = nlohmann::ordered_json::array();
      for (const auto& p : curve.points) j["points"].push_back({{"r_c_m", p.r_c}, {"lambda_upper_per_s", p.lambda_upper}});
      o << j.dump(2) << '\n';
      return;
    }
    write_exclusion_csv(o, curve, digest);
  };
  if (c.out_dir.empty()) {
    emit(out);
  } else {
    const auto dir = prepare_dir(c.out_dir, c.out_dir);
    auto f = open_out(dir / (c.json ? "exclusion.json" : "exclusion.csv"));
    emit(f);
    if (!refs.empty()) {
      auto r = open_out(dir / "reference_curves.csv");
      r << provenance_line(digest) << '\n';
      r << "# theory reference points (not bounds computed here)\n";
      r << "r_c_m,lambda_upper_per_s,source\n";
      for (const auto& rc : refs)
        for (const auto& p : rc.points) r << p.r_c << ',' << p.lambda_upper << ',' << rc.source << '\n';
    }
    out << "wrote " << (dir / (c.json ? "exclusion.json" : "exclusion.csv")).string() << '\n';
  }
  return 0;
}

int cmd_reproduce(const std::string& table, bool full, const Common& c, unsigned threads, std::ostream& out) {
  ReproduceOptions opts;
  opts.full = full;
  opts.threads = threads;
  if (c.seed) opts.seed = *c.seed;
  const auto rep = reproduce_paper_tables(table, opts);
  const auto j = to_json(rep);
  if (!c.out_dir.empty()) {
    const auto dir = prepare_dir(c.out_dir, c.out_dir);
    auto f = open_out(dir / ("table_" + rep.table + ".json"));
    f << j.dump(2) << '\n';
  }
  if (c.json) out << j.dump(2) << '\n';
  else write_table_text(out, rep);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cslsim: levitated-oscillator CSL test simulator and bound calculator", "cslsim"};
  app.set_version_flag("--version", std::string("cslsim ") + CSLSIM_VERSION);
  app.require_subcommand(1);
  Common common;
  unsigned threads = 0;
  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_flag("--json", common.json, "machine-readable JSON on standard output");
    if (with_seed) sub->add_option("--seed", common.seed, "override the configured seed");
    sub->add_option("--threads", threads, "worker threads (0 = hardware)");
  };

  std::string sim_config;
  auto* sim = app.add_subcommand("simulate", "integrate a configured run and write the trajectory");
  sim->add_option("config", sim_config, "run configuration file")->required();
  add_common(sim, true);

  AnalyzeArgs an_args;
  auto* an = app.add_subcommand("analyze", "temperature, damping and PSD of a stored trajectory");
  an->add_option("trajectory", an_args.trajectory, "trajectory CSV")->required();
  an->add_option("--config", an_args.config, "run configuration (when the sidecar is missing)");
  an->add_option("--mode", an_args.mode, "mode to analyse (1-based)");
  an->add_option("--bandwidth", an_args.bandwidth, "lock-in bandwidth, Hz");
  an->add_option("--segment", an_args.segment, "Welch segment length, samples");
  add_common(an, false);

  std::string bound_config;
  auto* bd = app.add_subcommand("bound", "bound report from replay inputs or a virtual experiment");
  bd->add_option("config", bound_config, "run configuration file")->required();
  add_common(bd, true);

  ExcludeArgs ex_args;
  auto* ex = app.add_subcommand("exclude", "exclusion curve from an excess force budget");
  ex->add_option("--grid", ex_args.grid, "r_C grid: lo:hi:n (log spaced) or a comma list, m");
  ex->add_option("--excess-psd", ex_args.excess_psd, "excess force PSD, N^2/Hz");
  ex->add_option("--sqrt-excess-psd", ex_args.sqrt_excess_psd, "excess force noise, N/sqrt(Hz)");
  ex->add_option("--sigma-delta-t", ex_args.sigma_delta_t, "excess temperature bound, K");
  ex->add_option("--gamma-over-2pi-hz", ex_args.gamma_hz, "damping rate, Hz");
  ex->add_option("--radius-m", ex_args.radius, "sphere radius, m");
  ex->add_option("--density", ex_args.density, "density, kg/m^3");
  ex->add_option("--mass", ex_args.mass, "mass, kg");
  ex->add_option("--confidence", ex_args.confidence, "confidence level");
  ex->add_flag("--reference", ex_args.reference, "also write the shipped theory reference points");
  add_common(ex, false);

  std::string table;
  bool full = false;
  auto* rp = app.add_subcommand("reproduce", "recompute a published table");
  rp->add_option("--table", table, "1, 2, 3 or projection")->required()->check(CLI::IsMember({"1", "2", "3", "projection"}));
  rp->add_flag("--full", full, "run the full-fidelity simulations");
  add_common(rp, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "cslsim " << CSLSIM_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_config, common, out);
    if (an->parsed()) return cmd_analyze(an_args, common, out, err);
    if (bd->parsed()) return cmd_bound(bound_config, common, threads, out);
    if (ex->parsed()) return cmd_exclude(ex_args, common, out);
    if (rp->parsed()) return cmd_reproduce(table, full, common, threads, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cslsim

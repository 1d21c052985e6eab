#include "cslsim/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cslsim/analysis.hpp"
#include "cslsim/errors.hpp"

namespace cslsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

std::optional<double> parse_number(const std::string& s) {
  std::string t;
  for (char c : s)
    if (c != '_') t += c;  // TOML digit separators
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* b = t.data();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigValue parse_value(const std::string& raw, const std::string& source, int line) {
  ConfigValue v;
  v.line = line;
  v.text = raw;
  if (raw.empty()) fail(source, line, "missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') fail(source, line, "unterminated string");
    v.value = raw.substr(1, raw.size() - 2);
  } else if (raw == "true" || raw == "false") {
    v.value = raw == "true";
  } else if (raw.front() == '[') {
    if (raw.back() != ']') fail(source, line, "unterminated array");
    std::vector<double> items;
    std::stringstream ss(raw.substr(1, raw.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;  // trailing comma
      auto n = parse_number(item);
      if (!n) fail(source, line, "array element '" + item + "' is not a number");
      items.push_back(*n);
    }
    v.value = items;
  } else {
    auto n = parse_number(raw);
    if (!n) fail(source, line, "cannot parse value '" + raw + "'");
    v.value = *n;
  }
  return v;
}

}  // namespace

ConfigDocument parse_config(const std::string& text, const std::string& source) {
  ConfigDocument doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string l = trim(strip_comment(raw));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') fail(source, line, "malformed section header");
      section = trim(l.substr(1, l.size() - 2));
      if (section.empty()) fail(source, line, "empty section name");
      if (doc.sections.count(section)) fail(source, line, "duplicate section [" + section + "]");
      doc.sections[section];
      doc.section_lines[section] = line;
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) fail(source, line, "expected key = value");
    if (section.empty()) fail(source, line, "key outside of any section");
    const std::string key = trim(l.substr(0, eq));
    if (key.empty()) fail(source, line, "empty key");
    auto& sec = doc.sections[section];
    if (sec.count(key)) fail(source, line, "duplicate key '" + key + "' in [" + section + "]");
    sec[key] = parse_value(trim(l.substr(eq + 1)), source, line);
  }
  return doc;
}

namespace {

// Typed, schema-checked access to one section.
class Reader {
 public:
  Reader(const ConfigDocument& doc, const std::string& name, std::set<std::string> allowed)
      : doc_(doc), name_(name) {
    const auto it = doc.sections.find(name);
    if (it == doc.sections.end()) return;
    sec_ = &it->second;
    for (const auto& [k, v] : *sec_) {
      if (!allowed.count(k)) fail(doc.source, v.line, "unknown key '" + k + "' in [" + name + "]");
    }
  }

  bool present() const { return sec_ != nullptr; }
  bool has(const std::string& k) const { return sec_ && sec_->count(k); }

  std::optional<double> number(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const auto& v = sec_->at(k);
    if (const auto* d = std::get_if<double>(&v.value)) return *d;
    fail(doc_.source, v.line, "'" + k + "' must be a number");
  }
  double number(const std::string& k, double fallback) const { return number(k).value_or(fallback); }
  double required(const std::string& k) const {
    if (auto v = number(k)) return *v;
    fail(doc_.source, line(), "missing required key '" + k + "' in [" + name_ + "]");
  }
  std::optional<std::uint64_t> unsigned_integer(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const auto& v = sec_->at(k);
    std::uint64_t out = 0;
    std::string t;
    for (char c : v.text)
      if (c != '_') t += c;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size())
      fail(doc_.source, v.line, "'" + k + "' must be a non-negative integer");
    return out;
  }
  std::optional<std::string> string(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const auto& v = sec_->at(k);
    if (const auto* s = std::get_if<std::string>(&v.value)) return *s;
    fail(doc_.source, v.line, "'" + k + "' must be a string");
  }
  std::optional<bool> boolean(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const auto& v = sec_->at(k);
    if (const auto* b = std::get_if<bool>(&v.value)) return *b;
    fail(doc_.source, v.line, "'" + k + "' must be true or false");
  }
  std::optional<std::vector<double>> array(const std::string& k) const {
    if (!has(k)) return std::nullopt;
    const auto& v = sec_->at(k);
    if (const auto* a = std::get_if<std::vector<double>>(&v.value)) return *a;
    fail(doc_.source, v.line, "'" + k + "' must be an array of numbers");
  }
  int line(const std::string& k = {}) const {
    if (!k.empty() && has(k)) return sec_->at(k).line;
    const auto it = doc_.section_lines.find(name_);
    return it == doc_.section_lines.end() ? 0 : it->second;
  }
  // Runs `f`, re-throwing domain errors with this key's location.
  template <class F>
  auto checked(const std::string& k, F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      fail(doc_.source, line(k), "[" + name_ + "] " + e.what());
    }
  }

 private:
  const ConfigDocument& doc_;
  std::string name_;
  const ConfigSection* sec_ = nullptr;
};

std::optional<double> damping_keys(const Reader& r, const std::string& source) {
  const auto g = r.number("gamma_per_s");
  const auto h = r.number("gamma_over_2pi_hz");
  if (g && h) fail(source, r.line("gamma_over_2pi_hz"), "give either gamma_per_s or gamma_over_2pi_hz, not both");
  if (h) return hz_to_angular(*h);
  return g;
}

RegimeSpec read_regime(const ConfigDocument& doc, const std::string& name) {
  Reader r(doc, name, {"gamma_per_s", "gamma_over_2pi_hz", "pressure_pa", "duration_s", "seed"});
  RegimeSpec s;
  s.gamma = damping_keys(r, doc.source);
  s.pressure = r.number("pressure_pa");
  s.duration = r.number("duration_s");
  s.seed = r.unsigned_integer("seed");
  if (!s.gamma && !s.pressure) fail(doc.source, r.line(), "[" + name + "] needs gamma_per_s, gamma_over_2pi_hz or pressure_pa");
  return s;
}

}  // namespace

double RunConfig::resolved_gamma() const {
  if (gamma) return *gamma;
  if (environment.pressure > 0.0)
    return damping_from_pressure(environment.pressure, mean_gas_speed(environment.temperature, environment.gas_molar_mass),
                                 sphere.radius(), sphere.density());
  throw ConfigError("no damping: set [simulation] gamma_per_s / gamma_over_2pi_hz or [environment] pressure_pa");
}

NoiseConfig RunConfig::noise_at(double g) const {
  NoiseConfig n;
  if (thermal) n.thermal_psd = thermal_force_psd(g, sphere.mass(), environment.temperature);
  n.csl_psd = csl ? csl_force_psd(diffusion_constant_sphere(*csl, sphere)) : csl_psd;
  n.extra_additive_psd = extra_psd;
  n.parametric_strength = parametric_strength;
  return n;
}

namespace {

// Base run at damping `gamma`, not yet validated (regimes fill in the rest).
SimulationConfig assemble(const RunConfig& rc, double gamma) {
  SimulationConfig c;
  c.sphere = rc.sphere;
  c.modes = rc.modes;
  c.coupling_beta = rc.coupling_beta;
  c.gamma = gamma;
  c.noise.assign(rc.modes.size(), rc.noise_at(gamma));
  c.duration = rc.duration;
  c.dt = rc.dt;
  c.seed = rc.seed;
  c.initial_state = rc.initial_state;
  c.record_stride = rc.record_stride;
  c.burn_in_factor = rc.burn_in_factor;
  return c;
}

}  // namespace

SimulationConfig RunConfig::simulation() const {
  SimulationConfig c = assemble(*this, resolved_gamma());
  c.validate();
  return c;
}

SimulationConfig RunConfig::regime(const RegimeSpec& spec) const {
  const double g = spec.gamma ? *spec.gamma
                              : damping_from_pressure(*spec.pressure,
                                                      mean_gas_speed(environment.temperature, environment.gas_molar_mass),
                                                      sphere.radius(), sphere.density());
  SimulationConfig c = assemble(*this, g);
  if (spec.duration) c.duration = *spec.duration;
  if (spec.seed) c.seed = *spec.seed;
  c.validate();
  return c;
}

RunConfig run_config_from(const ConfigDocument& doc) {
  static const std::set<std::string> known{"sphere", "environment", "mode1", "mode2", "coupling", "noise",
                                           "simulation", "analysis", "medium_vacuum", "high_vacuum", "replay",
                                           "output"};
  for (const auto& [name, sec] : doc.sections) {
    if (!known.count(name)) fail(doc.source, doc.section_lines.at(name), "unknown section [" + name + "]");
  }
  RunConfig rc;

  Reader sphere(doc, "sphere", {"radius_m", "density_kg_m3", "mass_kg", "susceptibility"});
  if (!sphere.present()) fail(doc.source, 0, "missing section [sphere]");
  {
    const double radius = sphere.required("radius_m");
    const double chi = sphere.number("susceptibility", 0.0);
    const auto rho = sphere.number("density_kg_m3");
    const auto mass = sphere.number("mass_kg");
    if (rho && mass) fail(doc.source, sphere.line("mass_kg"), "give density_kg_m3 or mass_kg, not both");
    rc.sphere = sphere.checked("radius_m", [&] {
      return mass ? SphereParams::from_mass(radius, *mass, chi) : SphereParams(radius, rho.value_or(1100.0), chi);
    });
  }

  Reader env(doc, "environment", {"temperature_k", "pressure_pa", "pressure_mbar", "gas", "gas_molar_mass_kg_mol"});
  rc.environment.temperature = env.number("temperature_k", 298.0);
  if (env.has("pressure_pa") && env.has("pressure_mbar"))
    fail(doc.source, env.line("pressure_mbar"), "give pressure_pa or pressure_mbar, not both");
  rc.environment.pressure = env.has("pressure_mbar") ? *env.number("pressure_mbar") * constants::pa_per_mbar
                                                     : env.number("pressure_pa", 0.0);
  if (auto gas = env.string("gas")) {
    if (*gas == "air") rc.environment.gas_molar_mass = constants::molar_mass_air;
    else if (*gas == "helium") rc.environment.gas_molar_mass = constants::molar_mass_helium;
    else fail(doc.source, env.line("gas"), "unknown gas '" + *gas + "' (air or helium)");
  }
  if (auto m = env.number("gas_molar_mass_kg_mol")) rc.environment.gas_molar_mass = *m;
  env.checked("temperature_k", [&] { rc.environment.validate(); return 0; });

  for (const char* name : {"mode1", "mode2"}) {
    Reader m(doc, name, {"frequency_hz", "duffing_alpha_kg_m2_s2", "label"});
    if (!m.present()) continue;
    OscillatorMode mode{m.required("frequency_hz"), m.number("duffing_alpha_kg_m2_s2", 0.0),
                        m.string("label").value_or(name)};
    m.checked("frequency_hz", [&] { mode.validate(); return 0; });
    rc.modes.push_back(mode);
  }
  if (rc.modes.empty()) fail(doc.source, 0, "missing section [mode1]");
  if (!doc.sections.count("mode1")) fail(doc.source, doc.section_lines.at("mode2"), "[mode2] requires [mode1]");

  Reader coupling(doc, "coupling", {"beta_kg_m2_s2"});
  rc.coupling_beta = coupling.number("beta_kg_m2_s2", 0.0);

  Reader noise(doc, "noise", {"thermal", "csl_psd_n2_per_hz", "csl_lambda_per_s", "csl_r_c_m",
                              "extra_psd_n2_per_hz", "parametric_strength_sqrt_s"});
  rc.thermal = noise.boolean("thermal").value_or(true);
  rc.csl_psd = noise.number("csl_psd_n2_per_hz", 0.0);
  if (noise.has("csl_lambda_per_s")) {
    if (noise.has("csl_psd_n2_per_hz"))
      fail(doc.source, noise.line("csl_lambda_per_s"), "give csl_psd_n2_per_hz or csl_lambda_per_s, not both");
    CslParams p{*noise.number("csl_lambda_per_s"), noise.number("csl_r_c_m", 1e-7)};
    noise.checked("csl_lambda_per_s", [&] { p.validate(); return 0; });
    rc.csl = p;
  } else if (noise.has("csl_r_c_m")) {
    fail(doc.source, noise.line("csl_r_c_m"), "csl_r_c_m requires csl_lambda_per_s");
  }
  rc.extra_psd = noise.number("extra_psd_n2_per_hz", 0.0);
  rc.parametric_strength = noise.number("parametric_strength_sqrt_s", 0.0);

  Reader sim(doc, "simulation", {"duration_s", "dt_s", "seed", "record_stride", "burn_in_factor", "gamma_per_s",
                                 "gamma_over_2pi_hz", "initial_x_m", "initial_p_kg_m_s"});
  rc.gamma = damping_keys(sim, doc.source);
  rc.duration = sim.number("duration_s", 0.0);
  rc.dt = sim.number("dt_s", 0.0);
  rc.seed = sim.unsigned_integer("seed").value_or(0);
  if (auto s = sim.unsigned_integer("record_stride")) rc.record_stride = static_cast<int>(*s);
  rc.burn_in_factor = sim.number("burn_in_factor", 5.0);
  {
    const auto x = sim.array("initial_x_m");
    const auto p = sim.array("initial_p_kg_m_s");
    if (x || p) {
      const std::vector<double> xs = x.value_or(std::vector<double>(rc.modes.size(), 0.0));
      const std::vector<double> ps = p.value_or(std::vector<double>(rc.modes.size(), 0.0));
      if (xs.size() != rc.modes.size() || ps.size() != rc.modes.size())
        fail(doc.source, sim.line(x ? "initial_x_m" : "initial_p_kg_m_s"), "initial state needs one entry per mode");
      std::vector<InitialState> init;
      for (std::size_t i = 0; i < xs.size(); ++i) init.push_back({xs[i], ps[i]});
      rc.initial_state = init;
    }
  }

  Reader an(doc, "analysis", {"confidence", "r_c_grid_m", "r_c_min_m", "r_c_max_m", "r_c_points", "bandwidth_hz",
                              "segment_length", "overlap", "window", "mode"});
  rc.analysis.confidence = an.number("confidence", 0.95);
  an.checked("confidence", [&] { return two_sided_z(rc.analysis.confidence); });
  if (auto grid = an.array("r_c_grid_m")) {
    rc.analysis.r_c_grid = *grid;
  } else {
    const int points = static_cast<int>(an.unsigned_integer("r_c_points").value_or(25));
    rc.analysis.r_c_grid =
        an.checked("r_c_points", [&] { return log_grid(an.number("r_c_min_m", 1e-8), an.number("r_c_max_m", 1e-4), points); });
  }
  an.checked("r_c_grid_m", [&] {
    ExclusionCurve probe;
    for (double r : rc.analysis.r_c_grid) probe.points.push_back({r, 1.0});
    probe.validate();
    return 0;
  });
  rc.analysis.bandwidth = an.number("bandwidth_hz", 0.0);
  rc.analysis.segment_length = static_cast<std::size_t>(an.unsigned_integer("segment_length").value_or(0));
  rc.analysis.overlap = an.number("overlap", 0.5);
  rc.analysis.window = an.string("window").value_or("hann");
  const auto mode = an.unsigned_integer("mode").value_or(1);
  if (mode < 1 || mode > rc.modes.size()) fail(doc.source, an.line("mode"), "analysis mode must name an existing mode");
  rc.analysis.mode = mode - 1;

  if (doc.sections.count("medium_vacuum")) rc.medium_vacuum = read_regime(doc, "medium_vacuum");
  if (doc.sections.count("high_vacuum")) rc.high_vacuum = read_regime(doc, "high_vacuum");
  if (rc.medium_vacuum.has_value() != rc.high_vacuum.has_value())
    fail(doc.source, 0, "[medium_vacuum] and [high_vacuum] must be given together");

  Reader rp(doc, "replay", {"t_hv_k", "sigma_hv_k", "t_mv_k", "sigma_mv_k", "delta_t_k", "sigma_delta_t_k"});
  if (rp.present()) {
    ReplaySpec s;
    s.t_hv = rp.number("t_hv_k");
    s.sigma_hv = rp.number("sigma_hv_k");
    s.t_mv = rp.number("t_mv_k");
    s.sigma_mv = rp.number("sigma_mv_k");
    s.delta_t = rp.number("delta_t_k");
    s.sigma_delta_t = rp.number("sigma_delta_t_k");
    const bool temps = s.t_hv && s.sigma_hv && s.t_mv && s.sigma_mv;
    const bool direct = s.delta_t && s.sigma_delta_t;
    if (temps == direct)
      fail(doc.source, rp.line(),
           "[replay] needs either t_hv_k, sigma_hv_k, t_mv_k, sigma_mv_k or delta_t_k, sigma_delta_t_k");
    rc.replay = s;
  }

  Reader out(doc, "output", {"dir"});
  if (auto d = out.string("dir")) rc.output_dir = *d;
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return run_config_from(parse_config(ss.str(), file.string()));
}

}  // namespace cslsim

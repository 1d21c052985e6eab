#include "cslsim/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "cslsim/constants.hpp"
#include "cslsim/demod.hpp"
#include "cslsim/reference_curves.hpp"
#include "cslsim/stationary.hpp"
#include "cslsim/trajectory_io.hpp"

namespace cslsim {

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

nlohmann::ordered_json decision_constants() {
  nlohmann::ordered_json j;
  j["psd_convention"] = "two-sided white, <f(t) f(s)> = S delta(t - s); displays are one-sided";
  j["excess_bound_convention"] = kExcessBoundConvention;
  j["mean_speed_convention"] = kMeanSpeedConvention;
  j["geometry_series_threshold"] = kGeometrySeriesThreshold;
  j["effective_sample_size"] = "N_eff = N dt gamma";
  j["decay_model"] = "R(t) = c + (1 - c) exp(-t/tau), window to c + 0.05 (1 - c)";
  j["lockin_bandwidth"] = "center_frequency / 6, Hann-kernel FIR with -3 dB at bandwidth/2";
  j["decay_fit_start"] = "lock-in kernel length";
  j["burn_in"] = "5 / gamma";
  j["default_steps_per_period"] = kDefaultStepsPerPeriod;
  j["integrator"] = "BAOAB splitting with exact Ornstein-Uhlenbeck friction step";
  j["nonlinear_coefficient_scale"] = kTableTwoNonlinearScale;
  j["stationary_density_form"] = "energy-consistent";
  return j;
}

nlohmann::ordered_json to_json(const TemperatureEstimate& t) {
  nlohmann::ordered_json j;
  j["mode"] = t.mode_label;
  j["t_eff_k"] = t.t_eff;
  j["sigma_1s_k"] = t.sigma_1s ? nlohmann::ordered_json(*t.sigma_1s) : nlohmann::ordered_json(nullptr);
  j["t_mea_s"] = t.t_mea;
  return j;
}

nlohmann::ordered_json to_json(const DampingEstimate& d) {
  return {{"gamma_per_s", d.gamma},
          {"gamma_over_2pi_hz", angular_to_hz(d.gamma)},
          {"tau_s", d.tau},
          {"asymptote", d.asymptote},
          {"fit_start_s", d.fit_start},
          {"fit_window_s", d.fit_window},
          {"fit_residual", d.fit_residual}};
}

nlohmann::ordered_json to_json(const BoundReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = "cslsim";
  j["version"] = CSLSIM_VERSION;
  j["kind"] = r.kind;
  j["inputs_digest"] = r.inputs_digest;
  j["convention"] = r.convention;
  j["confidence"] = r.confidence;
  j["z"] = r.z;
  j["delta_t_k"] = r.delta_t;
  j["sigma_delta_t_k"] = r.sigma_delta_t;
  j["excess_psd_n2_per_hz"] = r.excess_psd;
  j["sqrt_excess_psd_n_per_sqrt_hz"] = std::sqrt(r.excess_psd);
  j["excess_psd_bound_n2_per_hz"] = r.excess_psd_bound;
  j["sqrt_excess_psd_bound_n_per_sqrt_hz"] = std::sqrt(r.excess_psd_bound);
  j["sphere"] = {{"radius_m", r.sphere.radius()}, {"density_kg_m3", r.sphere.density()}, {"mass_kg", r.sphere.mass()}};
  j["gamma_per_s"] = r.gamma;
  j["gamma_over_2pi_hz"] = angular_to_hz(r.gamma);
  if (r.hv) j["high_vacuum"] = to_json(*r.hv);
  if (r.mv) j["medium_vacuum"] = to_json(*r.mv);
  if (!r.regimes.empty()) {
    auto& arr = j["regimes"] = nlohmann::ordered_json::array();
    for (const auto& m : r.regimes) {
      nlohmann::ordered_json e;
      e["name"] = m.name;
      e["seed"] = m.seed;
      e["config_digest"] = m.config_digest;
      e["duration_s"] = m.duration;
      e["gamma_input_per_s"] = m.gamma_input;
      e["damping"] = m.damping ? to_json(*m.damping) : nlohmann::ordered_json(nullptr);
      e["temperatures"] = nlohmann::ordered_json::array();
      for (const auto& t : m.temperatures) e["temperatures"].push_back(to_json(t));
      arr.push_back(e);
    }
  }
  if (r.radius_from_equipartition) j["radius_from_equipartition_m"] = *r.radius_from_equipartition;
  if (r.radius_from_damping) j["radius_from_damping_m"] = *r.radius_from_damping;
  if (r.curve) {
    auto& c = j["curve"];
    c["source"] = r.curve->source;
    c["confidence"] = r.curve->confidence_level;
    c["points"] = nlohmann::ordered_json::array();
    for (const auto& p : r.curve->points) {
      c["points"].push_back(
          {{"r_c_m", p.r_c}, {"lambda_upper_per_s", p.lambda_upper}, {"log10_lambda", std::log10(p.lambda_upper)}});
    }
  } else {
    j["curve"] = nullptr;
  }
  j["flags"] = r.flags;
  j["constants"] = decision_constants();
  return j;
}

nlohmann::ordered_json to_json(const TableReport& t) {
  nlohmann::ordered_json j;
  j["tool"] = "cslsim";
  j["version"] = CSLSIM_VERSION;
  j["table"] = t.table;
  j["title"] = t.title;
  j["cells"] = nlohmann::ordered_json::array();
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  for (const auto& c : t.cells) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["unit"] = c.unit;
    e["paper"] = opt(c.paper);
    e["computed"] = c.computed;
    e["deviation"] = opt(c.deviation());
    e["reference"] = opt(c.reference);
    e["tolerance"] = opt(c.tolerance);
    e["tolerance_kind"] = c.relative_tolerance ? "relative" : "absolute";
    const auto p = c.pass();
    e["pass"] = p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json(nullptr);
    e["note"] = c.note;
    j["cells"].push_back(e);
  }
  j["notes"] = t.notes;
  j["all_pass"] = t.all_pass();
  j["constants"] = decision_constants();
  return j;
}

void write_table_text(std::ostream& out, const TableReport& t) {
  out << "Table " << t.table << ": " << t.title << '\n';
  char line[256];
  std::snprintf(line, sizeof line, "  %-30s %-12s %13s %13s %10s  %s\n", "cell", "unit", "paper", "computed",
                "deviation", "verdict");
  out << line;
  for (const auto& c : t.cells) {
    const auto dev = c.deviation();
    const auto p = c.pass();
    std::snprintf(line, sizeof line, "  %-30s %-12s %13s %13s %10s  %s\n", c.name.c_str(), c.unit.c_str(),
                  c.paper ? fmt(*c.paper).c_str() : "-", fmt(c.computed).c_str(),
                  dev ? (fmt(100.0 * *dev, "%+.2f") + "%").c_str() : "-", p ? (*p ? "ok" : "FAIL") : "info");
    out << line;
    if (!c.note.empty()) out << "      " << c.note << '\n';
  }
  for (const auto& n : t.notes) out << "  note: " << n << '\n';
}

void write_bound_text(std::ostream& out, const BoundReport& r) {
  out << "bound report (" << r.kind << "), digest " << r.inputs_digest << '\n';
  if (r.hv) out << "  T_eff high vacuum   " << fmt(r.hv->t_eff) << " K +- " << fmt(r.hv->sigma_1s.value_or(0)) << '\n';
  if (r.mv) out << "  T_eff medium vacuum " << fmt(r.mv->t_eff) << " K +- " << fmt(r.mv->sigma_1s.value_or(0)) << '\n';
  out << "  delta_t        " << fmt(r.delta_t) << " K\n";
  out << "  sigma_delta_t  " << fmt(r.sigma_delta_t) << " K  (" << fmt(100.0 * r.confidence, "%.3g") << "%)\n";
  out << "  sqrt(dS)       " << fmt(std::sqrt(r.excess_psd)) << " N/sqrt(Hz)\n";
  out << "  sqrt(dS) bound " << fmt(std::sqrt(r.excess_psd_bound)) << " N/sqrt(Hz)\n";
  if (r.curve) {
    for (const auto& p : r.curve->points)
      out << "  lambda(r_C = " << fmt(p.r_c) << " m) <= " << fmt(p.lambda_upper) << " 1/s  (10^"
          << fmt(std::log10(p.lambda_upper), "%.2f") << ")\n";
  }
  for (const auto& f : r.flags) out << "  flag: " << f << '\n';
}

void write_psd_csv(std::ostream& out, const PsdEstimate& psd, const std::string& digest) {
  out << provenance_line(digest) << '\n';
  out << "# window=" << psd.window << " segment_length=" << psd.segment_length << " overlap=" << psd.overlap
      << " one-sided\n";
  out << "f_hz,psd_m2_per_hz\n";
  for (std::size_t k = 0; k < psd.frequencies.size(); ++k)
    out << fmt(psd.frequencies[k], "%.17g") << ',' << fmt(psd.values[k], "%.17g") << '\n';
}

void write_autocorrelation_csv(std::ostream& out, const Autocorrelation& r, const std::string& digest) {
  out << provenance_line(digest) << '\n';
  out << "lag_s,r\n";
  for (std::size_t k = 0; k < r.r.size(); ++k) out << fmt(r.lag(k), "%.17g") << ',' << fmt(r.r[k], "%.17g") << '\n';
}

void write_exclusion_csv(std::ostream& out, const ExclusionCurve& curve, const std::string& digest) {
  write_curve_csv(out, curve,
                  {provenance_line(digest).substr(2), "confidence=" + fmt(curve.confidence_level)});
}

}  // namespace cslsim

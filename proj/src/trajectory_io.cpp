#include "cslsim/trajectory_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cslsim/errors.hpp"

namespace cslsim {

std::string provenance_line(const std::string& digest) {
  return std::string("# tool=cslsim ") + CSLSIM_VERSION + " digest=" + digest;
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && *begin == ' ') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr == begin) {
    throw ConfigError("trajectory line " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << provenance_line(traj.config_digest) << '\n';
  out << "# seed=" << traj.seed << " burn_in_s=";
  put_double(out, traj.burn_in);
  out << '\n' << "t_s";
  for (std::size_t i = 0; i < traj.mode_count(); ++i) out << ",x" << i + 1 << "_m";
  out << '\n';
  for (std::size_t j = 0; j < traj.length(); ++j) {
    put_double(out, static_cast<double>(j) * traj.dt);
    for (std::size_t i = 0; i < traj.mode_count(); ++i) {
      out << ',';
      put_double(out, traj.samples[i][j]);
    }
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        if (tok.rfind("digest=", 0) == 0) traj.config_digest = tok.substr(7);
        else if (tok.rfind("seed=", 0) == 0) traj.seed = std::stoull(tok.substr(5));
        else if (tok.rfind("burn_in_s=", 0) == 0) traj.burn_in = std::stod(tok.substr(10));
      }
      continue;
    }
    auto cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2 || cells.size() > 3 || cells[0] != "t_s") {
        throw ConfigError("trajectory line " + std::to_string(line_no) +
                          ": expected header t_s,x1_m[,x2_m]");
      }
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i] != "x" + std::to_string(i) + "_m")
          throw ConfigError("trajectory line " + std::to_string(line_no) + ": unexpected column '" + cells[i] + "'");
      }
      traj.samples.assign(cells.size() - 1, {});
      have_header = true;
      continue;
    }
    if (cells.size() != traj.samples.size() + 1) {
      throw ConfigError("trajectory line " + std::to_string(line_no) + ": expected " +
                        std::to_string(traj.samples.size() + 1) + " columns");
    }
    times.push_back(parse_double(cells[0], line_no));
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
      traj.samples[i].push_back(parse_double(cells[i + 1], line_no));
  }
  if (!have_header) throw ConfigError("trajectory: missing header");
  if (times.size() < 2) throw SizeError("trajectory: need at least two samples");
  traj.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(traj.dt > 0.0)) throw ConfigError("trajectory: time column is not increasing");
  return traj;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

void save_trajectory(const std::filesystem::path& csv, const Trajectory& traj,
                     const SimulationConfig& config) {
  {
    std::ofstream out(csv);
    if (!out) throw ConfigError("cannot write " + csv.string());
    write_trajectory_csv(out, traj);
  }
  nlohmann::ordered_json meta;
  meta["tool"] = "cslsim";
  meta["version"] = CSLSIM_VERSION;
  meta["config_digest"] = traj.config_digest;
  meta["seed"] = traj.seed;
  meta["sample_interval_s"] = traj.dt;
  meta["burn_in_s"] = traj.burn_in;
  meta["samples"] = traj.length();
  meta["config"] = config.to_json();
  std::ofstream side(sidecar_path(csv));
  if (!side) throw ConfigError("cannot write " + sidecar_path(csv).string());
  side << meta.dump(2) << '\n';
}

StoredTrajectory load_trajectory(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("cannot open " + csv.string());
  StoredTrajectory st{read_trajectory_csv(in), std::nullopt};
  const auto side = sidecar_path(csv);
  if (std::filesystem::exists(side)) {
    std::ifstream sin(side);
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(sin);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(side.string() + ": " + e.what());
    }
    if (meta.contains("config")) st.config = SimulationConfig::from_json(meta.at("config"));
    if (meta.contains("sample_interval_s")) st.trajectory.dt = meta.at("sample_interval_s").get<double>();
  }
  return st;
}

}  // namespace cslsim

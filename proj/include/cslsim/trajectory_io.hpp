#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "cslsim/dynamics.hpp"

namespace cslsim {

/// `# tool=cslsim <version> digest=<digest>`, the first line of every artifact.
std::string provenance_line(const std::string& digest);

/// CSV with header `t_s,x1_m[,x2_m]`, preceded by the provenance comment.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

struct StoredTrajectory {
  Trajectory trajectory;
  std::optional<SimulationConfig> config;  // present when the sidecar was found
};

/// Sidecar path for a trajectory file: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Writes the CSV and its JSON sidecar (config, seed, digest, burn-in, version).
void save_trajectory(const std::filesystem::path& csv, const Trajectory& traj,
                     const SimulationConfig& config);
StoredTrajectory load_trajectory(const std::filesystem::path& csv);

}  // namespace cslsim

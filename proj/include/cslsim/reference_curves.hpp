#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cslsim/csl.hpp"

namespace cslsim {

/// Reads a curve file with header `r_c_m,lambda_upper_per_s,source`. Lines
/// starting with '#' are comments. Rows are grouped by source, in order of
/// first appearance.
std::vector<ExclusionCurve> read_reference_curves(std::istream& in, double confidence = 0.95);
std::vector<ExclusionCurve> load_reference_curves(const std::filesystem::path& file,
                                                  double confidence = 0.95);

/// Directory holding the shipped reference data.
std::filesystem::path default_reference_dir();

/// Writes `curve` in the reference-curve CSV layout. `comments` are emitted
/// as leading '#' lines.
void write_curve_csv(std::ostream& out, const ExclusionCurve& curve,
                     const std::vector<std::string>& comments = {});

}  // namespace cslsim

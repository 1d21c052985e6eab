#include "cslsim/reference_curves.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cslsim/errors.hpp"

namespace cslsim {

namespace {
constexpr const char* kHeader = "r_c_m,lambda_upper_per_s,source";

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace

std::vector<ExclusionCurve> read_reference_curves(std::istream& in, double confidence) {
  std::vector<ExclusionCurve> curves;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kHeader)
        throw ConfigError("reference curves line " + std::to_string(line_no) + ": expected header '" +
                          kHeader + "'");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string r_c_s, lambda_s, source;
    if (!std::getline(row, r_c_s, ',') || !std::getline(row, lambda_s, ',') ||
        !std::getline(row, source)) {
      throw ConfigError("reference curves line " + std::to_string(line_no) + ": expected 3 fields");
    }
    ExclusionPoint p;
    try {
      p.r_c = std::stod(r_c_s);
      p.lambda_upper = std::stod(lambda_s);
    } catch (const std::exception&) {
      throw ConfigError("reference curves line " + std::to_string(line_no) + ": bad number");
    }
    source = trim(source);
    ExclusionCurve* target = nullptr;
    for (auto& c : curves) {
      if (c.source == source) target = &c;
    }
    if (target == nullptr) {
      curves.push_back({{}, confidence, source});
      target = &curves.back();
    }
    target->points.push_back(p);
  }
  if (!header_seen) throw ConfigError("reference curves: missing header");
  for (const auto& c : curves) c.validate();
  return curves;
}

std::vector<ExclusionCurve> load_reference_curves(const std::filesystem::path& file,
                                                  double confidence) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open reference curve file " + file.string());
  return read_reference_curves(in, confidence);
}

std::filesystem::path default_reference_dir() {
  return std::filesystem::path(CSLSIM_DATA_DIR) / "reference_curves";
}

void write_curve_csv(std::ostream& out, const ExclusionCurve& curve,
                     const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << kHeader << '\n';
  for (const auto& p : curve.points) {
    out << format_double(p.r_c) << ',' << format_double(p.lambda_upper) << ',' << curve.source
        << '\n';
  }
}

}  // namespace cslsim

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "cslsim/analysis.hpp"
#include "cslsim/pipeline.hpp"

namespace cslsim {

/// Design constants that every report repeats verbatim.
nlohmann::ordered_json decision_constants();

nlohmann::ordered_json to_json(const TemperatureEstimate& t);
nlohmann::ordered_json to_json(const DampingEstimate& d);
nlohmann::ordered_json to_json(const BoundReport& r);
nlohmann::ordered_json to_json(const TableReport& t);

/// Human-readable table: cell, paper, computed, deviation, verdict.
void write_table_text(std::ostream& out, const TableReport& t);
/// Summary lines of a bound report.
void write_bound_text(std::ostream& out, const BoundReport& r);

/// `f_hz,psd_m2_per_hz` with provenance comments.
void write_psd_csv(std::ostream& out, const PsdEstimate& psd, const std::string& digest);
/// `lag_s,r` with provenance comments.
void write_autocorrelation_csv(std::ostream& out, const Autocorrelation& r, const std::string& digest);
/// Exclusion curve in the reference-curve layout with provenance comments.
void write_exclusion_csv(std::ostream& out, const ExclusionCurve& curve, const std::string& digest);

}  // namespace cslsim

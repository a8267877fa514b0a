#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdkg/config.hpp"
#include "sdkg/estimates.hpp"

namespace sdkg {

using Json = nlohmann::ordered_json;

// Fixed column order of trajectory output.
inline const std::vector<std::string> trajectory_columns = {
    "time",           "charge",        "cutoff",         "xnorm2_psi_plus", "xnorm2_psi_minus",
    "xnorm2_phi_plus", "hs_psi_plus",  "hs_psi_minus",   "hr_phi_plus",     "tau_flag"};

// One row per stored time; tau_flag is 1 from tau_R on when the running norm reached R.
std::vector<std::vector<double>> trajectory_rows(const TrajectoryRecord& rec);

std::string format_number(double v);  // %.17g

Json config_json(const RunConfig& cfg);
// "# key = value" lines followed by the column header
void write_csv_header(std::ostream& out, const RunConfig& cfg, const std::vector<std::string>& columns);
void write_csv_row(std::ostream& out, const std::vector<double>& row);
void write_jsonl_header(std::ostream& out, const RunConfig& cfg);
void write_jsonl_row(std::ostream& out, const std::vector<std::string>& columns, const std::vector<double>& row);

Json to_json(const ProbeReport& r);
Json to_json(const DualityCheck& d);
Json to_json(const CutoffProbeReport& r);
Json to_json(const EnsembleStats& s);
Json to_json(const ItoSeries& s);
Json to_json(const PicardReport& p);

}  // namespace sdkg

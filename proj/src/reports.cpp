#include "sdkg/reports.hpp"

#include <cstdio>
#include <sstream>

namespace sdkg {

std::vector<std::vector<double>> trajectory_rows(const TrajectoryRecord& rec) {
    std::vector<std::vector<double>> rows;
    for (size_t n = 0; n < rec.times.size(); ++n) {
        const auto& u = rec.states[n];
        auto norm_at = [&](int c) {
            const auto& v = rec.running_norms[static_cast<size_t>(c)];
            return n < v.size() ? v[n] : 0.0;
        };
        const double t = rec.times[n];
        rows.push_back({t,
                        rec.charge[n],
                        n < rec.cutoff_value.size() ? rec.cutoff_value[n] : 1.0,
                        norm_at(0),
                        norm_at(1),
                        norm_at(2),
                        sobolev_norm(u.psi_plus, u.s_index),
                        sobolev_norm(u.psi_minus, u.s_index),
                        sobolev_norm(u.phi_plus, u.r_index),
                        rec.tau_reached && t >= rec.tau_R ? 1.0 : 0.0});
    }
    return rows;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json config_json(const RunConfig& cfg) {
    Json j = Json::object();
    std::istringstream in(serialize_config(cfg));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

void write_csv_header(std::ostream& out, const RunConfig& cfg, const std::vector<std::string>& columns) {
    std::istringstream in(serialize_config(cfg));
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
    for (size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << "\n";
}

void write_csv_row(std::ostream& out, const std::vector<double>& row) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << "\n";
}

void write_jsonl_header(std::ostream& out, const RunConfig& cfg) {
    Json j;
    j["config"] = config_json(cfg);
    out << j.dump() << "\n";
}

void write_jsonl_row(std::ostream& out, const std::vector<std::string>& columns, const std::vector<double>& row) {
    Json j = Json::object();
    for (size_t i = 0; i < columns.size(); ++i) j[columns[i]] = row[i];
    out << j.dump() << "\n";
}

Json to_json(const ProbeReport& r) {
    Json j;
    j["estimate_id"] = r.estimate_id;
    j["s"] = r.s;
    j["r"] = r.r;
    j["b"] = r.b;
    j["n_trials"] = r.n_trials;
    j["seed"] = r.seed;
    j["max_ratio"] = r.max_ratio;
    j["ratio_quantiles"] = r.ratio_quantiles;
    j["mesh_refinement_trend"] = r.mesh_refinement_trend;
    j["mesh_change"] = r.mesh_change();
    return j;
}

Json to_json(const DualityCheck& d) {
    Json j;
    j["direct"] = d.direct;
    j["dual"] = d.dual;
    j["max_relative_difference"] = d.max_relative_difference;
    return j;
}

Json to_json(const CutoffProbeReport& r) {
    Json j;
    j["b"] = r.b;
    j["T0"] = r.T0;
    j["n_paths"] = r.n_paths;
    j["R_values"] = r.R_values;
    j["bound_constant"] = {r.bound_constant_coarse, r.bound_constant_fine};
    j["lipschitz_constant"] = {r.lipschitz_constant_coarse, r.lipschitz_constant_fine};
    j["bound_change"] = r.bound_change();
    j["lipschitz_change"] = r.lipschitz_change();
    return j;
}

Json to_json(const EnsembleStats& s) {
    Json j;
    j["n_trajectories"] = s.n_trajectories;
    j["n_failed"] = s.n_failed;
    j["r"] = s.r;
    j["b"] = s.b;
    j["p_exponent"] = s.p_exponent;
    j["mu_exponent"] = s.mu_exponent;
    j["R_values"] = s.R_values;
    j["phi_stat"] = s.phi_stat;
    j["psi_plus_stat"] = s.psi_plus_stat;
    j["psi_minus_stat"] = s.psi_minus_stat;
    j["phi_trend_slope"] = s.phi_trend_slope;
    j["psi_plus_trend_slope"] = s.psi_plus_trend_slope;
    j["psi_minus_trend_slope"] = s.psi_minus_trend_slope;
    j["initial_charge_mean"] = s.initial_charge_mean;
    j["initial_charge_variance"] = s.initial_charge_variance;
    j["charge_drift_mean"] = s.charge_drift_mean;
    j["charge_drift_max"] = s.charge_drift_max;
    j["tau_histogram"] = s.tau_histogram;
    return j;
}

Json to_json(const ItoSeries& s) {
    Json j;
    j["dt"] = s.dt;
    j["discrepancy"] = s.discrepancy;
    j["slope"] = s.slope;
    return j;
}

Json to_json(const PicardReport& p) {
    Json j;
    j["subinterval"] = p.subinterval;
    j["start_time"] = p.start_time;
    j["iterations"] = p.iterations;
    j["residuals"] = p.residuals;
    return j;
}

}  // namespace sdkg

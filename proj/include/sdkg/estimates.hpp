#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sdkg/dynamics.hpp"

namespace sdkg {

double charge(const SplitState& state);

enum class BilinearEstimate { n_bound, m_plus_bound, m_minus_bound };

const char* estimate_name(BilinearEstimate id);
BilinearEstimate parse_estimate(const std::string& name);

// Random band-limited space-time paths on two meshes sharing one set of
// coefficients.
struct ProbeMesh {
    int n_modes = 64;
    int n_times = 128;  // cells on (0, T0)
};

struct ProbeOptions {
    double domain_length = 8.0 * 3.14159265358979323846;
    double T0 = 1.0;
    int band = 8;        // active modes |k| <= band
    int time_modes = 2;  // lambda_j = 2 pi j / T0, |j| <= time_modes
    ProbeMesh coarse{64, 128};
    ProbeMesh fine{128, 256};
    bool force = false;
};

struct ProbeReport {
    std::string estimate_id;
    double s = 0.0, r = 0.0, b = 0.0;
    int n_trials = 0;
    std::uint64_t seed = 0;
    double max_ratio = 0.0;                    // coarse mesh
    std::vector<double> ratio_quantiles;       // 0, 1/4, 1/2, 3/4, 1 on the coarse mesh
    std::vector<double> mesh_refinement_trend; // max ratio on coarse, fine mesh
    std::vector<double> ratios;                // coarse mesh, trial order

    double mesh_change() const;  // |fine - coarse| / coarse
};

// s > -1/4, |s| <= r <= s + 1, 0 < r < 1 + 2s, 1/4 < b < 1/2
void check_bilinear_range(double s, double r, double b);

// One random path: u(t, xi_k) = e^{-i t h(xi_k)} sum_j c_kj e^{i t lambda_j}
struct ProbeField {
    DispersionSymbol symbol;
    std::vector<std::vector<cplx>> coeffs;  // [signed k + band][j + time_modes]
};

ProbeField random_probe_field(DispersionSymbol h, const ProbeOptions& opt, std::mt19937_64& rng);
SpaceTimePath sample_probe_field(const ProbeField& f, const ProbeOptions& opt, const ProbeMesh& mesh);

// l.h.s. / r.h.s. of the selected estimate for one triple of paths; for
// n_bound the inputs are (psi, psi'), for the m bounds (phi, psi).  0 when
// the right-hand side vanishes.
double bilinear_ratio(BilinearEstimate id, const SpaceTimePath& a, const SpaceTimePath& c, double s, double r,
                      double b);

ProbeReport probe_bilinear(BilinearEstimate id, double s, double r, double b, int n_trials, std::uint64_t seed,
                           const ProbeOptions& opt = {});

struct DualityCheck {
    std::vector<double> direct, dual;
    double max_relative_difference = 0.0;
};

// (M+bound) ratio by direct evaluation and through the pairing with the
// maximizing element G of the piecewise constant X^{-s,b} space.
DualityCheck probe_duality(double s, double r, double b, int n_trials, std::uint64_t seed,
                           const ProbeOptions& opt = {});

struct CutoffProbeReport {
    double b = 0.3;
    double T0 = 1.0;
    int n_paths = 0;
    std::vector<double> R_values;
    // max over paths and components of ||Theta u_j||_X / sqrt(R)
    double bound_constant_coarse = 0.0, bound_constant_fine = 0.0;
    // max over paths of ||Theta^u u_j - Theta^v v_j||_X / sum_i ||u_i - v_i||_X
    double lipschitz_constant_coarse = 0.0, lipschitz_constant_fine = 0.0;

    double bound_change() const;
    double lipschitz_change() const;
};

CutoffProbeReport probe_cutoff(double b, int n_paths, std::uint64_t seed, const ProbeOptions& opt = {});

struct LadderEnsemble {
    double R = 0.0;
    std::vector<TrajectoryRecord> records;
    int n_failed = 0;
};

struct EnsembleStats {
    int n_trajectories = 0;
    int n_failed = 0;
    double r = 0.0, b = 0.0;
    double p_exponent = 0.0;   // max(4, (2b + 2r - 1) / (b + 2r - 1))
    double mu_exponent = 0.0;  // 1/2 - r = mu b
    std::vector<double> R_values;
    std::vector<double> phi_stat;        // mean ||phi_+||^2_{X^{r,b}(0,T)}
    std::vector<double> psi_plus_stat;   // mean ||psi_+||_{X^{0,b}(0,T)}
    std::vector<double> psi_minus_stat;
    double phi_trend_slope = 0.0;        // d log(stat) / d log R
    double psi_plus_trend_slope = 0.0;
    double psi_minus_trend_slope = 0.0;
    std::vector<double> initial_charge_mean, initial_charge_variance;
    std::vector<double> charge_drift_mean, charge_drift_max;
    std::vector<std::vector<int>> tau_histogram;  // per R, 10 bins over [0, T]; last bin also counts tau = T
};

EnsembleStats monitor_global_bounds(const std::vector<LadderEnsemble>& ladder, double r, double b);
void check_global_hypotheses(double s, double r, double b);

struct ItoSeries {
    std::vector<double> dt;
    std::vector<double> discrepancy;
    double slope = 0.0;  // least-squares slope of log discrepancy against log dt
};

// Weak discrepancy between the solver (Ito form) and a midpoint
// Stratonovich reference on the linear Dirac pair at cfg.horizon.
double ito_stratonovich_consistency(const SolverConfig& cfg, const SplitState& initial, int n_trajectories);
// Same over dt, dt/2, ..., dt/2^halvings with Brownian paths shared across dt.
ItoSeries ito_stratonovich_series(const SolverConfig& cfg, const SplitState& initial, int n_trajectories,
                                  int halvings);

// Least-squares slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sdkg

#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "sdkg/dynamics.hpp"

namespace sdkg {

struct KernelConfig {
    std::string type = "zero";  // zero, gaussian, sinc, file
    double width = 1.0;
    double cutoff = 1.0;
    double amplitude = 1.0;
    std::string file;
    double sigma = 1.0;
};

// Flat key = value run description.  Keys are the member names below, with
// kernel1_*, kernel2_* for the kernels.
struct RunConfig {
    std::string command = "simulate";  // simulate, ensemble, probe-bilinear, check-norms, check-ito, check-charge

    int n_modes = 256;
    double domain_length = 32.0 * std::numbers::pi;
    double dt = 1.0 / 256.0;
    double horizon = 1.0;
    double subinterval_length = 8.0 / 256.0;
    double truncation_R = 4.0;
    double picard_tol = 1e-12;
    int picard_max_iters = 60;
    int n_basis = 0;
    double dirac_mass = 0.0;
    double kg_mass = 1.0;
    double s = 0.0;
    double r = 1.0 / 3.0;
    double b = 0.3;
    double mu = 0.0;  // 0 disables the regularizer
    std::uint64_t seed = 0;
    bool nonlinear = true;
    bool kg_active = true;
    bool drop_ito_drift = false;
    KernelConfig kernel1, kernel2;

    std::string initial_data = "gaussian-wavepacket";  // gaussian-wavepacket, single-mode, file, zero
    double init_center = 0.0;
    double init_width = 4.0;
    double init_xi_shift = 0.0;
    double init_amplitude = 0.5;
    double init_phi_amplitude = 0.5;
    int init_mode = 1;
    std::string init_file;
    double init_band_limit = 0.0;

    std::string output_path = "sdkg_output.csv";
    std::string output_format = "csv";  // csv, jsonl

    int n_trajectories = 8;
    std::uint64_t base_seed = 0;
    std::vector<double> r_ladder{4.0, 16.0, 64.0};

    std::string probe_estimate = "Nbound";
    int probe_trials = 200;
    std::uint64_t probe_seed = 0;

    int ito_trajectories = 64;
    int ito_halvings = 2;

    int charge_levels = 3;  // dt, dt/2, ... for check-charge
};

// Parses and validates; every error names the offending key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// key = value lines in a fixed order; parse_config(serialize_config(c)) == c
std::string serialize_config(const RunConfig& cfg);
void validate(const RunConfig& cfg);
bool operator==(const RunConfig& a, const RunConfig& b);

SolverConfig solver_config(const RunConfig& cfg);
NoiseKernel build_kernel(const KernelConfig& k, const GridSpec& grid);
SplitState initial_state(const RunConfig& cfg);

}  // namespace sdkg

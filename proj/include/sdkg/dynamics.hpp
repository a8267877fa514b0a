#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdkg/bourgain.hpp"
#include "sdkg/dkg_model.hpp"
#include "sdkg/grid.hpp"
#include "sdkg/noise.hpp"

namespace sdkg {

struct SolverConfig {
    GridSpec grid;
    double dt = 1.0 / 256.0;
    double horizon = 1.0;
    double subinterval_length = 8.0 / 256.0;
    double truncation_R = 4.0;
    double picard_tol = 1e-12;
    int picard_max_iters = 60;
    NoiseKernel kernel1;
    NoiseKernel kernel2;
    int n_basis = 0;  // 0 selects the complete cell basis
    double dirac_mass = 0.0;
    double kg_mass = 1.0;
    double s = 0.0;
    double r = 1.0 / 3.0;
    double b = 0.3;
    std::optional<double> mu;
    std::uint64_t seed = 0;
    bool nonlinear = true;
    bool kg_active = true;       // false freezes phi_+ at zero
    bool track_norms = true;     // running norms are always tracked when nonlinear
    bool drop_ito_drift = false; // fault injection: omit -M_K psi

    SolverConfig();
    explicit SolverConfig(const GridSpec& g);

    void validate() const;
    int n_steps() const;
    int steps_per_subinterval() const;
    int n_subintervals() const;
    int basis_size() const;
    bool noise_active() const;
};

struct PicardReport {
    int subinterval = 0;
    double start_time = 0.0;
    int iterations = 0;
    std::vector<double> residuals;

    // residuals[k+1] / residuals[k]
    std::vector<double> ratios() const;
    // geometric mean of ratios(); 0 when fewer than two sweeps
    double contraction_factor() const;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<SplitState> states;
    std::vector<double> charge;
    std::vector<double> cutoff_value;
    std::array<std::vector<double>, 3> running_norms;  // squared modified norms on (0, t)
    double tau_R = 0.0;
    bool tau_reached = false;
    std::vector<PicardReport> picard_reports;
    std::uint64_t seed = 0;
};

struct SubintervalResult {
    std::vector<SplitState> nodes;  // K + 1 nodes, nodes[0] is the start state
    PicardReport report;
    std::vector<double> cutoff;
    std::array<std::vector<double>, 3> norms;
};

// P_d[phi psi] with phi = phi_+ + conj(phi_+)
SpectralField bilinear_dirac(const SpectralField& phi_plus, const SpectralField& psi);
// <D>^{-1} P_d[Re(conj(psi_+) psi_-)]
SpectralField bilinear_kg(const SpectralField& psi_plus, const SpectralField& psi_minus);
// modewise theta(xi / mu)
SpectralField regularize(const SpectralField& field, double mu);

// Marches the truncated mild system subinterval by subinterval.
class TruncatedSolver {
public:
    TruncatedSolver(const SolverConfig& cfg, const WienerIncrements& dW);

    // Appends nodes to the running norms (history replay).
    void push_history(const SplitState& state);
    size_t history_size() const { return norms_[0].size(); }
    // Picard iteration on subinterval j from `start`; the running norms must
    // hold exactly the nodes 0..j*K.  Converged nodes are appended.
    SubintervalResult solve_subinterval(int j, const SplitState& start);
    // One sweep of the mild map on subinterval j.
    std::vector<SplitState> sweep(int j, const std::vector<SplitState>& path,
                                  const std::vector<double>& theta) const;
    // Cutoff values of the glued path [history, path[1..]] at each node of
    // the subinterval; restores the history afterwards.
    std::vector<double> cutoff_along(const std::vector<SplitState>& path);
    double cutoff_of(double summed) const;
    double current_norm(int component) const { return norms_[static_cast<size_t>(component)].value(); }
    SplitState initial_state(const SplitState& initial) const;
    bool tracks_norms() const { return track_; }

private:
    struct Phys {
        std::vector<cplx> psi_plus, psi_minus;
        std::vector<double> phi;
    };

    SolverConfig cfg_;
    const WienerIncrements* dW_;
    CellBasis basis_;
    int K_;
    bool noise_;
    bool track_;
    double ito_drift_;
    std::vector<double> square_sum_;  // sum_k (K1 e_k)^2
    std::vector<double> dealias_;
    std::vector<double> reg_;         // theta(xi / mu), or empty
    std::vector<double> inv_bracket_;
    std::array<std::vector<cplx>, 3> full_, half_fwd_, half_bwd_;
    std::vector<RunningModifiedNorm> norms_;

    SplitState regularized(const SplitState& u) const;
    void apply_reg(SpectralField& f) const;
    Phys physical(const SplitState& u) const;
    std::array<SpectralField, 3> drift(const SplitState& mid, double theta) const;
    std::array<SpectralField, 3> noise(const SplitState& u, int step) const;
    double difference_norm(int j, const std::vector<SplitState>& a, const std::vector<SplitState>& b) const;
};

// Picard solve of subinterval starting at prev_state, history being the
// record of the nodes on (0, S) (including S).
SubintervalResult picard_solve_subinterval(const SplitState& prev_state, const TrajectoryRecord& history,
                                           const WienerIncrements& dW, const SolverConfig& cfg);

TrajectoryRecord solve_trajectory(const SolverConfig& cfg, const SplitState& initial);
TrajectoryRecord solve_trajectory(const SolverConfig& cfg, const SplitState& initial, const WienerIncrements& dW);

// max over stored times of the H^s x H^s x H^r defect of the truncated mild
// equations recomputed from the stored path
double mild_residual(const TrajectoryRecord& record, const SolverConfig& cfg, const WienerIncrements& dW);

// Initial data presets.  psi_+ = A g(x) e^{i xi0 x}, psi_- = A g(x) e^{-i xi0 x},
// phi = B g(x), phi_dot = 0, g(x) = exp(-d(x, c)^2 / (2 w^2)) with d the
// periodic distance.  band_limit > 0 removes modes with |xi| > band_limit.
SplitState gaussian_wavepacket(const GridSpec& grid, double center, double width, double xi_shift,
                               double amplitude, double phi_amplitude, double dirac_mass, double band_limit = 0.0);
// psi_+ = A e^{i xi_k x}, psi_- = 0, phi = B cos(xi_k x)
SplitState single_mode(const GridSpec& grid, int k, double amplitude, double phi_amplitude, double dirac_mass);
// CSV with n_modes rows: Re psi_+, Im psi_+, Re psi_-, Im psi_-, phi, phi_dot
SplitState initial_from_file(const GridSpec& grid, const std::string& path, double dirac_mass);

// Wiener increments drawn from cfg.seed for the full horizon.
WienerIncrements solver_increments(const SolverConfig& cfg);

}  // namespace sdkg

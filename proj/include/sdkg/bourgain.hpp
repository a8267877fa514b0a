#pragma once

#include <array>
#include <span>
#include <vector>

#include "sdkg/dkg_model.hpp"
#include "sdkg/grid.hpp"

namespace sdkg {

struct NormSpec {
    double s = 0.0;
    double b = 0.3;
    DispersionSymbol symbol = DispersionSymbol::plus_xi;
    double S = 0.0;
    double T = 1.0;

    NormSpec() = default;
    NormSpec(double s, double b, DispersionSymbol symbol, double S, double T);
};

// u(t_j, .) for uniformly spaced t_j.  Time series are sampled at nodes;
// norms work with cell averages (u(t_j) + u(t_{j+1}))/2 on (t_j, t_{j+1}).
struct SpaceTimePath {
    GridSpec grid;
    std::vector<double> times;
    std::vector<SpectralField> slices;

    double dt() const;
    void validate() const;
    // node range [i0, i1] with times[i0] = S, times[i1] = T
    std::pair<int, int> interval_nodes(double S, double T) const;
};

struct CutoffSpec {
    double R = 1.0;
    explicit CutoffSpec(double r);
};

// ||1_{(S,T)} phi||_{H^b(R)} of the piecewise constant interpolant of the
// node samples phi (spacing dt), requires 0 < b < 1/2.
double hb_norm_sharp_cutoff(std::span<const cplx> phi, double dt, double b);
// Same with explicit sample times, which must be uniform.
double hb_norm_sharp_cutoff(std::span<const double> times, std::span<const cplx> phi, double b);

double xsb_norm(const SpaceTimePath& path, const NormSpec& spec);
double modified_norm(const SpaceTimePath& path, const NormSpec& spec);

// (sum_{i != j} |phi_i - phi_j|^2 / |t_i - t_j|^{1+2b} dt^2)^{1/2} over cells
double slobodeckij_seminorm(std::span<const cplx> phi, double dt, double b);

double theta_profile(double x);
double theta_cutoff(double x, const CutoffSpec& spec);
// theta_R applied to the summed squared modified norms of three components on
// (times.front(), times.back()).
double theta_state_cutoff(const std::array<const SpaceTimePath*, 3>& paths, const CutoffSpec& spec,
                          const std::array<NormSpec, 3>& specs);

// First time f reaches R (linear interpolation between samples), or T.
double stopping_time(std::span<const double> times, std::span<const double> f, double R, double T);

// Squared modified norm on (t0, t_n) of a path that grows one node at a time.
class RunningModifiedNorm {
public:
    RunningModifiedNorm(const GridSpec& grid, double s, double b, DispersionSymbol h, double t0, double dt);

    void push(const SpectralField& u);
    // keep only the first n nodes
    void truncate(size_t n);
    // Precompute the interaction of the current cells with the next
    // `horizon` cells, so repeated truncate/push cycles past this point cost
    // O(horizon) per push instead of O(size()).
    void prepare(size_t horizon);
    size_t size() const { return nodes_.size(); }
    // squared norm on (t0, t0 + (size()-1) dt); 0 for fewer than two nodes
    double value() const;

private:
    GridSpec grid_;
    double b_, t0_, dt_;
    std::vector<double> weight_;  // <xi>^s / sqrt(L)
    std::vector<double> freq_h_;
    std::vector<double> kern_;    // dt^{1-2b} d^{-1-2b}
    std::vector<std::vector<double>> nodes_;  // interleaved re/im of U at nodes
    std::vector<std::vector<double>> cells_;
    std::vector<double> cell_norm_;
    std::vector<double> l2_cum_;
    std::vector<double> slob_cum_;
    size_t frozen_ = 0;                   // history cells covered by the cache
    std::vector<std::vector<double>> hist_acc_;  // sum_q kern * cell_q per future cell
    std::vector<double> hist_norm_, hist_kern_;
};

namespace detail {

// Per-mode cell series U_c(xi_k) = <xi_k>^s e^{i t h} u^ / sqrt(L) on node range [i0, i1].
std::vector<std::vector<cplx>> weighted_cells(const SpaceTimePath& path, double s, DispersionSymbol h,
                                              int i0, int i1);
// Squared H^b norm of the piecewise constant function with the given cell
// values; any |b| < 1/2.
double hb_squared_cells(std::span<const cplx> cells, double dt, double b);
// Same on an explicit padded DFT length np >= cells.size().
double hb_squared_cells_padded(std::span<const cplx> cells, double dt, double b, int np);
double slobodeckij_squared_cells(std::span<const cplx> cells, double dt, double b);
// X^{s,b} norm on [times[i0], times[i1]] for any |b| < 1/2.
double xsb_norm_any(const SpaceTimePath& path, double s, double b, DispersionSymbol h, int i0, int i1);
double modified_norm_squared(const SpaceTimePath& path, double s, double b, DispersionSymbol h, int i0, int i1);
int padded_length(int cells, double dt);
// image-summed weights of the squared H^b norm on a padded DFT grid of length np
std::vector<double> hb_weights(int np, double dt, double b);

}  // namespace detail

}  // namespace sdkg

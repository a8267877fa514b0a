#pragma once

#include <array>
#include <vector>

#include "sdkg/grid.hpp"

namespace sdkg {

enum class DispersionSymbol { plus_xi, minus_xi, plus_bracket_xi, minus_bracket_xi };

double evaluate(DispersionSymbol h, double xi);
const char* symbol_name(DispersionSymbol h);

// (psi_+, psi_-, phi_+) with psi_+ evolving under S_{+xi}, psi_- under
// S_{-xi} and phi_+ under S_{+<xi>}.
struct SplitState {
    SpectralField psi_plus;
    SpectralField psi_minus;
    SpectralField phi_plus;
    double dirac_mass = 0.0;
    double kg_mass = 1.0;
    double s_index = 0.0;
    double r_index = 1.0 / 3.0;

    SplitState() = default;
    explicit SplitState(const GridSpec& g) : psi_plus(g), psi_minus(g), phi_plus(g) {}

    const GridSpec& grid() const { return psi_plus.grid; }
    SpectralField& component(int i);
    const SpectralField& component(int i) const;
};

inline constexpr std::array<DispersionSymbol, 3> component_symbols = {
    DispersionSymbol::plus_xi, DispersionSymbol::minus_xi, DispersionSymbol::plus_bracket_xi};

struct UnsplitFields {
    SpectralField psi_plus;
    SpectralField psi_minus;
    SpectralField phi;
    SpectralField phi_dot;
};

// phi_+ = (phi + i <D>^{-1} phi_dot) / 2 modewise.
SplitState split(const SpectralField& psi_plus, const SpectralField& psi_minus,
                 const SpectralField& phi, const SpectralField& phi_dot, double dirac_mass);
// phi = phi_+ + conj(phi_+), phi_dot = -i <D> (phi_+ - conj(phi_+)).
UnsplitFields unsplit(const SplitState& state);

// Multiplies mode k by exp(-i t h(xi_k)).
SpectralField group_apply(DispersionSymbol h, double t, const SpectralField& f);
std::vector<cplx> group_phases(DispersionSymbol h, double t, const GridSpec& grid);

// Samples of a forcing term on a uniform time grid: samples[n] lives at
// t0 + n*dt (node forcing) or at t0 + (n + 1/2)*dt (interval forcing).
struct ForcingSeries {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<SpectralField> samples;
};

// Trapezoidal quadrature of int_{t0}^{t} S_h(t - sigma) F(sigma) dsigma with
// exact phases.  t must be a node of the forcing grid.
SpectralField duhamel(DispersionSymbol h, const ForcingSeries& forcing, double t);

// Exponential midpoint quadrature: sum_n dt S_h(t - t_{n+1/2}) F_{n+1/2}.
// samples[n] is the forcing on (t_n, t_{n+1}); t must be a node.
SpectralField duhamel_midpoint(DispersionSymbol h, const ForcingSeries& forcing, double t);

// Index n with t = t0 + n*dt, or InvalidInput when t is off the grid.
int grid_step_index(double t0, double dt, double t);

}  // namespace sdkg

#include "sdkg/dkg_model.hpp"

#include <cmath>
#include <string>

#include "sdkg/errors.hpp"

namespace sdkg {

double evaluate(DispersionSymbol h, double xi) {
    switch (h) {
        case DispersionSymbol::plus_xi: return xi;
        case DispersionSymbol::minus_xi: return -xi;
        case DispersionSymbol::plus_bracket_xi: return japanese_bracket(xi);
        case DispersionSymbol::minus_bracket_xi: return -japanese_bracket(xi);
    }
    return 0.0;
}

const char* symbol_name(DispersionSymbol h) {
    switch (h) {
        case DispersionSymbol::plus_xi: return "+xi";
        case DispersionSymbol::minus_xi: return "-xi";
        case DispersionSymbol::plus_bracket_xi: return "+<xi>";
        case DispersionSymbol::minus_bracket_xi: return "-<xi>";
    }
    return "?";
}

SpectralField& SplitState::component(int i) {
    switch (i) {
        case 0: return psi_plus;
        case 1: return psi_minus;
        case 2: return phi_plus;
    }
    throw InvalidInput("component index must be 0, 1 or 2");
}

const SpectralField& SplitState::component(int i) const {
    return const_cast<SplitState*>(this)->component(i);
}

SplitState split(const SpectralField& psi_plus, const SpectralField& psi_minus,
                 const SpectralField& phi, const SpectralField& phi_dot, double dirac_mass) {
    const GridSpec& g = psi_plus.grid;
    require_same_grid(g, psi_minus.grid, "split");
    require_same_grid(g, phi.grid, "split");
    require_same_grid(g, phi_dot.grid, "split");
    if (dirac_mass < 0.0) throw InvalidInput("dirac_mass must be nonnegative");
    SplitState st(g);
    st.psi_plus = psi_plus;
    st.psi_minus = psi_minus;
    st.dirac_mass = dirac_mass;
    const cplx I(0.0, 1.0);
    for (int k = 0; k < g.n_modes; ++k)
        st.phi_plus[k] = 0.5 * (phi[k] + I * phi_dot[k] / japanese_bracket(g.frequency(k)));
    return st;
}

UnsplitFields unsplit(const SplitState& state) {
    const GridSpec& g = state.grid();
    UnsplitFields out{state.psi_plus, state.psi_minus, SpectralField(g), SpectralField(g)};
    SpectralField minus = conjugate_field(state.phi_plus);
    const cplx I(0.0, 1.0);
    for (int k = 0; k < g.n_modes; ++k) {
        out.phi[k] = state.phi_plus[k] + minus[k];
        out.phi_dot[k] = -I * japanese_bracket(g.frequency(k)) * (state.phi_plus[k] - minus[k]);
    }
    return out;
}

std::vector<cplx> group_phases(DispersionSymbol h, double t, const GridSpec& grid) {
    std::vector<cplx> ph(static_cast<size_t>(grid.n_modes));
    for (int k = 0; k < grid.n_modes; ++k)
        ph[static_cast<size_t>(k)] = std::polar(1.0, -t * evaluate(h, grid.frequency(k)));
    return ph;
}

SpectralField group_apply(DispersionSymbol h, double t, const SpectralField& f) {
    if (t == 0.0) return f;
    auto ph = group_phases(h, t, f.grid);
    SpectralField out(f.grid);
    for (int k = 0; k < f.size(); ++k) out[k] = ph[static_cast<size_t>(k)] * f[k];
    return out;
}

int grid_step_index(double t0, double dt, double t) {
    if (!(dt > 0.0)) throw InvalidInput("time step must be positive");
    double q = (t - t0) / dt;
    double n = std::round(q);
    if (std::abs(q - n) > 1e-9 * std::max(1.0, std::abs(q)) || n < 0)
        throw InvalidInput("time " + std::to_string(t) + " is not on the time grid");
    return static_cast<int>(n);
}

namespace {

void check_series(const ForcingSeries& f) {
    if (f.samples.empty()) throw InvalidInput("forcing series is empty");
    for (const auto& s : f.samples) require_same_grid(f.samples.front().grid, s.grid, "duhamel");
}

}  // namespace

SpectralField duhamel(DispersionSymbol h, const ForcingSeries& forcing, double t) {
    check_series(forcing);
    const int n = grid_step_index(forcing.t0, forcing.dt, t);
    if (n >= static_cast<int>(forcing.samples.size()))
        throw InvalidInput("forcing is not defined up to time " + std::to_string(t));
    const GridSpec& g = forcing.samples.front().grid;
    SpectralField acc(g);
    // recursion I_{j+1} = S(dt) I_j + dt/2 (S(dt) F_j + F_{j+1}), I_0 = 0
    auto step = group_phases(h, forcing.dt, g);
    const double half = 0.5 * forcing.dt;
    for (int j = 0; j < n; ++j) {
        const auto& a = forcing.samples[static_cast<size_t>(j)];
        const auto& b = forcing.samples[static_cast<size_t>(j + 1)];
        for (int k = 0; k < g.n_modes; ++k) {
            const cplx e = step[static_cast<size_t>(k)];
            acc[k] = e * (acc[k] + half * a[k]) + half * b[k];
        }
    }
    return acc;
}

SpectralField duhamel_midpoint(DispersionSymbol h, const ForcingSeries& forcing, double t) {
    check_series(forcing);
    const int n = grid_step_index(forcing.t0, forcing.dt, t);
    if (n > static_cast<int>(forcing.samples.size()))
        throw InvalidInput("forcing is not defined up to time " + std::to_string(t));
    const GridSpec& g = forcing.samples.front().grid;
    SpectralField acc(g);
    auto step = group_phases(h, forcing.dt, g);
    auto half = group_phases(h, 0.5 * forcing.dt, g);
    for (int j = 0; j < n; ++j) {
        const auto& a = forcing.samples[static_cast<size_t>(j)];
        for (int k = 0; k < g.n_modes; ++k)
            acc[k] = step[static_cast<size_t>(k)] * acc[k] + forcing.dt * half[static_cast<size_t>(k)] * a[k];
    }
    return acc;
}

}  // namespace sdkg

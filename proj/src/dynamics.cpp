#include "sdkg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sdkg/errors.hpp"

namespace sdkg {

namespace {

bool is_multiple(double a, double unit) {
    const double q = a / unit;
    return q >= 0.5 && std::abs(q - std::round(q)) < 1e-9 * q;
}

std::vector<double> phi_physical(const SpectralField& phi_plus) {
    auto z = inverse_transform(phi_plus);
    std::vector<double> out(z.size());
    for (size_t j = 0; j < z.size(); ++j) out[j] = 2.0 * z[j].real();
    return out;
}

SpectralField dealiased(const std::vector<cplx>& samples, const GridSpec& g) {
    auto f = forward_transform(samples, g);
    dealias(f);
    return f;
}

double component_index(const SolverConfig& cfg, int c) { return c < 2 ? cfg.s : cfg.r; }

}  // namespace

SolverConfig::SolverConfig() : SolverConfig(GridSpec{}) {}

SolverConfig::SolverConfig(const GridSpec& g)
    : grid(g), kernel1(NoiseKernel::zero(g)), kernel2(NoiseKernel::zero(g)) {}

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    if (!(horizon > 0.0)) throw InvalidInput("horizon must be positive");
    if (!(subinterval_length > 0.0)) throw InvalidInput("subinterval_length must be positive");
    if (!is_multiple(subinterval_length, dt))
        throw InvalidInput("subinterval_length must be an integer multiple of dt");
    if (!is_multiple(horizon, subinterval_length))
        throw InvalidInput("horizon must be an integer multiple of subinterval_length");
    if (!(b > 0.0 && b < 0.5)) throw InvalidInput("b must lie in (0, 1/2)");
    if (kg_mass != 1.0) throw InvalidInput("kg_mass must equal 1");
    if (!(dirac_mass >= 0.0)) throw InvalidInput("dirac_mass must be nonnegative");
    if (!(truncation_R > 0.0)) throw InvalidInput("truncation_R must be positive");
    if (!(picard_tol > 0.0)) throw InvalidInput("picard_tol must be positive");
    if (picard_max_iters < 1) throw InvalidInput("picard_max_iters must be positive");
    if (mu && !(*mu >= 1.0)) throw InvalidInput("mu must be at least 1");
    if (n_basis < 0 || (n_basis > 0 && (n_basis > grid.n_modes || grid.n_modes % n_basis != 0)))
        throw InvalidInput("n_basis must divide n_modes");
    if (!(kernel1.grid() == grid)) throw InvalidInput("kernel1 grid does not match the solver grid");
    if (!(kernel2.grid() == grid)) throw InvalidInput("kernel2 grid does not match the solver grid");
}

int SolverConfig::n_steps() const { return static_cast<int>(std::lround(horizon / dt)); }
int SolverConfig::steps_per_subinterval() const { return static_cast<int>(std::lround(subinterval_length / dt)); }
int SolverConfig::n_subintervals() const { return n_steps() / steps_per_subinterval(); }
int SolverConfig::basis_size() const { return n_basis == 0 ? grid.n_modes : n_basis; }
bool SolverConfig::noise_active() const { return !kernel1.is_zero() || (kg_active && !kernel2.is_zero()); }

std::vector<double> PicardReport::ratios() const {
    std::vector<double> out;
    for (size_t k = 1; k < residuals.size(); ++k) out.push_back(residuals[k] / residuals[k - 1]);
    return out;
}

double PicardReport::contraction_factor() const {
    auto q = ratios();
    if (q.empty()) return 0.0;
    double acc = 0.0;
    for (double x : q) acc += std::log(x);
    return std::exp(acc / static_cast<double>(q.size()));
}

SpectralField bilinear_dirac(const SpectralField& phi_plus, const SpectralField& psi) {
    require_same_grid(phi_plus.grid, psi.grid, "bilinear_dirac");
    auto phi = phi_physical(phi_plus);
    auto p = inverse_transform(psi);
    for (size_t j = 0; j < p.size(); ++j) p[j] *= phi[j];
    return dealiased(p, psi.grid);
}

SpectralField bilinear_kg(const SpectralField& psi_plus, const SpectralField& psi_minus) {
    require_same_grid(psi_plus.grid, psi_minus.grid, "bilinear_kg");
    auto a = inverse_transform(psi_plus);
    auto c = inverse_transform(psi_minus);
    std::vector<cplx> prod(a.size());
    for (size_t j = 0; j < a.size(); ++j) prod[j] = (std::conj(a[j]) * c[j]).real();
    auto f = dealiased(prod, psi_plus.grid);
    for (int k = 0; k < f.size(); ++k) f[k] /= japanese_bracket(f.grid.frequency(k));
    return f;
}

SpectralField regularize(const SpectralField& field, double mu) {
    if (!(mu >= 1.0)) throw InvalidInput("mu must be at least 1");
    SpectralField out = field;
    for (int k = 0; k < out.size(); ++k) out[k] *= theta_profile(out.grid.frequency(k) / mu);
    return out;
}

TruncatedSolver::TruncatedSolver(const SolverConfig& cfg, const WienerIncrements& dW)
    : cfg_(cfg), dW_(&dW) {
    cfg_.validate();
    K_ = cfg_.steps_per_subinterval();
    basis_ = CellBasis(cfg_.grid, cfg_.basis_size());
    noise_ = cfg_.noise_active();
    track_ = cfg_.nonlinear || cfg_.track_norms;
    if (noise_ && (dW.n_basis != cfg_.basis_size() || dW.n_steps < cfg_.n_steps() ||
                   std::abs(dW.dt - cfg_.dt) > 1e-12 * cfg_.dt))
        throw InvalidInput("Wiener increments do not match n_basis, dt and horizon");
    ito_drift_ = cfg_.drop_ito_drift ? 0.0 : ito_correction(cfg_.kernel1);
    if (!cfg_.kernel1.is_zero()) square_sum_ = basis_square_sum(cfg_.kernel1, basis_);
    dealias_ = dealias_mask(cfg_.grid);
    const int n = cfg_.grid.n_modes;
    if (cfg_.mu) {
        reg_.resize(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) reg_[static_cast<size_t>(k)] = theta_profile(cfg_.grid.frequency(k) / *cfg_.mu);
    }
    for (int k = 0; k < n; ++k) inv_bracket_.push_back(1.0 / japanese_bracket(cfg_.grid.frequency(k)));
    for (int c = 0; c < 3; ++c) {
        const auto h = component_symbols[static_cast<size_t>(c)];
        full_[static_cast<size_t>(c)] = group_phases(h, cfg_.dt, cfg_.grid);
        half_fwd_[static_cast<size_t>(c)] = group_phases(h, 0.5 * cfg_.dt, cfg_.grid);
        half_bwd_[static_cast<size_t>(c)] = group_phases(h, -0.5 * cfg_.dt, cfg_.grid);
        norms_.emplace_back(cfg_.grid, component_index(cfg_, c), cfg_.b, h, 0.0, cfg_.dt);
    }
}

void TruncatedSolver::apply_reg(SpectralField& f) const {
    if (reg_.empty()) return;
    for (int k = 0; k < f.size(); ++k) f[k] *= reg_[static_cast<size_t>(k)];
}

SplitState TruncatedSolver::regularized(const SplitState& u) const {
    SplitState v = u;
    for (int c = 0; c < 3; ++c) apply_reg(v.component(c));
    return v;
}

SplitState TruncatedSolver::initial_state(const SplitState& initial) const {
    require_same_grid(cfg_.grid, initial.grid(), "initial state");
    SplitState u = regularized(initial);
    u.dirac_mass = cfg_.dirac_mass;
    u.kg_mass = cfg_.kg_mass;
    u.s_index = cfg_.s;
    u.r_index = cfg_.r;
    if (!cfg_.kg_active) u.phi_plus = SpectralField(cfg_.grid);
    return u;
}

TruncatedSolver::Phys TruncatedSolver::physical(const SplitState& u) const {
    Phys p;
    p.psi_plus = inverse_transform(u.psi_plus);
    p.psi_minus = inverse_transform(u.psi_minus);
    if (cfg_.kg_active)
        p.phi = phi_physical(u.phi_plus);
    else
        p.phi.assign(p.psi_plus.size(), 0.0);
    return p;
}

double TruncatedSolver::cutoff_of(double summed) const {
    return theta_cutoff(summed, CutoffSpec(cfg_.truncation_R));
}

std::array<SpectralField, 3> TruncatedSolver::drift(const SplitState& mid_in, double theta) const {
    const GridSpec& g = cfg_.grid;
    SplitState mid = regularized(mid_in);
    std::array<SpectralField, 3> out{SpectralField(g), SpectralField(g), SpectralField(g)};
    if (cfg_.nonlinear && theta > 0.0) {
        const cplx coef(0.0, theta * theta);
        auto p = physical(mid);
        const size_t n = p.phi.size();
        std::vector<cplx> a(n), c(n), d(n);
        for (size_t j = 0; j < n; ++j) {
            a[j] = p.phi[j] * p.psi_minus[j];
            c[j] = p.phi[j] * p.psi_plus[j];
            d[j] = (std::conj(p.psi_plus[j]) * p.psi_minus[j]).real();
        }
        out[0] = forward_transform(a, g);
        out[1] = forward_transform(c, g);
        for (int k = 0; k < g.n_modes; ++k) {
            out[0][k] *= coef * dealias_[static_cast<size_t>(k)];
            out[1][k] *= coef * dealias_[static_cast<size_t>(k)];
        }
        if (cfg_.kg_active) {
            out[2] = forward_transform(d, g);
            for (int k = 0; k < g.n_modes; ++k)
                out[2][k] *= coef * dealias_[static_cast<size_t>(k)] * inv_bracket_[static_cast<size_t>(k)];
        }
    }
    const cplx mass(0.0, -cfg_.dirac_mass);
    for (int k = 0; k < g.n_modes; ++k) {
        out[0][k] += mass * mid.psi_minus[k] - ito_drift_ * mid.psi_plus[k];
        out[1][k] += mass * mid.psi_plus[k] - ito_drift_ * mid.psi_minus[k];
    }
    return out;
}

std::array<SpectralField, 3> TruncatedSolver::noise(const SplitState& u_in, int step) const {
    const GridSpec& g = cfg_.grid;
    std::array<SpectralField, 3> out{SpectralField(g), SpectralField(g), SpectralField(g)};
    if (!noise_) return out;
    SplitState u = regularized(u_in);
    auto p = physical(u);
    const size_t n = p.phi.size();
    auto dw = dW_->column(step);
    if (!cfg_.kernel1.is_zero()) {
        auto zeta = noise_field(cfg_.kernel1, dw, basis_);
        std::vector<cplx> a(n), c(n);
        for (size_t j = 0; j < n; ++j) {
            const double mil = -0.5 * (zeta[j] * zeta[j] - square_sum_[j] * cfg_.dt);
            a[j] = cplx(0.0, zeta[j]) * p.psi_minus[j] + mil * p.psi_plus[j];
            c[j] = cplx(0.0, zeta[j]) * p.psi_plus[j] + mil * p.psi_minus[j];
        }
        out[0] = dealiased(a, g);
        out[1] = dealiased(c, g);
    }
    if (cfg_.kg_active && !cfg_.kernel2.is_zero()) {
        auto zeta = noise_field(cfg_.kernel2, dw, basis_);
        std::vector<cplx> d(n);
        for (size_t j = 0; j < n; ++j) d[j] = p.phi[j] * zeta[j];
        out[2] = dealiased(d, g);
        for (int k = 0; k < g.n_modes; ++k) out[2][k] *= cplx(0.0, 0.5) * inv_bracket_[static_cast<size_t>(k)];
    }
    return out;
}

std::vector<SplitState> TruncatedSolver::sweep(int j, const std::vector<SplitState>& path,
                                               const std::vector<double>& theta) const {
    const int n0 = j * K_;
    const GridSpec& g = cfg_.grid;
    std::vector<SplitState> next(path.size(), path.front());
    for (int n = 0; n < K_; ++n) {
        const auto& cur = path[static_cast<size_t>(n)];
        const auto& nxt = path[static_cast<size_t>(n) + 1];
        SplitState mid = cur;
        for (int c = 0; c < 3; ++c) {
            const auto& hf = half_fwd_[static_cast<size_t>(c)];
            const auto& hb = half_bwd_[static_cast<size_t>(c)];
            auto& m = mid.component(c);
            for (int k = 0; k < g.n_modes; ++k)
                m[k] = 0.5 * (hf[static_cast<size_t>(k)] * cur.component(c)[k] +
                              hb[static_cast<size_t>(k)] * nxt.component(c)[k]);
        }
        const double th = 0.5 * (theta[static_cast<size_t>(n)] + theta[static_cast<size_t>(n) + 1]);
        auto d = drift(mid, th);
        auto z = noise(cur, n0 + n);
        auto& out = next[static_cast<size_t>(n) + 1];
        const auto& prev = next[static_cast<size_t>(n)];
        for (int c = 0; c < 3; ++c) {
            if (c == 2 && !cfg_.kg_active) {
                out.component(c) = SpectralField(g);
                continue;
            }
            const auto& fu = full_[static_cast<size_t>(c)];
            const auto& hf = half_fwd_[static_cast<size_t>(c)];
            SpectralField inc(g);
            for (int k = 0; k < g.n_modes; ++k)
                inc[k] = cfg_.dt * hf[static_cast<size_t>(k)] * d[static_cast<size_t>(c)][k] +
                         fu[static_cast<size_t>(k)] * z[static_cast<size_t>(c)][k];
            apply_reg(inc);
            auto& o = out.component(c);
            for (int k = 0; k < g.n_modes; ++k) o[k] = fu[static_cast<size_t>(k)] * prev.component(c)[k] + inc[k];
        }
    }
    return next;
}

void TruncatedSolver::push_history(const SplitState& state) {
    if (!track_) {
        return;
    }
    for (int c = 0; c < 3; ++c) norms_[static_cast<size_t>(c)].push(state.component(c));
}

std::vector<double> TruncatedSolver::cutoff_along(const std::vector<SplitState>& path) {
    std::vector<double> theta(path.size(), 1.0);
    if (!track_) return theta;
    const size_t base = norms_[0].size();
    auto summed = [&]() { return norms_[0].value() + norms_[1].value() + norms_[2].value(); };
    theta[0] = cutoff_of(summed());
    for (size_t n = 1; n < path.size(); ++n) {
        for (int c = 0; c < 3; ++c) norms_[static_cast<size_t>(c)].push(path[n].component(c));
        theta[n] = cutoff_of(summed());
    }
    for (auto& rn : norms_) rn.truncate(base);
    return theta;
}

double TruncatedSolver::difference_norm(int j, const std::vector<SplitState>& a,
                                        const std::vector<SplitState>& b) const {
    double total = 0.0;
    const int n0 = j * K_;
    for (int c = 0; c < 3; ++c) {
        SpaceTimePath p{cfg_.grid, {}, {}};
        for (size_t n = 0; n < a.size(); ++n) {
            p.times.push_back((n0 + static_cast<int>(n)) * cfg_.dt);
            p.slices.push_back(a[n].component(c) - b[n].component(c));
        }
        const double sq = detail::modified_norm_squared(p, component_index(cfg_, c), cfg_.b,
                                                        component_symbols[static_cast<size_t>(c)], 0, K_);
        total += std::sqrt(std::max(sq, 0.0));
    }
    return total;
}

SubintervalResult TruncatedSolver::solve_subinterval(int j, const SplitState& start) {
    if (track_ && norms_[0].size() != static_cast<size_t>(j * K_) + 1)
        throw InvalidInput("running norm history does not end at the subinterval start");
    SubintervalResult res;
    res.report.subinterval = j;
    res.report.start_time = j * K_ * cfg_.dt;
    if (track_)
        for (auto& rn : norms_) rn.prepare(static_cast<size_t>(K_));

    // free evolution as the initial iterate
    std::vector<SplitState> path(static_cast<size_t>(K_) + 1, start);
    for (int n = 1; n <= K_; ++n)
        for (int c = 0; c < 3; ++c)
            path[static_cast<size_t>(n)].component(c) =
                group_apply(component_symbols[static_cast<size_t>(c)], n * cfg_.dt, start.component(c));

    const bool needs_theta = cfg_.nonlinear;
    std::vector<double> theta(path.size(), 1.0);
    bool converged = false;
    for (int it = 0; it < cfg_.picard_max_iters; ++it) {
        if (needs_theta) theta = cutoff_along(path);
        auto next = sweep(j, path, theta);
        const double diff = difference_norm(j, next, path);
        res.report.residuals.push_back(diff);
        res.report.iterations = it + 1;
        path = std::move(next);
        if (!std::isfinite(diff)) break;
        if (diff < cfg_.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw SubintervalDivergence(j, res.report.start_time, res.report.residuals);

    res.cutoff.assign(path.size(), 1.0);
    if (track_) {
        auto summed = [&]() { return norms_[0].value() + norms_[1].value() + norms_[2].value(); };
        for (int c = 0; c < 3; ++c) res.norms[static_cast<size_t>(c)].push_back(norms_[static_cast<size_t>(c)].value());
        res.cutoff[0] = cutoff_of(summed());
        for (size_t n = 1; n < path.size(); ++n) {
            for (int c = 0; c < 3; ++c) {
                norms_[static_cast<size_t>(c)].push(path[n].component(c));
                res.norms[static_cast<size_t>(c)].push_back(norms_[static_cast<size_t>(c)].value());
            }
            res.cutoff[n] = cutoff_of(summed());
        }
    }
    res.nodes = std::move(path);
    return res;
}

WienerIncrements solver_increments(const SolverConfig& cfg) {
    return sample_increments(cfg.seed, cfg.basis_size(), cfg.n_steps(), cfg.dt);
}

namespace {

double state_charge(const SplitState& u) {
    const double a = sobolev_norm(u.psi_plus, 0.0);
    const double c = sobolev_norm(u.psi_minus, 0.0);
    return a * a + c * c;
}

void append_nodes(TrajectoryRecord& rec, const SubintervalResult& res, const SolverConfig& cfg, int n0,
                  bool skip_first) {
    for (size_t n = skip_first ? 1 : 0; n < res.nodes.size(); ++n) {
        rec.times.push_back((n0 + static_cast<int>(n)) * cfg.dt);
        rec.states.push_back(res.nodes[n]);
        rec.charge.push_back(state_charge(res.nodes[n]));
        rec.cutoff_value.push_back(res.cutoff[n]);
        for (int c = 0; c < 3; ++c)
            if (!res.norms[static_cast<size_t>(c)].empty())
                rec.running_norms[static_cast<size_t>(c)].push_back(res.norms[static_cast<size_t>(c)][n]);
    }
}

void finish_record(TrajectoryRecord& rec, const SolverConfig& cfg) {
    rec.tau_R = cfg.horizon;
    rec.tau_reached = false;
    if (rec.running_norms[0].empty()) return;
    std::vector<double> summed(rec.times.size());
    for (size_t n = 0; n < summed.size(); ++n)
        summed[n] = rec.running_norms[0][n] + rec.running_norms[1][n] + rec.running_norms[2][n];
    rec.tau_R = stopping_time(rec.times, summed, cfg.truncation_R, cfg.horizon);
    rec.tau_reached = summed.back() >= cfg.truncation_R;
}

}  // namespace

TrajectoryRecord solve_trajectory(const SolverConfig& cfg, const SplitState& initial) {
    cfg.validate();
    return solve_trajectory(cfg, initial, solver_increments(cfg));
}

TrajectoryRecord solve_trajectory(const SolverConfig& cfg, const SplitState& initial, const WienerIncrements& dW) {
    TruncatedSolver solver(cfg, dW);
    TrajectoryRecord rec;
    rec.seed = cfg.seed;
    SplitState u = solver.initial_state(initial);
    solver.push_history(u);
    const int K = cfg.steps_per_subinterval();
    for (int j = 0; j < cfg.n_subintervals(); ++j) {
        auto res = solver.solve_subinterval(j, u);
        append_nodes(rec, res, cfg, j * K, j > 0);
        rec.picard_reports.push_back(res.report);
        u = res.nodes.back();
    }
    finish_record(rec, cfg);
    return rec;
}

SubintervalResult picard_solve_subinterval(const SplitState& prev_state, const TrajectoryRecord& history,
                                           const WienerIncrements& dW, const SolverConfig& cfg) {
    TruncatedSolver solver(cfg, dW);
    const int K = cfg.steps_per_subinterval();
    if (history.states.empty()) {
        solver.push_history(prev_state);
        return solver.solve_subinterval(0, prev_state);
    }
    const int nodes = static_cast<int>(history.states.size());
    if ((nodes - 1) % K != 0) throw InvalidInput("history must end on a subinterval boundary");
    for (const auto& s : history.states) solver.push_history(s);
    return solver.solve_subinterval((nodes - 1) / K, prev_state);
}

double mild_residual(const TrajectoryRecord& record, const SolverConfig& cfg, const WienerIncrements& dW) {
    TruncatedSolver solver(cfg, dW);
    const int K = cfg.steps_per_subinterval();
    const size_t expect = static_cast<size_t>(cfg.n_steps()) + 1;
    if (record.states.size() != expect) throw InvalidInput("record does not cover the configured horizon");
    double worst = 0.0;
    solver.push_history(record.states.front());
    for (int j = 0; j < cfg.n_subintervals(); ++j) {
        std::vector<SplitState> path(record.states.begin() + j * K, record.states.begin() + (j + 1) * K + 1);
        std::vector<double> theta(path.size(), 1.0);
        if (cfg.nonlinear) theta = solver.cutoff_along(path);
        auto next = solver.sweep(j, path, theta);
        for (size_t n = 1; n < path.size(); ++n) {
            double sq = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double d = sobolev_norm(next[n].component(c) - path[n].component(c), c < 2 ? cfg.s : cfg.r);
                sq += d * d;
            }
            worst = std::max(worst, std::sqrt(sq));
        }
        for (size_t n = 1; n < path.size(); ++n) solver.push_history(path[n]);
    }
    return worst;
}

}  // namespace sdkg

namespace sdkg {

namespace {

void band_limit_field(SpectralField& f, double band) {
    if (!(band > 0.0)) return;
    for (int k = 0; k < f.size(); ++k)
        if (std::abs(f.grid.frequency(k)) > band) f[k] = 0.0;
}

}  // namespace

SplitState gaussian_wavepacket(const GridSpec& grid, double center, double width, double xi_shift,
                               double amplitude, double phi_amplitude, double dirac_mass, double band_limit) {
    if (!(width > 0.0)) throw InvalidInput("init_width must be positive");
    const int n = grid.n_modes;
    const double L = grid.domain_length;
    std::vector<cplx> a(static_cast<size_t>(n)), c(static_cast<size_t>(n));
    std::vector<double> phi(static_cast<size_t>(n)), zero(static_cast<size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        double d = std::fmod(x - center, L);
        if (d < -0.5 * L) d += L;
        if (d > 0.5 * L) d -= L;
        const double g = std::exp(-d * d / (2.0 * width * width));
        a[static_cast<size_t>(j)] = amplitude * g * std::polar(1.0, xi_shift * x);
        c[static_cast<size_t>(j)] = amplitude * g * std::polar(1.0, -xi_shift * x);
        phi[static_cast<size_t>(j)] = phi_amplitude * g;
    }
    auto pp = forward_transform(a, grid);
    auto pm = forward_transform(c, grid);
    auto ph = forward_transform_real(phi, grid);
    band_limit_field(pp, band_limit);
    band_limit_field(pm, band_limit);
    band_limit_field(ph, band_limit);
    return split(pp, pm, ph, SpectralField(grid), dirac_mass);
}

SplitState single_mode(const GridSpec& grid, int k, double amplitude, double phi_amplitude, double dirac_mass) {
    if (std::abs(k) >= grid.n_modes / 2) throw InvalidInput("init_mode must satisfy |k| < n_modes/2");
    SpectralField pp(grid), ph(grid);
    pp[grid.slot(k)] = amplitude * grid.domain_length;
    ph[grid.slot(k)] += 0.5 * phi_amplitude * grid.domain_length;
    ph[grid.slot(-k)] += 0.5 * phi_amplitude * grid.domain_length;
    return split(pp, SpectralField(grid), ph, SpectralField(grid), dirac_mass);
}

SplitState initial_from_file(const GridSpec& grid, const std::string& path, double dirac_mass) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open init_file '" + path + "'");
    const int n = grid.n_modes;
    std::vector<cplx> a, c;
    std::vector<double> phi, phi_dot;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InvalidInput("init_file '" + path + "': bad value '" + cell + "'");
            }
        }
        if (row.size() != 6) throw InvalidInput("init_file '" + path + "': each row needs 6 columns");
        a.emplace_back(row[0], row[1]);
        c.emplace_back(row[2], row[3]);
        phi.push_back(row[4]);
        phi_dot.push_back(row[5]);
    }
    if (static_cast<int>(a.size()) != n)
        throw InvalidInput("init_file '" + path + "' has " + std::to_string(a.size()) +
                           " rows, expected n_modes = " + std::to_string(n));
    return split(forward_transform(a, grid), forward_transform(c, grid), forward_transform_real(phi, grid),
                 forward_transform_real(phi_dot, grid), dirac_mass);
}

}  // namespace sdkg

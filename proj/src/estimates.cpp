#include "sdkg/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sdkg/errors.hpp"
#include "sdkg/fft.hpp"

namespace sdkg {

double charge(const SplitState& state) {
    const double a = sobolev_norm(state.psi_plus, 0.0);
    const double c = sobolev_norm(state.psi_minus, 0.0);
    return a * a + c * c;
}

const char* estimate_name(BilinearEstimate id) {
    switch (id) {
        case BilinearEstimate::n_bound: return "Nbound";
        case BilinearEstimate::m_plus_bound: return "M+bound";
        case BilinearEstimate::m_minus_bound: return "M-bound";
    }
    return "?";
}

BilinearEstimate parse_estimate(const std::string& name) {
    if (name == "Nbound") return BilinearEstimate::n_bound;
    if (name == "M+bound") return BilinearEstimate::m_plus_bound;
    if (name == "M-bound") return BilinearEstimate::m_minus_bound;
    throw InvalidInput("probe_estimate must be one of Nbound, M+bound, M-bound");
}

double ProbeReport::mesh_change() const {
    if (mesh_refinement_trend.size() < 2 || mesh_refinement_trend[0] == 0.0) return 0.0;
    return std::abs(mesh_refinement_trend[1] - mesh_refinement_trend[0]) / mesh_refinement_trend[0];
}

void check_bilinear_range(double s, double r, double b) {
    if (!(s > -0.25)) throw InvalidInput("probe requires s > -1/4");
    if (!(std::abs(s) <= r && r <= s + 1.0)) throw InvalidInput("probe requires |s| <= r <= s + 1");
    if (!(r > 0.0 && r < 1.0 + 2.0 * s)) throw InvalidInput("probe requires 0 < r < 1 + 2s");
    if (!(b > 0.25 && b < 0.5)) throw InvalidInput("probe requires 1/4 < b < 1/2");
}

ProbeField random_probe_field(DispersionSymbol h, const ProbeOptions& opt, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;
    ProbeField f{h, {}};
    const int J = opt.time_modes;
    for (int k = -opt.band; k <= opt.band; ++k) {
        const double xi = 2.0 * std::numbers::pi * k / opt.domain_length;
        std::vector<cplx> row;
        for (int j = -J; j <= J; ++j) {
            const double lam = 2.0 * std::numbers::pi * j / opt.T0;
            const cplx z(nd(rng) / std::sqrt(2.0), nd(rng) / std::sqrt(2.0));
            const double u = ud(rng);
            row.push_back(z * (1.0 + 0.5 * u) / (japanese_bracket(xi) * japanese_bracket(lam)));
        }
        f.coeffs.push_back(std::move(row));
    }
    return f;
}

SpaceTimePath sample_probe_field(const ProbeField& f, const ProbeOptions& opt, const ProbeMesh& mesh) {
    GridSpec g(mesh.n_modes, opt.domain_length);
    const int band = static_cast<int>(f.coeffs.size() / 2);
    if (2 * band >= mesh.n_modes / 2) throw InvalidInput("probe band does not fit the mesh");
    const int J = static_cast<int>(f.coeffs.front().size() / 2);
    SpaceTimePath p{g, {}, {}};
    for (int i = 0; i <= mesh.n_times; ++i) {
        const double t = opt.T0 * i / mesh.n_times;
        SpectralField u(g);
        for (int k = -band; k <= band; ++k) {
            const double xi = g.frequency(g.slot(k));
            cplx acc = 0.0;
            for (int j = -J; j <= J; ++j)
                acc += f.coeffs[static_cast<size_t>(k + band)][static_cast<size_t>(j + J)] *
                       std::polar(1.0, 2.0 * std::numbers::pi * j / opt.T0 * t);
            u[g.slot(k)] = std::polar(1.0, -t * evaluate(f.symbol, xi)) * acc;
        }
        p.times.push_back(t);
        p.slices.push_back(std::move(u));
    }
    return p;
}

namespace {

// pointwise product path: conj(a) c when conj_first, else a c
SpaceTimePath product_path(const SpaceTimePath& a, const SpaceTimePath& c, bool conj_first) {
    SpaceTimePath p{a.grid, a.times, {}};
    for (size_t i = 0; i < a.slices.size(); ++i) {
        auto x = inverse_transform(a.slices[i]);
        auto y = inverse_transform(c.slices[i]);
        for (size_t j = 0; j < x.size(); ++j) x[j] = (conj_first ? std::conj(x[j]) : x[j]) * y[j];
        p.slices.push_back(forward_transform(x, a.grid));
    }
    return p;
}

struct EstimateShape {
    DispersionSymbol first, second, product;
    bool conj_first;
};

EstimateShape shape_of(BilinearEstimate id) {
    switch (id) {
        case BilinearEstimate::n_bound:
            return {DispersionSymbol::plus_xi, DispersionSymbol::minus_xi, DispersionSymbol::plus_bracket_xi, true};
        case BilinearEstimate::m_plus_bound:
            return {DispersionSymbol::plus_bracket_xi, DispersionSymbol::minus_xi, DispersionSymbol::plus_xi, false};
        case BilinearEstimate::m_minus_bound:
            return {DispersionSymbol::plus_bracket_xi, DispersionSymbol::plus_xi, DispersionSymbol::minus_xi, false};
    }
    throw InvalidInput("unknown estimate");
}

std::vector<double> quantiles(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::vector<double> q;
    if (v.empty()) return q;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const size_t i = static_cast<size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        q.push_back(i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i]);
    }
    return q;
}

int last_node(const SpaceTimePath& p) { return static_cast<int>(p.slices.size()) - 1; }

}  // namespace

double bilinear_ratio(BilinearEstimate id, const SpaceTimePath& a, const SpaceTimePath& c, double s, double r,
                      double b) {
    const auto sh = shape_of(id);
    const int m = last_node(a);
    const double sa = id == BilinearEstimate::n_bound ? s : r;
    const double den = detail::xsb_norm_any(a, sa, b, sh.first, 0, m) * detail::xsb_norm_any(c, s, b, sh.second, 0, m);
    if (den == 0.0) return 0.0;
    auto prod = product_path(a, c, sh.conj_first);
    const double sp = id == BilinearEstimate::n_bound ? r - 1.0 : s;
    return detail::xsb_norm_any(prod, sp, -b, sh.product, 0, m) / den;
}

ProbeReport probe_bilinear(BilinearEstimate id, double s, double r, double b, int n_trials, std::uint64_t seed,
                           const ProbeOptions& opt) {
    if (!opt.force) check_bilinear_range(s, r, b);
    if (!(std::abs(b) < 0.5)) throw InvalidInput("b must lie in (-1/2, 1/2)");
    if (n_trials < 1) throw InvalidInput("probe_trials must be positive");
    const auto sh = shape_of(id);
    ProbeReport rep;
    rep.estimate_id = estimate_name(id);
    rep.s = s;
    rep.r = r;
    rep.b = b;
    rep.n_trials = n_trials;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    double fine_max = 0.0;
    for (int t = 0; t < n_trials; ++t) {
        auto fa = random_probe_field(sh.first, opt, rng);
        auto fc = random_probe_field(sh.second, opt, rng);
        const double coarse = bilinear_ratio(id, sample_probe_field(fa, opt, opt.coarse),
                                             sample_probe_field(fc, opt, opt.coarse), s, r, b);
        const double fine = bilinear_ratio(id, sample_probe_field(fa, opt, opt.fine),
                                           sample_probe_field(fc, opt, opt.fine), s, r, b);
        rep.ratios.push_back(coarse);
        rep.max_ratio = std::max(rep.max_ratio, coarse);
        fine_max = std::max(fine_max, fine);
    }
    rep.ratio_quantiles = quantiles(rep.ratios);
    rep.mesh_refinement_trend = {rep.max_ratio, fine_max};
    return rep;
}

DualityCheck probe_duality(double s, double r, double b, int n_trials, std::uint64_t seed, const ProbeOptions& opt) {
    if (!opt.force) check_bilinear_range(s, r, b);
    DualityCheck out;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < n_trials; ++t) {
        auto fphi = random_probe_field(DispersionSymbol::plus_bracket_xi, opt, rng);
        auto fpsi = random_probe_field(DispersionSymbol::minus_xi, opt, rng);
        auto phi = sample_probe_field(fphi, opt, opt.coarse);
        auto psi = sample_probe_field(fpsi, opt, opt.coarse);
        const int m = last_node(phi);
        const double den = detail::xsb_norm_any(phi, r, b, DispersionSymbol::plus_bracket_xi, 0, m) *
                           detail::xsb_norm_any(psi, s, b, DispersionSymbol::minus_xi, 0, m);
        auto F = product_path(phi, psi, false);
        const double direct = detail::xsb_norm_any(F, s, -b, DispersionSymbol::plus_xi, 0, m);

        const double dt = F.dt();
        const int np = detail::padded_length(m, dt);
        const auto w = detail::hb_weights(np, dt, b);
        auto cells = detail::weighted_cells(F, s, DispersionSymbol::plus_xi, 0, m);
        cplx pairing = 0.0;
        double g_norm_sq = 0.0;
        for (const auto& c : cells) {
            if (c.empty()) continue;
            std::vector<cplx> buf(static_cast<size_t>(np), cplx(0.0, 0.0));
            std::copy(c.begin(), c.end(), buf.begin());
            fft::forward(buf.data(), buf.data(), np);
            for (int p = 0; p < np; ++p) buf[static_cast<size_t>(p)] /= w[static_cast<size_t>(p)] * np;
            fft::backward(buf.data(), buf.data(), np);
            // G maximizes the pairing against piecewise constant functions in H^b;
            // F vanishes beyond the first m cells
            for (int q = 0; q < m; ++q) pairing += dt * c[static_cast<size_t>(q)] * std::conj(buf[static_cast<size_t>(q)]);
            g_norm_sq += detail::hb_squared_cells_padded(buf, dt, b, np);
        }
        out.direct.push_back(den > 0.0 ? direct / den : 0.0);
        out.dual.push_back(den > 0.0 && g_norm_sq > 0.0 ? std::abs(pairing) / std::sqrt(g_norm_sq) / den : 0.0);
        const double rel = out.direct.back() > 0.0
                               ? std::abs(out.dual.back() - out.direct.back()) / out.direct.back()
                               : 0.0;
        out.max_relative_difference = std::max(out.max_relative_difference, rel);
    }
    return out;
}

double CutoffProbeReport::bound_change() const {
    return bound_constant_coarse > 0.0 ? std::abs(bound_constant_fine - bound_constant_coarse) / bound_constant_coarse
                                       : 0.0;
}

double CutoffProbeReport::lipschitz_change() const {
    return lipschitz_constant_coarse > 0.0
               ? std::abs(lipschitz_constant_fine - lipschitz_constant_coarse) / lipschitz_constant_coarse
               : 0.0;
}

namespace {

struct CutoffComponent {
    DispersionSymbol h;
    double s;
};

constexpr double cutoff_r = 1.0 / 3.0;
const std::array<CutoffComponent, 3> cutoff_components{{{DispersionSymbol::plus_xi, 0.0},
                                                        {DispersionSymbol::minus_xi, 0.0},
                                                        {DispersionSymbol::plus_bracket_xi, cutoff_r}}};

SpaceTimePath scaled(SpaceTimePath p, double a) {
    for (auto& f : p.slices) f *= a;
    return p;
}

// summed squared modified norms on (0, t_n) at every node
std::vector<double> running_sum(const std::array<SpaceTimePath, 3>& u, double b) {
    const size_t n = u[0].slices.size();
    std::vector<double> out(n, 0.0);
    for (size_t c = 0; c < 3; ++c) {
        RunningModifiedNorm rn(u[c].grid, cutoff_components[c].s, b, cutoff_components[c].h, 0.0, u[c].dt());
        for (size_t i = 0; i < n; ++i) {
            rn.push(u[c].slices[i]);
            out[i] += rn.value();
        }
    }
    return out;
}

std::array<SpaceTimePath, 3> apply_cutoff(const std::array<SpaceTimePath, 3>& u, double b, double R) {
    auto f = running_sum(u, b);
    auto out = u;
    const CutoffSpec spec(R);
    for (auto& p : out)
        for (size_t i = 0; i < p.slices.size(); ++i) p.slices[i] *= theta_cutoff(f[i], spec);
    return out;
}

double x_norm(const SpaceTimePath& p, size_t c, double b) {
    return detail::xsb_norm_any(p, cutoff_components[c].s, b, cutoff_components[c].h, 0, last_node(p));
}

}  // namespace

CutoffProbeReport probe_cutoff(double b, int n_paths, std::uint64_t seed, const ProbeOptions& opt) {
    if (!(b > 0.0 && b < 0.5)) throw InvalidInput("b must lie in (0, 1/2)");
    CutoffProbeReport rep;
    rep.b = b;
    rep.T0 = opt.T0;
    rep.n_paths = n_paths;
    rep.R_values = {1.0, 4.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud;
    for (int p = 0; p < n_paths; ++p) {
        std::array<ProbeField, 3> fu, fw;
        for (size_t c = 0; c < 3; ++c) fu[c] = random_probe_field(cutoff_components[c].h, opt, rng);
        for (size_t c = 0; c < 3; ++c) fw[c] = random_probe_field(cutoff_components[c].h, opt, rng);
        const double R = rep.R_values[static_cast<size_t>(p) % rep.R_values.size()];
        const double target = 0.25 * std::pow(64.0, ud(rng));  // f(T) / R in [0.25, 16]
        const double beta = 0.05 * std::pow(20.0, ud(rng));    // |v - u| relative size in [0.05, 1]

        double amp = 0.0;
        for (int level = 0; level < 2; ++level) {
            const ProbeMesh& mesh = level == 0 ? opt.coarse : opt.fine;
            std::array<SpaceTimePath, 3> u, v;
            for (size_t c = 0; c < 3; ++c) u[c] = sample_probe_field(fu[c], opt, mesh);
            if (level == 0) amp = std::sqrt(target * R / running_sum(u, b).back());
            for (size_t c = 0; c < 3; ++c) {
                u[c] = scaled(u[c], amp);
                auto w = scaled(sample_probe_field(fw[c], opt, mesh), beta * amp);
                v[c] = u[c];
                for (size_t i = 0; i < v[c].slices.size(); ++i) v[c].slices[i] += w.slices[i];
            }
            auto tu = apply_cutoff(u, b, R);
            auto tv = apply_cutoff(v, b, R);
            double bound = 0.0, lip_num = 0.0, lip_den = 0.0;
            for (size_t c = 0; c < 3; ++c) {
                bound = std::max(bound, x_norm(tu[c], c, b) / std::sqrt(R));
                SpaceTimePath d = tu[c];
                for (size_t i = 0; i < d.slices.size(); ++i) d.slices[i] -= tv[c].slices[i];
                lip_num = std::max(lip_num, x_norm(d, c, b));
                SpaceTimePath e = u[c];
                for (size_t i = 0; i < e.slices.size(); ++i) e.slices[i] -= v[c].slices[i];
                lip_den += x_norm(e, c, b);
            }
            const double lip = lip_den > 0.0 ? lip_num / lip_den : 0.0;
            if (level == 0) {
                rep.bound_constant_coarse = std::max(rep.bound_constant_coarse, bound);
                rep.lipschitz_constant_coarse = std::max(rep.lipschitz_constant_coarse, lip);
            } else {
                rep.bound_constant_fine = std::max(rep.bound_constant_fine, bound);
                rep.lipschitz_constant_fine = std::max(rep.lipschitz_constant_fine, lip);
            }
        }
    }
    return rep;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) return 0.0;
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

void check_global_hypotheses(double s, double r, double b) {
    if (s != 0.0) throw InvalidInput("global bounds require s = 0");
    if (!(r > 0.25 && r < 0.5)) throw InvalidInput("global bounds require 1/4 < r < 1/2");
    if (!(b > std::max(r, 1.0 - 2.0 * r) && b < 0.5))
        throw InvalidInput("global bounds require max(r, 1 - 2r) < b < 1/2");
}

EnsembleStats monitor_global_bounds(const std::vector<LadderEnsemble>& ladder, double r, double b) {
    EnsembleStats st;
    st.r = r;
    st.b = b;
    for (const auto& e : ladder)
        for (const auto& rec : e.records)
            if (!rec.states.empty()) check_global_hypotheses(rec.states.front().s_index, r, b);
    check_global_hypotheses(0.0, r, b);
    st.p_exponent = std::max(4.0, (2.0 * b + 2.0 * r - 1.0) / (b + 2.0 * r - 1.0));
    st.mu_exponent = (0.5 - r) / b;
    for (const auto& e : ladder) {
        st.R_values.push_back(e.R);
        st.n_failed += e.n_failed;
        double phi = 0.0, pp = 0.0, pm = 0.0, q0 = 0.0, q0sq = 0.0, drift = 0.0, drift_max = 0.0;
        std::vector<int> hist(10, 0);
        const double n = static_cast<double>(e.records.size());
        for (const auto& rec : e.records) {
            ++st.n_trajectories;
            const double T = rec.times.back();
            std::array<SpaceTimePath, 3> paths;
            for (int c = 0; c < 3; ++c) {
                paths[static_cast<size_t>(c)] = SpaceTimePath{rec.states.front().grid(), rec.times, {}};
                for (const auto& s : rec.states) paths[static_cast<size_t>(c)].slices.push_back(s.component(c));
            }
            const double nphi = xsb_norm(paths[2], NormSpec(r, b, DispersionSymbol::plus_bracket_xi, 0.0, T));
            phi += nphi * nphi / n;
            pp += xsb_norm(paths[0], NormSpec(0.0, b, DispersionSymbol::plus_xi, 0.0, T)) / n;
            pm += xsb_norm(paths[1], NormSpec(0.0, b, DispersionSymbol::minus_xi, 0.0, T)) / n;
            const double qa = rec.charge.front(), qb = rec.charge.back();
            q0 += qa / n;
            q0sq += qa * qa / n;
            const double d = qa > 0.0 ? std::abs(qb - qa) / qa : std::abs(qb - qa);
            drift += d / n;
            drift_max = std::max(drift_max, d);
            int bin = static_cast<int>(std::floor(10.0 * rec.tau_R / T));
            hist[static_cast<size_t>(std::clamp(bin, 0, 9))] += 1;
        }
        st.phi_stat.push_back(phi);
        st.psi_plus_stat.push_back(pp);
        st.psi_minus_stat.push_back(pm);
        st.initial_charge_mean.push_back(q0);
        st.initial_charge_variance.push_back(std::max(q0sq - q0 * q0, 0.0));
        st.charge_drift_mean.push_back(drift);
        st.charge_drift_max.push_back(drift_max);
        st.tau_histogram.push_back(hist);
    }
    if (st.R_values.size() >= 2) {
        st.phi_trend_slope = log_log_slope(st.R_values, st.phi_stat);
        st.psi_plus_trend_slope = log_log_slope(st.R_values, st.psi_plus_stat);
        st.psi_minus_trend_slope = log_log_slope(st.R_values, st.psi_minus_stat);
    }
    return st;
}

namespace {

int subinterval_steps(int n_steps) {
    for (int k : {8, 4, 2})
        if (n_steps % k == 0) return k;
    return 1;
}

// midpoint Stratonovich integration of the linear Dirac pair
SplitState stratonovich_reference(const SolverConfig& cfg, const SplitState& u0, const WienerIncrements& dW) {
    const GridSpec& g = cfg.grid;
    const CellBasis basis(g, cfg.basis_size());
    std::array<std::vector<cplx>, 2> full, hf, hb;
    for (int c = 0; c < 2; ++c) {
        full[static_cast<size_t>(c)] = group_phases(component_symbols[static_cast<size_t>(c)], cfg.dt, g);
        hf[static_cast<size_t>(c)] = group_phases(component_symbols[static_cast<size_t>(c)], 0.5 * cfg.dt, g);
        hb[static_cast<size_t>(c)] = group_phases(component_symbols[static_cast<size_t>(c)], -0.5 * cfg.dt, g);
    }
    const auto mask = dealias_mask(g);
    std::array<SpectralField, 2> v{u0.psi_plus, u0.psi_minus};
    const bool noisy = !cfg.kernel1.is_zero();
    for (int n = 0; n < cfg.n_steps(); ++n) {
        std::vector<double> zeta;
        if (noisy) zeta = noise_field(cfg.kernel1, dW.column(n), basis);
        std::array<SpectralField, 2> next{v[0], v[1]};
        for (int c = 0; c < 2; ++c)
            for (int k = 0; k < g.n_modes; ++k) next[static_cast<size_t>(c)][k] = full[static_cast<size_t>(c)][static_cast<size_t>(k)] * v[static_cast<size_t>(c)][k];
        for (int it = 0; it < 200; ++it) {
            std::array<SpectralField, 2> mid{SpectralField(g), SpectralField(g)};
            for (int c = 0; c < 2; ++c)
                for (int k = 0; k < g.n_modes; ++k)
                    mid[static_cast<size_t>(c)][k] =
                        0.5 * (hf[static_cast<size_t>(c)][static_cast<size_t>(k)] * v[static_cast<size_t>(c)][k] +
                               hb[static_cast<size_t>(c)][static_cast<size_t>(k)] * next[static_cast<size_t>(c)][k]);
            std::array<SpectralField, 2> noise{SpectralField(g), SpectralField(g)};
            if (noisy) {
                for (int c = 0; c < 2; ++c) {
                    auto x = inverse_transform(mid[static_cast<size_t>(1 - c)]);
                    for (size_t j = 0; j < x.size(); ++j) x[j] *= cplx(0.0, zeta[j]);
                    noise[static_cast<size_t>(c)] = forward_transform(x, g);
                }
            }
            double change = 0.0, size = 0.0;
            for (int c = 0; c < 2; ++c) {
                for (int k = 0; k < g.n_modes; ++k) {
                    const cplx rhs = cfg.dt * cplx(0.0, -cfg.dirac_mass) * mid[static_cast<size_t>(1 - c)][k] +
                                     mask[static_cast<size_t>(k)] * noise[static_cast<size_t>(c)][k];
                    const cplx val = full[static_cast<size_t>(c)][static_cast<size_t>(k)] * v[static_cast<size_t>(c)][k] +
                                     hf[static_cast<size_t>(c)][static_cast<size_t>(k)] * rhs;
                    change += std::norm(val - next[static_cast<size_t>(c)][k]);
                    size += std::norm(val);
                    next[static_cast<size_t>(c)][k] = val;
                }
            }
            if (change <= 1e-28 * size) break;
        }
        v = std::move(next);
    }
    SplitState out = u0;
    out.psi_plus = v[0];
    out.psi_minus = v[1];
    out.phi_plus = SpectralField(g);
    return out;
}

std::vector<double> density(const SplitState& u) {
    auto a = inverse_transform(u.psi_plus);
    auto c = inverse_transform(u.psi_minus);
    std::vector<double> rho(a.size());
    for (size_t j = 0; j < a.size(); ++j) rho[j] = std::norm(a[j]) + std::norm(c[j]);
    return rho;
}

SolverConfig ito_config(const SolverConfig& cfg, double dt) {
    if (cfg.nonlinear) throw InvalidInput("check-ito requires nonlinear = false");
    SolverConfig c = cfg;
    c.dt = dt;
    c.kg_active = false;
    c.track_norms = false;
    c.mu.reset();
    c.kernel2 = NoiseKernel::zero(cfg.grid);
    c.subinterval_length = subinterval_steps(static_cast<int>(std::lround(cfg.horizon / dt))) * dt;
    c.validate();
    return c;
}

std::vector<double> discrepancies(const SolverConfig& cfg, const SplitState& initial, int n_trajectories,
                                  const std::vector<int>& factors, double dt_fine) {
    if (n_trajectories < 1) throw InvalidInput("ito_trajectories must be positive");
    const SolverConfig fine = ito_config(cfg, dt_fine);
    const size_t n = static_cast<size_t>(cfg.grid.n_modes);
    std::vector<std::vector<double>> mean_ito(factors.size(), std::vector<double>(n, 0.0));
    auto mean_str = mean_ito;
    for (int t = 0; t < n_trajectories; ++t) {
        const auto w = sample_increments(cfg.seed + static_cast<std::uint64_t>(t), fine.basis_size(), fine.n_steps(),
                                         dt_fine);
        for (size_t l = 0; l < factors.size(); ++l) {
            const auto c = ito_config(cfg, dt_fine * factors[l]);
            const auto dW = factors[l] == 1 ? w : coarsen(w, factors[l]);
            auto rec = solve_trajectory(c, initial, dW);
            auto ri = density(rec.states.back());
            auto rs = density(stratonovich_reference(c, rec.states.front(), dW));
            for (size_t j = 0; j < n; ++j) {
                mean_ito[l][j] += ri[j] / n_trajectories;
                mean_str[l][j] += rs[j] / n_trajectories;
            }
        }
    }
    std::vector<double> out;
    for (size_t l = 0; l < factors.size(); ++l) {
        double num = 0.0, den = 0.0;
        for (size_t j = 0; j < n; ++j) {
            num += std::pow(mean_ito[l][j] - mean_str[l][j], 2);
            den += mean_str[l][j] * mean_str[l][j];
        }
        out.push_back(den > 0.0 ? std::sqrt(num / den) : std::sqrt(num));
    }
    return out;
}

}  // namespace

double ito_stratonovich_consistency(const SolverConfig& cfg, const SplitState& initial, int n_trajectories) {
    return discrepancies(cfg, initial, n_trajectories, {1}, cfg.dt).front();
}

ItoSeries ito_stratonovich_series(const SolverConfig& cfg, const SplitState& initial, int n_trajectories,
                                  int halvings) {
    if (halvings < 1) throw InvalidInput("ito_halvings must be positive");
    ItoSeries s;
    std::vector<int> factors;
    const double dt_fine = cfg.dt / std::pow(2.0, halvings);
    for (int l = 0; l <= halvings; ++l) {
        factors.push_back(1 << (halvings - l));
        s.dt.push_back(cfg.dt / std::pow(2.0, l));
    }
    s.discrepancy = discrepancies(cfg, initial, n_trajectories, factors, dt_fine);
    s.slope = log_log_slope(s.dt, s.discrepancy);
    return s;
}

}  // namespace sdkg

#include <random>

#include "doctest.h"
#include "sdkg/dynamics.hpp"
#include "sdkg/errors.hpp"

using namespace sdkg;

namespace {

const GridSpec small_grid(64, 8.0 * std::numbers::pi);

SpectralField random_band(const GridSpec& g, int band, std::mt19937_64& rng, double amp = 1.0) {
    std::normal_distribution<double> nd;
    SpectralField f(g);
    for (int k = 0; k < g.n_modes; ++k)
        if (std::abs(g.signed_index(k)) < band) f[k] = amp * cplx(nd(rng), nd(rng));
    return f;
}

// (f g)^(xi_k) = (1/L) sum_m f^(m) g^(k - m), no wrap-around
SpectralField linear_convolution(const SpectralField& f, const SpectralField& g) {
    const GridSpec& gr = f.grid;
    SpectralField out(gr);
    const int n = gr.n_modes;
    for (int a = -n / 2; a < n / 2; ++a)
        for (int b = -n / 2; b < n / 2; ++b) {
            const int c = a + b;
            if (c < -n / 2 || c >= n / 2) continue;
            out[gr.slot(c)] += f[gr.slot(a)] * g[gr.slot(b)] / gr.domain_length;
        }
    return out;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

SolverConfig quiet_config(double dt = 1.0 / 64, double T = 0.25) {
    SolverConfig cfg(small_grid);
    cfg.dt = dt;
    cfg.horizon = T;
    cfg.subinterval_length = 8 * dt;
    cfg.truncation_R = 1e6;
    return cfg;
}

SplitState packet(double amp = 0.5) {
    return gaussian_wavepacket(small_grid, 12.0, 2.0, 1.0, amp, 0.5 * amp, 0.0);
}

bool same_record(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.states.size() != b.states.size()) return false;
    for (size_t n = 0; n < a.states.size(); ++n)
        for (int c = 0; c < 3; ++c)
            if (a.states[n].component(c).coeffs != b.states[n].component(c).coeffs) return false;
    return a.charge == b.charge && a.cutoff_value == b.cutoff_value && a.running_norms == b.running_norms &&
           a.tau_R == b.tau_R;
}

}  // namespace

TEST_CASE("bilinear_dirac") {
    std::mt19937_64 rng(1);
    auto psi = random_band(small_grid, 16, rng);
    CHECK(max_diff(bilinear_dirac(SpectralField(small_grid), psi), SpectralField(small_grid)) == 0.0);

    SpectralField phi_plus(small_grid);
    phi_plus[0] = 0.5 * 1.7 * small_grid.domain_length;  // phi = 1.7
    SpectralField mode(small_grid);
    mode[small_grid.slot(5)] = 2.0;
    CHECK(max_diff(bilinear_dirac(phi_plus, mode), 1.7 * mode) < 1e-12);

    for (int trial = 0; trial < 5; ++trial) {
        auto pp = random_band(small_grid, 16, rng);
        auto ps = random_band(small_grid, 16, rng);
        SpectralField phi(small_grid);
        for (int k = 0; k < phi.size(); ++k) phi[k] = pp[k] + std::conj(pp[small_grid.mirror(k)]);
        auto expect = linear_convolution(phi, ps);
        dealias(expect);
        CHECK(max_diff(bilinear_dirac(pp, ps), expect) < 1e-10);
    }
    CHECK_THROWS_AS(bilinear_dirac(SpectralField(GridSpec(32, 1.0)), psi), InvalidInput);
}

TEST_CASE("bilinear_kg") {
    std::mt19937_64 rng(2);
    auto psi = random_band(small_grid, 16, rng);
    CHECK(max_diff(bilinear_kg(SpectralField(small_grid), psi), SpectralField(small_grid)) == 0.0);

    // psi_+ = e^{i xi_2 x}, psi_- = e^{i xi_5 x}: Re(conj psi_+ psi_-) = cos(xi_3 x)
    SpectralField a(small_grid), c(small_grid);
    const double L = small_grid.domain_length;
    a[small_grid.slot(2)] = L;
    c[small_grid.slot(5)] = L;
    SpectralField expect(small_grid);
    const double w = 1.0 / japanese_bracket(small_grid.frequency(small_grid.slot(3)));
    expect[small_grid.slot(3)] = 0.5 * L * w;
    expect[small_grid.slot(-3)] = 0.5 * L * w;
    CHECK(max_diff(bilinear_kg(a, c), expect) < 1e-11);

    for (int trial = 0; trial < 5; ++trial) {
        auto f = bilinear_kg(random_band(small_grid, 30, rng), random_band(small_grid, 30, rng));
        for (int k = 0; k < f.size(); ++k) {
            if (small_grid.signed_index(k) == -small_grid.n_modes / 2) continue;
            CHECK(std::abs(f[k] - std::conj(f[small_grid.mirror(k)])) < 1e-12 * (1.0 + std::abs(f[k])));
        }
    }
}

TEST_CASE("regularize") {
    std::mt19937_64 rng(3);
    auto f = random_band(small_grid, 40, rng);
    const double max_freq = small_grid.frequency(small_grid.slot(small_grid.n_modes / 2 - 1));
    CHECK(max_diff(regularize(f, max_freq + 1.0), f) == 0.0);

    const double mu = 2.0;
    auto g = regularize(f, mu);
    for (int k = 0; k < f.size(); ++k) {
        const double xi = std::abs(small_grid.frequency(k));
        if (xi >= 2.0 * mu) CHECK(g[k] == cplx(0.0, 0.0));
        if (xi <= mu) CHECK(g[k] == f[k]);
    }
    SpectralField three(small_grid);
    const int k3 = small_grid.slot(static_cast<int>(std::lround(3.0 * mu * small_grid.domain_length / (2.0 * std::numbers::pi))));
    three[k3] = 1.0;
    CHECK(regularize(three, mu)[k3] == cplx(0.0, 0.0));

    std::uniform_real_distribution<double> us(-1.0, 2.0), um(1.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto h = random_band(small_grid, 40, rng);
        const double s = us(rng);
        CHECK(sobolev_norm(regularize(h, um(rng)), s) <= sobolev_norm(h, s) * (1.0 + 1e-15));
    }
    CHECK_THROWS_AS(regularize(f, 0.5), InvalidInput);
}

TEST_CASE("solver configuration validation") {
    auto cfg = quiet_config();
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.b = 0.6;
    CHECK_THROWS_WITH_AS(bad.validate(), "b must lie in (0, 1/2)", InvalidInput);
    bad = cfg;
    bad.subinterval_length = 1.5 * cfg.dt;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("subinterval_length"), InvalidInput);
    bad = cfg;
    bad.horizon = 0.3;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("horizon"), InvalidInput);
    bad = cfg;
    bad.kg_mass = 2.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = cfg;
    bad.mu = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad = cfg;
    bad.n_basis = 5;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("zero data is a one-iteration fixed point") {
    auto cfg = quiet_config();
    auto rec = solve_trajectory(cfg, SplitState(small_grid));
    CHECK(rec.states.size() == static_cast<size_t>(cfg.n_steps()) + 1);
    for (const auto& rep : rec.picard_reports) CHECK(rep.iterations == 1);
    for (size_t n = 0; n < rec.states.size(); ++n) {
        CHECK(rec.charge[n] == 0.0);
        CHECK(rec.cutoff_value[n] == 1.0);
        for (int c = 0; c < 3; ++c) CHECK(sobolev_norm(rec.states[n].component(c), 0.0) == 0.0);
    }
    CHECK(rec.tau_R == cfg.horizon);
    CHECK_FALSE(rec.tau_reached);
}

TEST_CASE("linear noise-free dynamics is free evolution") {
    auto cfg = quiet_config();
    cfg.nonlinear = false;
    auto u0 = packet();
    auto rec = solve_trajectory(cfg, u0);
    for (size_t n = 0; n < rec.states.size(); ++n)
        for (int c = 0; c < 3; ++c) {
            auto expect = group_apply(component_symbols[static_cast<size_t>(c)], rec.times[n], u0.component(c));
            CHECK(sobolev_norm(rec.states[n].component(c) - expect, 0.0) < 1e-10);
        }
    auto dW = solver_increments(cfg);
    CHECK(mild_residual(rec, cfg, dW) < 1e-9);

    // with a mass term the charge stays constant
    cfg.dirac_mass = 1.3;
    auto massive = solve_trajectory(cfg, u0);
    for (double q : massive.charge) CHECK(std::abs(q - massive.charge.front()) < 1e-10 * massive.charge.front());
}

TEST_CASE("nonlinear noise-free dynamics conserves charge") {
    auto cfg = quiet_config();
    cfg.dirac_mass = 0.5;
    auto rec = solve_trajectory(cfg, packet(1.0));
    for (double q : rec.charge) CHECK(std::abs(q - rec.charge.front()) < 1e-10 * rec.charge.front());
}

TEST_CASE("Picard iteration contracts and solutions satisfy the mild equations") {
    auto cfg = quiet_config(1.0 / 128, 0.25);
    cfg.dirac_mass = 0.5;
    cfg.kernel1 = NoiseKernel::gaussian(small_grid, 2.0, 0.3);
    cfg.kernel2 = NoiseKernel::gaussian(small_grid, 2.0, 0.3);
    cfg.seed = 42;
    auto rec = solve_trajectory(cfg, packet(0.3));
    double worst = 0.0;
    for (const auto& rep : rec.picard_reports) {
        CHECK(rep.residuals.back() < cfg.picard_tol);
        for (double q : rep.ratios()) worst = std::max(worst, q);
    }
    MESSAGE("worst Picard ratio " << worst);
    CHECK(worst < 0.5);

    auto dW = solver_increments(cfg);
    const double res = mild_residual(rec, cfg, dW);
    MESSAGE("mild residual " << res);
    CHECK(res < 10.0 * cfg.picard_tol);

    auto corrupted = rec;
    corrupted.states[11].psi_plus[0] += small_grid.domain_length;  // + 1 in physical space
    CHECK(mild_residual(corrupted, cfg, dW) > 0.5);

    // the history-driven entry point reproduces a subinterval of the march
    TrajectoryRecord history;
    const int K = cfg.steps_per_subinterval();
    history.states.assign(rec.states.begin(), rec.states.begin() + 2 * K + 1);
    auto sub = picard_solve_subinterval(rec.states[static_cast<size_t>(2 * K)], history, dW, cfg);
    for (int n = 0; n <= K; ++n)
        CHECK(sobolev_norm(sub.nodes[static_cast<size_t>(n)].psi_minus - rec.states[static_cast<size_t>(2 * K + n)].psi_minus,
                           0.0) < 1e-12);
}

TEST_CASE("halving the subinterval reduces the contraction factor") {
    auto cfg = quiet_config(1.0 / 256, 0.125);
    cfg.dirac_mass = 0.5;
    cfg.kernel1 = NoiseKernel::gaussian(small_grid, 2.0, 1.0);
    cfg.seed = 3;
    auto factor = [&](int steps) {
        auto c = cfg;
        c.subinterval_length = steps * c.dt;
        auto rec = solve_trajectory(c, packet(1.0));
        double f = 0.0;
        for (const auto& rep : rec.picard_reports) f = std::max(f, rep.contraction_factor());
        return f;
    };
    const double f16 = factor(16), f8 = factor(8), f4 = factor(4);
    MESSAGE("contraction factors: delta=16dt " << f16 << ", 8dt " << f8 << ", 4dt " << f4);
    CHECK(f8 < f16);
    CHECK(f4 < f8);
}

TEST_CASE("divergence carries the residual history") {
    auto cfg = quiet_config();
    cfg.picard_max_iters = 2;
    cfg.dirac_mass = 1.0;
    try {
        solve_trajectory(cfg, packet(1.0));
        FAIL("expected divergence");
    } catch (const SubintervalDivergence& e) {
        CHECK(e.subinterval() == 0);
        CHECK(e.residuals().size() == 2);
    }
}

TEST_CASE("determinism and truncation consistency") {
    auto cfg = quiet_config(1.0 / 64, 0.5);
    cfg.kernel1 = NoiseKernel::gaussian(small_grid, 2.0, 0.5);
    cfg.kernel2 = NoiseKernel::gaussian(small_grid, 2.0, 0.5);
    cfg.seed = 9;
    auto u0 = packet(1.5);
    auto a = solve_trajectory(cfg, u0);
    auto b = solve_trajectory(cfg, u0);
    CHECK(same_record(a, b));

    auto lo = cfg;
    lo.truncation_R = 1.0;
    auto hi = cfg;
    hi.truncation_R = 8.0;
    auto ra = solve_trajectory(lo, u0);
    auto rb = solve_trajectory(hi, u0);
    REQUIRE(ra.tau_reached);
    MESSAGE("tau_1 = " << ra.tau_R);
    double worst = 0.0, after = 0.0;
    for (size_t n = 0; n < ra.states.size(); ++n) {
        double d = 0.0;
        for (int c = 0; c < 3; ++c) d += sobolev_norm(ra.states[n].component(c) - rb.states[n].component(c), 0.0);
        if (ra.times[n] <= ra.tau_R) worst = std::max(worst, d);
        else after = std::max(after, d);
    }
    CHECK(worst < 1e-8);
    CHECK(after > 1e-8);
    for (double th : ra.cutoff_value) CHECK((th >= 0.0 && th <= 1.0));
}

TEST_CASE("initial data presets") {
    auto u = single_mode(small_grid, 3, 1.0, 0.0, 0.0);
    CHECK(sobolev_norm(u.psi_plus, 0.0) == doctest::Approx(std::sqrt(small_grid.domain_length)));
    auto w = gaussian_wavepacket(small_grid, 10.0, 1.0, 2.0, 1.0, 1.0, 0.0, 3.0);
    for (int k = 0; k < small_grid.n_modes; ++k)
        if (std::abs(small_grid.frequency(k)) > 3.0) CHECK(w.psi_plus[k] == cplx(0.0, 0.0));
    auto f = unsplit(w);
    auto phi = inverse_transform(f.phi);
    for (const auto& z : phi) CHECK(std::abs(z.imag()) < 1e-12);
    CHECK_THROWS_AS(initial_from_file(small_grid, "/nonexistent/init.csv", 0.0), InvalidInput);
}

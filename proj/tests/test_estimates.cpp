#include <cmath>
#include <random>

#include "doctest.h"
#include "sdkg/errors.hpp"
#include "sdkg/estimates.hpp"

using namespace sdkg;

namespace {

ProbeOptions quick_options() {
    ProbeOptions opt;
    opt.band = 4;
    opt.coarse = {32, 64};
    opt.fine = {64, 128};
    return opt;
}

SpaceTimePath scaled_path(SpaceTimePath p, cplx a) {
    for (auto& f : p.slices) f *= a;
    return p;
}

}  // namespace

TEST_CASE("charge of simple states") {
    const GridSpec g(64, 8.0 * std::numbers::pi);
    CHECK(charge(SplitState(g)) == 0.0);
    auto u = single_mode(g, 3, 0.5, 1.0, 0.0);
    CHECK(charge(u) == doctest::Approx(0.25 * g.domain_length).epsilon(1e-12));
    u.psi_minus = u.psi_plus;
    CHECK(charge(u) == doctest::Approx(0.5 * g.domain_length).epsilon(1e-12));
}

TEST_CASE("estimate names round-trip") {
    for (auto id : {BilinearEstimate::n_bound, BilinearEstimate::m_plus_bound, BilinearEstimate::m_minus_bound})
        CHECK(parse_estimate(estimate_name(id)) == id);
    CHECK_THROWS_AS(parse_estimate("Lbound"), InvalidInput);
}

TEST_CASE("probe ratio vanishes for zero psi and is scale invariant") {
    const auto opt = quick_options();
    std::mt19937_64 rng(3);
    for (auto id : {BilinearEstimate::n_bound, BilinearEstimate::m_plus_bound, BilinearEstimate::m_minus_bound}) {
        const bool n = id == BilinearEstimate::n_bound;
        const auto ha = n ? DispersionSymbol::plus_xi : DispersionSymbol::plus_bracket_xi;
        const auto hc = id == BilinearEstimate::m_minus_bound ? DispersionSymbol::plus_xi : DispersionSymbol::minus_xi;
        auto a = sample_probe_field(random_probe_field(ha, opt, rng), opt, opt.coarse);
        auto c = sample_probe_field(random_probe_field(hc, opt, rng), opt, opt.coarse);
        const double base = bilinear_ratio(id, a, c, 0.0, 1.0 / 3.0, 0.3);
        CHECK(base > 0.0);
        CHECK(std::isfinite(base));
        CHECK(bilinear_ratio(id, a, scaled_path(c, 0.0), 0.0, 1.0 / 3.0, 0.3) == 0.0);
        const double moved = bilinear_ratio(id, scaled_path(a, cplx(3.0, -1.0)), scaled_path(c, 1e-3), 0.0,
                                            1.0 / 3.0, 0.3);
        CHECK(std::abs(moved - base) <= 1e-10 * base);
    }
}

TEST_CASE("probe samples match the free evolution at t = 0") {
    const auto opt = quick_options();
    std::mt19937_64 rng(5);
    auto f = random_probe_field(DispersionSymbol::minus_xi, opt, rng);
    auto p = sample_probe_field(f, opt, opt.coarse);
    const GridSpec& g = p.grid;
    for (int k = -opt.band; k <= opt.band; ++k) {
        cplx acc = 0.0;
        for (const auto& c : f.coeffs[static_cast<size_t>(k + opt.band)]) acc += c;
        CHECK(std::abs(p.slices[0][g.slot(k)] - acc) < 1e-14);
    }
    CHECK(p.slices.size() == static_cast<size_t>(opt.coarse.n_times + 1));
    CHECK(p.times.back() == doctest::Approx(opt.T0));
}

TEST_CASE("max ratio is nonincreasing in b on matched seeds") {
    const auto opt = quick_options();
    double prev = 1e300;
    for (double b : {0.3, 0.35, 0.4, 0.45}) {
        auto rep = probe_bilinear(BilinearEstimate::m_plus_bound, 0.0, 1.0 / 3.0, b, 10, 11, opt);
        CHECK(rep.max_ratio <= prev * (1.0 + 1e-12));
        prev = rep.max_ratio;
        CHECK(rep.ratios.size() == 10);
        CHECK(rep.ratio_quantiles.size() == 5);
        CHECK(rep.ratio_quantiles.back() == doctest::Approx(rep.max_ratio));
    }
}

TEST_CASE("probe range is enforced unless forced") {
    CHECK_THROWS_AS(check_bilinear_range(-0.3, 0.3, 0.3), InvalidInput);
    CHECK_THROWS_AS(check_bilinear_range(0.0, 1.5, 0.3), InvalidInput);
    CHECK_THROWS_AS(check_bilinear_range(0.0, 1.0 / 3.0, 0.2), InvalidInput);
    CHECK_THROWS_AS(check_bilinear_range(0.0, 1.0 / 3.0, 0.5), InvalidInput);
    CHECK_NOTHROW(check_bilinear_range(0.0, 1.0 / 3.0, 0.3));
    auto opt = quick_options();
    CHECK_THROWS_AS(probe_bilinear(BilinearEstimate::n_bound, 0.0, 1.0 / 3.0, 0.2, 2, 1, opt), InvalidInput);
    opt.force = true;
    auto rep = probe_bilinear(BilinearEstimate::n_bound, 0.0, 1.0 / 3.0, 0.2, 2, 1, opt);
    CHECK(rep.max_ratio > 0.0);
}

TEST_CASE("probe is deterministic in the seed") {
    const auto opt = quick_options();
    auto a = probe_bilinear(BilinearEstimate::n_bound, 0.0, 1.0 / 3.0, 0.3, 4, 9, opt);
    auto b = probe_bilinear(BilinearEstimate::n_bound, 0.0, 1.0 / 3.0, 0.3, 4, 9, opt);
    CHECK(a.ratios == b.ratios);
    CHECK(a.mesh_refinement_trend.size() == 2);
}

TEST_CASE("dual pairing reproduces the direct norm") {
    const auto opt = quick_options();
    auto d = probe_duality(0.0, 1.0 / 3.0, 0.3, 5, 21, opt);
    REQUIRE(d.direct.size() == 5);
    CHECK(d.max_relative_difference < 0.05);
}

TEST_CASE("cutoff probe constants are finite and mesh stable") {
    auto opt = quick_options();
    auto rep = probe_cutoff(0.3, 6, 17, opt);
    CHECK(std::isfinite(rep.bound_constant_coarse));
    CHECK(rep.bound_constant_coarse > 0.0);
    CHECK(rep.lipschitz_constant_coarse > 0.0);
    CHECK(rep.bound_change() < 0.15);
    CHECK(rep.lipschitz_change() < 0.15);
}

TEST_CASE("log-log slope of a power law") {
    std::vector<double> x{1.0, 2.0, 4.0, 8.0}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
    CHECK(log_log_slope(x, y) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK_THROWS_AS(log_log_slope({1.0}, {1.0}), InvalidInput);
}

TEST_CASE("global hypotheses") {
    CHECK_NOTHROW(check_global_hypotheses(0.0, 1.0 / 3.0, 0.4));
    CHECK_THROWS_AS(check_global_hypotheses(0.0, 1.0 / 3.0, 0.3), InvalidInput);
    CHECK_THROWS_AS(check_global_hypotheses(0.0, 0.2, 0.45), InvalidInput);
    CHECK_THROWS_AS(check_global_hypotheses(0.1, 1.0 / 3.0, 0.4), InvalidInput);
}

TEST_CASE("monitor on a zero ensemble") {
    SolverConfig cfg(GridSpec(32, 8.0 * std::numbers::pi));
    cfg.dt = 1.0 / 32.0;
    cfg.horizon = 0.25;
    cfg.subinterval_length = 0.125;
    cfg.b = 0.4;
    std::vector<LadderEnsemble> ladder;
    for (double R : {1.0, 4.0}) {
        cfg.truncation_R = R;
        LadderEnsemble e{R, {}, 0};
        for (int i = 0; i < 2; ++i) e.records.push_back(solve_trajectory(cfg, SplitState(cfg.grid)));
        ladder.push_back(std::move(e));
    }
    auto st = monitor_global_bounds(ladder, 1.0 / 3.0, 0.4);
    CHECK(st.n_trajectories == 4);
    CHECK(st.phi_stat == std::vector<double>{0.0, 0.0});
    CHECK(st.psi_plus_stat == std::vector<double>{0.0, 0.0});
    CHECK(st.charge_drift_max == std::vector<double>{0.0, 0.0});
    CHECK(st.p_exponent == doctest::Approx(7.0));
    CHECK(st.mu_exponent == doctest::Approx((0.5 - 1.0 / 3.0) / 0.4));
    CHECK(st.tau_histogram[0][9] == 2);
    CHECK_THROWS_AS(monitor_global_bounds(ladder, 1.0 / 3.0, 0.3), InvalidInput);
}

TEST_CASE("Ito check vanishes without noise and rejects the nonlinear model") {
    SolverConfig cfg(GridSpec(32, 8.0 * std::numbers::pi));
    cfg.dt = 1.0 / 16.0;
    cfg.horizon = 0.5;
    cfg.subinterval_length = 0.25;
    cfg.dirac_mass = 1.0;
    const auto u0 = gaussian_wavepacket(cfg.grid, 4.0 * std::numbers::pi, 2.0, 0.5, 1.0, 0.0, 1.0, 4.0);
    CHECK_THROWS_AS(ito_stratonovich_consistency(cfg, u0, 2), InvalidInput);
    cfg.nonlinear = false;
    CHECK(ito_stratonovich_consistency(cfg, u0, 2) < 1e-12);
    cfg.kernel1 = NoiseKernel::gaussian(cfg.grid, 2.0, 0.5);
    const double d = ito_stratonovich_consistency(cfg, u0, 4);
    CHECK(std::isfinite(d));
    CHECK(d > 0.0);
}

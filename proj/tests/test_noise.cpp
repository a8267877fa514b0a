#include <random>

#include "doctest.h"
#include "sdkg/errors.hpp"
#include "sdkg/noise.hpp"

using namespace sdkg;

namespace {

std::vector<double> random_real(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = nd(rng);
    return v;
}

// dx sum_j k(x_i - x_j) f(x_j)
std::vector<cplx> direct_convolution(const std::vector<double>& k, const std::vector<cplx>& f, double dx) {
    const int n = static_cast<int>(k.size());
    std::vector<cplx> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j) s += k[static_cast<size_t>(((i - j) % n + n) % n)] * f[static_cast<size_t>(j)];
        out[static_cast<size_t>(i)] = s * dx;
    }
    return out;
}

std::vector<cplx> to_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("convolution") {
    GridSpec g(32, 9.0);
    std::mt19937_64 rng(1);
    auto f = forward_transform(to_complex(random_real(32, rng)), g);
    for (auto c : convolve(NoiseKernel::zero(g), f).coeffs) CHECK(c == cplx(0.0));

    SpectralField one(g);
    for (auto& c : one.coeffs) c = 1.0;
    auto same = convolve(NoiseKernel(one, 1.0), f);
    for (int k = 0; k < 32; ++k) CHECK(same[k] == f[k]);

    auto kern = NoiseKernel::gaussian(g, 0.8, 1.3);
    std::vector<cplx> wave(32);
    for (int j = 0; j < 32; ++j) wave[static_cast<size_t>(j)] = std::polar(1.0, g.frequency(4) * g.x(j));
    auto conv = convolve(kern, forward_transform(wave, g));
    auto direct = direct_convolution(kern.samples(), wave, g.dx());
    auto back = inverse_transform(conv);
    for (int j = 0; j < 32; ++j) CHECK(std::abs(back[static_cast<size_t>(j)] - direct[static_cast<size_t>(j)]) < 1e-12);
    CHECK_THROWS_AS(convolve(kern, SpectralField(GridSpec(16, 9.0))), InvalidInput);
}

TEST_CASE("kernels are real") {
    GridSpec g(64, 20.0);
    for (const auto& k : {NoiseKernel::gaussian(g, 1.0, 0.5), NoiseKernel::sinc(g, 2.0, 0.7)}) {
        for (auto z : inverse_transform(k.kernel)) CHECK(std::abs(z.imag()) < 1e-12);
        CHECK(std::isfinite(sobolev_norm(k.kernel, k.sobolev_reg)));
    }
}

TEST_CASE("Ito correction") {
    GridSpec g(64, 16.0);
    CHECK(ito_correction(NoiseKernel::zero(g)) == 0.0);

    std::mt19937_64 rng(2);
    auto s = random_real(64, rng);
    double l2 = 0.0;
    for (double v : s) l2 += v * v * g.dx();
    for (auto& v : s) v *= std::sqrt(2.0 / l2);
    CHECK(ito_correction(NoiseKernel::from_samples(g, s)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Ito correction equals the explicit basis sum at every grid point") {
    GridSpec g(48, 12.0);
    CellBasis basis(g, 48);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto kernel = NoiseKernel::from_samples(g, random_real(48, rng));
        std::vector<double> sum(48, 0.0);
        for (int k = 0; k < 48; ++k) {
            auto ke = direct_convolution(kernel.samples(), to_complex(basis.function(k)), g.dx());
            for (int i = 0; i < 48; ++i) sum[static_cast<size_t>(i)] += std::norm(ke[static_cast<size_t>(i)]);
        }
        const double m = ito_correction(kernel);
        for (double v : sum) CHECK(std::abs(0.5 * v - m) < 1e-8 * m);
    }
}

TEST_CASE("Hilbert-Schmidt norm of v K") {
    GridSpec g(32, 7.0);
    CellBasis basis(g, 32);
    std::mt19937_64 rng(4);
    auto kernel = NoiseKernel::gaussian(g, 0.6, 1.1);
    CHECK(hs_norm_multiplication(SpectralField(g), kernel, basis) == 0.0);
    for (int trial = 0; trial < 5; ++trial) {
        auto vs = to_complex(random_real(32, rng));
        auto ks = random_real(32, rng);
        auto v = forward_transform(vs, g);
        auto k = NoiseKernel::from_samples(g, ks);
        // dense operator matrix: column k is sqrt(dx) v (K e_k) on the grid
        double dense = 0.0;
        for (int q = 0; q < 32; ++q) {
            auto ke = direct_convolution(ks, to_complex(basis.function(q)), g.dx());
            for (int i = 0; i < 32; ++i) dense += std::norm(std::sqrt(g.dx()) * vs[static_cast<size_t>(i)] * ke[static_cast<size_t>(i)]);
        }
        const double hs = hs_norm_multiplication(v, k, basis);
        CHECK(hs == doctest::Approx(std::sqrt(dense)).epsilon(1e-10));
        CHECK(hs == doctest::Approx(sobolev_norm(v, 0) * sobolev_norm(k.kernel, 0)).epsilon(1e-8));
    }
}

TEST_CASE("cell basis is orthonormal and complete") {
    GridSpec g(40, 5.0);
    CellBasis basis(g, 40);
    std::mt19937_64 rng(5);
    auto f = random_real(40, rng);
    double coef = 0.0, norm = 0.0;
    for (int k = 0; k < 40; ++k) {
        auto e = basis.function(k);
        double inner = 0.0;
        for (int j = 0; j < 40; ++j) inner += f[static_cast<size_t>(j)] * e[static_cast<size_t>(j)] * g.dx();
        coef += inner * inner;
    }
    for (double v : f) norm += v * v * g.dx();
    CHECK(std::abs(coef - norm) < 1e-10 * norm);
    CHECK_THROWS_AS(CellBasis(g, 7), InvalidInput);

    // truncated basis: the identity acquires a defect, reported not hidden
    auto kernel = NoiseKernel::gaussian(g, 0.3, 1.0);
    auto full = basis_square_sum(kernel, basis);
    auto coarse = basis_square_sum(kernel, CellBasis(g, 10));
    const double target = 2.0 * ito_correction(kernel);
    double defect = 0.0;
    for (size_t i = 0; i < full.size(); ++i) {
        CHECK(std::abs(full[i] - target) < 1e-10 * target);
        defect = std::max(defect, std::abs(coarse[i] - target));
    }
    CHECK(defect > 1e-6);
}

TEST_CASE("Wiener increments") {
    auto a = sample_increments(42, 8, 100, 0.01);
    auto b = sample_increments(42, 8, 100, 0.01);
    CHECK(a.increments == b.increments);
    CHECK(sample_increments(43, 8, 100, 0.01).increments != a.increments);
    CHECK_THROWS_AS(sample_increments(1, 8, 100, 0.0), InvalidInput);
    CHECK_THROWS_AS(sample_increments(1, 0, 100, 0.1), InvalidInput);

    auto big = sample_increments(7, 1000, 1000, 1.0);
    double mean = 0.0, var = 0.0;
    for (double v : big.increments) mean += v;
    mean /= 1e6;
    for (double v : big.increments) var += (v - mean) * (v - mean);
    var /= 1e6 - 1;
    CHECK(var >= 0.99);
    CHECK(var <= 1.01);
    CHECK(std::abs(mean) < 4.0 / std::sqrt(1e6));

    auto c = coarsen(a, 4);
    CHECK(c.n_steps == 25);
    CHECK(c.dt == doctest::Approx(0.04));
    CHECK(c(3, 2) == doctest::Approx(a(3, 8) + a(3, 9) + a(3, 10) + a(3, 11)));
}

TEST_CASE("Dirac noise increment") {
    GridSpec g(32, 8.0);
    CellBasis basis(g, 32);
    std::mt19937_64 rng(6);
    auto psi = forward_transform(to_complex(random_real(32, rng)), g);
    auto k1 = NoiseKernel::gaussian(g, 0.7, 0.9);
    std::vector<double> dw(32, 0.0);
    for (auto c : noise_increment_dirac(psi, k1, dw, basis).coeffs) CHECK(std::abs(c) < 1e-14);
    dw = random_real(32, rng);
    for (auto c : noise_increment_dirac(psi, NoiseKernel::zero(g), dw, basis).coeffs) CHECK(std::abs(c) < 1e-14);

    std::vector<double> single(32, 0.0);
    single[9] = 0.37;
    auto inc = inverse_transform(noise_increment_dirac(psi, k1, single, basis));
    auto ke = direct_convolution(k1.samples(), to_complex(basis.function(9)), g.dx());
    auto px = inverse_transform(psi);
    for (int j = 0; j < 32; ++j)
        CHECK(std::abs(inc[static_cast<size_t>(j)] - px[static_cast<size_t>(j)] * ke[static_cast<size_t>(j)] * 0.37) < 1e-12);

    // linear in dW and in the kernel
    auto dw2 = random_real(32, rng);
    std::vector<double> sum(32);
    for (int i = 0; i < 32; ++i) sum[static_cast<size_t>(i)] = 2.0 * dw[static_cast<size_t>(i)] - dw2[static_cast<size_t>(i)];
    auto lhs = noise_increment_dirac(psi, k1, sum, basis);
    auto r1 = noise_increment_dirac(psi, k1, dw, basis);
    auto r2 = noise_increment_dirac(psi, k1, dw2, basis);
    for (int k = 0; k < 32; ++k) CHECK(std::abs(lhs[k] - (2.0 * r1[k] - r2[k])) < 1e-12);
    auto k2 = NoiseKernel::sinc(g, 1.5, 0.4);
    NoiseKernel ksum(k1.kernel + k2.kernel, 1.0);
    auto a = noise_increment_dirac(psi, ksum, dw, basis);
    auto b = noise_increment_dirac(psi, k2, dw, basis);
    for (int k = 0; k < 32; ++k) CHECK(std::abs(a[k] - (r1[k] + b[k])) < 1e-12);
}

TEST_CASE("Klein-Gordon noise increment") {
    GridSpec g(32, 8.0);
    CellBasis basis(g, 32);
    std::vector<double> zero(32, 0.0);
    auto k2 = NoiseKernel::gaussian(g, 0.5, 1.0);
    std::mt19937_64 rng(7);
    auto phi = forward_transform(to_complex(random_real(32, rng)), g);
    for (auto c : noise_increment_kg(phi, k2, zero, basis).coeffs) CHECK(std::abs(c) < 1e-14);

    // phi = 2, flat symbol, one basis mode: 1/2 <xi>^{-1} (2 e_k0)^ dW
    std::vector<cplx> two(32, 2.0);
    SpectralField flat(g);
    for (auto& c : flat.coeffs) c = 1.0;
    std::vector<double> dw(32, 0.0);
    dw[5] = -0.8;
    auto inc = noise_increment_kg(forward_transform(two, g), NoiseKernel(flat, 0.0), dw, basis);
    auto e = forward_transform(to_complex(basis.function(5)), g);
    for (int k = 0; k < 32; ++k)
        CHECK(std::abs(inc[k] - 0.5 / japanese_bracket(g.frequency(k)) * 2.0 * e[k] * -0.8) < 1e-12);

    // ||M2 g||_{H^r} <= 1/2 ||phi K2 dW||_{H^{r-1}}; the ratio is recorded
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        auto p = forward_transform(to_complex(random_real(32, rng)), g);
        auto w = random_real(32, rng);
        auto out = noise_increment_kg(p, k2, w, basis);
        auto raw = noise_increment_dirac(p, k2, w, basis);
        const double r = 1.0 / 3.0;
        worst = std::max(worst, sobolev_norm(out, r) / (0.5 * sobolev_norm(raw, r - 1.0)));
    }
    MESSAGE("kg noise bound constant: " << worst);
    CHECK(worst <= 1.0 + 1e-12);
}

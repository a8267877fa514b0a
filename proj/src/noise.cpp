#include "sdkg/noise.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "sdkg/errors.hpp"

namespace sdkg {

NoiseKernel::NoiseKernel(SpectralField k, double sigma) : kernel(std::move(k)), sobolev_reg(sigma) {}

NoiseKernel NoiseKernel::zero(const GridSpec& grid) { return NoiseKernel(SpectralField(grid), 1.0); }

NoiseKernel NoiseKernel::from_samples(const GridSpec& grid, std::span<const double> samples, double sigma) {
    return NoiseKernel(forward_transform_real(samples, grid), sigma);
}

NoiseKernel NoiseKernel::gaussian(const GridSpec& grid, double width, double amplitude) {
    if (!(width > 0.0)) throw InvalidInput("kernel width must be positive");
    std::vector<double> s(static_cast<size_t>(grid.n_modes));
    for (int j = 0; j < grid.n_modes; ++j) {
        double d = std::min(j, grid.n_modes - j) * grid.dx();
        s[static_cast<size_t>(j)] = amplitude * std::exp(-d * d / (2.0 * width * width));
    }
    return from_samples(grid, s, 1.0);
}

NoiseKernel NoiseKernel::sinc(const GridSpec& grid, double cutoff, double amplitude) {
    if (!(cutoff > 0.0)) throw InvalidInput("kernel cutoff must be positive");
    SpectralField k(grid);
    for (int m = 0; m < grid.n_modes; ++m) {
        if (grid.signed_index(m) == -grid.n_modes / 2) continue;
        if (std::abs(grid.frequency(m)) <= cutoff) k[m] = amplitude;
    }
    return NoiseKernel(std::move(k), 1.0);
}

NoiseKernel NoiseKernel::from_file(const GridSpec& grid, const std::string& path, double sigma) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open kernel file '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                size_t used = 0;
                values.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw InvalidInput("kernel file '" + path + "': bad value '" + cell + "'");
            }
        }
    }
    if (static_cast<int>(values.size()) != grid.n_modes)
        throw InvalidInput("kernel file '" + path + "' has " + std::to_string(values.size()) +
                           " samples, expected n_modes = " + std::to_string(grid.n_modes));
    return from_samples(grid, values, sigma);
}

std::vector<double> NoiseKernel::samples() const {
    auto z = inverse_transform(kernel);
    std::vector<double> out(z.size());
    for (size_t j = 0; j < z.size(); ++j) out[j] = z[j].real();
    return out;
}

bool NoiseKernel::is_zero() const {
    for (const auto& c : kernel.coeffs)
        if (c != cplx(0.0, 0.0)) return false;
    return true;
}

CellBasis::CellBasis(const GridSpec& g, int k) : grid(g), n_basis(k) {
    if (k < 1 || k > g.n_modes || g.n_modes % k != 0)
        throw InvalidInput("n_basis must divide n_modes");
}

std::vector<double> CellBasis::function(int k) const {
    if (k < 0 || k >= n_basis) throw InvalidInput("basis index out of range");
    const int b = cells_per_function();
    std::vector<double> e(static_cast<size_t>(grid.n_modes), 0.0);
    const double h = 1.0 / std::sqrt(b * grid.dx());
    for (int j = k * b; j < (k + 1) * b; ++j) e[static_cast<size_t>(j)] = h;
    return e;
}

WienerIncrements sample_increments(std::uint64_t seed, int K, int n_steps, double dt) {
    if (K < 1) throw InvalidInput("number of basis modes must be >= 1");
    if (n_steps < 1) throw InvalidInput("number of steps must be >= 1");
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    WienerIncrements w{K, n_steps, dt, seed, {}};
    w.increments.resize(static_cast<size_t>(K) * n_steps);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    for (auto& v : w.increments) v = normal(rng);
    return w;
}

WienerIncrements coarsen(const WienerIncrements& w, int factor) {
    if (factor < 1 || w.n_steps % factor != 0)
        throw InvalidInput("coarsening factor must divide the number of steps");
    WienerIncrements c{w.n_basis, w.n_steps / factor, w.dt * factor, w.seed, {}};
    c.increments.assign(static_cast<size_t>(c.n_basis) * c.n_steps, 0.0);
    for (int s = 0; s < w.n_steps; ++s)
        for (int k = 0; k < w.n_basis; ++k)
            c.increments[static_cast<size_t>(s / factor) * c.n_basis + k] += w(k, s);
    return c;
}

SpectralField convolve(const NoiseKernel& k, const SpectralField& f) {
    require_same_grid(k.grid(), f.grid, "convolve");
    SpectralField out(f.grid);
    for (int m = 0; m < f.size(); ++m) out[m] = k.kernel[m] * f[m];
    return out;
}

double ito_correction(const NoiseKernel& k1) {
    double sum = 0.0;
    for (double v : k1.samples()) sum += v * v;
    return 0.5 * sum * k1.grid().dx();
}

namespace {

// g(x_i) = sum over the cells of block 0 of k(x_i - x_m)
std::vector<double> block_kernel(const NoiseKernel& k, const CellBasis& basis) {
    const int n = basis.grid.n_modes;
    const int b = basis.cells_per_function();
    auto ks = k.samples();
    std::vector<double> g(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < b; ++m) g[static_cast<size_t>(i)] += ks[static_cast<size_t>(((i - m) % n + n) % n)];
    return g;
}

void check_basis(const NoiseKernel& k, const CellBasis& basis) {
    require_same_grid(k.grid(), basis.grid, "noise basis");
    if (basis.n_basis < 1) throw InvalidInput("noise basis is empty");
}

}  // namespace

std::vector<double> basis_square_sum(const NoiseKernel& k, const CellBasis& basis) {
    check_basis(k, basis);
    const int n = basis.grid.n_modes;
    const int b = basis.cells_per_function();
    auto g = block_kernel(k, basis);
    // (K e_k)(x_i) = sqrt(dx / b) g(x_i - k b dx)
    const double scale = basis.grid.dx() / b;
    std::vector<double> c(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int q = 0; q < basis.n_basis; ++q) {
            double v = g[static_cast<size_t>(((i - q * b) % n + n) % n)];
            sum += v * v;
        }
        c[static_cast<size_t>(i)] = scale * sum;
    }
    return c;
}

double hs_norm_multiplication(const SpectralField& v, const NoiseKernel& k, const CellBasis& basis) {
    require_same_grid(v.grid, k.grid(), "hs_norm_multiplication");
    auto c = basis_square_sum(k, basis);
    auto vx = inverse_transform(v);
    double sum = 0.0;
    for (size_t i = 0; i < vx.size(); ++i) sum += std::norm(vx[i]) * c[i];
    return std::sqrt(sum * v.grid.dx());
}

std::vector<double> noise_field(const NoiseKernel& k, std::span<const double> dW, const CellBasis& basis) {
    check_basis(k, basis);
    if (static_cast<int>(dW.size()) != basis.n_basis)
        throw InvalidInput("increment vector length does not match n_basis");
    const GridSpec& g = basis.grid;
    const int b = basis.cells_per_function();
    const double h = 1.0 / std::sqrt(b * g.dx());
    std::vector<cplx> w(static_cast<size_t>(g.n_modes));
    for (int j = 0; j < g.n_modes; ++j) w[static_cast<size_t>(j)] = h * dW[static_cast<size_t>(j / b)];
    SpectralField z = convolve(k, forward_transform(w, g));
    auto zx = inverse_transform(z);
    std::vector<double> out(zx.size());
    for (size_t j = 0; j < zx.size(); ++j) out[j] = zx[j].real();
    return out;
}

SpectralField noise_increment_dirac(const SpectralField& psi_other, const NoiseKernel& k1,
                                    std::span<const double> dW, const CellBasis& basis) {
    require_same_grid(psi_other.grid, k1.grid(), "noise_increment_dirac");
    auto zeta = noise_field(k1, dW, basis);
    auto px = inverse_transform(psi_other);
    for (size_t j = 0; j < px.size(); ++j) px[j] *= zeta[j];
    return forward_transform(px, psi_other.grid);
}

SpectralField noise_increment_kg(const SpectralField& phi, const NoiseKernel& k2,
                                 std::span<const double> dW, const CellBasis& basis) {
    require_same_grid(phi.grid, k2.grid(), "noise_increment_kg");
    auto zeta = noise_field(k2, dW, basis);
    auto px = inverse_transform(phi);
    for (size_t j = 0; j < px.size(); ++j) px[j] *= zeta[j];
    SpectralField out = forward_transform(px, phi.grid);
    for (int m = 0; m < out.size(); ++m) out[m] *= 0.5 / japanese_bracket(phi.grid.frequency(m));
    return out;
}

}  // namespace sdkg

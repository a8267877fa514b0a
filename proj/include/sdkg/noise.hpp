#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdkg/grid.hpp"

namespace sdkg {

// Real convolution kernel k_j; K_j f = k_j * f.
struct NoiseKernel {
    SpectralField kernel;
    double sobolev_reg = 1.0;

    NoiseKernel() = default;
    NoiseKernel(SpectralField k, double sigma);

    static NoiseKernel zero(const GridSpec& grid);
    static NoiseKernel from_samples(const GridSpec& grid, std::span<const double> samples,
                                    double sigma = 1.0);
    // amplitude * exp(-d(x)^2 / (2 width^2)), d the periodic distance to 0
    static NoiseKernel gaussian(const GridSpec& grid, double width, double amplitude = 1.0);
    // k^(xi) = amplitude for |xi| <= cutoff
    static NoiseKernel sinc(const GridSpec& grid, double cutoff, double amplitude = 1.0);
    // CSV with n_modes real physical-space samples
    static NoiseKernel from_file(const GridSpec& grid, const std::string& path, double sigma = 1.0);

    const GridSpec& grid() const { return kernel.grid; }
    std::vector<double> samples() const;
    bool is_zero() const;
};

// Normalized indicators of blocks of n_modes / n_basis consecutive grid
// cells.  n_basis = n_modes is the complete cell basis.
struct CellBasis {
    GridSpec grid;
    int n_basis = 0;

    CellBasis() = default;
    CellBasis(const GridSpec& g, int k);

    int cells_per_function() const { return grid.n_modes / n_basis; }
    std::vector<double> function(int k) const;
};

struct WienerIncrements {
    int n_basis = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> increments;  // step-major: increments[step * n_basis + k]

    double operator()(int k, int step) const {
        return increments[static_cast<size_t>(step) * n_basis + k];
    }
    std::span<const double> column(int step) const {
        return {increments.data() + static_cast<size_t>(step) * n_basis, static_cast<size_t>(n_basis)};
    }
};

WienerIncrements sample_increments(std::uint64_t seed, int K, int n_steps, double dt);
// Sums consecutive groups of `factor` steps (same Brownian path, coarser dt).
WienerIncrements coarsen(const WienerIncrements& w, int factor);

SpectralField convolve(const NoiseKernel& k, const SpectralField& f);
// 1/2 ||k||_{L^2}^2 by spatial quadrature
double ito_correction(const NoiseKernel& k1);
// sum_k (K e_k)(x)^2 at every grid point
std::vector<double> basis_square_sum(const NoiseKernel& k, const CellBasis& basis);
// (sum_k ||v K e_k||^2)^{1/2}
double hs_norm_multiplication(const SpectralField& v, const NoiseKernel& k, const CellBasis& basis);
// physical samples of sum_k (K e_k)(x) dW_k
std::vector<double> noise_field(const NoiseKernel& k, std::span<const double> dW, const CellBasis& basis);

// psi_other(x) * sum_k (K1 e_k)(x) dW_k
SpectralField noise_increment_dirac(const SpectralField& psi_other, const NoiseKernel& k1,
                                    std::span<const double> dW, const CellBasis& basis);
// 1/2 <D>^{-1} (phi * sum_k (K2 e_k) dW_k)
SpectralField noise_increment_kg(const SpectralField& phi, const NoiseKernel& k2,
                                 std::span<const double> dW, const CellBasis& basis);

}  // namespace sdkg

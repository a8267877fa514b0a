#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace sdkg {

using cplx = std::complex<double>;

// Periodic grid x_j = j*dx on a torus of length L.  Fourier coefficients are
// stored in FFT order: slot k carries frequency 2*pi*k/L for k < n/2 and
// 2*pi*(k - n)/L otherwise.
struct GridSpec {
    int n_modes = 256;
    double domain_length = 32.0 * std::numbers::pi;

    GridSpec() = default;
    GridSpec(int n, double length);

    double dx() const { return domain_length / n_modes; }
    double x(int j) const { return j * dx(); }
    int signed_index(int k) const { return k < n_modes / 2 ? k : k - n_modes; }
    int slot(int signed_k) const { return signed_k >= 0 ? signed_k : signed_k + n_modes; }
    double frequency(int k) const {
        return 2.0 * std::numbers::pi * signed_index(k) / domain_length;
    }
    std::vector<double> frequencies() const;
    // slot of -xi_k (the -n/2 mode maps to itself)
    int mirror(int k) const { return (n_modes - k) % n_modes; }

    bool operator==(const GridSpec&) const = default;
};

inline double japanese_bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coeffs;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g) : grid(g), coeffs(static_cast<size_t>(g.n_modes)) {}
    SpectralField(const GridSpec& g, std::vector<cplx> c);

    int size() const { return grid.n_modes; }
    cplx& operator[](int k) { return coeffs[static_cast<size_t>(k)]; }
    const cplx& operator[](int k) const { return coeffs[static_cast<size_t>(k)]; }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(cplx c);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx c, SpectralField a);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

// f^(xi_k) = dx * sum_j f(x_j) exp(-i xi_k x_j)
SpectralField forward_transform(std::span<const cplx> samples, const GridSpec& grid);
SpectralField forward_transform_real(std::span<const double> samples, const GridSpec& grid);
// f(x_j) = (1/L) sum_k f^(xi_k) exp(i xi_k x_j)
std::vector<cplx> inverse_transform(const SpectralField& field);

// (sum_k <xi_k>^{2s} |f^(xi_k)|^2 dxi/(2 pi))^{1/2}, dxi = 2 pi / L
double sobolev_norm(const SpectralField& field, double s);

// 2/3 rule: zero every mode with |k| > n/3.
void dealias(SpectralField& field);
std::vector<double> dealias_mask(const GridSpec& grid);

// coefficients of the complex conjugate function: conj(f^(-xi))
SpectralField conjugate_field(const SpectralField& field);

}  // namespace sdkg

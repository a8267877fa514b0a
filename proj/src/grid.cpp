#include "sdkg/grid.hpp"

#include <string>

#include "sdkg/errors.hpp"
#include "sdkg/fft.hpp"

namespace sdkg {

GridSpec::GridSpec(int n, double length) : n_modes(n), domain_length(length) {
    if (n < 8 || n % 2 != 0) throw InvalidInput("n_modes must be an even integer >= 8");
    if (!(length > 0.0) || !std::isfinite(length))
        throw InvalidInput("domain_length must be positive");
}

std::vector<double> GridSpec::frequencies() const {
    std::vector<double> xi(static_cast<size_t>(n_modes));
    for (int k = 0; k < n_modes; ++k) xi[static_cast<size_t>(k)] = frequency(k);
    return xi;
}

SpectralField::SpectralField(const GridSpec& g, std::vector<cplx> c) : grid(g), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != g.n_modes)
        throw InvalidInput("coefficient count does not match n_modes");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(grid, o.grid, "field addition");
    for (size_t k = 0; k < coeffs.size(); ++k) coeffs[k] += o.coeffs[k];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(grid, o.grid, "field subtraction");
    for (size_t k = 0; k < coeffs.size(); ++k) coeffs[k] -= o.coeffs[k];
    return *this;
}

SpectralField& SpectralField::operator*=(cplx c) {
    for (auto& v : coeffs) v *= c;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx c, SpectralField a) { return a *= c; }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw InvalidInput(std::string("grid mismatch in ") + what);
}

SpectralField forward_transform(std::span<const cplx> samples, const GridSpec& grid) {
    if (static_cast<int>(samples.size()) != grid.n_modes)
        throw InvalidInput("sample count " + std::to_string(samples.size()) +
                           " does not match n_modes " + std::to_string(grid.n_modes));
    SpectralField out(grid);
    fft::forward(samples.data(), out.coeffs.data(), grid.n_modes);
    const double dx = grid.dx();
    for (auto& c : out.coeffs) c *= dx;
    return out;
}

SpectralField forward_transform_real(std::span<const double> samples, const GridSpec& grid) {
    std::vector<cplx> z(samples.begin(), samples.end());
    return forward_transform(z, grid);
}

std::vector<cplx> inverse_transform(const SpectralField& field) {
    std::vector<cplx> out(field.coeffs.size());
    fft::backward(field.coeffs.data(), out.data(), field.grid.n_modes);
    const double scale = 1.0 / field.grid.domain_length;
    for (auto& v : out) v *= scale;
    return out;
}

double sobolev_norm(const SpectralField& field, double s) {
    const GridSpec& g = field.grid;
    double sum = 0.0;
    for (int k = 0; k < g.n_modes; ++k) {
        double w = s == 0.0 ? 1.0 : std::pow(japanese_bracket(g.frequency(k)), 2.0 * s);
        sum += w * std::norm(field[k]);
    }
    return std::sqrt(sum / g.domain_length);
}

std::vector<double> dealias_mask(const GridSpec& grid) {
    std::vector<double> mask(static_cast<size_t>(grid.n_modes));
    for (int k = 0; k < grid.n_modes; ++k)
        mask[static_cast<size_t>(k)] = 3 * std::abs(grid.signed_index(k)) > grid.n_modes ? 0.0 : 1.0;
    return mask;
}

void dealias(SpectralField& field) {
    const GridSpec& g = field.grid;
    for (int k = 0; k < g.n_modes; ++k)
        if (3 * std::abs(g.signed_index(k)) > g.n_modes) field[k] = 0.0;
}

SpectralField conjugate_field(const SpectralField& field) {
    SpectralField out(field.grid);
    for (int k = 0; k < field.size(); ++k) out[k] = std::conj(field[field.grid.mirror(k)]);
    return out;
}

}  // namespace sdkg

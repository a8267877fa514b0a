#include "sdkg/bourgain.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "sdkg/errors.hpp"
#include "sdkg/fft.hpp"

namespace sdkg {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void check_b(double b) {
    if (!(b > 0.0 && b < 0.5)) throw InvalidInput("b must lie in (0, 1/2)");
}

std::vector<cplx> node_cells(std::span<const cplx> nodes) {
    std::vector<cplx> cells(nodes.size() - 1);
    for (size_t c = 0; c + 1 < nodes.size(); ++c) cells[c] = 0.5 * (nodes[c] + nodes[c + 1]);
    return cells;
}

// Image-summed weight of the sharp-cutoff H^b integrand on one period of
// the padded DFT:  W(tau) = sum_m sinc^2((x + 2 pi m)/2) <(x + 2 pi m)/dt>^{2b},
// x = tau dt, with an integral tail beyond |m| = images.
std::vector<double> image_weights(int np, double dt, double b) {
    constexpr int images = 40;
    std::vector<double> w(static_cast<size_t>(np));
    const double a = two_pi * (images + 0.5);
    for (int k = 0; k < np; ++k) {
        const int sk = k < np / 2 ? k : k - np;
        const double x = two_pi * sk / np;
        double sum = 0.0;
        for (int m = -images; m <= images; ++m) {
            const double y = x + two_pi * m;
            const double sinc = y == 0.0 ? 1.0 : std::sin(0.5 * y) / (0.5 * y);
            const double tau = y / dt;
            sum += sinc * sinc * std::pow(1.0 + tau * tau, b);
        }
        const double s2 = std::sin(0.5 * x);
        const double tail = 4.0 * s2 * s2 * std::pow(dt, -2.0 * b) *
                            (std::pow(a + x, 2.0 * b - 1.0) + std::pow(a - x, 2.0 * b - 1.0)) /
                            (two_pi * (1.0 - 2.0 * b));
        w[static_cast<size_t>(k)] = sum + tail;
    }
    return w;
}

std::shared_ptr<const std::vector<double>> cached_weights(int np, double dt, double b) {
    static std::mutex mutex;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const std::vector<double>>> cache;
    auto key = std::make_tuple(np, dt, b);
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto w = std::make_shared<const std::vector<double>>(image_weights(np, dt, b));
    std::lock_guard<std::mutex> lock(mutex);
    if (cache.size() > 64) cache.clear();
    return cache.emplace(key, w).first->second;
}

double slob_kernel(int d, double dt, double b) {
    return std::pow(dt, 1.0 - 2.0 * b) * std::pow(static_cast<double>(d), -1.0 - 2.0 * b);
}

}  // namespace

NormSpec::NormSpec(double s_, double b_, DispersionSymbol h, double S_, double T_)
    : s(s_), b(b_), symbol(h), S(S_), T(T_) {
    check_b(b);
    if (!(S >= 0.0) || !(T > S)) throw InvalidInput("norm interval must satisfy 0 <= S < T");
}

double SpaceTimePath::dt() const {
    if (times.size() < 2) throw InvalidInput("path needs at least two time samples");
    return times[1] - times[0];
}

void SpaceTimePath::validate() const {
    if (times.size() != slices.size()) throw InvalidInput("path needs one slice per time");
    if (times.empty()) throw InvalidInput("path is empty");
    for (const auto& s : slices) require_same_grid(grid, s.grid, "space-time path");
    if (times.size() < 2) return;
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw InvalidInput("path times must be increasing");
    for (size_t j = 1; j < times.size(); ++j)
        if (std::abs(times[j] - times[j - 1] - h) > 1e-9 * h)
            throw InvalidInput("path times must be uniformly spaced");
}

std::pair<int, int> SpaceTimePath::interval_nodes(double S, double T) const {
    validate();
    const double h = dt();
    const double tol = 1e-7 * h;
    auto find = [&](double t) {
        double q = (t - times.front()) / h;
        long n = std::lround(q);
        if (n < 0 || n >= static_cast<long>(times.size()) || std::abs(times[static_cast<size_t>(n)] - t) > tol)
            throw InvalidInput("interval outside path");
        return static_cast<int>(n);
    };
    int i0 = find(S), i1 = find(T);
    if (i1 <= i0) throw InvalidInput("interval outside path");
    return {i0, i1};
}

CutoffSpec::CutoffSpec(double r) : R(r) {
    if (!(r > 0.0)) throw InvalidInput("truncation_R must be positive");
}

namespace detail {

int padded_length(int cells, double dt) {
    // the Riemann sum in tau converges like exp(-(padded length - interval length))
    const double need = std::max(8.0 * cells, cells + 20.0 / dt);
    int np = 1;
    while (np < need) np *= 2;
    return np;
}

double hb_squared_cells(std::span<const cplx> cells, double dt, double b) {
    if (cells.empty()) throw InvalidInput("H^b norm needs at least two samples");
    if (!(std::abs(b) < 0.5)) throw InvalidInput("b must lie in (-1/2, 1/2)");
    bool zero = std::all_of(cells.begin(), cells.end(), [](cplx v) { return v == cplx(0.0, 0.0); });
    if (zero) return 0.0;
    return hb_squared_cells_padded(cells, dt, b, padded_length(static_cast<int>(cells.size()), dt));
}

std::vector<double> hb_weights(int np, double dt, double b) { return *cached_weights(np, dt, b); }

double hb_squared_cells_padded(std::span<const cplx> cells, double dt, double b, int np) {
    if (np < static_cast<int>(cells.size())) throw InvalidInput("padded length shorter than the series");
    auto w = cached_weights(np, dt, b);
    std::vector<cplx> buf(static_cast<size_t>(np), cplx(0.0, 0.0));
    std::copy(cells.begin(), cells.end(), buf.begin());
    fft::forward(buf.data(), buf.data(), np);
    double sum = 0.0;
    for (int k = 0; k < np; ++k) sum += std::norm(buf[static_cast<size_t>(k)]) * (*w)[static_cast<size_t>(k)];
    // (1/2pi) sum |dt P|^2 W dtau, dtau = 2 pi / (np dt)
    return sum * dt / np;
}

double slobodeckij_squared_cells(std::span<const cplx> cells, double dt, double b) {
    const int m = static_cast<int>(cells.size());
    if (m < 2) return 0.0;
    if (m <= 64) {
        double sum = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                sum += 2.0 * std::norm(cells[static_cast<size_t>(i)] - cells[static_cast<size_t>(j)]) *
                       slob_kernel(j - i, dt, b);
        return sum;
    }
    std::vector<double> prefix(static_cast<size_t>(m) + 1, 0.0);
    for (int c = 0; c < m; ++c) prefix[static_cast<size_t>(c) + 1] = prefix[static_cast<size_t>(c)] + std::norm(cells[static_cast<size_t>(c)]);
    int nf = 1;
    while (nf < 2 * m) nf *= 2;
    std::vector<cplx> buf(static_cast<size_t>(nf), cplx(0.0, 0.0));
    std::copy(cells.begin(), cells.end(), buf.begin());
    fft::forward(buf.data(), buf.data(), nf);
    for (auto& v : buf) v = std::norm(v);
    fft::backward(buf.data(), buf.data(), nf);
    double sum = 0.0;
    for (int d = 1; d < m; ++d) {
        const double sq = prefix[static_cast<size_t>(m - d)] + prefix[static_cast<size_t>(m)] - prefix[static_cast<size_t>(d)] -
                          2.0 * buf[static_cast<size_t>(d)].real() / nf;
        sum += 2.0 * std::max(sq, 0.0) * slob_kernel(d, dt, b);
    }
    return sum;
}

std::vector<std::vector<cplx>> weighted_cells(const SpaceTimePath& path, double s, DispersionSymbol h,
                                              int i0, int i1) {
    const GridSpec& g = path.grid;
    const int m = i1 - i0;
    std::vector<std::vector<cplx>> out(static_cast<size_t>(g.n_modes));
    const double inv_sqrt_l = 1.0 / std::sqrt(g.domain_length);
    for (int k = 0; k < g.n_modes; ++k) {
        const double xi = g.frequency(k);
        const double w = (s == 0.0 ? 1.0 : std::pow(japanese_bracket(xi), s)) * inv_sqrt_l;
        const double hk = evaluate(h, xi);
        bool any = false;
        for (int j = i0; j <= i1 && !any; ++j) any = path.slices[static_cast<size_t>(j)][k] != cplx(0.0, 0.0);
        if (!any) continue;
        std::vector<cplx> nodes(static_cast<size_t>(m) + 1);
        for (int j = i0; j <= i1; ++j)
            nodes[static_cast<size_t>(j - i0)] =
                w * std::polar(1.0, path.times[static_cast<size_t>(j)] * hk) * path.slices[static_cast<size_t>(j)][k];
        out[static_cast<size_t>(k)] = node_cells(nodes);
    }
    return out;
}

double xsb_norm_any(const SpaceTimePath& path, double s, double b, DispersionSymbol h, int i0, int i1) {
    const double dt = path.dt();
    auto cells = weighted_cells(path, s, h, i0, i1);
    double sum = 0.0;
    for (const auto& c : cells)
        if (!c.empty()) sum += hb_squared_cells(c, dt, b);
    return std::sqrt(sum);
}

double modified_norm_squared(const SpaceTimePath& path, double s, double b, DispersionSymbol h, int i0, int i1) {
    const double dt = path.dt();
    const double len = path.times[static_cast<size_t>(i1)] - path.times[static_cast<size_t>(i0)];
    auto cells = weighted_cells(path, s, h, i0, i1);
    double l2 = 0.0, slob = 0.0;
    for (const auto& c : cells) {
        if (c.empty()) continue;
        for (const auto& v : c) l2 += std::norm(v) * dt;
        slob += slobodeckij_squared_cells(c, dt, b);
    }
    return std::pow(len, -2.0 * b) * l2 + slob;
}

}  // namespace detail

double hb_norm_sharp_cutoff(std::span<const cplx> phi, double dt, double b) {
    check_b(b);
    if (phi.size() < 2) throw InvalidInput("H^b norm needs at least two samples");
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    auto cells = node_cells(phi);
    return std::sqrt(detail::hb_squared_cells(cells, dt, b));
}

double hb_norm_sharp_cutoff(std::span<const double> times, std::span<const cplx> phi, double b) {
    if (times.size() != phi.size()) throw InvalidInput("one sample per time required");
    if (times.size() < 2) throw InvalidInput("H^b norm needs at least two samples");
    const double h = times[1] - times[0];
    if (!(h > 0.0)) throw InvalidInput("nonuniform times");
    for (size_t j = 1; j < times.size(); ++j)
        if (std::abs(times[j] - times[j - 1] - h) > 1e-9 * h) throw InvalidInput("nonuniform times");
    return hb_norm_sharp_cutoff(phi, h, b);
}

double xsb_norm(const SpaceTimePath& path, const NormSpec& spec) {
    auto [i0, i1] = path.interval_nodes(spec.S, spec.T);
    return detail::xsb_norm_any(path, spec.s, spec.b, spec.symbol, i0, i1);
}

double modified_norm(const SpaceTimePath& path, const NormSpec& spec) {
    auto [i0, i1] = path.interval_nodes(spec.S, spec.T);
    return std::sqrt(detail::modified_norm_squared(path, spec.s, spec.b, spec.symbol, i0, i1));
}

double slobodeckij_seminorm(std::span<const cplx> phi, double dt, double b) {
    if (phi.size() < 2) throw InvalidInput("Slobodeckij seminorm needs at least two samples");
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    check_b(b);
    auto cells = node_cells(phi);
    return std::sqrt(detail::slobodeckij_squared_cells(cells, dt, b));
}

double theta_profile(double x) {
    const double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double u = a - 1.0;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double theta_cutoff(double x, const CutoffSpec& spec) { return theta_profile(x / spec.R); }

double theta_state_cutoff(const std::array<const SpaceTimePath*, 3>& paths, const CutoffSpec& spec,
                          const std::array<NormSpec, 3>& specs) {
    double arg = 0.0;
    for (int i = 0; i < 3; ++i) {
        const SpaceTimePath* p = paths[static_cast<size_t>(i)];
        if (p == nullptr || p->times.empty()) throw InvalidInput("empty path");
        p->validate();
        if (p->times.size() < 2) continue;
        const NormSpec& ns = specs[static_cast<size_t>(i)];
        auto [i0, i1] = p->interval_nodes(ns.S, ns.T);
        arg += detail::modified_norm_squared(*p, ns.s, ns.b, ns.symbol, i0, i1);
    }
    return theta_cutoff(arg, spec);
}

double stopping_time(std::span<const double> times, std::span<const double> f, double R, double T) {
    if (times.size() != f.size() || times.empty()) throw InvalidInput("one value per time required");
    if (f.front() != 0.0) throw InvalidInput("running norm must vanish at the initial time");
    if (!(R > 0.0)) throw InvalidInput("truncation_R must be positive");
    for (size_t j = 1; j < f.size(); ++j) {
        if (f[j] >= R) {
            const double a = f[j - 1], c = f[j];
            const double frac = c > a ? (R - a) / (c - a) : 1.0;
            return std::min(T, times[j - 1] + frac * (times[j] - times[j - 1]));
        }
    }
    return T;
}

RunningModifiedNorm::RunningModifiedNorm(const GridSpec& grid, double s, double b, DispersionSymbol h,
                                         double t0, double dt)
    : grid_(grid), b_(b), t0_(t0), dt_(dt) {
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    const double inv_sqrt_l = 1.0 / std::sqrt(grid.domain_length);
    for (int k = 0; k < grid.n_modes; ++k) {
        const double xi = grid.frequency(k);
        weight_.push_back((s == 0.0 ? 1.0 : std::pow(japanese_bracket(xi), s)) * inv_sqrt_l);
        freq_h_.push_back(evaluate(h, xi));
    }
    kern_.push_back(0.0);
}

void RunningModifiedNorm::push(const SpectralField& u) {
    require_same_grid(grid_, u.grid, "running norm");
    const int n = grid_.n_modes;
    const double t = t0_ + static_cast<double>(nodes_.size()) * dt_;
    std::vector<double> node(2 * static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        cplx v = weight_[static_cast<size_t>(k)] * std::polar(1.0, t * freq_h_[static_cast<size_t>(k)]) * u[k];
        node[2 * static_cast<size_t>(k)] = v.real();
        node[2 * static_cast<size_t>(k) + 1] = v.imag();
    }
    nodes_.push_back(std::move(node));
    if (nodes_.size() < 2) return;

    const auto& a = nodes_[nodes_.size() - 2];
    const auto& c = nodes_.back();
    std::vector<double> cell(a.size());
    double cn = 0.0;
    for (size_t i = 0; i < cell.size(); ++i) {
        cell[i] = 0.5 * (a[i] + c[i]);
        cn += cell[i] * cell[i];
    }
    const size_t idx = cells_.size();
    while (kern_.size() <= idx) kern_.push_back(slob_kernel(static_cast<int>(kern_.size()), dt_, b_));
    double slob = 0.0;
    const size_t len = cell.size();
    size_t q0 = 0;
    if (frozen_ > 0 && idx >= frozen_ && idx - frozen_ < hist_acc_.size()) {
        const auto& acc = hist_acc_[idx - frozen_];
        double dot = 0.0;
        for (size_t i = 0; i < len; ++i) dot += cell[i] * acc[i];
        slob = cn * hist_kern_[idx - frozen_] + hist_norm_[idx - frozen_] - 2.0 * dot;
        q0 = frozen_;
    }
    for (size_t q = q0; q < idx; ++q) {
        const double* p = cells_[q].data();
        double dot = 0.0;
        for (size_t i = 0; i < len; ++i) dot += cell[i] * p[i];
        slob += (cn + cell_norm_[q] - 2.0 * dot) * kern_[idx - q];
    }
    cells_.push_back(std::move(cell));
    cell_norm_.push_back(cn);
    l2_cum_.push_back((l2_cum_.empty() ? 0.0 : l2_cum_.back()) + cn * dt_);
    slob_cum_.push_back((slob_cum_.empty() ? 0.0 : slob_cum_.back()) + 2.0 * slob);
}

void RunningModifiedNorm::truncate(size_t n) {
    if (n >= nodes_.size()) return;
    nodes_.resize(n);
    const size_t nc = n == 0 ? 0 : n - 1;
    cells_.resize(nc);
    cell_norm_.resize(nc);
    l2_cum_.resize(nc);
    slob_cum_.resize(nc);
    if (nc < frozen_) {
        frozen_ = 0;
        hist_acc_.clear();
    }
}

void RunningModifiedNorm::prepare(size_t horizon) {
    frozen_ = cells_.size();
    hist_acc_.assign(horizon, std::vector<double>(2 * static_cast<size_t>(grid_.n_modes), 0.0));
    hist_norm_.assign(horizon, 0.0);
    hist_kern_.assign(horizon, 0.0);
    if (frozen_ == 0) return;
    while (kern_.size() <= frozen_ + horizon) kern_.push_back(slob_kernel(static_cast<int>(kern_.size()), dt_, b_));
    for (size_t j = 0; j < horizon; ++j) {
        const size_t idx = frozen_ + j;
        auto& acc = hist_acc_[j];
        for (size_t q = 0; q < frozen_; ++q) {
            const double w = kern_[idx - q];
            const double* p = cells_[q].data();
            for (size_t i = 0; i < acc.size(); ++i) acc[i] += w * p[i];
            hist_norm_[j] += w * cell_norm_[q];
            hist_kern_[j] += w;
        }
    }
}

double RunningModifiedNorm::value() const {
    if (cells_.empty()) return 0.0;
    const double len = static_cast<double>(cells_.size()) * dt_;
    return std::pow(len, -2.0 * b_) * l2_cum_.back() + std::max(slob_cum_.back(), 0.0);
}

}  // namespace sdkg

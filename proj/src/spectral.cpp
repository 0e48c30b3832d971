#include "sww/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"

namespace sww {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

SpectralConfig::SpectralConfig(int K, int grid, double sobolev_s, double dealias)
    : n_modes(K), grid_size(grid), s(sobolev_s), dealias_factor(dealias) {
    validate();
}

void SpectralConfig::validate() const {
    if (n_modes < 4) throw ValidationError("SpectralConfig: n_modes must be >= 4");
    if (dealias_factor < 1.5) throw ValidationError("SpectralConfig: dealias_factor must be >= 1.5");
    const int min_grid = static_cast<int>(std::ceil(dealias_factor * (2 * n_modes + 1)));
    if (grid_size < min_grid)
        throw ValidationError("SpectralConfig: grid_size " + std::to_string(grid_size) +
                              " below dealias requirement " + std::to_string(min_grid));
    if (grid_size % 2 != 0) throw ValidationError("SpectralConfig: grid_size must be even");
    if (s < 0.0) throw ValidationError("SpectralConfig: s must be nonnegative");
}

PeriodicField::PeriodicField(const SpectralConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    c_.assign(static_cast<size_t>(2 * cfg_.n_modes + 1), {0.0, 0.0});
}

complexd PeriodicField::coeff(int k) const {
    const int K = cfg_.n_modes;
    if (k < -K || k > K) return {0.0, 0.0};
    return c_[static_cast<size_t>(k + K)];
}

void PeriodicField::set_coeff(int k, complexd value) {
    const int K = cfg_.n_modes;
    if (k == 0) throw ValidationError("PeriodicField: k = 0 coefficient is fixed at zero");
    if (k < -K || k > K) throw ValidationError("PeriodicField: mode out of range");
    c_[static_cast<size_t>(k + K)] = value;
    c_[static_cast<size_t>(-k + K)] = std::conj(value);
}

bool PeriodicField::is_zero(double tol) const {
    return std::all_of(c_.begin(), c_.end(),
                       [tol](complexd z) { return std::abs(z) <= tol; });
}

void PeriodicField::symmetrize() {
    const int K = cfg_.n_modes;
    c_[static_cast<size_t>(K)] = {0.0, 0.0};
    for (int k = 1; k <= K; ++k) {
        const complexd avg = 0.5 * (c_[static_cast<size_t>(k + K)] +
                                    std::conj(c_[static_cast<size_t>(-k + K)]));
        c_[static_cast<size_t>(k + K)] = avg;
        c_[static_cast<size_t>(-k + K)] = std::conj(avg);
    }
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
    if (!(cfg_ == other.cfg_)) throw ValidationError("PeriodicField: config mismatch");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
    if (!(cfg_ == other.cfg_)) throw ValidationError("PeriodicField: config mismatch");
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
    return *this;
}

PeriodicField& PeriodicField::operator*=(double scale) {
    for (auto& z : c_) z *= scale;
    return *this;
}

double PeriodicField::synthesize(double x) const {
    const int K = cfg_.n_modes;
    // Real form: sum_{k>=1} 2 Re(c_k e^{ikx}).
    double acc = 0.0;
    const complexd rot = std::polar(1.0, x);
    complexd e = rot;
    for (int k = 1; k <= K; ++k) {
        acc += 2.0 * (c_[static_cast<size_t>(k + K)] * e).real();
        e *= rot;
    }
    return acc;
}

std::vector<double> PeriodicField::grid_values() const {
    const int K = cfg_.n_modes;
    const int n = cfg_.grid_size;
    std::vector<complexd> half(static_cast<size_t>(n / 2 + 1), {0.0, 0.0});
    for (int k = 1; k <= K; ++k) half[static_cast<size_t>(k)] = c_[static_cast<size_t>(k + K)];
    std::vector<double> vals;
    detail::complex_to_real(half, vals, n);
    return vals;
}

PeriodicField PeriodicField::translate(double phi) const {
    PeriodicField out(cfg_);
    const int K = cfg_.n_modes;
    for (int k = 1; k <= K; ++k) {
        const complexd factor = std::polar(1.0, k * phi);
        out.c_[static_cast<size_t>(k + K)] = c_[static_cast<size_t>(k + K)] * factor;
        out.c_[static_cast<size_t>(-k + K)] = std::conj(out.c_[static_cast<size_t>(k + K)]);
    }
    return out;
}

double PeriodicField::max_abs() const {
    const int n = 2 * cfg_.grid_size;
    std::vector<complexd> half(static_cast<size_t>(n / 2 + 1), {0.0, 0.0});
    const int K = cfg_.n_modes;
    for (int k = 1; k <= K; ++k) half[static_cast<size_t>(k)] = c_[static_cast<size_t>(k + K)];
    std::vector<double> vals;
    detail::complex_to_real(half, vals, n);
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

State::State(PeriodicField e, PeriodicField x) : eta(std::move(e)), xi(std::move(x)) {
    if (!(eta.config() == xi.config()))
        throw ValidationError("State: eta and xi must share one SpectralConfig");
}

State& State::operator+=(const State& o) {
    eta += o.eta;
    xi += o.xi;
    return *this;
}
State& State::operator-=(const State& o) {
    eta -= o.eta;
    xi -= o.xi;
    return *this;
}
State& State::operator*=(double s) {
    eta *= s;
    xi *= s;
    return *this;
}

State State::translate(double phi) const { return {eta.translate(phi), xi.translate(phi)}; }

PeriodicField derivative(const PeriodicField& f) {
    PeriodicField out(f.config());
    const int K = f.config().n_modes;
    for (int k = 1; k <= K; ++k)
        out.set_coeff(k, complexd(0.0, static_cast<double>(k)) * f.coeff(k));
    return out;
}

ProductResult analyze(const std::vector<double>& grid_values, const SpectralConfig& cfg) {
    const int n = cfg.grid_size;
    if (static_cast<int>(grid_values.size()) != n)
        throw ValidationError("analyze: sample count does not match grid_size");
    std::vector<complexd> half;
    detail::real_to_complex(grid_values, half, n);
    ProductResult res{PeriodicField(cfg), half[0].real()};
    for (int k = 1; k <= cfg.n_modes; ++k) res.field.set_coeff(k, half[static_cast<size_t>(k)]);
    return res;
}

ProductResult product(const PeriodicField& a, const PeriodicField& b) {
    if (!(a.config() == b.config())) throw ValidationError("product: config mismatch");
    const auto va = a.grid_values();
    const auto vb = b.grid_values();
    std::vector<double> prod(va.size());
    for (size_t i = 0; i < va.size(); ++i) prod[i] = va[i] * vb[i];
    return analyze(prod, a.config());
}

double sobolev_norm(const PeriodicField& f, double s) {
    const int K = f.config().n_modes;
    double acc = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double w = std::pow(1.0 + static_cast<double>(k) * k, s);
        acc += 2.0 * w * std::norm(f.coeff(k));
    }
    return std::sqrt(acc);
}

PeriodicField flat_dn_apply(const PeriodicField& xi, double h) {
    if (h <= 0.0) throw ValidationError("flat_dn_apply: h must be positive");
    PeriodicField out(xi.config());
    const int K = xi.config().n_modes;
    for (int k = 1; k <= K; ++k)
        out.set_coeff(k, k * std::tanh(h * k) * xi.coeff(k));
    return out;
}

double integrate(const std::vector<double>& grid_values) {
    if (grid_values.empty()) return 0.0;
    double acc = 0.0;
    for (double v : grid_values) acc += v;
    return two_pi * acc / static_cast<double>(grid_values.size());
}

double inner(const PeriodicField& f, const PeriodicField& g) {
    const int K = f.config().n_modes;
    double acc = 0.0;
    for (int k = 1; k <= K; ++k) acc += 2.0 * (f.coeff(k) * std::conj(g.coeff(k))).real();
    return two_pi * acc;
}

double inner(const State& u, const State& v) { return inner(u.eta, v.eta) + inner(u.xi, v.xi); }

double norm_X(const State& u, double s) {
    const double ne = sobolev_norm(u.eta, s + 1.0);
    const double nx = sobolev_norm(u.xi, s + 1.0);
    return std::sqrt(ne * ne + nx * nx);
}

double norm_Y(const State& u, double s) {
    const double ne = sobolev_norm(u.eta, s);
    const double nx = sobolev_norm(u.xi, s);
    return std::sqrt(ne * ne + nx * nx);
}

PeriodicField make_cos(const SpectralConfig& cfg, int k, double amplitude) {
    PeriodicField f(cfg);
    f.set_coeff(k, {0.5 * amplitude, 0.0});
    return f;
}

PeriodicField make_sin(const SpectralConfig& cfg, int k, double amplitude) {
    PeriodicField f(cfg);
    f.set_coeff(k, {0.0, -0.5 * amplitude});
    return f;
}

double spectral_tail_fraction(const PeriodicField& f) {
    const int K = f.config().n_modes;
    const int cut = K - K / 4;
    double total = 0.0, tail = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double m = std::norm(f.coeff(k));
        total += m;
        if (k > cut) tail += m;
    }
    return total > 0.0 ? tail / total : 0.0;
}

double spectral_tail_fraction(const State& u) {
    const int K = u.config().n_modes;
    const int cut = K - K / 4;
    double total = 0.0, tail = 0.0;
    for (int k = 1; k <= K; ++k) {
        const double m = std::norm(u.eta.coeff(k)) + std::norm(u.xi.coeff(k));
        total += m;
        if (k > cut) tail += m;
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace sww

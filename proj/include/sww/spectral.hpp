#pragma once

// Real periodic spectral toolkit on S^1 = R/2piZ: zero-mean fields stored as
// conjugate-symmetric Fourier coefficients k = -K..K, grid transforms,
// spectral calculus, Sobolev norms and the flat-strip Dirichlet-Neumann
// symbol |k| tanh(h|k|).

#include <complex>
#include <vector>

#include "sww/errors.hpp"

namespace sww {

using complexd = std::complex<double>;

struct SpectralConfig {
    int n_modes = 64;             // highest retained wavenumber K
    int grid_size = 256;          // physical collocation points (even)
    double s = 1.0;               // Sobolev index for |.|_s norms
    double dealias_factor = 1.5;  // grid_size >= dealias_factor*(2K+1)

    SpectralConfig() = default;
    SpectralConfig(int K, int grid, double sobolev_s = 1.0, double dealias = 1.5);

    bool operator==(const SpectralConfig&) const = default;

    void validate() const;
};

// Zero-mean real 2pi-periodic function as truncated Fourier coefficients.
// coeffs[-k] = conj(coeffs[k]) and coeffs[0] = 0 are maintained invariants.
class PeriodicField {
public:
    PeriodicField() = default;
    explicit PeriodicField(const SpectralConfig& cfg);

    const SpectralConfig& config() const { return cfg_; }
    int n_modes() const { return cfg_.n_modes; }

    complexd coeff(int k) const;
    // Sets coeff(k) and coeff(-k) = conj(value). k = 0 is rejected.
    void set_coeff(int k, complexd value);

    bool is_zero(double tol = 0.0) const;

    PeriodicField& operator+=(const PeriodicField& other);
    PeriodicField& operator-=(const PeriodicField& other);
    PeriodicField& operator*=(double scale);
    friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
    friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
    friend PeriodicField operator*(double s, PeriodicField f) { return f *= s; }

    // Pointwise evaluation sum_k c_k e^{ikx}. Imaginary part discarded
    // (bounded by rounding for symmetric coefficients).
    double synthesize(double x) const;

    // Samples on the uniform grid x_j = 2pi j / grid_size.
    std::vector<double> grid_values() const;

    // Translate by phi: u(x) -> u(x + phi), i.e. c_k *= e^{ik phi}.
    PeriodicField translate(double phi) const;

    // l-infinity norm sampled on a refined grid (2x collocation).
    double max_abs() const;

    // Raw storage, index k + n_modes. Mutators must re-establish symmetry
    // via symmetrize().
    std::vector<complexd>& raw() { return c_; }
    const std::vector<complexd>& raw() const { return c_; }
    void symmetrize();

private:
    SpectralConfig cfg_;
    std::vector<complexd> c_;  // size 2K+1
};

// Pair u = (eta, xi) sharing one resolution; the solver unknown.
struct State {
    PeriodicField eta;
    PeriodicField xi;

    State() = default;
    explicit State(const SpectralConfig& cfg) : eta(cfg), xi(cfg) {}
    State(PeriodicField e, PeriodicField x);

    const SpectralConfig& config() const { return eta.config(); }

    State& operator+=(const State& o);
    State& operator-=(const State& o);
    State& operator*=(double s);
    friend State operator+(State a, const State& b) { return a += b; }
    friend State operator-(State a, const State& b) { return a -= b; }
    friend State operator*(double s, State u) { return u *= s; }

    State translate(double phi) const;
};

// Result of a pointwise product: zero-mean projection plus the mean that the
// projection removed (products of zero-mean fields are not zero-mean).
struct ProductResult {
    PeriodicField field;
    double mean = 0.0;
};

// --- fourier_core operations -------------------------------------------------

// Spectral derivative c_k -> ik c_k.
PeriodicField derivative(const PeriodicField& f);

// Pointwise product on the dealiased grid, projected back to K modes.
ProductResult product(const PeriodicField& a, const PeriodicField& b);

// sqrt( sum_k (1+k^2)^s |c_k|^2 )
double sobolev_norm(const PeriodicField& f, double s);

// Flat Dirichlet-Neumann symbol: c_k -> |k| tanh(h|k|) c_k.
PeriodicField flat_dn_apply(const PeriodicField& xi, double h);

// Periodic trapezoid rule: 2pi * mean(values).
double integrate(const std::vector<double>& grid_values);

// Grid -> coefficients; modes above K are discarded, the mean is returned
// separately and the k=0 coefficient zeroed.
ProductResult analyze(const std::vector<double>& grid_values, const SpectralConfig& cfg);

// L^2(S^1) pairing <f, g> = int f g dx = 2pi sum_k f_k conj(g_k).
double inner(const PeriodicField& f, const PeriodicField& g);
double inner(const State& u, const State& v);

// Norms on X = H_0^{s+1} x H_0^{s+1} and Y = H_0^s x H_0^s.
double norm_X(const State& u, double s);
double norm_Y(const State& u, double s);

// Convenience builders for tests and setup code.
PeriodicField make_cos(const SpectralConfig& cfg, int k, double amplitude = 1.0);
PeriodicField make_sin(const SpectralConfig& cfg, int k, double amplitude = 1.0);

// Fraction of squared l2 coefficient mass carried by the top quarter of the
// retained modes; resolution guard used by branch tracing.
double spectral_tail_fraction(const PeriodicField& f);
double spectral_tail_fraction(const State& u);

}  // namespace sww

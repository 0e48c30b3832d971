#pragma once

// Bottom-adapted harmonic current: the 2pi-periodic Green function of the
// lower half strip with Neumann condition at y = -h (method of images), the
// boundary kernels A[b] and B[b], and the harmonic function Phi_b on
// C_b = { y > -h + b(x) } with N_b . grad(Phi_b + x) = 0 on the bottom and
// grad Phi_b -> 0 as y -> +infinity.

#include <vector>

#include "sww/spectral.hpp"

namespace sww {

// Green function with Neumann condition at y = -h:
//   G(dx,y,y') = (1/4pi)[ ln(sin^2(dx/2) + sinh^2((y-y')/2))
//              + ln(sin^2(dx/2) + sinh^2((y+y'+2h)/2)) ].
// Singular when dx = 0 (mod 2pi) and y = y'.
struct GreenKernel {
    double h;

    explicit GreenKernel(double depth);

    double operator()(double dx, double y, double y_prime) const;
    // Partial derivatives of the periodic log primitive; used by the layer
    // kernels and by tests of the image symmetry.
    static double log_term(double u, double v);     // (1/4pi) ln(sin^2(u/2)+sinh^2(v/2))
    static double log_term_du(double u, double v);  // d/du of log_term
    static double log_term_dv(double u, double v);  // d/dv of log_term
};

double green_kernel(double dx, double y, double y_prime, double h);

// A[b](x,y) = int G(x-x', y, -h+b(x')) b'(x') dx'.
// Interior points use the periodic trapezoid rule; points on the bottom use
// log-singularity subtraction with spectral quadrature weights for the
// singular part.
double kernel_a(const PeriodicField& b, double x, double y, double h,
                int quadrature_size = 512);

// B[b] phi (x,y) = int [N_b . grad' G](x-x', y, -h+b(x')) phi(x') dx' for
// strictly interior (x,y); trace phi sampled on the uniform quadrature grid.
double kernel_b_apply(const PeriodicField& b, const std::vector<double>& phi_on_grid,
                      double x, double y, double h);

enum class TraceSolver {
    kDense,          // collocation least-squares solve (default)
    kNeumannSeries,  // flat-symbol preconditioned fixed point
};

// Evaluator for Phi_b and its derivatives anywhere in C_b. Immutable after
// construction; evaluations are pure.
class HarmonicCurrent {
public:
    // Zero current (b = 0, Phi_0 = 0).
    HarmonicCurrent(const PeriodicField& b, double h);

    const PeriodicField& bottom() const { return b_; }
    double depth() const { return h_; }
    int quadrature_size() const { return quadrature_size_; }
    bool is_trivial() const { return trivial_; }
    double solve_residual() const { return residual_; }

    // phi(x') = Phi_b(x', -h+b(x')) on the uniform quadrature grid.
    const std::vector<double>& bottom_trace() const { return trace_; }
    double trace_max_abs() const;

    // d^{p+q} Phi_b / dx^p dy^q at a point strictly inside C_b, p + q <= 3.
    double evaluate(double x, double y, int dx_order = 0, int dy_order = 0) const;

    // Batched evaluation along a curve y = ys[i] at x = xs[i].
    std::vector<double> evaluate_many(const std::vector<double>& xs,
                                      const std::vector<double>& ys, int dx_order,
                                      int dy_order) const;

    // Harmonic-mode coefficients gamma_k of
    //   Phi_b = sum_{k != 0} gamma_k e^{ikx} e^{-|k|(y+h)}  (gamma_{-k} = conj).
    const std::vector<complexd>& mode_coefficients() const { return gamma_; }

    // Residual of the bottom Neumann condition N_b . grad(Phi_b + x) sampled
    // on a refined grid; cheap a-posteriori check.
    double neumann_residual(int refine = 2) const;

    friend HarmonicCurrent solve_bottom_trace(const PeriodicField& b, double h, double tol,
                                              int quadrature_size, TraceSolver solver);

private:
    PeriodicField b_;
    double h_ = 1.0;
    int quadrature_size_ = 512;
    bool trivial_ = true;
    double residual_ = 0.0;
    std::vector<complexd> gamma_;  // k = 1..Kq
    std::vector<double> trace_;
};

// Solves the bottom boundary equation for the trace of Phi_b. Throws
// ConvergenceError when the residual stalls above tol (|b| too large for the
// method) and ValidationError when b is not resolved on the quadrature grid.
HarmonicCurrent solve_bottom_trace(const PeriodicField& b, double h, double tol = 1e-12,
                                   int quadrature_size = 512,
                                   TraceSolver solver = TraceSolver::kDense);

}  // namespace sww

#pragma once

// Dirichlet-Neumann operator G(eta;b) xi = N_eta . grad Phi |_{y=eta} for the
// fluid layer -h+b(x) < y < eta(x): Phi harmonic, Dirichlet xi on top, zero
// Neumann flux through the bottom. The layer is mapped onto S^1 x [0,1] by
// y = -h + b + sigma(eta + h - b) and discretized with Fourier collocation in
// x and Chebyshev collocation in sigma; the flat-layer symbol preconditions a
// GMRES solve of the transformed Laplace problem.

#include <memory>

#include "sww/spectral.hpp"

namespace sww {

struct FluidDomain {
    PeriodicField eta;
    PeriodicField b;
    double h = 1.0;

    FluidDomain(PeriodicField surface, PeriodicField bottom, double depth);

    // min over the grid of eta + h - b; positive for a nonempty layer.
    double min_layer_depth() const;
};

struct DnSolveReport {
    double residual = 0.0;                 // relative residual of the mapped system
    double bottom_neumann_residual = 0.0;  // relative residual of the bottom rows
    double surface_mean = 0.0;             // mean of N_eta.grad Phi before projection
    int vertical_points = 0;
    int iterations = 0;
};

struct DnResult {
    PeriodicField value;  // zero-mean projection of N_eta.grad Phi on the surface
    DnSolveReport report;
};

class DnSolver {
public:
    struct Options {
        int vertical_points = 32;
        double tolerance = 1e-12;
        int max_iterations = 400;
        int restart = 40;
        bool retry_with_refinement = true;  // double vertical_points once on failure
    };

    DnSolver(const SpectralConfig& cfg, double h);
    DnSolver(const SpectralConfig& cfg, double h, Options opt);
    ~DnSolver();
    DnSolver(DnSolver&&) noexcept;
    DnSolver& operator=(DnSolver&&) noexcept;

    double depth() const;

    DnResult apply(const FluidDomain& domain, const PeriodicField& xi) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
DnResult dn_apply(const FluidDomain& domain, const PeriodicField& xi,
                  int vertical_points = 32);

// Numerically extracted first-order term of G(eta;0) in eta, by Richardson
// extrapolation in the amplitude of eta. Consistency probe for dn_apply.
PeriodicField dn_flat_bottom_linearized(const PeriodicField& eta, const PeriodicField& xi,
                                        double h);

}  // namespace sww

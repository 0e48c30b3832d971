#pragma once

// Independent oracles used only by tests:
//  - a second-order finite-difference solve of the mapped Laplace problem
//    (cross-checks the production Dirichlet-Neumann solver),
//  - a Chebyshev-Fourier collocation solve of the bottom strip problem with a
//    radiation (decay) condition on an artificial flat top (cross-checks the
//    harmonic-current construction).

#include <memory>
#include <vector>

#include "sww/spectral.hpp"

namespace sww::testing {

// N_eta.grad Phi on the surface grid (nx values), from a 2nd-order FD
// discretization of the sigma-mapped problem. Output is not zero-mean
// projected.
std::vector<double> fd_dn_surface(const PeriodicField& eta, const PeriodicField& b, double h,
                                  const PeriodicField& xi, int nx, int nsigma);

// Richardson combination (4 f(h/2) - f(h))/3 of fd_dn_surface on doubled
// grids, sampled on the coarse nx grid.
std::vector<double> fd_dn_surface_refined(const PeriodicField& eta, const PeriodicField& b,
                                          double h, const PeriodicField& xi, int nx, int nsigma);

// Strip solve of: Laplace(Phi) = 0 in -h+b(x) < y < y_top, bottom Neumann
// N_b.grad Phi = -b'(x), top radiation d_y Phi + |D| Phi = 0 (harmonic decay
// above y_top), mean of Phi on the top pinned to zero... the same constant
// gauge as the production path is restored by compare-after-mean-removal.
class StripPhiOracle {
public:
    StripPhiOracle(const PeriodicField& b, double h, double y_top, int nx, int nsigma);
    ~StripPhiOracle();
    StripPhiOracle(StripPhiOracle&&) noexcept;

    // Phi at a point of the strip (below y_top) or above it (harmonic
    // continuation from the top trace).
    double value(double x, double y) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace sww::testing

#pragma once

// Continuation of critical points of H: the trivial branch for admissible
// (b, c), the excluded-interval map around the critical speeds, and the
// flat-bottom Stokes branches with orbit non-degeneracy diagnostics.

#include <optional>
#include <string>
#include <vector>

#include "sww/hamiltonian.hpp"

namespace sww {

struct ContinuationResult {
    State u;
    double residual_norm = 0.0;
    int newton_iters = 0;
    double smallest_hessian_sv = 0.0;
    PhysicalParams params;
};

struct BranchPoint {
    double c = 0.0;
    double amplitude = 0.0;  // |eta|_inf
    State u;
    double orbit_nondegeneracy = 0.0;
    double arclength = 0.0;
    double residual = 0.0;
};

struct ExcludedInterval {
    int k = 0;
    double c_k = 0.0;
    double half_width = 0.0;
};

// Half-widths w_k = sqrt(b_norm/(gamma k^3)) around each c_k with c_k within
// [0, c_star]; empty for b_norm = 0.
std::vector<ExcludedInterval> admissible_region(double b_norm, double g, double h,
                                                double c_star, int k_max, double gamma = 1.0);

bool is_admissible(double c, const std::vector<ExcludedInterval>& excluded);

struct TrivialContinuationOptions {
    double tol = 1e-11;
    int max_iters = 60;
    // gamma > 0 enables the excluded-interval precondition check.
    double gamma_exclusion = 0.0;
    std::optional<State> initial_guess;
    const Eigen::MatrixXd* cached_dn_block = nullptr;
};

// Continues u = 0 to the steady wave u_b at fixed (b, c): fixed point of
// u -> u - D^2H(0;b,c)^{-1} grad H(u;b,c), with a fresh-Hessian Newton polish
// if the frozen iteration stalls. Throws ConvergenceError outside the
// admissible region.
ContinuationResult continue_trivial(const SpectralConfig& cfg, const PhysicalParams& params,
                                    const TrivialContinuationOptions& opt = {});

// Smallest singular value of the Hessian at u_c restricted to the orthogonal
// complement W of the orbit tangent d_x u_c. reduced_modes > 0 assembles only
// wavenumbers <= reduced_modes and floors the result with the analytic
// |lambda_k^-(c)| of the untouched modes. For u_c = 0 the projection is
// skipped (W is the whole space).
double orbit_nondegeneracy(const HamiltonianEvaluator& eval, const State& u_c,
                           int reduced_modes = 0);

struct StokesOptions {
    int steps = 60;
    double ds = 2.5e-3;        // pseudo-arclength step
    double a0 = 1e-3;          // starting amplitude along the kernel direction
    double tol = 1e-10;        // corrector residual tolerance on |grad H|_Y
    int max_corrector = 40;
    double target_amplitude = 0.05;  // stop once |eta|_inf reaches this
    double tail_threshold = 1e-8;    // spectral tail energy guard
    int nondegeneracy_modes = 16;    // reduced assembly size for diagnostics
    bool record_nondegeneracy = true;
};

struct StokesBranch {
    std::vector<BranchPoint> points;
    std::string stop_reason;
};

// Traces the Stokes branch bifurcating from (u, c) = (0, c_k) for a flat
// bottom, pseudo-arclength predictor + Newton corrector with the phase
// condition <u, d_x u_prev> = 0.
StokesBranch stokes_branch(const SpectralConfig& cfg, int k, const PhysicalParams& params,
                           const StokesOptions& opt = {});

// Fits the exclusion constant gamma from the measured smallest singular value
// of D^2 H(0;b,c) near c_k for a reference bottom amplitude.
double calibrate_gamma(const SpectralConfig& cfg, double g, double h,
                       double reference_amplitude = 0.005, int k_probe = 1);

}  // namespace sww

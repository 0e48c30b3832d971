#pragma once

// Persistence of steady waves near a non-degenerate S^1-orbit: equivariant
// slice coordinates upsilon(theta, w) around the orbit of u_c, the solve for
// the normal component w(theta; b), the reduced Hamiltonian h_b(theta) on the
// orbit circle, and its critical points -- the steady waves that survive a
// small bottom perturbation.

#include <memory>
#include <vector>

#include "sww/hamiltonian.hpp"

namespace sww {

struct SliceChart {
    State u_c;        // orbit base point, grad H(u_c; 0, c) = 0
    State tangent;    // d_x u_c normalized in L^2
    int minimal_period_p = 1;
    double c = 0.0;

    double fundamental_cell() const;  // 2pi / p
};

// Tangent normalization plus minimal-period detection (gcd of the Fourier
// support of u_c above a relative floor).
SliceChart build_slice_chart(const State& u_c, double c);

// upsilon(theta, w) = sum_k e^{i theta k} (u_hat_{c,k} + w_hat_k) e^{ikx},
// i.e. the translate of u_c + w by theta. Exact at the coefficient level.
State slice_embed(const SliceChart& chart, double theta, const State& w);

struct ReducedSample {
    double theta = 0.0;
    double h_value = 0.0;
    State w;  // normal component in the fixed frame, <w, tangent> = 0
    int newton_iters = 0;
    double residual = 0.0;  // |P_W grad H|_Y at the solution
};

enum class ExtremumKind { kMax, kMin, kFlat };

struct PersistentWave {
    State u;
    double theta = 0.0;
    ExtremumKind kind = ExtremumKind::kFlat;
    double h_value = 0.0;
    double w_norm = 0.0;     // |w(theta_j; b)|_X
    double residual = 0.0;   // full |grad H|_Y including the tangential part
};

// Shared context for the Lyapunov-Schmidt solves: holds the evaluator for the
// perturbed problem and the factored bordered Hessian at the orbit base
// point, reused as a frozen Newton matrix across theta (the b = 0 Hessian is
// exactly rotation-equivariant, so the fixed-frame equations see the same
// matrix at every theta up to O(|b| + |w|)).
class PersistenceContext {
public:
    PersistenceContext(const HamiltonianEvaluator& eval, SliceChart chart,
                       double nondegeneracy_threshold = 1e-6);
    ~PersistenceContext();
    PersistenceContext(PersistenceContext&&) noexcept;

    const SliceChart& chart() const;
    const HamiltonianEvaluator& evaluator() const;
    double orbit_smallest_sv() const;

    ReducedSample solve_normal(double theta, const State& w_init, double tol = 1e-11,
                               int max_iters = 60) const;

    // h_b'(theta) = <grad H(upsilon), d_theta upsilon>; d_theta upsilon equals
    // d_x upsilon at the coefficient level.
    double tangential_derivative(double theta, const State& w) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Uniform sweep of [0, 2pi/p) with warm starts; h_b extends to [0, 2pi) by
// Z_p periodicity.
std::vector<ReducedSample> reduced_hamiltonian(const PersistenceContext& ctx, int n_theta,
                                               double tol = 1e-11);

struct PersistOptions {
    double refine_tol = 1e-9;     // full-gradient residual bound for returned waves
    double flat_tol_scale = 1e-10;  // flatness threshold, scaled by 1 + |H|
    int max_refine_iters = 80;
};

// Locates the critical points of h_b by sign changes of the discrete
// derivative and secant refinement on the tangential derivative. Throws
// ConvergenceError when h_b is flat beyond tolerance (b = 0 or unresolved).
std::vector<PersistentWave> find_persistent_waves(const PersistenceContext& ctx,
                                                  const std::vector<ReducedSample>& samples,
                                                  const PersistOptions& opt = {});

}  // namespace sww

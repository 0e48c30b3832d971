#pragma once

// Hamiltonian H(eta,xi;b,c) = Hhat + Htilde for steady waves over a periodic
// bottom, its exact gradient, the interaction expansion terms, and the
// Hessian at the trivial state: block operator L(c) with 2x2 symbols A_k(c)
// plus the bottom perturbation T(b,c).

#include <Eigen/Dense>
#include <array>
#include <optional>

#include "sww/bottom_current.hpp"
#include "sww/dirichlet_neumann.hpp"
#include "sww/spectral.hpp"

namespace sww {

struct PhysicalParams {
    double g = 1.0;   // gravity
    double h = 1.0;   // mean depth
    double c = 0.0;   // mean current speed
    PeriodicField b;  // bottom variation around y = -h

    PhysicalParams(double gravity, double depth, double speed, PeriodicField bottom);

    void validate() const;
};

// c_k = sqrt(g tanh(h k)/k); strictly decreasing in k.
double critical_speed(int k, double g, double h);

// Eigenvalues (lambda_plus, lambda_minus) of A_k(c); lambda_minus(c_k) = 0.
std::pair<double, double> hessian_eigenvalues(int k, double c, double g, double h);

// det A_k(c) = g|k|tanh(h|k|) - (ck)^2.
double hessian_block_det(int k, double c, double g, double h);

// Dense matrix of the ik-block difference G(0;b) - G(0;0) acting on the xi
// component, in the packed cos/sin basis. Independent of c; reusable across
// speed scans.
Eigen::MatrixXd dn_difference_block(const SpectralConfig& cfg, const PeriodicField& b, double h);

class HessianAtZero {
public:
    HessianAtZero(const SpectralConfig& cfg, double g, double h, double c,
                  Eigen::MatrixXd t_matrix);

    // A_k(c) = [[g, ick], [-ick, |k|tanh(h|k|)]].
    Eigen::Matrix2cd block(int k) const;

    const Eigen::MatrixXd& t_matrix() const { return t_; }
    const Eigen::MatrixXd& matrix() const { return full_; }  // L(c) + T(b,c)

    State apply(const State& u) const;
    double smallest_singular_value() const;

private:
    SpectralConfig cfg_;
    double g_, h_, c_;
    Eigen::MatrixXd t_;
    Eigen::MatrixXd full_;
};

// Packed real coefficient basis: index 4(k-1)+{0,1,2,3} carries the cos/sin
// amplitudes of eta and xi at wavenumber k. <u,v>_L2 = pi * dot(pack u, pack v).
Eigen::VectorXd pack_state(const State& u);
State unpack_state(const Eigen::VectorXd& v, const SpectralConfig& cfg);

class HamiltonianEvaluator {
public:
    struct Options {
        bool bottom_interaction = true;  // false: traveling-wave variant, Htilde = 0
        DnSolver::Options dn;
        double fd_scale = 1e-4;  // step for Hessian finite differences
    };

    HamiltonianEvaluator(const SpectralConfig& cfg, PhysicalParams params,
                         HarmonicCurrent current);
    HamiltonianEvaluator(const SpectralConfig& cfg, PhysicalParams params,
                         HarmonicCurrent current, Options opt);

    const SpectralConfig& config() const { return cfg_; }
    const PhysicalParams& params() const { return params_; }
    const HarmonicCurrent& current() const { return current_; }
    const DnSolver& dn_solver() const { return dn_; }
    const Options& options() const { return opt_; }

    struct Parts {
        double total = 0.0;
        double hhat = 0.0;
        double htilde = 0.0;
    };

    double value(const State& u) const;
    Parts value_parts(const State& u) const;

    // (d_eta H, d_xi H), both zero-mean projected.
    State gradient(const State& u) const;

    // (Htilde_1(u), Htilde_2(u)) with Phi_b and derivatives taken at y = 0.
    std::pair<double, double> interaction_expansion(const State& u) const;

    // L(c) + T(b,c); pass a cached DN difference block to skip the 2K solves.
    HessianAtZero hessian_at_zero(const Eigen::MatrixXd* cached_dn_block = nullptr) const;

    // Central finite difference of the gradient with Richardson refinement.
    State hessian_apply(const State& u_base, const State& v, bool richardson = true) const;

    // Dense Hessian at u_base in the packed basis (column-by-column FD).
    Eigen::MatrixXd assemble_hessian(const State& u_base, bool richardson = false) const;

private:
    SpectralConfig cfg_;
    PhysicalParams params_;
    HarmonicCurrent current_;
    Options opt_;
    DnSolver dn_;

    struct SurfaceFields;
    SurfaceFields surface_fields(const std::vector<double>& eta_values) const;
};

}  // namespace sww

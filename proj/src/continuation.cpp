#include "sww/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace sww {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormal basis of the orthogonal complement of t_hat inside R^n.
MatrixXd complement_basis(const VectorXd& t_hat) {
    const auto n = t_hat.size();
    Eigen::HouseholderQR<MatrixXd> qr(t_hat);
    MatrixXd q = qr.householderQ();
    return q.rightCols(n - 1);
}

}  // namespace

std::vector<ExcludedInterval> admissible_region(double b_norm, double g, double h,
                                                double c_star, int k_max, double gamma) {
    if (b_norm < 0.0) throw ValidationError("admissible_region: b_norm must be >= 0");
    if (gamma <= 0.0) throw ValidationError("admissible_region: gamma must be positive");
    std::vector<ExcludedInterval> out;
    if (b_norm == 0.0) return out;
    for (int k = 1; k <= k_max; ++k) {
        const double ck = critical_speed(k, g, h);
        if (ck > c_star) continue;
        const double w = std::sqrt(b_norm / (gamma * k * k * k));
        out.push_back({k, ck, w});
    }
    return out;
}

bool is_admissible(double c, const std::vector<ExcludedInterval>& excluded) {
    return std::none_of(excluded.begin(), excluded.end(), [c](const ExcludedInterval& e) {
        return std::abs(c - e.c_k) < e.half_width;
    });
}

ContinuationResult continue_trivial(const SpectralConfig& cfg, const PhysicalParams& params,
                                    const TrivialContinuationOptions& opt) {
    if (opt.gamma_exclusion > 0.0) {
        const double bn = sobolev_norm(params.b, cfg.s + 1.0);
        const auto excl = admissible_region(bn, params.g, params.h,
                                            critical_speed(1, params.g, params.h) + 1.0,
                                            cfg.n_modes, opt.gamma_exclusion);
        if (!is_admissible(params.c, excl))
            throw ConvergenceError("continue_trivial: c inside an excluded interval around a c_k");
    }

    HarmonicCurrent current = solve_bottom_trace(params.b, params.h);
    HamiltonianEvaluator eval(cfg, params, std::move(current));

    HessianAtZero h0 = eval.hessian_at_zero(opt.cached_dn_block);
    Eigen::PartialPivLU<MatrixXd> lu(h0.matrix());

    ContinuationResult res{State(cfg), 0.0, 0, h0.smallest_singular_value(), params};
    State u = opt.initial_guess.value_or(State(cfg));

    bool polished = false;
    Eigen::PartialPivLU<MatrixXd> lu_polish;
    double prev = 1e300;
    for (int iter = 0; iter <= opt.max_iters; ++iter) {
        State r = eval.gradient(u);
        const double rnorm = norm_Y(r, cfg.s);
        res.residual_norm = rnorm;
        res.newton_iters = iter;
        if (rnorm < opt.tol) {
            res.u = u;
            return res;
        }
        if (!std::isfinite(rnorm) || rnorm > 1e6)
            throw ConvergenceError("continue_trivial: iteration diverged (c likely too close to a c_k)");
        // Frozen-Hessian fixed point stalls once the contraction rate is too
        // weak; switch to a fresh Newton matrix at the current iterate.
        if (!polished && iter > 6 && rnorm > 0.5 * prev) {
            lu_polish.compute(eval.assemble_hessian(u));
            polished = true;
        }
        prev = rnorm;
        const VectorXd step =
            polished ? lu_polish.solve(pack_state(r)) : lu.solve(pack_state(r));
        u -= unpack_state(step, cfg);
    }
    throw ConvergenceError("continue_trivial: no convergence in " +
                           std::to_string(opt.max_iters) + " iterations (residual " +
                           std::to_string(res.residual_norm) + ")");
}

double orbit_nondegeneracy(const HamiltonianEvaluator& eval, const State& u_c,
                           int reduced_modes) {
    const auto& cfg = eval.config();
    const int K = cfg.n_modes;
    const int kr = reduced_modes > 0 ? std::min(reduced_modes, K) : K;

    // Reduced-space Hessian: columns over wavenumbers <= kr.
    const int dim = 4 * kr;
    MatrixXd hess(dim, dim);
    for (int k = 1; k <= kr; ++k) {
        for (int part = 0; part < 4; ++part) {
            State basis(cfg);
            if (part == 0) basis.eta = make_cos(cfg, k);
            if (part == 1) basis.eta = make_sin(cfg, k);
            if (part == 2) basis.xi = make_cos(cfg, k);
            if (part == 3) basis.xi = make_sin(cfg, k);
            const VectorXd col = pack_state(eval.hessian_apply(u_c, basis, false));
            hess.col(4 * (k - 1) + part) = col.head(dim);
        }
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    State tangent{derivative(u_c.eta), derivative(u_c.xi)};
    VectorXd t = pack_state(tangent).head(dim);
    double sv_w;
    if (t.norm() < 1e-14) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(hess, Eigen::EigenvaluesOnly);
        sv_w = es.eigenvalues().cwiseAbs().minCoeff();
    } else {
        t.normalize();
        const MatrixXd q = complement_basis(t);
        const MatrixXd restricted = q.transpose() * hess * q;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(restricted, Eigen::EigenvaluesOnly);
        sv_w = es.eigenvalues().cwiseAbs().minCoeff();
    }

    if (kr == K) return sv_w;
    double floor_high = 1e300;
    for (int k = kr + 1; k <= K; ++k) {
        const auto [lp, lm] = hessian_eigenvalues(k, eval.params().c, eval.params().g,
                                                  eval.params().h);
        floor_high = std::min(floor_high, std::min(std::abs(lp), std::abs(lm)));
    }
    return std::min(sv_w, floor_high);
}

namespace {

// Bordered corrector matrix for the Stokes branch:
//   [ L(c)       d_c gradH   t_phase ] [du ]   [ -gradH - mu t_phase ]
//   [ t_phase^T  0           0       ] [dc ] = [ -<u, t_phase>       ]
//   [ tan_u^T    tan_c       0       ] [dmu]   [ -arclength residual ]
MatrixXd bordered_matrix(const SpectralConfig& cfg, double g, double h, double c,
                         const VectorXd& dcg, const VectorXd& phase_dir,
                         const VectorXd& tan_u, double tan_c) {
    const int K = cfg.n_modes;
    const int n = 4 * K;
    MatrixXd a = MatrixXd::Zero(n + 2, n + 2);
    for (int k = 1; k <= K; ++k) {
        const double lam = k * std::tanh(h * k);
        const double ck = c * k;
        const int o = 4 * (k - 1);
        a(o + 0, o + 0) = g;
        a(o + 1, o + 1) = g;
        a(o + 2, o + 2) = lam;
        a(o + 3, o + 3) = lam;
        a(o + 0, o + 3) = ck;
        a(o + 3, o + 0) = ck;
        a(o + 1, o + 2) = -ck;
        a(o + 2, o + 1) = -ck;
    }
    a.col(n).head(n) = dcg;
    a.col(n + 1).head(n) = phase_dir;
    a.row(n).head(n) = phase_dir.transpose();
    a.row(n + 1).head(n) = tan_u.transpose();
    a(n + 1, n) = tan_c;
    return a;
}

}  // namespace

StokesBranch stokes_branch(const SpectralConfig& cfg, int k, const PhysicalParams& params,
                           const StokesOptions& opt) {
    if (!params.b.is_zero()) throw ValidationError("stokes_branch: requires a flat bottom");
    if (k < 1 || 4 * k > cfg.n_modes)
        throw ValidationError("stokes_branch: need 1 <= k <= n_modes/4");

    const double g = params.g, h = params.h;
    const double ck = critical_speed(k, g, h);

    HarmonicCurrent trivial(params.b, h);
    PhysicalParams p0(g, h, ck, params.b);
    HamiltonianEvaluator eval(cfg, p0, std::move(trivial));

    // Kernel direction of A_k(c_k): eta = cos kx, xi = -(g/(c_k k)) sin kx.
    State dir(cfg);
    dir.eta = make_cos(cfg, k);
    dir.xi = make_sin(cfg, k, -g / (ck * k));

    const int n = 4 * cfg.n_modes;
    StokesBranch branch;

    auto gradient_at = [&](const State& u, double c) {
        PhysicalParams p(g, h, c, params.b);
        HarmonicCurrent cur(params.b, h);
        HamiltonianEvaluator e(cfg, p, std::move(cur));
        return e.gradient(u);
    };

    auto corrector = [&](State& u, double& c, const State& phase_ref, const State& tan_state,
                         double tan_c, const State& pred_u, double pred_c,
                         bool arclength_row) -> bool {
        const VectorXd phase_dir = pack_state({derivative(phase_ref.eta), derivative(phase_ref.xi)});
        const VectorXd tan_u = pack_state(tan_state);
        double mu = 0.0;
        for (int it = 0; it < opt.max_corrector; ++it) {
            const State grad = gradient_at(u, c);
            const VectorXd gv = pack_state(grad);
            const VectorXd uv = pack_state(u);
            const double phase_res = phase_dir.dot(uv);
            const double arc_res = arclength_row
                                       ? tan_u.dot(uv - pack_state(pred_u)) + tan_c * (c - pred_c)
                                       : uv.dot(pack_state(dir)) - pack_state(pred_u).dot(pack_state(dir));
            const double rnorm = norm_Y(grad, cfg.s);
            if (rnorm < opt.tol && std::abs(phase_res) < 1e-12 && std::abs(arc_res) < 1e-12)
                return true;

            const State dcg_state{derivative(u.xi), -1.0 * derivative(u.eta)};
            const VectorXd dcg = pack_state(dcg_state);
            MatrixXd a = bordered_matrix(cfg, g, h, c, dcg, phase_dir,
                                         arclength_row ? tan_u : pack_state(dir),
                                         arclength_row ? tan_c : 0.0);
            VectorXd rhs(n + 2);
            rhs.head(n) = -(gv + mu * phase_dir);
            rhs[n] = -phase_res;
            rhs[n + 1] = -arc_res;
            const VectorXd sol = a.partialPivLu().solve(rhs);
            u += unpack_state(sol.head(n), cfg);
            c += sol[n];
            mu += sol[n + 1];
            if (!std::isfinite(c)) return false;
        }
        return false;
    };

    // First point: amplitude pinned along the kernel direction, c free.
    State u = opt.a0 * dir;
    double c = ck;
    {
        State pred = u;
        if (!corrector(u, c, u, dir, 0.0, pred, c, false))
            throw ConvergenceError("stokes_branch: failed to settle the first branch point");
    }

    double arclen = 0.0;
    auto push_point = [&](const State& up, double cp) {
        BranchPoint bp;
        bp.c = cp;
        bp.u = up;
        bp.amplitude = up.eta.max_abs();
        bp.arclength = arclen;
        PhysicalParams pp(g, h, cp, params.b);
        HarmonicCurrent cur(params.b, h);
        HamiltonianEvaluator e(cfg, pp, std::move(cur));
        bp.residual = norm_Y(e.gradient(up), cfg.s);
        bp.orbit_nondegeneracy =
            opt.record_nondegeneracy ? orbit_nondegeneracy(e, up, opt.nondegeneracy_modes) : 0.0;
        branch.points.push_back(std::move(bp));
    };
    push_point(u, c);

    // Second point: step along the kernel direction once more.
    State u_prev = u;
    double c_prev = c;
    u = u + opt.ds * dir;
    {
        State pred = u;
        if (!corrector(u, c, u_prev, dir, 0.0, pred, c, false)) {
            branch.stop_reason = "corrector failed on the second point";
            return branch;
        }
    }
    arclen += std::sqrt(inner(u - u_prev, u - u_prev) + (c - c_prev) * (c - c_prev));
    push_point(u, c);

    for (int step = 0; step < opt.steps; ++step) {
        if (branch.points.back().amplitude >= opt.target_amplitude) {
            branch.stop_reason = "target amplitude reached";
            return branch;
        }
        if (spectral_tail_fraction(u) > opt.tail_threshold) {
            branch.stop_reason = "spectral tail threshold exceeded";
            return branch;
        }

        // Secant tangent, normalized in the extended (u, c) metric.
        State du = u - u_prev;
        double dc = c - c_prev;
        const double tnorm = std::sqrt(inner(du, du) + dc * dc);
        State tan_state = (1.0 / tnorm) * du;
        const double tan_c = dc / tnorm;

        double ds = opt.ds;
        bool accepted = false;
        for (int halving = 0; halving < 6 && !accepted; ++halving, ds *= 0.5) {
            State u_try = u + ds * tan_state;
            double c_try = c + ds * tan_c;
            State pred_u = u_try;
            const double pred_c = c_try;
            if (corrector(u_try, c_try, u, tan_state, tan_c, pred_u, pred_c, true)) {
                u_prev = u;
                c_prev = c;
                arclen += std::sqrt(inner(u_try - u, u_try - u) + (c_try - c) * (c_try - c));
                u = u_try;
                c = c_try;
                accepted = true;
            }
        }
        if (!accepted) {
            branch.stop_reason = "corrector failed after step halving";
            return branch;
        }
        push_point(u, c);
    }
    branch.stop_reason = "step budget exhausted";
    return branch;
}

double calibrate_gamma(const SpectralConfig& cfg, double g, double h,
                       double reference_amplitude, int k_probe) {
    // Measure ||T(b, c_k)|| for b = a cos x and find the offset where the
    // smallest singular value of L + T equals twice that norm.
    PeriodicField b = make_cos(cfg, 1, reference_amplitude);
    const double ck = critical_speed(k_probe, g, h);
    PhysicalParams params(g, h, ck, b);
    HarmonicCurrent cur = solve_bottom_trace(b, h);
    HamiltonianEvaluator eval(cfg, params, std::move(cur));
    const Eigen::MatrixXd dn_block = dn_difference_block(cfg, b, h);
    const HessianAtZero h0 = eval.hessian_at_zero(&dn_block);
    const double t_norm = h0.t_matrix().operatorNorm();

    // |lambda_k^-(c_k + w)| grows linearly in w; invert for the width at 2||T||.
    const double slope = std::abs(
        (hessian_eigenvalues(k_probe, ck + 1e-4, g, h).second -
         hessian_eigenvalues(k_probe, ck - 1e-4, g, h).second) / 2e-4);
    const double width = 2.0 * t_norm / std::max(slope, 1e-12);
    const double b_norm = sobolev_norm(b, cfg.s + 1.0);
    return b_norm / (std::pow(static_cast<double>(k_probe), 3.0) * width * width);
}

}  // namespace sww

#include "sww/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sww {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

using Eigen::MatrixXd;
using Eigen::VectorXd;
}  // namespace

double SliceChart::fundamental_cell() const { return two_pi / minimal_period_p; }

SliceChart build_slice_chart(const State& u_c, double c) {
    SliceChart chart;
    chart.u_c = u_c;
    chart.c = c;
    State t{derivative(u_c.eta), derivative(u_c.xi)};
    const double tn = std::sqrt(inner(t, t));
    if (tn < 1e-14)
        throw ValidationError("build_slice_chart: d_x u_c vanishes (trivial orbit)");
    chart.tangent = (1.0 / tn) * t;

    // Minimal period 2pi/p: p = gcd of the active Fourier support.
    const int K = u_c.config().n_modes;
    double top = 0.0;
    for (int k = 1; k <= K; ++k)
        top = std::max(top, std::max(std::abs(u_c.eta.coeff(k)), std::abs(u_c.xi.coeff(k))));
    int p = 0;
    for (int k = 1; k <= K; ++k) {
        const double mag = std::max(std::abs(u_c.eta.coeff(k)), std::abs(u_c.xi.coeff(k)));
        if (mag > 1e-12 * top) p = std::gcd(p, k);
    }
    chart.minimal_period_p = p == 0 ? 1 : p;
    return chart;
}

State slice_embed(const SliceChart& chart, double theta, const State& w) {
    return (chart.u_c + w).translate(theta);
}

struct PersistenceContext::Impl {
    HamiltonianEvaluator eval;  // copy: the context outlives the caller's evaluator
    SliceChart chart;
    double smallest_sv = 0.0;
    Eigen::PartialPivLU<MatrixXd> bordered;
    VectorXd t_hat;

    Impl(const HamiltonianEvaluator& e, SliceChart ch)
        : eval(e.config(), e.params(), e.current(), e.options()), chart(std::move(ch)) {}
};

PersistenceContext::PersistenceContext(const HamiltonianEvaluator& eval, SliceChart chart,
                                       double nondegeneracy_threshold)
    : impl_(std::make_unique<Impl>(eval, std::move(chart))) {
    const auto& cfg = eval.config();
    const int n = 4 * cfg.n_modes;

    MatrixXd hess = eval.assemble_hessian(impl_->chart.u_c, false);
    hess = 0.5 * (hess + hess.transpose()).eval();

    impl_->t_hat = pack_state(impl_->chart.tangent);
    impl_->t_hat.normalize();

    // Smallest singular value restricted to W, for the non-degeneracy gate.
    Eigen::HouseholderQR<MatrixXd> qr(impl_->t_hat);
    MatrixXd q = MatrixXd(qr.householderQ()).rightCols(n - 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es((q.transpose() * hess * q).eval(),
                                               Eigen::EigenvaluesOnly);
    impl_->smallest_sv = es.eigenvalues().cwiseAbs().minCoeff();
    if (impl_->smallest_sv < nondegeneracy_threshold)
        throw ValidationError("PersistenceContext: orbit is numerically degenerate (sv = " +
                              std::to_string(impl_->smallest_sv) + ")");

    MatrixXd bordered = MatrixXd::Zero(n + 1, n + 1);
    bordered.topLeftCorner(n, n) = hess;
    bordered.col(n).head(n) = impl_->t_hat;
    bordered.row(n).head(n) = impl_->t_hat.transpose();
    impl_->bordered.compute(bordered);
}

PersistenceContext::~PersistenceContext() = default;
PersistenceContext::PersistenceContext(PersistenceContext&&) noexcept = default;

const SliceChart& PersistenceContext::chart() const { return impl_->chart; }
const HamiltonianEvaluator& PersistenceContext::evaluator() const { return impl_->eval; }
double PersistenceContext::orbit_smallest_sv() const { return impl_->smallest_sv; }

ReducedSample PersistenceContext::solve_normal(double theta, const State& w_init, double tol,
                                               int max_iters) const {
    const auto& cfg = impl_->eval.config();
    const int n = 4 * cfg.n_modes;
    const auto& chart = impl_->chart;

    // Keep w in the fixed frame W = tangent^perp; the embedded state is the
    // theta-translate of u_c + w.
    auto project_w = [&](State w) {
        VectorXd v = pack_state(w);
        v -= impl_->t_hat.dot(v) * impl_->t_hat;
        return unpack_state(v, cfg);
    };

    ReducedSample out;
    out.theta = theta;
    State w = project_w(w_init);

    double rnorm = 0.0;
    for (int it = 0; it <= max_iters; ++it) {
        const State u = slice_embed(chart, theta, w);
        const State grad = impl_->eval.gradient(u);
        // Fixed-frame residual: rotate back, then project off the tangent.
        VectorXd r = pack_state(grad.translate(-theta));
        r -= impl_->t_hat.dot(r) * impl_->t_hat;
        rnorm = norm_Y(unpack_state(r, cfg), cfg.s);
        out.newton_iters = it;
        if (rnorm < tol) {
            out.w = w;
            out.residual = rnorm;
            out.h_value = impl_->eval.value(u);
            return out;
        }
        if (!std::isfinite(rnorm) || rnorm > 1e3)
            throw ConvergenceError("solve_normal: diverged (|b| too large or orbit degenerate)");
        VectorXd rhs = VectorXd::Zero(n + 1);
        rhs.head(n) = r;
        const VectorXd sol = impl_->bordered.solve(rhs);
        State dw = unpack_state(sol.head(n), cfg);
        w = project_w(w - dw);
    }
    throw ConvergenceError("solve_normal: no convergence in " + std::to_string(max_iters) +
                           " iterations (residual " + std::to_string(rnorm) + ")");
}

double PersistenceContext::tangential_derivative(double theta, const State& w) const {
    const State u = slice_embed(impl_->chart, theta, w);
    const State grad = impl_->eval.gradient(u);
    const State du{derivative(u.eta), derivative(u.xi)};
    return inner(grad, du);
}

std::vector<ReducedSample> reduced_hamiltonian(const PersistenceContext& ctx, int n_theta,
                                               double tol) {
    if (n_theta < 8) throw ValidationError("reduced_hamiltonian: n_theta must be >= 8");
    const double cell = ctx.chart().fundamental_cell();
    std::vector<ReducedSample> samples;
    samples.reserve(static_cast<size_t>(n_theta));
    State w(ctx.evaluator().config());
    for (int i = 0; i < n_theta; ++i) {
        const double theta = cell * i / n_theta;
        ReducedSample s = ctx.solve_normal(theta, w, tol);
        w = s.w;  // warm start: w varies smoothly in theta
        samples.push_back(std::move(s));
    }
    return samples;
}

namespace {

struct Bracket {
    double lo, hi;    // tangential derivative changes sign across [lo, hi]
    double t_lo, t_hi;
};

}  // namespace

std::vector<PersistentWave> find_persistent_waves(const PersistenceContext& ctx,
                                                  const std::vector<ReducedSample>& samples,
                                                  const PersistOptions& opt) {
    if (samples.size() < 8)
        throw ValidationError("find_persistent_waves: too few samples");
    const double cell = ctx.chart().fundamental_cell();

    double hmin = samples.front().h_value, hmax = hmin;
    for (const auto& s : samples) {
        hmin = std::min(hmin, s.h_value);
        hmax = std::max(hmax, s.h_value);
    }
    const double flat_tol = opt.flat_tol_scale * (1.0 + std::abs(samples.front().h_value));
    if (hmax - hmin < flat_tol)
        throw ConvergenceError("find_persistent_waves: reduced Hamiltonian is flat "
                               "(b = 0 or oscillation unresolved)");

    // Sign changes of the tangential derivative between consecutive samples.
    const int n = static_cast<int>(samples.size());
    std::vector<double> tvals(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        tvals[static_cast<size_t>(i)] = ctx.tangential_derivative(samples[static_cast<size_t>(i)].theta,
                                                                  samples[static_cast<size_t>(i)].w);
    std::vector<Bracket> brackets;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double ti = tvals[static_cast<size_t>(i)], tj = tvals[static_cast<size_t>(j)];
        if (ti == 0.0) continue;
        if (ti * tj < 0.0) {
            const double lo = samples[static_cast<size_t>(i)].theta;
            double hi = samples[static_cast<size_t>(j)].theta;
            if (j == 0) hi = cell;  // wrap
            brackets.push_back({lo, hi, ti, tj});
        }
    }

    std::vector<PersistentWave> waves;
    State w_seed(ctx.evaluator().config());
    for (const auto& br : brackets) {
        // Secant / bisection hybrid on t(theta) = h_b'(theta).
        double a = br.lo, b = br.hi, ta = br.t_lo, tb = br.t_hi;
        ReducedSample sample;
        double theta = a, t_theta = ta;
        for (int it = 0; it < opt.max_refine_iters; ++it) {
            double cand = b - tb * (b - a) / (tb - ta);
            if (!(cand > a && cand < b)) cand = 0.5 * (a + b);
            sample = ctx.solve_normal(cand, w_seed, 1e-12);
            w_seed = sample.w;
            theta = cand;
            t_theta = ctx.tangential_derivative(cand, sample.w);
            if (std::abs(b - a) < 1e-13) break;
            if (ta * t_theta <= 0.0) {
                b = cand;
                tb = t_theta;
            } else {
                a = cand;
                ta = t_theta;
            }
            // Residual-based exit: tangential part already below target.
            const State u = slice_embed(ctx.chart(), cand, sample.w);
            if (norm_Y(ctx.evaluator().gradient(u), ctx.evaluator().config().s) <
                0.3 * opt.refine_tol)
                break;
        }

        PersistentWave wave;
        wave.theta = theta;
        wave.u = slice_embed(ctx.chart(), theta, sample.w);
        wave.h_value = sample.h_value;
        wave.w_norm = norm_X(sample.w, ctx.evaluator().config().s);
        wave.residual = norm_Y(ctx.evaluator().gradient(wave.u), ctx.evaluator().config().s);
        // Kind from the sign pattern of h' across the bracket: + -> - is a max.
        if (br.t_lo > 0.0 && br.t_hi < 0.0)
            wave.kind = ExtremumKind::kMax;
        else if (br.t_lo < 0.0 && br.t_hi > 0.0)
            wave.kind = ExtremumKind::kMin;
        else
            wave.kind = ExtremumKind::kFlat;
        waves.push_back(std::move(wave));
    }

    if (waves.size() < 2)
        throw ConvergenceError("find_persistent_waves: fewer than two extrema located");
    // Alternating max/min on a circle: the count must be even.
    if (waves.size() % 2 != 0)
        throw ConvergenceError("find_persistent_waves: odd extremum count (unresolved sampling)");
    std::sort(waves.begin(), waves.end(),
              [](const PersistentWave& x, const PersistentWave& y) { return x.theta < y.theta; });
    return waves;
}

}  // namespace sww

#include "sww/hamiltonian.hpp"

#include <cmath>
#include <numbers>

namespace sww {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

std::vector<double> grid_x(int m) {
    std::vector<double> x(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) x[static_cast<size_t>(i)] = two_pi * i / m;
    return x;
}
}  // namespace

PhysicalParams::PhysicalParams(double gravity, double depth, double speed, PeriodicField bottom)
    : g(gravity), h(depth), c(speed), b(std::move(bottom)) {
    validate();
}

void PhysicalParams::validate() const {
    if (g <= 0.0) throw ValidationError("PhysicalParams: g must be positive");
    if (h <= 0.0) throw ValidationError("PhysicalParams: h must be positive");
    if (c < 0.0) throw ValidationError("PhysicalParams: c must be nonnegative");
    if (b.max_abs() >= h)
        throw ValidationError("PhysicalParams: |b|_inf must be smaller than h");
}

double critical_speed(int k, double g, double h) {
    if (k < 1) throw ValidationError("critical_speed: k must be >= 1");
    return std::sqrt(g * std::tanh(h * k) / k);
}

std::pair<double, double> hessian_eigenvalues(int k, double c, double g, double h) {
    if (k == 0) throw ValidationError("hessian_eigenvalues: k must be nonzero");
    const double ak = std::abs(static_cast<double>(k));
    const double lam = ak * std::tanh(h * ak);
    const double half_sum = 0.5 * (g + lam);
    const double disc = 0.5 * std::sqrt((g - lam) * (g - lam) + 4.0 * c * c * k * k);
    return {half_sum + disc, half_sum - disc};
}

double hessian_block_det(int k, double c, double g, double h) {
    const double ak = std::abs(static_cast<double>(k));
    return g * ak * std::tanh(h * ak) - c * c * k * k;
}

Eigen::VectorXd pack_state(const State& u) {
    const int K = u.config().n_modes;
    Eigen::VectorXd v(4 * K);
    for (int k = 1; k <= K; ++k) {
        const complexd e = u.eta.coeff(k), x = u.xi.coeff(k);
        v[4 * (k - 1) + 0] = 2.0 * e.real();
        v[4 * (k - 1) + 1] = -2.0 * e.imag();
        v[4 * (k - 1) + 2] = 2.0 * x.real();
        v[4 * (k - 1) + 3] = -2.0 * x.imag();
    }
    return v;
}

State unpack_state(const Eigen::VectorXd& v, const SpectralConfig& cfg) {
    const int K = cfg.n_modes;
    if (v.size() != 4 * K) throw ValidationError("unpack_state: size mismatch");
    State u(cfg);
    for (int k = 1; k <= K; ++k) {
        u.eta.set_coeff(k, 0.5 * complexd(v[4 * (k - 1) + 0], -v[4 * (k - 1) + 1]));
        u.xi.set_coeff(k, 0.5 * complexd(v[4 * (k - 1) + 2], -v[4 * (k - 1) + 3]));
    }
    return u;
}

Eigen::MatrixXd dn_difference_block(const SpectralConfig& cfg, const PeriodicField& b, double h) {
    const int K = cfg.n_modes;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(4 * K, 4 * K);
    if (b.is_zero()) return block;
    DnSolver solver(cfg, h);
    const PeriodicField zero_eta(cfg);
    for (int k = 1; k <= K; ++k) {
        for (int part = 0; part < 2; ++part) {
            PeriodicField e = part == 0 ? make_cos(cfg, k) : make_sin(cfg, k);
            FluidDomain dom(zero_eta, b, h);
            PeriodicField diff = solver.apply(dom, e).value - flat_dn_apply(e, h);
            State col_state{PeriodicField(cfg), diff};
            Eigen::VectorXd col = pack_state(col_state);
            const int j = 4 * (k - 1) + 2 + part;
            for (int k2 = 1; k2 <= K; ++k2) {
                block(4 * (k2 - 1) + 2, j) = col[4 * (k2 - 1) + 2];
                block(4 * (k2 - 1) + 3, j) = col[4 * (k2 - 1) + 3];
            }
        }
    }
    return block;
}

HessianAtZero::HessianAtZero(const SpectralConfig& cfg, double g, double h, double c,
                             Eigen::MatrixXd t_matrix)
    : cfg_(cfg), g_(g), h_(h), c_(c), t_(std::move(t_matrix)) {
    const int K = cfg_.n_modes;
    full_ = t_;
    for (int k = 1; k <= K; ++k) {
        const double lam = k * std::tanh(h_ * k);
        const double ck = c_ * k;
        const int o = 4 * (k - 1);
        full_(o + 0, o + 0) += g_;
        full_(o + 1, o + 1) += g_;
        full_(o + 2, o + 2) += lam;
        full_(o + 3, o + 3) += lam;
        full_(o + 0, o + 3) += ck;
        full_(o + 3, o + 0) += ck;
        full_(o + 1, o + 2) += -ck;
        full_(o + 2, o + 1) += -ck;
    }
}

Eigen::Matrix2cd HessianAtZero::block(int k) const {
    Eigen::Matrix2cd a;
    const double lam = std::abs(k) * std::tanh(h_ * std::abs(k));
    a << complexd(g_, 0.0), complexd(0.0, c_ * k), complexd(0.0, -c_ * k), complexd(lam, 0.0);
    return a;
}

State HessianAtZero::apply(const State& u) const {
    return unpack_state(full_ * pack_state(u), cfg_);
}

double HessianAtZero::smallest_singular_value() const {
    Eigen::MatrixXd sym = 0.5 * (full_ + full_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().minCoeff();
}

struct HamiltonianEvaluator::SurfaceFields {
    std::vector<double> p, px, py;  // Phi_b and first derivatives at y = eta(x)
};

HamiltonianEvaluator::HamiltonianEvaluator(const SpectralConfig& cfg, PhysicalParams params,
                                           HarmonicCurrent current)
    : HamiltonianEvaluator(cfg, std::move(params), std::move(current), Options()) {}

HamiltonianEvaluator::HamiltonianEvaluator(const SpectralConfig& cfg, PhysicalParams params,
                                           HarmonicCurrent current, Options opt)
    : cfg_(cfg), params_(std::move(params)), current_(std::move(current)), opt_(opt),
      dn_(cfg, params_.h, opt.dn) {
    params_.validate();
    if (std::abs(current_.depth() - params_.h) > 0.0)
        throw ValidationError("HamiltonianEvaluator: current depth differs from params.h");
    PeriodicField bdiff = current_.bottom() - params_.b;
    if (!bdiff.is_zero(1e-13))
        throw ValidationError("HamiltonianEvaluator: current was built from a different bottom");
}

HamiltonianEvaluator::SurfaceFields HamiltonianEvaluator::surface_fields(
    const std::vector<double>& eta_values) const {
    SurfaceFields sf;
    const auto xs = grid_x(cfg_.grid_size);
    sf.p = current_.evaluate_many(xs, eta_values, 0, 0);
    sf.px = current_.evaluate_many(xs, eta_values, 1, 0);
    sf.py = current_.evaluate_many(xs, eta_values, 0, 1);
    return sf;
}

HamiltonianEvaluator::Parts HamiltonianEvaluator::value_parts(const State& u) const {
    if (!(u.config() == cfg_)) throw ValidationError("hamiltonian: config mismatch");
    Parts parts;
    const double c = params_.c, g = params_.g;

    FluidDomain dom(u.eta, params_.b, params_.h);
    const auto gxi = dn_.apply(dom, u.xi);

    const auto xi_v = u.xi.grid_values();
    const auto eta_v = u.eta.grid_values();
    const auto etap_v = derivative(u.eta).grid_values();
    const auto gxi_v = gxi.value.grid_values();

    std::vector<double> hhat_int(xi_v.size());
    for (size_t i = 0; i < xi_v.size(); ++i)
        hhat_int[i] = 0.5 * xi_v[i] * gxi_v[i] - c * xi_v[i] * etap_v[i] +
                      0.5 * g * eta_v[i] * eta_v[i];
    parts.hhat = integrate(hhat_int);

    parts.htilde = 0.0;
    if (opt_.bottom_interaction && !current_.is_trivial()) {
        const auto sf = surface_fields(eta_v);
        std::vector<double> ht(xi_v.size());
        for (size_t i = 0; i < xi_v.size(); ++i) {
            const double lambda = sf.py[i] - etap_v[i] * sf.px[i];  // N_eta . grad Phi_b
            ht[i] = c * xi_v[i] * lambda + 0.5 * c * c * sf.p[i] * lambda -
                    c * c * sf.p[i] * etap_v[i];
        }
        parts.htilde = integrate(ht);
    }
    parts.total = parts.hhat + parts.htilde;
    return parts;
}

double HamiltonianEvaluator::value(const State& u) const { return value_parts(u).total; }

State HamiltonianEvaluator::gradient(const State& u) const {
    if (!(u.config() == cfg_)) throw ValidationError("gradient: config mismatch");
    const double c = params_.c, g = params_.g;

    FluidDomain dom(u.eta, params_.b, params_.h);
    const auto gxi = dn_.apply(dom, u.xi);

    const auto xi_v = u.xi.grid_values();
    const auto eta_v = u.eta.grid_values();
    const auto etap_v = derivative(u.eta).grid_values();
    const auto xip_v = derivative(u.xi).grid_values();
    const auto gxi_v = gxi.value.grid_values();

    // d_eta of the kinetic term is the classical water-wave form
    // (1/2)xi_x^2 - (G xi + eta_x xi_x)^2 / (2 (1 + eta_x^2)); the
    // denominator power is pinned by the finite-difference consistency tests.
    std::vector<double> deta(xi_v.size()), dxi(xi_v.size());
    for (size_t i = 0; i < xi_v.size(); ++i) {
        const double ep = etap_v[i];
        const double num = gxi_v[i] + ep * xip_v[i];
        const double den = 1.0 + ep * ep;
        deta[i] = c * xip_v[i] + g * eta_v[i] + 0.5 * xip_v[i] * xip_v[i] -
                  num * num / (2.0 * den);
        dxi[i] = -c * etap_v[i] + gxi_v[i];
    }

    if (opt_.bottom_interaction && !current_.is_trivial()) {
        const auto sf = surface_fields(eta_v);
        for (size_t i = 0; i < xi_v.size(); ++i) {
            const double lambda = sf.py[i] - etap_v[i] * sf.px[i];
            dxi[i] += c * lambda;
            deta[i] += c * sf.px[i] * xip_v[i] + c * c * sf.px[i] +
                       0.5 * c * c * (sf.px[i] * sf.px[i] + sf.py[i] * sf.py[i]);
        }
    }

    return {analyze(deta, cfg_).field, analyze(dxi, cfg_).field};
}

std::pair<double, double> HamiltonianEvaluator::interaction_expansion(const State& u) const {
    if (!opt_.bottom_interaction || current_.is_trivial()) return {0.0, 0.0};
    const double c = params_.c;
    const int m = cfg_.grid_size;
    const auto xs = grid_x(m);
    const std::vector<double> zeros(static_cast<size_t>(m), 0.0);

    const auto p = current_.evaluate_many(xs, zeros, 0, 0);
    const auto px = current_.evaluate_many(xs, zeros, 1, 0);
    const auto py = current_.evaluate_many(xs, zeros, 0, 1);
    const auto pxy = current_.evaluate_many(xs, zeros, 1, 1);
    const auto pyy = current_.evaluate_many(xs, zeros, 0, 2);
    const auto pyyy = current_.evaluate_many(xs, zeros, 0, 3);

    const auto eta_v = u.eta.grid_values();
    const auto etap_v = derivative(u.eta).grid_values();
    const auto xi_v = u.xi.grid_values();
    const auto xip_v = derivative(u.xi).grid_values();

    std::vector<double> h1(static_cast<size_t>(m)), h2(static_cast<size_t>(m));
    for (size_t i = 0; i < h1.size(); ++i) {
        h1[i] = c * py[i] * xi_v[i] + c * c * px[i] * eta_v[i] +
                0.5 * c * c * (py[i] * py[i] + px[i] * px[i]) * eta_v[i];
        h2[i] = c * px[i] * eta_v[i] * xip_v[i] +
                0.5 * c * c * (0.5 * p[i] * pyyy[i] + 1.5 * py[i] * pyy[i]) * eta_v[i] * eta_v[i] -
                0.5 * c * c * (px[i] * py[i] + p[i] * pxy[i] + 2.0 * py[i]) * eta_v[i] * etap_v[i];
    }
    return {integrate(h1), integrate(h2)};
}

HessianAtZero HamiltonianEvaluator::hessian_at_zero(const Eigen::MatrixXd* cached_dn_block) const {
    const int K = cfg_.n_modes;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(4 * K, 4 * K);

    if (opt_.bottom_interaction && !current_.is_trivial()) {
        // DN difference block: G(0;b) - G(0;0) on the xi component.
        if (cached_dn_block) {
            t = *cached_dn_block;
        } else {
            t = dn_difference_block(cfg_, params_.b, params_.h);
        }

        // Analytic second variation of Htilde_2. With on-axis fields
        // Q = (c^2/2)(P Pyyy/2 + 3 Py Pyy/2) and
        // R = -(c^2/2)(Px Py + P Pxy + 2 Py):
        //   (T1 u)_eta = c Px xi' + (2Q - R') eta,  (T1 u)_xi = -c d/dx(Px eta).
        const double c = params_.c;
        const int m = cfg_.grid_size;
        const auto xs = grid_x(m);
        const std::vector<double> zeros(static_cast<size_t>(m), 0.0);
        const auto p = current_.evaluate_many(xs, zeros, 0, 0);
        const auto px = current_.evaluate_many(xs, zeros, 1, 0);
        const auto py = current_.evaluate_many(xs, zeros, 0, 1);
        const auto pxy = current_.evaluate_many(xs, zeros, 1, 1);
        const auto pyy = current_.evaluate_many(xs, zeros, 0, 2);
        const auto pyyy = current_.evaluate_many(xs, zeros, 0, 3);

        std::vector<double> qv(static_cast<size_t>(m)), rv(static_cast<size_t>(m));
        for (size_t i = 0; i < qv.size(); ++i) {
            qv[i] = 0.5 * c * c * (0.5 * p[i] * pyyy[i] + 1.5 * py[i] * pyy[i]);
            rv[i] = -0.5 * c * c * (px[i] * py[i] + p[i] * pxy[i] + 2.0 * py[i]);
        }
        auto r_field = analyze(rv, cfg_);
        const auto rp = derivative(r_field.field).grid_values();
        auto px_field = analyze(px, cfg_);

        for (int k = 1; k <= K; ++k) {
            for (int part = 0; part < 4; ++part) {
                State basis(cfg_);
                if (part == 0) basis.eta = make_cos(cfg_, k);
                if (part == 1) basis.eta = make_sin(cfg_, k);
                if (part == 2) basis.xi = make_cos(cfg_, k);
                if (part == 3) basis.xi = make_sin(cfg_, k);

                const auto ev = basis.eta.grid_values();
                const auto xpv = derivative(basis.xi).grid_values();
                std::vector<double> out_eta(static_cast<size_t>(m)), pxeta(static_cast<size_t>(m));
                for (size_t i = 0; i < out_eta.size(); ++i) {
                    out_eta[i] = c * px[i] * xpv[i] + (2.0 * qv[i] - rp[i]) * ev[i];
                    pxeta[i] = px[i] * ev[i];
                }
                PeriodicField t_eta = analyze(out_eta, cfg_).field;
                PeriodicField t_xi = -c * derivative(analyze(pxeta, cfg_).field);
                Eigen::VectorXd col = pack_state({t_eta, t_xi});
                t.col(4 * (k - 1) + part) += col;
            }
        }
    }

    return HessianAtZero(cfg_, params_.g, params_.h, params_.c, std::move(t));
}

State HamiltonianEvaluator::hessian_apply(const State& u_base, const State& v,
                                          bool richardson) const {
    const double vnorm = norm_X(v, cfg_.s);
    if (vnorm == 0.0) return State(cfg_);
    const double eps = opt_.fd_scale / vnorm;

    auto central = [&](double e) {
        State up = u_base + e * v;
        State dn = u_base - e * v;
        State diff = gradient(up) - gradient(dn);
        return (1.0 / (2.0 * e)) * diff;
    };
    if (!richardson) return central(eps);
    State d1 = central(eps);
    State d2 = central(0.5 * eps);
    return (1.0 / 3.0) * (4.0 * d2 - d1);
}

Eigen::MatrixXd HamiltonianEvaluator::assemble_hessian(const State& u_base,
                                                       bool richardson) const {
    const int K = cfg_.n_modes;
    Eigen::MatrixXd hess(4 * K, 4 * K);
    for (int k = 1; k <= K; ++k) {
        for (int part = 0; part < 4; ++part) {
            State basis(cfg_);
            if (part == 0) basis.eta = make_cos(cfg_, k);
            if (part == 1) basis.eta = make_sin(cfg_, k);
            if (part == 2) basis.xi = make_cos(cfg_, k);
            if (part == 3) basis.xi = make_sin(cfg_, k);
            hess.col(4 * (k - 1) + part) = pack_state(hessian_apply(u_base, basis, richardson));
        }
    }
    return hess;
}

}  // namespace sww

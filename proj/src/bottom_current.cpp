#include "sww/bottom_current.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace sww {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

int max_active_mode(const PeriodicField& b, double floor = 1e-15) {
    int m = 0;
    for (int k = 1; k <= b.config().n_modes; ++k)
        if (std::abs(b.coeff(k)) > floor) m = k;
    return m;
}

std::vector<double> sample(const PeriodicField& f, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = f.synthesize(two_pi * j / n);
    return out;
}

}  // namespace

GreenKernel::GreenKernel(double depth) : h(depth) {
    if (h <= 0.0) throw ValidationError("GreenKernel: depth must be positive");
}

double GreenKernel::log_term(double u, double v) {
    const double su = std::sin(0.5 * u);
    const double sv = std::sinh(0.5 * v);
    return std::log(su * su + sv * sv) / (4.0 * pi);
}

double GreenKernel::log_term_du(double u, double v) {
    const double su = std::sin(0.5 * u);
    const double sv = std::sinh(0.5 * v);
    return 0.5 * std::sin(u) / (su * su + sv * sv) / (4.0 * pi);
}

double GreenKernel::log_term_dv(double u, double v) {
    const double su = std::sin(0.5 * u);
    const double sv = std::sinh(0.5 * v);
    return 0.5 * std::sinh(v) / (su * su + sv * sv) / (4.0 * pi);
}

double GreenKernel::operator()(double dx, double y, double y_prime) const {
    const double su = std::sin(0.5 * dx);
    if (su * su + std::pow(std::sinh(0.5 * (y - y_prime)), 2) == 0.0)
        throw ValidationError("green_kernel: singular point dx = 0 (mod 2pi), y = y'");
    return log_term(dx, y - y_prime) + log_term(dx, y + y_prime + 2.0 * h);
}

double green_kernel(double dx, double y, double y_prime, double h) {
    return GreenKernel(h)(dx, y, y_prime);
}

double kernel_a(const PeriodicField& b, double x, double y, double h, int quadrature_size) {
    const int n = quadrature_size;
    if (n < 16 || n % 2 != 0) throw ValidationError("kernel_a: quadrature_size must be even, >= 16");
    if (4 * max_active_mode(b) > n)
        throw ResolutionError("kernel_a: b not resolved at this quadrature_size");

    const auto bv = sample(b, n);
    const auto bpv = sample(derivative(b), n);
    const double w = two_pi / n;
    const double bottom_here = -h + b.synthesize(x);
    const bool on_boundary = std::abs(y - bottom_here) < 1e-12;

    if (!on_boundary && y <= bottom_here)
        throw ValidationError("kernel_a: point below the bottom curve");

    if (!on_boundary) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double xp = two_pi * j / n;
            acc += green_kernel(x - xp, y, -h + bv[static_cast<size_t>(j)], h) *
                   bpv[static_cast<size_t>(j)];
        }
        return acc * w;
    }

    // On the bottom: subtract the log singularity of the free-space term and
    // integrate the smooth remainder with the trapezoid rule. The subtracted
    // convolution with ln|sin(u/2)| is evaluated exactly in Fourier modes
    // (symbol -1/(2|k|)). The image term has a finite diagonal while b(x) != 0;
    // accuracy degrades near the zeros of b, where the image curve touches.
    const double bx = b.synthesize(x);
    const double bpx = derivative(b).synthesize(x);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double xp = two_pi * j / n;
        const double u = x - xp;
        const double bj = bv[static_cast<size_t>(j)];
        double smooth;
        const double su = std::sin(0.5 * u);
        if (std::abs(su) < 1e-13) {
            smooth = std::log(1.0 + bpx * bpx) / (4.0 * pi) +
                     GreenKernel::log_term(0.0, 2.0 * bx);
        } else {
            smooth = GreenKernel::log_term(u, bx - bj) - std::log(std::abs(su)) / (2.0 * pi) +
                     GreenKernel::log_term(u, bx + bj);
        }
        acc += smooth * w * bpv[static_cast<size_t>(j)];
    }
    double logpart = 0.0;
    for (int k = 1; k <= b.config().n_modes; ++k) {
        const complexd bpk = complexd(0.0, k) * b.coeff(k);
        logpart += 2.0 * (bpk * std::polar(1.0, k * x)).real() * (-1.0 / (2.0 * k));
    }
    return acc + logpart;
}

double kernel_b_apply(const PeriodicField& b, const std::vector<double>& phi_on_grid,
                      double x, double y, double h) {
    const int n = static_cast<int>(phi_on_grid.size());
    if (n < 16) throw ValidationError("kernel_b_apply: trace grid too coarse");
    const auto bv = sample(b, n);
    const auto bpv = sample(derivative(b), n);
    const double bottom_here = -h + b.synthesize(x);
    if (y <= bottom_here) throw ValidationError("kernel_b_apply: point not interior");

    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const double xp = two_pi * j / n;
        const double u = x - xp;
        const double yp = -h + bv[static_cast<size_t>(j)];
        // N_b . grad' = b'(x') d/dx' - d/dy' applied to G(x-x', y, y').
        const double dGdxp = -GreenKernel::log_term_du(u, y - yp) -
                             GreenKernel::log_term_du(u, y + yp + 2.0 * h);
        const double dGdyp = -GreenKernel::log_term_dv(u, y - yp) +
                             GreenKernel::log_term_dv(u, y + yp + 2.0 * h);
        acc += (bpv[static_cast<size_t>(j)] * dGdxp - dGdyp) * phi_on_grid[static_cast<size_t>(j)];
    }
    return acc * two_pi / n;
}

HarmonicCurrent::HarmonicCurrent(const PeriodicField& b, double h)
    : b_(b), h_(h), trivial_(true) {
    if (h <= 0.0) throw ValidationError("HarmonicCurrent: h must be positive");
    trace_.assign(static_cast<size_t>(quadrature_size_), 0.0);
}

double HarmonicCurrent::trace_max_abs() const {
    double m = 0.0;
    for (double v : trace_) m = std::max(m, std::abs(v));
    return m;
}

double HarmonicCurrent::evaluate(double x, double y, int dx_order, int dy_order) const {
    if (dx_order < 0 || dy_order < 0 || dx_order + dy_order > 3)
        throw ValidationError("evaluate_phi: derivative order must satisfy p + q <= 3");
    if (trivial_) return 0.0;
    const double bottom_here = -h_ + b_.synthesize(x);
    if (y <= bottom_here) throw ValidationError("evaluate_phi: point outside C_b");
    if (y - bottom_here < two_pi / quadrature_size_)
        throw ResolutionError("evaluate_phi: point closer to the bottom than the quadrature resolution");

    double acc = 0.0;
    const complexd rot = std::polar(1.0, x);
    complexd e = rot;
    for (size_t i = 0; i < gamma_.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        complexd term = gamma_[i] * e;
        for (int p = 0; p < dx_order; ++p) term *= complexd(0.0, k);
        double vertical = std::exp(-k * (y + h_));
        for (int q = 0; q < dy_order; ++q) vertical *= -k;
        acc += 2.0 * term.real() * vertical;
        e *= rot;
    }
    return acc;
}

std::vector<double> HarmonicCurrent::evaluate_many(const std::vector<double>& xs,
                                                   const std::vector<double>& ys, int dx_order,
                                                   int dy_order) const {
    if (xs.size() != ys.size()) throw ValidationError("evaluate_many: size mismatch");
    std::vector<double> out(xs.size(), 0.0);
    if (trivial_) return out;
    for (size_t i = 0; i < xs.size(); ++i) out[i] = evaluate(xs[i], ys[i], dx_order, dy_order);
    return out;
}

double HarmonicCurrent::neumann_residual(int refine) const {
    const int n = refine * quadrature_size_;
    const PeriodicField bp = derivative(b_);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = two_pi * j / n;
        const double bx = b_.synthesize(x);
        const double bpx = bp.synthesize(x);
        double phi_x = 0.0, phi_y = 0.0;
        if (!trivial_) {
            const complexd rot = std::polar(1.0, x);
            complexd e = rot;
            for (size_t i = 0; i < gamma_.size(); ++i) {
                const int k = static_cast<int>(i) + 1;
                const double vertical = std::exp(-k * bx);
                phi_x += 2.0 * (gamma_[i] * complexd(0.0, k) * e).real() * vertical;
                phi_y += 2.0 * (gamma_[i] * e).real() * (-k) * vertical;
                e *= rot;
            }
        }
        // N_b . grad(Phi + x) = -Phi_y + b'(Phi_x + 1)
        worst = std::max(worst, std::abs(-phi_y + bpx * (phi_x + 1.0)));
    }
    return worst;
}

HarmonicCurrent solve_bottom_trace(const PeriodicField& b, double h, double tol,
                                   int quadrature_size, TraceSolver solver) {
    if (h <= 0.0) throw ValidationError("solve_bottom_trace: h must be positive");
    if (quadrature_size < 32 || quadrature_size % 2 != 0)
        throw ValidationError("solve_bottom_trace: quadrature_size must be even, >= 32");
    if (b.max_abs() >= h)
        throw ValidationError("solve_bottom_trace: |b|_inf must be smaller than h");
    const int active = max_active_mode(b);
    if (4 * active > quadrature_size)
        throw ValidationError("solve_bottom_trace: b not resolved on the quadrature grid");

    HarmonicCurrent cur(b, h);
    cur.quadrature_size_ = quadrature_size;
    cur.trace_.assign(static_cast<size_t>(quadrature_size), 0.0);
    if (b.is_zero()) {
        cur.trivial_ = true;
        cur.residual_ = 0.0;
        return cur;  // Phi_0 = 0
    }

    const int n = quadrature_size;
    const auto bv = sample(b, n);
    const auto bpv = sample(derivative(b), n);

    const int n_modes = n / 2 - 1;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    auto fill_gamma = [&](const VectorXd& ab, int kq) {
        cur.gamma_.assign(static_cast<size_t>(kq), {0.0, 0.0});
        for (int k = 1; k <= kq; ++k) {
            const double alpha = ab[k - 1];
            const double beta = ab[kq + k - 1];
            cur.gamma_[static_cast<size_t>(k - 1)] = 0.5 * complexd(alpha, -beta);
        }
    };

    if (solver == TraceSolver::kDense) {
        const int kq = n_modes;
        MatrixXd M(n, 2 * kq);
        VectorXd rhs(n);
        for (int j = 0; j < n; ++j) {
            const double x = two_pi * j / n;
            const double bj = bv[static_cast<size_t>(j)];
            const double bpj = bpv[static_cast<size_t>(j)];
            rhs[j] = -bpj;
            for (int k = 1; k <= kq; ++k) {
                const double ck = std::cos(k * x), sk = std::sin(k * x);
                const double e = k * std::exp(-k * bj);
                M(j, k - 1) = e * (ck - bpj * sk);
                M(j, kq + k - 1) = e * (sk + bpj * ck);
            }
        }
        VectorXd ab = M.householderQr().solve(rhs);
        fill_gamma(ab, kq);
    } else {
        // Flat-symbol preconditioned fixed point; the flat operator acts as
        // multiplication by k on mode k. Diverges once |b| (times the active
        // bandwidth) is too large, which is reported as ConvergenceError.
        const int kq = std::min({n_modes, n / 3, std::max(16, 6 * active)});
        VectorXd ab = VectorXd::Zero(2 * kq);
        SpectralConfig rcfg(std::max(4, kq), n, 0.0, 1.5);
        double res = 1e300;
        for (int iter = 0; iter < 200; ++iter) {
            // residual r(x_j) = -b' - N_b . grad Phi on the curve
            std::vector<double> r(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) {
                const double x = two_pi * j / n;
                const double bj = bv[static_cast<size_t>(j)];
                const double bpj = bpv[static_cast<size_t>(j)];
                double s = 0.0;
                for (int k = 1; k <= kq; ++k) {
                    const double ck = std::cos(k * x), sk = std::sin(k * x);
                    const double e = k * std::exp(-k * bj);
                    s += e * ((ck - bpj * sk) * ab[k - 1] + (sk + bpj * ck) * ab[kq + k - 1]);
                }
                r[static_cast<size_t>(j)] = -bpj - s;
            }
            auto rc = analyze(r, rcfg);
            double rnorm = 0.0;
            for (int k = 1; k <= kq; ++k) rnorm += 2.0 * std::norm(rc.field.coeff(k));
            rnorm = std::sqrt(rnorm);
            const double prev = res;
            res = rnorm;
            if (rnorm < tol) break;
            if (rnorm > 10.0 * prev || !std::isfinite(rnorm))
                throw ConvergenceError("solve_bottom_trace: Neumann series diverged (|b| too large)");
            for (int k = 1; k <= kq; ++k) {
                const complexd rk = rc.field.coeff(k);  // (a - i b)/2
                ab[k - 1] += 2.0 * rk.real() / k;
                ab[kq + k - 1] += -2.0 * rk.imag() / k;
            }
        }
        if (res >= tol)
            throw ConvergenceError("solve_bottom_trace: Neumann series stalled above tol");
        fill_gamma(ab, kq);
    }

    cur.trivial_ = false;
    for (int j = 0; j < n; ++j) {
        const double x = two_pi * j / n;
        const double bj = bv[static_cast<size_t>(j)];
        double phi = 0.0;
        const complexd rot = std::polar(1.0, x);
        complexd e = rot;
        for (size_t i = 0; i < cur.gamma_.size(); ++i) {
            const int k = static_cast<int>(i) + 1;
            phi += 2.0 * (cur.gamma_[i] * e).real() * std::exp(-k * bj);
            e *= rot;
        }
        cur.trace_[static_cast<size_t>(j)] = phi;
    }

    cur.residual_ = cur.neumann_residual();
    const double scale = std::max(1.0, derivative(b).max_abs());
    if (cur.residual_ > std::max(tol, 1e-10) * scale * 10.0)
        throw ConvergenceError("solve_bottom_trace: boundary residual " +
                               std::to_string(cur.residual_) + " above tolerance");
    return cur;
}

}  // namespace sww

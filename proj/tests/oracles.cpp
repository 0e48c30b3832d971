#include "oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <numbers>

namespace sww::testing {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
using complexd = std::complex<double>;

std::vector<double> sample(const PeriodicField& f, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j)] = f.synthesize(two_pi * j / n);
    return out;
}
}  // namespace

std::vector<double> fd_dn_surface(const PeriodicField& eta, const PeriodicField& b, double h,
                                  const PeriodicField& xi, int nx, int nsigma) {
    const double hx = two_pi / nx;
    const double hs = 1.0 / nsigma;

    const auto eta_v = sample(eta, nx);
    const auto etap_v = sample(derivative(eta), nx);
    const auto etapp_v = sample(derivative(derivative(eta)), nx);
    const auto b_v = sample(b, nx);
    const auto bp_v = sample(derivative(b), nx);
    const auto bpp_v = sample(derivative(derivative(b)), nx);
    const auto xi_v = sample(xi, nx);

    auto idx = [nx](int j, int i) { return j * nx + ((i % nx) + nx) % nx; };
    const int n_unknowns = (nsigma + 1) * nx;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknowns);

    for (int i = 0; i < nx; ++i) {
        const double delta = eta_v[static_cast<size_t>(i)] + h - b_v[static_cast<size_t>(i)];
        const double dp = etap_v[static_cast<size_t>(i)] - bp_v[static_cast<size_t>(i)];
        const double dpp = etapp_v[static_cast<size_t>(i)] - bpp_v[static_cast<size_t>(i)];
        const double bp = bp_v[static_cast<size_t>(i)];
        const double bpp = bpp_v[static_cast<size_t>(i)];

        for (int j = 1; j < nsigma; ++j) {
            const double s = j * hs;
            const double sx = -(bp + s * dp) / delta;
            const double sxx = -(bpp + s * dpp + 2.0 * sx * dp) / delta;
            const double a = sx * sx + 1.0 / (delta * delta);
            const int row = idx(j, i);
            // phi_xx
            trips.emplace_back(row, idx(j, i + 1), 1.0 / (hx * hx));
            trips.emplace_back(row, idx(j, i - 1), 1.0 / (hx * hx));
            trips.emplace_back(row, idx(j, i), -2.0 / (hx * hx));
            // 2 sx phi_xs (central cross)
            const double cxs = 2.0 * sx / (4.0 * hx * hs);
            trips.emplace_back(row, idx(j + 1, i + 1), cxs);
            trips.emplace_back(row, idx(j - 1, i - 1), cxs);
            trips.emplace_back(row, idx(j + 1, i - 1), -cxs);
            trips.emplace_back(row, idx(j - 1, i + 1), -cxs);
            // a phi_ss
            trips.emplace_back(row, idx(j + 1, i), a / (hs * hs));
            trips.emplace_back(row, idx(j - 1, i), a / (hs * hs));
            trips.emplace_back(row, idx(j, i), -2.0 * a / (hs * hs));
            // sxx phi_s
            trips.emplace_back(row, idx(j + 1, i), sxx / (2.0 * hs));
            trips.emplace_back(row, idx(j - 1, i), -sxx / (2.0 * hs));
        }

        {  // bottom: b' phi_x - ((1+b'^2)/delta) phi_s = 0, one-sided phi_s
            const int row = idx(0, i);
            const double coef = (1.0 + bp * bp) / delta;
            trips.emplace_back(row, idx(0, i + 1), bp / (2.0 * hx));
            trips.emplace_back(row, idx(0, i - 1), -bp / (2.0 * hx));
            trips.emplace_back(row, idx(0, i), -coef * (-3.0) / (2.0 * hs));
            trips.emplace_back(row, idx(1, i), -coef * 4.0 / (2.0 * hs));
            trips.emplace_back(row, idx(2, i), -coef * (-1.0) / (2.0 * hs));
        }
        {  // top: Dirichlet
            const int row = idx(nsigma, i);
            trips.emplace_back(row, idx(nsigma, i), 1.0);
            rhs[row] = xi_v[static_cast<size_t>(i)];
        }
    }

    Eigen::SparseMatrix<double> a(n_unknowns, n_unknowns);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("fd_dn_surface: factorization failed");
    const Eigen::VectorXd phi = lu.solve(rhs);

    std::vector<double> out(static_cast<size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        const double delta = eta_v[static_cast<size_t>(i)] + h - b_v[static_cast<size_t>(i)];
        const double ep = etap_v[static_cast<size_t>(i)];
        const double phis = (3.0 * phi[idx(nsigma, i)] - 4.0 * phi[idx(nsigma - 1, i)] +
                             phi[idx(nsigma - 2, i)]) /
                            (2.0 * hs);
        const double phix = (phi[idx(nsigma, i + 1)] - phi[idx(nsigma, i - 1)]) / (2.0 * hx);
        out[static_cast<size_t>(i)] = (1.0 + ep * ep) / delta * phis - ep * phix;
    }
    return out;
}

std::vector<double> fd_dn_surface_refined(const PeriodicField& eta, const PeriodicField& b,
                                          double h, const PeriodicField& xi, int nx, int nsigma) {
    const auto coarse = fd_dn_surface(eta, b, h, xi, nx, nsigma);
    const auto fine = fd_dn_surface(eta, b, h, xi, 2 * nx, 2 * nsigma);
    std::vector<double> out(coarse.size());
    for (size_t i = 0; i < coarse.size(); ++i)
        out[i] = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
    return out;
}

struct StripPhiOracle::Impl {
    double h, y_top;
    int nx, nsigma;
    PeriodicField b;
    Eigen::MatrixXd phi;          // (nsigma+1) x nx, row 0 = bottom sigma=0
    std::vector<double> sigma;    // Chebyshev nodes ascending 0..1
    std::vector<complexd> top_modes;  // Fourier coefficients of Phi(., y_top)
};

StripPhiOracle::StripPhiOracle(const PeriodicField& b, double h, double y_top, int nx,
                               int nsigma)
    : impl_(std::make_unique<Impl>()) {
    impl_->h = h;
    impl_->y_top = y_top;
    impl_->nx = nx;
    impl_->nsigma = nsigma;
    impl_->b = b;

    // Chebyshev-Lobatto nodes ascending in sigma with d/dsigma matrix.
    const int ns = nsigma;
    Eigen::VectorXd t(ns + 1);
    for (int j = 0; j <= ns; ++j) t[j] = std::cos(std::numbers::pi * j / ns);
    Eigen::MatrixXd dt(ns + 1, ns + 1);
    auto cc = [ns](int j) { return (j == 0 || j == ns) ? 2.0 : 1.0; };
    for (int i = 0; i <= ns; ++i) {
        double rs = 0.0;
        for (int j = 0; j <= ns; ++j) {
            if (i == j) continue;
            dt(i, j) = (cc(i) / cc(j)) * (((i + j) % 2 == 0) ? 1.0 : -1.0) / (t[i] - t[j]);
            rs += dt(i, j);
        }
        dt(i, i) = -rs;
    }
    // ascending sigma: sigma = (1 - t)/2 maps t=1 -> 0 (bottom row 0)
    Eigen::MatrixXd ds = -2.0 * dt;
    impl_->sigma.resize(static_cast<size_t>(ns + 1));
    for (int j = 0; j <= ns; ++j) impl_->sigma[static_cast<size_t>(j)] = 0.5 * (1.0 - t[j]);

    // Fourier differentiation matrices on nx points. The first derivative
    // drops the Nyquist mode; the second derivative and |D| must keep it,
    // otherwise the sawtooth (-1)^i constant in sigma is a spurious kernel
    // vector of the whole system.
    Eigen::MatrixXd dx(nx, nx), dx2(nx, nx), absd(nx, nx);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nx; ++j) {
            complexd acc_d{0.0, 0.0};
            double acc_d2 = 0.0, acc_a = 0.0;
            for (int k = -nx / 2 + 1; k <= nx / 2 - 1; ++k) {
                const complexd e = std::polar(1.0, k * two_pi * (i - j) / nx);
                acc_d += complexd(0.0, k) * e;
                acc_d2 += -static_cast<double>(k) * k * e.real();
                acc_a += std::abs(k) * e.real();
            }
            const double nyq = std::cos(nx / 2 * two_pi * (i - j) / nx);
            acc_d2 += -std::pow(nx / 2.0, 2) * nyq;
            acc_a += (nx / 2.0) * nyq;
            dx(i, j) = acc_d.real() / nx;
            dx2(i, j) = acc_d2 / nx;
            absd(i, j) = acc_a / nx;
        }
    }

    const auto b_v = sample(b, nx);
    const auto bp_v = sample(derivative(b), nx);

    const int rows = ns + 1;
    const int n_unknowns = rows * nx;
    auto idx = [nx](int j, int i) { return j * nx + i; };
    // Constants span the kernel (pure Neumann-type problem); append a
    // mean-pin row and solve in the least-squares sense.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_unknowns + 1, n_unknowns);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknowns + 1);
    Eigen::MatrixXd d2s = ds * ds;

    for (int i = 0; i < nx; ++i) {
        const double delta = y_top + h - b_v[static_cast<size_t>(i)];
        const double bp = bp_v[static_cast<size_t>(i)];
        const double bpp = derivative(derivative(b)).synthesize(two_pi * i / nx);
        for (int j = 1; j < ns; ++j) {
            const double s = impl_->sigma[static_cast<size_t>(j)];
            const double sx = -(bp - s * bp) / delta;  // delta' = -b'
            const double sxx = -(bpp - s * bpp + 2.0 * sx * (-bp)) / delta;
            const double ass = sx * sx + 1.0 / (delta * delta);
            const int row = idx(j, i);
            // phi_xx + 2 sx phi_xs + ass phi_ss + sxx phi_s
            for (int i2 = 0; i2 < nx; ++i2) a(row, idx(j, i2)) += dx2(i, i2);
            for (int j2 = 0; j2 <= ns; ++j2)
                for (int i2 = 0; i2 < nx; ++i2)
                    a(row, idx(j2, i2)) += 2.0 * sx * ds(j, j2) * dx(i, i2);
            for (int j2 = 0; j2 <= ns; ++j2) {
                a(row, idx(j2, i)) += ass * d2s(j, j2) + sxx * ds(j, j2);
            }
        }
        {  // bottom Neumann: b' Phi_x - ((1+b'^2)/delta) phi_s = -b'
            const int row = idx(0, i);
            for (int i2 = 0; i2 < nx; ++i2) a(row, idx(0, i2)) += bp * dx(i, i2);
            const double coef = (1.0 + bp * bp) / delta;
            for (int j2 = 0; j2 <= ns; ++j2) a(row, idx(j2, i)) += -coef * ds(0, j2);
            rhs[row] = -bp;
        }
        {  // top radiation: phi_s/delta + |D| phi = 0
            const int row = idx(ns, i);
            for (int j2 = 0; j2 <= ns; ++j2) a(row, idx(j2, i)) += ds(ns, j2) / delta;
            for (int i2 = 0; i2 < nx; ++i2) a(row, idx(ns, i2)) += absd(i, i2);
        }
    }
    for (int i = 0; i < nx; ++i) a(n_unknowns, idx(ns, i)) = 1.0;

    Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
    impl_->phi.resize(rows, nx);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < nx; ++i) impl_->phi(j, i) = sol[idx(j, i)];

    // Fourier modes of the top trace for continuation above y_top.
    impl_->top_modes.assign(static_cast<size_t>(nx / 2 + 1), {0.0, 0.0});
    for (int k = 0; k <= nx / 2; ++k) {
        complexd acc{0.0, 0.0};
        for (int i = 0; i < nx; ++i)
            acc += impl_->phi(rows - 1, i) * std::polar(1.0, -k * two_pi * i / nx);
        impl_->top_modes[static_cast<size_t>(k)] = acc / static_cast<double>(nx);
    }
}

StripPhiOracle::~StripPhiOracle() = default;
StripPhiOracle::StripPhiOracle(StripPhiOracle&&) noexcept = default;

double StripPhiOracle::value(double x, double y) const {
    const auto& im = *impl_;
    if (y >= im.y_top) {
        // decaying harmonic continuation from the top trace
        double acc = im.top_modes[0].real();
        for (int k = 1; k <= im.nx / 2; ++k) {
            const complexd z = im.top_modes[static_cast<size_t>(k)] * std::polar(1.0, k * x) *
                               std::exp(-k * (y - im.y_top));
            acc += 2.0 * z.real();
        }
        return acc;
    }
    const double bx = im.b.synthesize(x);
    const double sigma = (y + im.h - bx) / (im.y_top + im.h - bx);

    // Fourier interpolation per Chebyshev level, then barycentric in sigma.
    const int rows = im.nsigma + 1;
    Eigen::VectorXd level_vals(rows);
    for (int j = 0; j < rows; ++j) {
        complexd acc{0.0, 0.0};
        for (int k = 0; k <= im.nx / 2; ++k) {
            complexd ck{0.0, 0.0};
            for (int i = 0; i < im.nx; ++i)
                ck += im.phi(j, i) * std::polar(1.0, -k * two_pi * i / im.nx);
            ck /= static_cast<double>(im.nx);
            acc += (k == 0) ? ck : 2.0 * ck * std::polar(1.0, k * x);
        }
        level_vals[j] = acc.real();
    }
    // barycentric weights for Chebyshev-Lobatto (ascending sigma)
    double num = 0.0, den = 0.0;
    for (int j = 0; j < rows; ++j) {
        const double sj = im.sigma[static_cast<size_t>(j)];
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == rows - 1) w *= 0.5;
        const double d = sigma - sj;
        if (std::abs(d) < 1e-14) return level_vals[j];
        num += w / d * level_vals[j];
        den += w / d;
    }
    return num / den;
}

}  // namespace sww::testing

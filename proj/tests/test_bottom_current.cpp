#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sww/bottom_current.hpp"

using namespace sww;

namespace {
constexpr double pi = std::numbers::pi;
SpectralConfig cfg32() { return SpectralConfig(32, 128, 1.0); }
}  // namespace

TEST_CASE("green kernel values") {
    // direct evaluation of the half-angle image kernel
    const double v1 = green_kernel(pi / 2.0, 0.0, 0.0, 1.0);
    const double t1 = std::log(std::pow(std::sin(pi / 4.0), 2)) / (4.0 * pi);
    const double t2 = std::log(std::pow(std::sin(pi / 4.0), 2) + std::pow(std::sinh(1.0), 2)) /
                      (4.0 * pi);
    CHECK(v1 == doctest::Approx(t1 + t2).epsilon(1e-14));

    const double v2 = green_kernel(pi, 1.0, 0.0, 1.0);
    const double s1 = std::log(1.0 + std::pow(std::sinh(0.5), 2)) / (4.0 * pi);
    const double s2 = std::log(1.0 + std::pow(std::sinh(1.5), 2)) / (4.0 * pi);
    CHECK(v2 == doctest::Approx(s1 + s2).epsilon(1e-14));

    CHECK_THROWS_AS(green_kernel(0.0, 0.3, 0.3, 1.0), ValidationError);
}

TEST_CASE("green kernel: image symmetry at the Neumann line") {
    // d/dy' G = 0 at y' = -h, tested by central differences just above the line.
    const double h = 0.7;
    for (double dx : {0.4, 1.3, 2.9}) {
        for (double y : {-0.3, 0.2, 1.5}) {
            const double eps = 1e-6;
            const double fd =
                (green_kernel(dx, y, -h + 2.0 * eps, h) - green_kernel(dx, y, -h + eps, h)) / eps;
            CHECK(std::abs(fd) < 1e-4);
        }
    }
}

TEST_CASE("green kernel is harmonic in the target point") {
    const double h = 1.0;
    const double e = 1e-4;
    for (double dx : {0.7, 2.1}) {
        for (double y : {-0.2, 0.8}) {
            const double lap =
                (green_kernel(dx + e, y, 0.1, h) + green_kernel(dx - e, y, 0.1, h) +
                 green_kernel(dx, y + e, 0.1, h) + green_kernel(dx, y - e, 0.1, h) -
                 4.0 * green_kernel(dx, y, 0.1, h)) /
                (e * e);
            CHECK(std::abs(lap) < 1e-5);
        }
    }
}

TEST_CASE("kernel_a: zero bottom, scaling, antisymmetry") {
    auto cfg = cfg32();
    const double h = 1.0;

    PeriodicField zero(cfg);
    CHECK(kernel_a(zero, 1.0, 0.3, h) == doctest::Approx(0.0));

    // linear scaling in the amplitude, interior point far from the boundary
    PeriodicField b1 = make_cos(cfg, 1, 0.02);
    PeriodicField b2 = make_cos(cfg, 1, 0.01);
    const double a1 = kernel_a(b1, 1.2, 0.0, h, 1024);
    const double a2 = kernel_a(b2, 1.2, 0.0, h, 1024);
    CHECK(a1 / a2 == doctest::Approx(2.0).epsilon(2e-2));  // O(eps^2) correction

    // for even b, A[b](x, y) is odd in x (quadrature oracle at +-x)
    for (double x : {0.5, 1.7}) {
        const double plus = kernel_a(b2, x, -0.2, h, 1024);
        const double minus = kernel_a(b2, -x, -0.2, h, 1024);
        CHECK(plus == doctest::Approx(-minus).epsilon(1e-10));
    }
}

TEST_CASE("kernel_a on the bottom: log quadrature consistency") {
    auto cfg = cfg32();
    const double h = 1.0;
    PeriodicField b = make_cos(cfg, 1, 0.01);
    // target at x = 0 where b(0) = 0.01 > 0 keeps the image term regular
    const double y0 = -h + b.synthesize(0.0);
    const double coarse = kernel_a(b, 0.0, y0, h, 512);
    const double fine = kernel_a(b, 0.0, y0, h, 2048);
    CHECK(coarse == doctest::Approx(fine).epsilon(1e-6));
    // quadrature-failure guard: b not resolved on the quadrature grid
    PeriodicField b8 = make_cos(cfg, 8, 0.01);
    CHECK_THROWS_AS(kernel_a(b8, 0.0, y0, h, 16), ResolutionError);
}

TEST_CASE("order-by-order: A[eps b] matches the flat-line kernel to O(eps^3)") {
    // The m = 0 kernel freezes y' at -h; the first-order correction vanishes
    // by the image symmetry, so the defect is cubic in the amplitude.
    auto cfg = cfg32();
    const double h = 1.0;
    const double x = 1.1, y = -0.1;
    auto a0_convolution = [&](const PeriodicField& bb) {
        const int n = 2048;
        double acc = 0.0;
        PeriodicField bp = derivative(bb);
        for (int j = 0; j < n; ++j) {
            const double xp = 2.0 * pi * j / n;
            acc += green_kernel(x - xp, y, -h, h) * bp.synthesize(xp);
        }
        return acc * 2.0 * pi / n;
    };
    double defect[2];
    int idx = 0;
    for (double eps : {0.02, 0.01}) {
        PeriodicField b = make_cos(cfg, 1, eps);
        defect[idx++] = std::abs(kernel_a(b, x, y, h, 2048) - a0_convolution(b));
    }
    CHECK(defect[0] / defect[1] > 6.0);  // cubic: ratio 8 up to higher order
}

TEST_CASE("solve_bottom_trace: zero bottom gives zero current") {
    auto cfg = cfg32();
    PeriodicField zero(cfg);
    auto cur = solve_bottom_trace(zero, 1.0);
    CHECK(cur.is_trivial());
    CHECK(cur.trace_max_abs() == 0.0);
    CHECK(cur.evaluate(1.0, 0.5, 1, 0) == 0.0);
    CHECK(cur.evaluate(0.2, 2.0, 0, 3) == 0.0);
    CHECK(cur.neumann_residual() < 1e-15);
}

TEST_CASE("solve_bottom_trace: amplitude scaling of the trace") {
    auto cfg = cfg32();
    auto c1 = solve_bottom_trace(make_cos(cfg, 1, 0.01), 1.0, 1e-12, 256);
    auto c2 = solve_bottom_trace(make_cos(cfg, 1, 0.005), 1.0, 1e-12, 256);
    CHECK(c1.trace_max_abs() < 0.05);  // |phi|_inf <= C |b|
    CHECK(c1.trace_max_abs() / c2.trace_max_abs() == doctest::Approx(2.0).epsilon(0.05));
    CHECK(c1.neumann_residual() < 1e-10);
}

TEST_CASE("solve_bottom_trace: pi-periodic bottom gives pi-periodic trace") {
    auto cfg = cfg32();
    auto cur = solve_bottom_trace(make_cos(cfg, 2, 0.01), 1.0, 1e-12, 256);
    const auto& tr = cur.bottom_trace();
    const size_t half = tr.size() / 2;
    for (size_t j = 0; j < half; ++j)
        CHECK(tr[j] == doctest::Approx(tr[j + half]).epsilon(1e-10).scale(0.01));
}

TEST_CASE("solve_bottom_trace: dense and Neumann-series solvers agree") {
    auto cfg = cfg32();
    PeriodicField b = make_cos(cfg, 1, 0.01);
    auto dense = solve_bottom_trace(b, 1.0, 1e-13, 256, TraceSolver::kDense);
    auto series = solve_bottom_trace(b, 1.0, 1e-13, 256, TraceSolver::kNeumannSeries);
    const auto& t1 = dense.bottom_trace();
    const auto& t2 = series.bottom_trace();
    double worst = 0.0;
    for (size_t j = 0; j < t1.size(); ++j) worst = std::max(worst, std::abs(t1[j] - t2[j]));
    CHECK(worst < 1e-10);
}

TEST_CASE("solve_bottom_trace: Neumann series diverges for a large bottom") {
    auto cfg = cfg32();
    PeriodicField b = make_cos(cfg, 4, 0.55);
    CHECK_THROWS_AS(solve_bottom_trace(b, 1.0, 1e-12, 256, TraceSolver::kNeumannSeries),
                    ConvergenceError);
}

TEST_CASE("evaluate_phi guards") {
    auto cfg = cfg32();
    auto cur = solve_bottom_trace(make_cos(cfg, 1, 0.01), 1.0, 1e-12, 256);
    CHECK_THROWS_AS(cur.evaluate(0.0, 0.0, 2, 2), ValidationError);     // order > 3
    CHECK_THROWS_AS(cur.evaluate(0.0, -1.5, 0, 0), ValidationError);    // below bottom
    CHECK_THROWS_AS(cur.evaluate(0.0, -0.985, 0, 0), ResolutionError);  // near boundary
}

TEST_CASE("evaluate_phi: harmonic and decaying") {
    auto cfg = cfg32();
    auto cur = solve_bottom_trace(make_cos(cfg, 1, 0.01), 1.0, 1e-12, 256);
    // 5-point Laplacian at interior points
    const double e = 1e-3;
    for (double x : {0.4, 2.7}) {
        for (double y : {-0.5, 0.4}) {
            const double lap = (cur.evaluate(x + e, y) + cur.evaluate(x - e, y) +
                                cur.evaluate(x, y + e) + cur.evaluate(x, y - e) -
                                4.0 * cur.evaluate(x, y)) /
                               (e * e);
            CHECK(std::abs(lap) < 1e-6);
        }
    }
    // gradient decay: with the lowest active mode k >= 3 the ratio between
    // y = 3h and y = 0 is at most e^{-9} ~ 1.2e-4 < 1e-3
    PeriodicField b3(cfg);
    b3.set_coeff(3, {0.005, 0.0});
    b3.set_coeff(5, {0.0, 0.002});
    auto cur3 = solve_bottom_trace(b3, 1.0, 1e-12, 256);
    double g0 = 0.0, g3 = 0.0;
    for (double x : {0.3, 1.9, 4.4}) {
        g0 = std::max(g0, std::hypot(cur3.evaluate(x, 0.0, 1, 0), cur3.evaluate(x, 0.0, 0, 1)));
        g3 = std::max(g3, std::hypot(cur3.evaluate(x, 3.0, 1, 0), cur3.evaluate(x, 3.0, 0, 1)));
    }
    CHECK(g3 < 1e-3 * g0);
}

TEST_CASE("evaluate_phi: sup bound linear in the bottom norm") {
    auto cfg = cfg32();
    double prev_ratio = 0.0;
    for (double a : {0.02, 0.01, 0.005}) {
        auto cur = solve_bottom_trace(make_cos(cfg, 1, a), 1.0, 1e-12, 256);
        double sup = 0.0;
        for (int i = 0; i < 64; ++i)
            sup = std::max(sup, std::abs(cur.evaluate(2.0 * pi * i / 64, -0.2)));
        const double ratio = sup / sobolev_norm(make_cos(cfg, 1, a), cfg.s + 1.0);
        if (prev_ratio > 0.0) CHECK(ratio == doctest::Approx(prev_ratio).epsilon(0.05));
        prev_ratio = ratio;
    }
}

TEST_CASE("interior Green identity: Phi = A[b] + B[b] phi up to a constant") {
    auto cfg = cfg32();
    const double h = 1.0;
    PeriodicField b = make_cos(cfg, 1, 0.01);
    auto cur = solve_bottom_trace(b, h, 1e-13, 512);

    // At interior points well above the bottom, the layer representation
    // built from the trace must reproduce Phi_b up to one global constant.
    std::vector<double> diffs;
    for (double x : {0.3, 1.2, 2.8, 4.9}) {
        for (double y : {-0.45, -0.1, 0.35}) {
            const double rep =
                kernel_a(b, x, y, h, 512) + kernel_b_apply(b, cur.bottom_trace(), x, y, h);
            diffs.push_back(cur.evaluate(x, y) - rep);
        }
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    for (double d : diffs) CHECK(std::abs(d - mean) < 1e-9);
}

TEST_CASE("B operator vanishes at b = 0") {
    auto cfg = cfg32();
    PeriodicField zero(cfg);
    std::vector<double> trace(256);
    for (size_t j = 0; j < trace.size(); ++j)
        trace[j] = std::cos(2.0 * pi * static_cast<double>(j) / trace.size());
    for (double x : {0.3, 1.9}) {
        for (double y : {-0.4, 0.6})
            CHECK(std::abs(kernel_b_apply(zero, trace, x, y, 1.0)) < 1e-14);
    }
}

TEST_CASE("cross-validation against the strip oracle") {
    auto cfg = cfg32();
    const double h = 1.0;
    for (double a : {0.01, 0.005}) {
        PeriodicField b = make_cos(cfg, 1, a);
        auto cur = solve_bottom_trace(b, h, 1e-13, 256);
        sww::testing::StripPhiOracle oracle(b, h, -0.3, 48, 24);
        const double sup = cur.trace_max_abs();
        for (double x : {0.4, 1.5, 3.3, 5.1}) {
            for (double y : {-0.8, -0.5, -0.35, 0.2}) {
                CHECK(cur.evaluate(x, y) ==
                      doctest::Approx(oracle.value(x, y)).epsilon(1e-6).scale(sup));
            }
        }
    }
}

TEST_CASE("trace solve rejects unresolved bottoms") {
    auto cfg = SpectralConfig(32, 128, 1.0);
    PeriodicField b = make_cos(cfg, 20, 0.001);
    CHECK_THROWS_AS(solve_bottom_trace(b, 1.0, 1e-12, 64), ValidationError);
}

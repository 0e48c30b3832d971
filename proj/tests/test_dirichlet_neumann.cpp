#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sww/dirichlet_neumann.hpp"

using namespace sww;

namespace {
constexpr double pi = std::numbers::pi;

SpectralConfig cfg32() { return SpectralConfig(32, 128, 1.0); }

PeriodicField random_field(const SpectralConfig& cfg, std::mt19937_64& rng, int max_mode,
                           double amplitude) {
    std::normal_distribution<double> dist;
    PeriodicField f(cfg);
    for (int k = 1; k <= max_mode; ++k)
        f.set_coeff(k, amplitude * complexd(dist(rng), dist(rng)) / (1.0 + k * k));
    return f;
}
}  // namespace

TEST_CASE("fluid domain invariant") {
    auto cfg = cfg32();
    PeriodicField zero(cfg);
    CHECK_NOTHROW(FluidDomain(zero, zero, 1.0));
    PeriodicField deep_eta = make_cos(cfg, 1, 1.2);
    CHECK_THROWS_AS(FluidDomain(deep_eta, zero, 1.0), ValidationError);  // layer collapse
    CHECK_THROWS_AS(FluidDomain(zero, zero, -1.0), ValidationError);
}

TEST_CASE("flat case reproduces the symbol at resolved wavenumbers") {
    auto cfg = cfg32();
    PeriodicField zero(cfg);
    for (double h : {0.5, 1.0, 2.0}) {
        DnSolver solver(cfg, h);
        FluidDomain dom(zero, zero, h);
        for (int k = 1; k <= cfg.n_modes / 4; ++k) {
            auto res = solver.apply(dom, make_cos(cfg, k));
            const double expect = k * std::tanh(h * k);
            CHECK(2.0 * res.value.coeff(k).real() == doctest::Approx(expect).epsilon(1e-10));
            // all other modes stay empty
            for (int k2 = 1; k2 <= cfg.n_modes; ++k2) {
                if (k2 == k) continue;
                CHECK(std::abs(res.value.coeff(k2)) < 1e-11);
            }
        }
    }
}

TEST_CASE("zero Dirichlet data gives zero output") {
    auto cfg = cfg32();
    PeriodicField zero(cfg);
    FluidDomain dom(make_cos(cfg, 1, 0.05), make_cos(cfg, 2, 0.03), 1.0);
    auto res = dn_apply(dom, zero);
    CHECK(res.value.is_zero());
}

TEST_CASE("nonflat surface against the FD oracle") {
    auto cfg = cfg32();
    const double h = 1.0;
    PeriodicField eta = make_cos(cfg, 1, 0.01);
    PeriodicField b(cfg);
    PeriodicField xi = make_cos(cfg, 1);
    FluidDomain dom(eta, b, h);
    auto res = dn_apply(dom, xi);

    auto oracle = sww::testing::fd_dn_surface_refined(eta, b, h, xi, 128, 64);
    double mean = 0.0;
    for (double v : oracle) mean += v;
    mean /= static_cast<double>(oracle.size());

    const auto got = res.value.grid_values();
    double scale = 0.0;
    for (double v : oracle) scale = std::max(scale, std::abs(v));
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(oracle[i] - mean).epsilon(1e-5).scale(scale));
}

TEST_CASE("nonflat bottom against the FD oracle") {
    auto cfg = cfg32();
    const double h = 1.0;
    PeriodicField eta = make_cos(cfg, 2, 0.008);
    PeriodicField b = make_cos(cfg, 1, 0.01);
    PeriodicField xi = make_sin(cfg, 1);
    FluidDomain dom(eta, b, h);
    auto res = dn_apply(dom, xi);

    auto oracle = sww::testing::fd_dn_surface_refined(eta, b, h, xi, 128, 64);
    double mean = 0.0;
    for (double v : oracle) mean += v;
    mean /= static_cast<double>(oracle.size());
    const auto got = res.value.grid_values();
    double scale = 0.0;
    for (double v : oracle) scale = std::max(scale, std::abs(v));
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(oracle[i] - mean).epsilon(2e-5).scale(scale));
}

TEST_CASE("symmetry and positivity of G(eta;b)") {
    auto cfg = cfg32();
    const double h = 1.0;
    std::mt19937_64 rng(17);
    DnSolver solver(cfg, h);
    for (int trial = 0; trial < 3; ++trial) {
        PeriodicField eta = random_field(cfg, rng, 6, 0.02);
        PeriodicField b = random_field(cfg, rng, 4, 0.02);
        FluidDomain dom(eta, b, h);
        PeriodicField x1 = random_field(cfg, rng, 8, 1.0);
        PeriodicField x2 = random_field(cfg, rng, 8, 1.0);
        const double lhs = inner(solver.apply(dom, x1).value, x2);
        const double rhs = inner(x1, solver.apply(dom, x2).value);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
        CHECK(inner(solver.apply(dom, x1).value, x1) >= -1e-10);
    }
}

TEST_CASE("surface mean vanishes before projection") {
    auto cfg = cfg32();
    std::mt19937_64 rng(23);
    DnSolver solver(cfg, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        PeriodicField eta = random_field(cfg, rng, 6, 0.02);
        PeriodicField b = random_field(cfg, rng, 4, 0.02);
        FluidDomain dom(eta, b, 1.0);
        auto res = solver.apply(dom, random_field(cfg, rng, 8, 1.0));
        CHECK(std::abs(res.report.surface_mean) < 1e-9);
    }
}

TEST_CASE("solver reports residuals below tolerance") {
    auto cfg = cfg32();
    FluidDomain dom(make_cos(cfg, 1, 0.03), make_cos(cfg, 2, 0.02), 1.0);
    auto res = dn_apply(dom, make_cos(cfg, 3));
    CHECK(res.report.residual < 1e-10);
    CHECK(res.report.bottom_neumann_residual < 1e-9);
    CHECK(res.report.vertical_points >= 8);
}

TEST_CASE("linearized flat-bottom term") {
    auto cfg = cfg32();
    const double h = 1.0;
    PeriodicField eta = make_cos(cfg, 1, 0.005);
    PeriodicField xi = make_cos(cfg, 1);

    CHECK(dn_flat_bottom_linearized(PeriodicField(cfg), xi, h).is_zero());

    // Richardson consistency: halving the amplitude of eta changes the
    // extracted slope only at O(amplitude^2).
    PeriodicField l1 = dn_flat_bottom_linearized(eta, xi, h);
    PeriodicField l2 = dn_flat_bottom_linearized(0.5 * eta, xi, h);
    PeriodicField half_expected = 0.5 * l1;
    CHECK(sobolev_norm(l2 - half_expected, 0.0) < 2e-5 * sobolev_norm(l1, 0.0) + 1e-12);

    // symmetry of the linear-in-eta form in (xi1, xi2)
    PeriodicField x2 = make_sin(cfg, 2);
    DnSolver solver(cfg, h);
    PeriodicField zero(cfg);
    auto bil = [&](const PeriodicField& a, const PeriodicField& bb) {
        FluidDomain dom(eta, zero, h);
        PeriodicField diff = solver.apply(dom, bb).value - flat_dn_apply(bb, h);
        return inner(a, diff);
    };
    CHECK(bil(x2, xi) == doctest::Approx(bil(xi, x2)).epsilon(1e-6));
}

TEST_CASE("translation equivariance of the solver") {
    auto cfg = cfg32();
    std::mt19937_64 rng(5);
    PeriodicField eta = random_field(cfg, rng, 5, 0.02);
    PeriodicField xi = random_field(cfg, rng, 6, 1.0);
    PeriodicField zero(cfg);
    DnSolver solver(cfg, 1.0);
    const double phi = 1.2345;
    auto direct = solver.apply(FluidDomain(eta.translate(phi), zero, 1.0), xi.translate(phi));
    auto shifted = solver.apply(FluidDomain(eta, zero, 1.0), xi).value.translate(phi);
    CHECK(sobolev_norm(direct.value - shifted, 0.0) < 1e-9);
}

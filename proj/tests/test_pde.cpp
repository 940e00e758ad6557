#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "test_util.hpp"

#include "curveflow/oracle.hpp"
#include "curveflow/pde.hpp"

using namespace curveflow;
namespace tu = curveflow::testutil;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("pde") {

TEST_CASE("coefficients at zero height") {
    const int N = 128;
    auto map = tu::cosine_map(kPi / 2, 1.0, N);
    const double L = map->reference().length();
    HeightField hf;
    hf.rho.assign(N + 1, 0.0);
    PdeCoefficients c = coefficients(*map, hf);
    for (double a : c.a) CHECK(a == doctest::Approx(1.0 / std::pow(L, 4)).epsilon(1e-12));
    CHECK(c.b2_left == doctest::Approx(1.0 / std::pow(L, 3)).epsilon(1e-12));
    CHECK(c.b2_right == doctest::Approx(1.0 / std::pow(L, 3)).epsilon(1e-12));
    CHECK(c.b1 == 1.0);
}

TEST_CASE("coefficients stay positive on admissible states") {
    auto map = tu::cosine_map(2.2, 1.0, 128);
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        HeightField hf = tu::random_admissible(*map, rng, 0.6);
        PdeCoefficients c = coefficients(*map, hf);
        for (double a : c.a) CHECK(a > 0.0);
        CHECK(c.b2_left != 0.0);
        CHECK(c.b2_right != 0.0);
    }
}

TEST_CASE("splitting identity between quasilinear form and raw evolution") {
    auto map = tu::cosine_map(1.9, 1.0, 128);
    std::mt19937_64 rng(13);
    HeightField hf = tu::random_admissible(*map, rng, 0.55);
    NonlinearRhs rhs = nonlinear_rhs(*map, hf);
    PdeCoefficients c = coefficients(*map, hf, Closure::Flow);
    double scale = tu::max_abs(rhs.N) + 1.0;
    for (int i = 0; i <= 128; ++i) {
        double lhs = c.a[i] * rhs.d4[i] - rhs.f[i];
        CHECK(std::fabs(lhs + rhs.N[i]) < 1e-11 * scale);
    }
}

TEST_CASE("boundary encoding recovers the curvature derivative") {
    auto map = tu::cosine_map(2.3, 1.0, 128);
    std::mt19937_64 rng(23);
    HeightField hf = tu::random_admissible(*map, rng, 0.5);

    FlowBC bc = noflux_boundary(*map, hf.rho);
    HeightDerivs d = compute_derivs(hf.rho, Closure::Flow, bc);
    GeometryEval g = evaluate_geometry(*map, hf, Closure::Flow);
    NonlinearRhs rhs = nonlinear_rhs(*map, hf, Closure::Flow);
    PdeCoefficients c = coefficients(*map, hf, Closure::Flow);

    CHECK(std::fabs(c.b2_left * d.d3[0] + rhs.g2_left - g.ks[0]) < 1e-10);
    CHECK(std::fabs(c.b2_right * d.d3[128] + rhs.g2_right - g.ks[128]) < 1e-10);
}

TEST_CASE("zero-height right-hand side matches the oracle Laplacian of curvature") {
    // fine = 2048 sits near the double-precision noise optimum of the
    // divided-difference d^2 kappa / ds^2 (rounding grows like eps/h^4)
    const int N = 256, fine = 2048;
    auto map = tu::cosine_map(kPi / 2, 1.0, N);
    HeightField hf;
    hf.rho.assign(N + 1, 0.0);
    NonlinearRhs rhs = nonlinear_rhs(*map, hf);

    auto ref_fine = build_reference_from_angle(kPi / 2, 1.0, fine);
    OracleGeometry og = oracle_curvature(ref_fine.phi_samples());
    // rho_t at zero height equals -(L/ip) * (Laplace-Beltrami kappa); for
    // alpha = pi/2 the prefactor is 1
    double scale = tu::max_abs(og.kss);
    for (int i = 0; i <= N; ++i) {
        double n_val = rhs.f[i] - 0.0;  // a * d4(0) = 0
        CHECK(std::fabs(n_val + og.kss[i * (fine / N)]) / scale < 6e-3);
    }
}

TEST_CASE("Jacobian of the evolution against the fourth derivative slot") {
    const int N = 96;
    auto map = tu::cosine_map(2.0, 1.0, N);
    std::mt19937_64 rng(41);
    HeightField hf = tu::random_admissible(*map, rng, 0.5);
    auto d = compute_derivs(hf.rho, Closure::OneSided);

    HeightField probe = hf;
    probe.exact = {{d.d1, d.d2, d.d3, d.d4}};
    NonlinearRhs base = nonlinear_rhs(*map, probe);
    PdeCoefficients c = coefficients(*map, probe);

    const double delta = 1e-4;
    for (int i : {0, 10, 47, 96}) {
        HeightField bumped = probe;
        (*bumped.exact)[3][i] += delta;
        NonlinearRhs after = nonlinear_rhs(*map, bumped);
        double jac = (after.N[i] - base.N[i]) / delta;
        CHECK(jac == doctest::Approx(-c.a[i]).epsilon(1e-8));
    }
}

TEST_CASE("nonlinearity F at the initial datum") {
    const int N = 128;
    auto map = tu::cosine_map(2.1, 1.0, N);
    std::mt19937_64 rng(19);
    HeightField hf = tu::random_admissible(*map, rng, 0.4);
    NonlinearityF F = nonlinearity_F(*map, hf, hf);
    NonlinearRhs rhs = nonlinear_rhs(*map, hf);
    CHECK(tu::max_abs_diff(F.F, rhs.f) < 1e-13 * (1.0 + tu::max_abs(rhs.f)));
    CHECK(F.G1 == 0.0);
    CHECK(F.G2_left == doctest::Approx(-rhs.g2_left).epsilon(1e-13));
    CHECK(F.G2_right == doctest::Approx(-rhs.g2_right).epsilon(1e-13));
}

TEST_CASE("nonlinearity F is continuous in the height") {
    const int N = 128;
    auto map = tu::cosine_map(2.1, 1.0, N);
    std::mt19937_64 rng(29);
    HeightField h0 = tu::random_admissible(*map, rng, 0.3);
    HeightField dir = tu::random_admissible(*map, rng, 0.2);

    NonlinearityF base = nonlinearity_F(*map, h0, h0);
    double prev_ratio = -1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        HeightField h = h0;
        for (int i = 0; i <= N; ++i) h.rho[i] += eps * dir.rho[i];
        NonlinearityF Fe = nonlinearity_F(*map, h, h0);
        double num = tu::max_abs_diff(Fe.F, base.F) +
                     std::fabs(Fe.G2_left - base.G2_left) +
                     std::fabs(Fe.G2_right - base.G2_right);
        double ratio = num / eps;
        CHECK(std::isfinite(ratio));
        if (prev_ratio > 0.0) CHECK(ratio < 3.0 * prev_ratio + 1e-9);
        prev_ratio = ratio;
    }
}

TEST_CASE("splitting consistency of the fixed-point right-hand side") {
    // solving rho_t + a(rho0) d4 rho = F(rho) at rho reproduces rho_t = N(rho)
    const int N = 128;
    auto map = tu::cosine_map(1.8, 1.0, N);
    std::mt19937_64 rng(37);
    HeightField h0 = tu::random_admissible(*map, rng, 0.3);
    HeightField h = tu::random_admissible(*map, rng, 0.45);

    NonlinearityF F = nonlinearity_F(*map, h, h0);
    NonlinearRhs rhs = nonlinear_rhs(*map, h);
    PdeCoefficients c0 = coefficients(*map, h0);
    double scale = 1.0 + tu::max_abs(rhs.N);
    for (int i = 0; i <= N; ++i) {
        double rho_t = F.F[i] - c0.a[i] * rhs.d4[i];
        CHECK(std::fabs(rho_t - rhs.N[i]) < 1e-10 * scale);
    }
}

TEST_CASE("Lopatinskii-Shapiro determinant at lambda = 1") {
    LsReport rep = ls_check(1.0, 1.0, 65);
    bool found = false;
    for (std::size_t i = 0; i < rep.lambda_samples.size(); ++i) {
        if (std::abs(rep.lambda_samples[i] - std::complex<double>(1.0, 0.0)) < 1e-14) {
            found = true;
            CHECK(std::abs(rep.det_values[i] - std::complex<double>(0.0, -2.0)) < 1e-12);
        }
    }
    CHECK(found);
}

TEST_CASE("determinant modulus identity 2|lambda|/a") {
    for (double a : {1.0, 0.37, 5.5}) {
        LsReport rep = ls_check(a, 0.8, 64);
        CHECK(rep.lambda_samples.size() == 3 * 64);
        for (std::size_t i = 0; i < rep.lambda_samples.size(); ++i) {
            double expected = 2.0 * std::abs(rep.lambda_samples[i]) / a;
            CHECK(std::abs(std::abs(rep.det_values[i]) - expected) < 1e-12 * expected);
        }
        CHECK(rep.min_abs_det == doctest::Approx(2e-3 / a).epsilon(1e-12));
        CHECK(rep.roots_decay);
        CHECK(rep.symbol_spectrum_ok);
        CHECK(rep.max_formula_mismatch < 1e-12);
    }
}

TEST_CASE("ls_check rejects degenerate coefficients") {
    CHECK_THROWS_AS(ls_check(-1.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(ls_check(0.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(ls_check(1.0, 0.0, 16), std::invalid_argument);
}

} // TEST_SUITE

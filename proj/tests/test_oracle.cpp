#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/oracle.hpp"

using namespace curveflow;
namespace tu = curveflow::testutil;

namespace {
constexpr double kPi = 3.14159265358979323846;

ParametricCurve perturbed_arc(double alpha, double chord, int M, double eps) {
    ParametricCurve c = equilibrium_arc(alpha, chord, M);
    for (int i = 1; i < M; ++i) {
        double s = static_cast<double>(i) / M;
        c.x[i].y *= 1.0 + eps * std::sin(kPi * s);
    }
    return c;
}
} // namespace

TEST_SUITE("oracle") {

TEST_CASE("unit semicircle has curvature one") {
    const int M = 200;
    std::vector<Vec2> pts(M + 1);
    for (int i = 0; i <= M; ++i) {
        double s = kPi * i / M;
        pts[i] = {std::cos(s), std::sin(s)};
    }
    OracleGeometry g = oracle_curvature(pts);
    for (int i = 0; i <= M; ++i) {
        CHECK(g.kappa[i] == doctest::Approx(1.0).epsilon(5e-3));
        bool near_end = i <= 2 || i >= M - 2;
        CHECK(std::fabs(g.ks[i]) < (near_end ? 2e-2 : 5e-3));
    }
}

TEST_CASE("oracle curvature matches the reference-curve profile") {
    ReferenceCurve c = build_reference_from_angle(kPi / 2, 1.0, 512);
    OracleGeometry g = oracle_curvature(c.phi_samples());
    for (int i = 2; i <= 510; i += 23) {
        CHECK(g.kappa[i] ==
              doctest::Approx(c.kappa_samples()[i]).epsilon(5e-4));
    }
}

TEST_CASE("equilibrium arcs have the documented geometry") {
    ParametricCurve semi = equilibrium_arc(kPi / 2, 2.0, 200);
    for (const auto& p : semi.x) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(semi.x.front().x == doctest::Approx(-1.0));
    CHECK(semi.x.back().x == doctest::Approx(1.0));

    ParametricCurve quarter = equilibrium_arc(kPi / 4, 2.0, 200);
    const double r = std::sqrt(2.0);
    Vec2 center{0.0, -r * std::cos(kPi / 4)};
    for (const auto& p : quarter.x)
        CHECK((p - center).norm() == doctest::Approx(r).epsilon(1e-13));
    // the first chord points along the tangent at the half-step angle
    Vec2 t0 = quarter.x[1] - quarter.x[0];
    t0 = (1.0 / t0.norm()) * t0;
    double half = kPi / 4 * (1.0 - 1.0 / 200);
    CHECK(t0.x == doctest::Approx(std::cos(half)).epsilon(1e-6));
    CHECK(t0.y == doctest::Approx(std::sin(half)).epsilon(1e-6));
}

TEST_CASE("equilibrium arcs are stationary") {
    // M = 128: the rounding floor of the h^-4 divided-difference chain
    // stays below the bar
    for (double alpha : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
        ParametricCurve arc = equilibrium_arc(alpha, 2.0, 128);
        std::vector<double> v = oracle_velocity(arc);
        CHECK(tu::max_abs(v) < 1e-8);
    }
}

TEST_CASE("stepping an equilibrium arc does not move it") {
    ParametricCurve arc = equilibrium_arc(kPi / 2, 2.0, 200);
    ParametricCurve next = oracle_step(arc, 1e-4);
    double disp = 0.0;
    for (int i = 0; i <= 200; ++i)
        disp = std::max(disp, (next.x[i] - arc.x[i]).norm());
    CHECK(disp < 1e-8 * 2.0);
}

TEST_CASE("length decreases along the flow of a perturbed arc") {
    ParametricCurve c = perturbed_arc(kPi / 2, 2.0, 200, 0.02);
    double L = polyline_length(c.x);
    for (int step = 0; step < 100; ++step) {
        c = oracle_step(c, 5e-5);
        double Lnew = polyline_length(c.x);
        CHECK(Lnew < L + 1e-12);
        L = Lnew;
    }
}

TEST_CASE("area is conserved along the flow") {
    ParametricCurve c = perturbed_arc(kPi / 2, 2.0, 200, 0.02);
    double A0 = curve_area(c.x);
    double worst = 0.0;
    for (int step = 0; step < 200; ++step) {
        c = oracle_step(c, 5e-5);
        worst = std::max(worst, std::fabs(curve_area(c.x) - A0));
    }
    CHECK(worst <= 1e-5 * std::fabs(A0));
}

TEST_CASE("perturbed arc converges back to an arc") {
    ParametricCurve c = perturbed_arc(kPi / 2, 2.0, 200, 0.01);
    double dist = tu::best_fit_arc(c.x, c.alpha).max_dist;
    CHECK(dist > 1e-3);  // actually perturbed
    const double dt = 2e-4;
    for (int step = 0; step < 4000; ++step) {
        c = oracle_step(c, dt);
        if (step % 500 == 0) {
            double now = tu::best_fit_arc(c.x, c.alpha).max_dist;
            dist = now;
        }
    }
    dist = tu::best_fit_arc(c.x, c.alpha).max_dist;
    INFO("final distance to best-fit arc: ", dist);
    CHECK(dist < 1e-4);
    CHECK(spacing_ratio(c.x) < 2.0);
}

TEST_CASE("redistribution does not change the shape") {
    ParametricCurve a = perturbed_arc(kPi / 2, 2.0, 400, 0.02);
    ParametricCurve b = a;
    OracleStepOptions with{}, without{};
    without.redistribute = false;
    for (int step = 0; step < 50; ++step) {
        a = oracle_step(a, 5e-5, with);
        b = oracle_step(b, 5e-5, without);
    }
    CHECK(tu::hausdorff(a.x, b.x) < 2e-3);
}

TEST_CASE("explicit mode enforces the stability bound") {
    ParametricCurve c = equilibrium_arc(kPi / 2, 2.0, 64);
    OracleStepOptions opts;
    opts.semi_implicit = false;
    CHECK_THROWS_AS(oracle_step(c, 1e-3, opts), StepError);
    // a tiny step passes
    double h = polyline_length(c.x) / 64;
    ParametricCurve next = oracle_step(c, h * h * h * h / 10.0, opts);
    CHECK(next.nodes() == c.nodes());
}

} // TEST_SUITE

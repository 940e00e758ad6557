#include "curveflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

constexpr double kJFloorRel = 1e-8;

double simpson(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size()) - 1;
    double s = f[0] + f[n];
    for (int i = 1; i < n; ++i) s += f[i] * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace

HeightDerivs compute_derivs(const std::vector<double>& rho, Closure closure,
                            FlowBC bc) {
    const int N = static_cast<int>(rho.size()) - 1;
    if (N < 8) throw std::invalid_argument("compute_derivs: grid too small");
    const double h = 1.0 / N;
    HeightDerivs out;
    out.d1.resize(N + 1);
    out.d2.resize(N + 1);
    out.d3.resize(N + 1);
    out.d4.resize(N + 1);

    const double h2 = h * h, h3 = h2 * h, h4 = h3 * h;

    if (closure == Closure::OneSided) {
        auto f = [&](int i) { return rho[i]; };
        for (int i = 0; i <= N; ++i) {
            // first and second derivative
            if (i >= 1 && i <= N - 1) {
                out.d1[i] = (f(i + 1) - f(i - 1)) / (2 * h);
                out.d2[i] = (f(i + 1) - 2 * f(i) + f(i - 1)) / h2;
            } else if (i == 0) {
                out.d1[i] = (-3 * f(0) + 4 * f(1) - f(2)) / (2 * h);
                out.d2[i] = (2 * f(0) - 5 * f(1) + 4 * f(2) - f(3)) / h2;
            } else {
                out.d1[i] = (3 * f(N) - 4 * f(N - 1) + f(N - 2)) / (2 * h);
                out.d2[i] = (2 * f(N) - 5 * f(N - 1) + 4 * f(N - 2) - f(N - 3)) / h2;
            }
            // third and fourth derivative
            if (i >= 2 && i <= N - 2) {
                out.d3[i] = (f(i + 2) - 2 * f(i + 1) + 2 * f(i - 1) - f(i - 2)) / (2 * h3);
                out.d4[i] = (f(i + 2) - 4 * f(i + 1) + 6 * f(i) - 4 * f(i - 1) + f(i - 2)) / h4;
            } else if (i == 0) {
                out.d3[i] = (-5 * f(0) + 18 * f(1) - 24 * f(2) + 14 * f(3) - 3 * f(4)) / (2 * h3);
                out.d4[i] = (3 * f(0) - 14 * f(1) + 26 * f(2) - 24 * f(3) + 11 * f(4) - 2 * f(5)) / h4;
            } else if (i == 1) {
                out.d3[i] = (-3 * f(0) + 10 * f(1) - 12 * f(2) + 6 * f(3) - f(4)) / (2 * h3);
                out.d4[i] = (2 * f(0) - 9 * f(1) + 16 * f(2) - 14 * f(3) + 6 * f(4) - f(5)) / h4;
            } else if (i == N - 1) {
                out.d3[i] = -(-3 * f(N) + 10 * f(N - 1) - 12 * f(N - 2) + 6 * f(N - 3) - f(N - 4)) / (2 * h3);
                out.d4[i] = (2 * f(N) - 9 * f(N - 1) + 16 * f(N - 2) - 14 * f(N - 3) + 6 * f(N - 4) - f(N - 5)) / h4;
            } else {
                out.d3[i] = -(-5 * f(N) + 18 * f(N - 1) - 24 * f(N - 2) + 14 * f(N - 3) - 3 * f(N - 4)) / (2 * h3);
                out.d4[i] = (3 * f(N) - 14 * f(N - 1) + 26 * f(N - 2) - 24 * f(N - 3) + 11 * f(N - 4) - 2 * f(N - 5)) / h4;
            }
        }
        return out;
    }

    // ghost-extended grids (Mirror / Flow)
    auto f = [&](int i) -> double {
        if (i >= 0 && i <= N) return rho[i];
        if (i == -1) return rho[1];
        if (i == -2)
            return closure == Closure::Mirror ? rho[2] : rho[2] - 2 * h3 * bc.c0;
        if (i == N + 1) return rho[N - 1];
        if (i == N + 2)
            return closure == Closure::Mirror ? rho[N - 2] : rho[N - 2] + 2 * h3 * bc.c1;
        throw std::logic_error("compute_derivs: ghost out of range");
    };
    for (int i = 0; i <= N; ++i) {
        out.d1[i] = (f(i + 1) - f(i - 1)) / (2 * h);
        out.d2[i] = (f(i + 1) - 2 * f(i) + f(i - 1)) / h2;
        out.d3[i] = (f(i + 2) - 2 * f(i + 1) + 2 * f(i - 1) - f(i - 2)) / (2 * h3);
        out.d4[i] = (f(i + 2) - 4 * f(i + 1) + 6 * f(i) - 4 * f(i - 1) + f(i - 2)) / h4;
    }
    return out;
}

NodeGeometry eval_node(const CurvilinearMap::Derivs& D,
                       const std::array<double, 5>& r, double length) {
    NodeGeometry g;
    const Vec2 P1 = D.A[1] + r[0] * D.B[1] + r[1] * D.B[0];
    const Vec2 P2 = D.A[2] + r[0] * D.B[2] + 2 * r[1] * D.B[1] + r[2] * D.B[0];
    const Vec2 P3 = D.A[3] + r[0] * D.B[3] + 3 * r[1] * D.B[2] +
                    3 * r[2] * D.B[1] + r[3] * D.B[0];
    const Vec2 P4 = D.A[4] + r[0] * D.B[4] + 4 * r[1] * D.B[3] +
                    6 * r[2] * D.B[2] + 4 * r[3] * D.B[1] + r[4] * D.B[0];

    const double J = P1.norm();
    if (J < kJFloorRel * length)
        throw DegenerateError("degenerate parametrization: J below floor");
    g.J = J;
    g.tau = (1.0 / J) * P1;
    g.n = rot90(g.tau);

    const Vec2 psi_sigma = D.A[1] + r[0] * D.B[1];
    g.ip = dot(D.B[0], rot90(psi_sigma));

    const double J2 = J * J, J3 = J2 * J, J4 = J3 * J;
    const double P = dot(P2, rot90(P1));
    g.kappa = P / J3;

    const double Q = dot(P3, rot90(P1));
    const double G = dot(P1, P2);
    g.ks = Q / J4 - 3.0 * g.kappa * G / J3;

    const double Qp = dot(P4, rot90(P1)) + dot(P3, rot90(P2));
    const double Gp = P2.norm2() + dot(P1, P3);
    const double Jp = G / J;
    const double dks = Qp / J4 - 4.0 * Q * Jp / (J4 * J) -
                       3.0 * (Q * G + P * Gp) / (J4 * J2) +
                       18.0 * P * G * Jp / (J4 * J3);
    g.kss = dks / J;
    return g;
}

namespace {

std::array<std::vector<double>, 4> derivative_arrays(const HeightField& height,
                                                     const CurvilinearMap& map,
                                                     Closure closure) {
    if (height.exact) return *height.exact;
    FlowBC bc;
    if (closure == Closure::Flow) bc = noflux_boundary(map, height.rho);
    HeightDerivs d = compute_derivs(height.rho, closure, bc);
    return {std::move(d.d1), std::move(d.d2), std::move(d.d3), std::move(d.d4)};
}

} // namespace

FlowBC noflux_boundary(const CurvilinearMap& map,
                       const std::vector<double>& rho) {
    const int N = static_cast<int>(rho.size()) - 1;
    const double h = 1.0 / N;
    const double L = map.reference().length();
    FlowBC bc;
    for (int side = 0; side < 2; ++side) {
        const int i = side == 0 ? 0 : N;
        const int in = side == 0 ? 1 : N - 1;
        const double r2 = 2.0 * (rho[in] - rho[i]) / (h * h);
        std::array<double, 5> jet{rho[i], 0.0, r2, 0.0, 0.0};
        NodeGeometry g = eval_node(map.node_derivs(i), jet, L);
        const double b2 = g.ip / (g.J * g.J * g.J * g.J);
        if (std::fabs(b2) < 1e-14)
            throw DegenerateError("noflux_boundary: vanishing b2 coefficient");
        const double c = -g.ks / b2;  // g.ks here is g2 (third-derivative slot zero)
        if (side == 0) bc.c0 = c; else bc.c1 = c;
    }
    return bc;
}

GeometryEval evaluate_geometry(const CurvilinearMap& map,
                               const HeightField& height, Closure closure) {
    const int N = height.grid_size();
    if (N != map.grid_size())
        throw std::invalid_argument("evaluate_geometry: grid mismatch");
    auto d = derivative_arrays(height, map, closure);
    const double L = map.reference().length();

    GeometryEval out;
    out.J.resize(N + 1);
    out.kappa.resize(N + 1);
    out.ks.resize(N + 1);
    out.kss.resize(N + 1);
    out.ip.resize(N + 1);
    out.tau.resize(N + 1);
    out.n.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        std::array<double, 5> jet{height.rho[i], d[0][i], d[1][i], d[2][i], d[3][i]};
        NodeGeometry g = eval_node(map.node_derivs(i), jet, L);
        out.J[i] = g.J;
        out.kappa[i] = g.kappa;
        out.ks[i] = g.ks;
        out.kss[i] = g.kss;
        out.ip[i] = g.ip;
        out.tau[i] = g.tau;
        out.n[i] = g.n;
    }
    return out;
}

double metric_J(const CurvilinearMap& map, double rho, double drho,
                double sigma) {
    if (std::fabs(rho) >= map.tube_halfwidth())
        throw std::domain_error("metric_J: |rho| outside the tube");
    CurvilinearMap::Derivs D = map.derivs(sigma);
    const Vec2 P1 = D.A[1] + rho * D.B[1] + drho * D.B[0];
    const double J = P1.norm();
    if (J < kJFloorRel * map.reference().length())
        throw DegenerateError("metric_J: J below floor");
    return J;
}

std::vector<double> curvature(const CurvilinearMap& map,
                              const HeightField& height, Closure closure) {
    return evaluate_geometry(map, height, closure).kappa;
}

std::pair<std::vector<double>, std::vector<double>> arc_derivatives_kappa(
    const CurvilinearMap& map, const HeightField& height, Closure closure) {
    GeometryEval g = evaluate_geometry(map, height, closure);
    return {std::move(g.ks), std::move(g.kss)};
}

std::vector<double> normal_velocity(const CurvilinearMap& map,
                                    const HeightField& height,
                                    const std::vector<double>& rho_t,
                                    Closure closure) {
    GeometryEval g = evaluate_geometry(map, height, closure);
    const int N = height.grid_size();
    if (static_cast<int>(rho_t.size()) != N + 1)
        throw std::invalid_argument("normal_velocity: rho_t size mismatch");
    std::vector<double> v(N + 1);
    for (int i = 0; i <= N; ++i) v[i] = g.ip[i] / g.J[i] * rho_t[i];
    return v;
}

std::pair<double, double> angle_residual(const CurvilinearMap& map,
                                         const HeightField& height) {
    const int N = height.grid_size();
    auto d = derivative_arrays(height, map, Closure::OneSided);
    const double L = map.reference().length();
    const double ca = std::cos(map.reference().alpha());
    double res[2];
    for (int side = 0; side < 2; ++side) {
        const int i = side == 0 ? 0 : N;
        std::array<double, 5> jet{height.rho[i], d[0][i], 0.0, 0.0, 0.0};
        NodeGeometry g = eval_node(map.node_derivs(i), jet, L);
        // cos(pi - alpha) = <n_Gamma, (0,-1)> reduces to tau_x = cos(alpha)
        res[side] = std::fabs(g.tau.x - ca);
    }
    return {res[0], res[1]};
}

LengthBoundResult length_bound_check(const std::vector<Vec2>& samples,
                                     double alpha) {
    const int N = static_cast<int>(samples.size()) - 1;
    if (N < 8) throw std::invalid_argument("length_bound_check: too few samples");
    const double h = 1.0 / N;

    auto d1 = [&](int i) -> Vec2 {
        if (i == 0) return (1.0 / (2 * h)) * (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]);
        if (i == N) return (1.0 / (2 * h)) * (3.0 * samples[N] - 4.0 * samples[N - 1] + samples[N - 2]);
        return (1.0 / (2 * h)) * (samples[i + 1] - samples[i - 1]);
    };
    auto d2 = [&](int i) -> Vec2 {
        if (i == 0) return (1.0 / (h * h)) * (2.0 * samples[0] - 5.0 * samples[1] + 4.0 * samples[2] - samples[3]);
        if (i == N) return (1.0 / (h * h)) * (2.0 * samples[N] - 5.0 * samples[N - 1] + 4.0 * samples[N - 2] - samples[N - 3]);
        return (1.0 / (h * h)) * (samples[i + 1] - 2.0 * samples[i] + samples[i - 1]);
    };

    // proportional-to-arclength and endpoint-tangent preconditions
    double L = 0.0;
    for (int i = 0; i <= N; ++i) L += d1(i).norm();
    L /= (N + 1);
    for (int i = 0; i <= N; ++i) {
        if (std::fabs(d1(i).norm() - L) / L > 1e-3)
            throw std::invalid_argument("length_bound_check: not proportional to arc length");
    }
    Vec2 t0 = (1.0 / d1(0).norm()) * d1(0);
    Vec2 t1 = (1.0 / d1(N).norm()) * d1(N);
    if ((t0 - Vec2{std::cos(alpha), std::sin(alpha)}).norm() > 1e-3 ||
        (t1 - Vec2{std::cos(alpha), -std::sin(alpha)}).norm() > 1e-3)
        throw std::invalid_argument("length_bound_check: endpoint tangents violate the angle condition");

    double kmax = 0.0;
    for (int i = 0; i <= N; ++i) {
        Vec2 a = d1(i), b = d2(i);
        kmax = std::max(kmax, std::fabs(dot(b, rot90(a))) / std::pow(a.norm(), 3));
    }
    LengthBoundResult r;
    r.lhs = 1.0 / L;
    r.rhs = kmax / (std::sqrt(2.0) * std::sin(alpha));
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
    return r;
}

SmallnessConstants smallness_constants(const CurvilinearMap& map) {
    return map.smallness();
}

BoundFractions bound_fractions(const CurvilinearMap& map,
                               const std::vector<double>& rho) {
    const SmallnessConstants k = map.smallness();
    HeightDerivs d = compute_derivs(rho, Closure::OneSided);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        m0 = std::max(m0, std::fabs(rho[i]));
        m1 = std::max(m1, std::fabs(d.d1[i]));
    }
    BoundFractions f;
    f.frac0 = m0 / k.K0;
    f.frac1 = std::isinf(k.K1) ? 0.0 : m1 / k.K1;
    return f;
}

std::vector<Vec2> curve_points(const CurvilinearMap& map,
                               const HeightField& height) {
    const int N = height.grid_size();
    std::vector<Vec2> pts(N + 1);
    for (int i = 0; i <= N; ++i) {
        const auto& D = map.node_derivs(i);
        pts[i] = D.A[0] + height.rho[i] * D.B[0];
    }
    return pts;
}

double curve_length(const CurvilinearMap& map, const HeightField& height) {
    GeometryEval g = evaluate_geometry(map, height, Closure::OneSided);
    return simpson(g.J, height.h());
}

double curve_area(const std::vector<Vec2>& pts) {
    double a = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        a += cross(pts[i], pts[i + 1]);
    // closing both endpoints through the axis adds nothing (y = 0 there)
    return 0.5 * a;
}

} // namespace curveflow

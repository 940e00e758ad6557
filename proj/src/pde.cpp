#include "curveflow/pde.hpp"

#include <cmath>
#include <stdexcept>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

std::array<std::vector<double>, 4> height_derivs(const CurvilinearMap& map,
                                                 const HeightField& height,
                                                 Closure closure) {
    if (height.exact) return *height.exact;
    FlowBC bc;
    if (closure == Closure::Flow) bc = noflux_boundary(map, height.rho);
    HeightDerivs d = compute_derivs(height.rho, closure, bc);
    return {std::move(d.d1), std::move(d.d2), std::move(d.d3), std::move(d.d4)};
}

} // namespace

PdeCoefficients coefficients(const CurvilinearMap& map,
                             const HeightField& height, Closure closure) {
    const int N = height.grid_size();
    if (N != map.grid_size())
        throw std::invalid_argument("coefficients: grid mismatch");
    auto d = height_derivs(map, height, closure);
    const double L = map.reference().length();
    PdeCoefficients out;
    out.a.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        std::array<double, 5> jet{height.rho[i], d[0][i], 0, 0, 0};
        NodeGeometry g = eval_node(map.node_derivs(i), jet, L);
        const double J4 = g.J * g.J * g.J * g.J;
        out.a[i] = 1.0 / J4;
        if (i == 0) out.b2_left = g.ip / J4;
        if (i == N) out.b2_right = g.ip / J4;
    }
    return out;
}

NonlinearRhs nonlinear_rhs(const CurvilinearMap& map, const HeightField& height,
                           Closure closure) {
    const int N = height.grid_size();
    if (N != map.grid_size())
        throw std::invalid_argument("nonlinear_rhs: grid mismatch");
    auto d = height_derivs(map, height, closure);
    const double L = map.reference().length();

    NonlinearRhs out;
    out.f.resize(N + 1);
    out.N.resize(N + 1);
    out.d4 = d[3];
    for (int i = 0; i <= N; ++i) {
        std::array<double, 5> jet{height.rho[i], d[0][i], d[1][i], d[2][i], d[3][i]};
        NodeGeometry g = eval_node(map.node_derivs(i), jet, L);
        if (std::fabs(g.ip) < 1e-14 * L)
            throw DegenerateError("nonlinear_rhs: vanishing <Psi_q, R Psi_sigma>");
        const double J4 = g.J * g.J * g.J * g.J;
        const double a = 1.0 / J4;
        out.N[i] = -(g.J / g.ip) * g.kss;
        out.f[i] = a * d[3][i] + out.N[i];
        if (i == 0 || i == N) {
            const double b2 = g.ip / J4;
            const double g2 = g.ks - b2 * d[2][i];
            if (i == 0) out.g2_left = g2; else out.g2_right = g2;
        }
    }
    return out;
}

NonlinearityF nonlinearity_F(const CurvilinearMap& map,
                             const HeightField& height,
                             const HeightField& height0, Closure closure) {
    const int N = height.grid_size();
    if (height0.grid_size() != N)
        throw std::invalid_argument("nonlinearity_F: grid mismatch");
    NonlinearRhs rhs = nonlinear_rhs(map, height, closure);
    PdeCoefficients c = coefficients(map, height, closure);
    PdeCoefficients c0 = coefficients(map, height0, closure);
    auto d = height_derivs(map, height, closure);

    NonlinearityF out;
    out.F.resize(N + 1);
    for (int i = 0; i <= N; ++i)
        out.F[i] = -(c.a[i] - c0.a[i]) * rhs.d4[i] + rhs.f[i];
    out.G2_left = -(c.b2_left - c0.b2_left) * d[2][0] - rhs.g2_left;
    out.G2_right = -(c.b2_right - c0.b2_right) * d[2][N] - rhs.g2_right;
    return out;
}

LsReport ls_check(double a_endpoint, double b2_endpoint, int lambda_grid_size) {
    if (!(a_endpoint > 0.0))
        throw std::invalid_argument("ls_check: ellipticity failure, a <= 0");
    if (b2_endpoint == 0.0)
        throw std::invalid_argument("ls_check: degenerate boundary operator, b2 = 0");
    if (lambda_grid_size < 2)
        throw std::invalid_argument("ls_check: need at least 2 arguments");

    using C = std::complex<double>;
    LsReport rep;
    rep.a = a_endpoint;
    rep.b2 = b2_endpoint;
    rep.symbol_spectrum_ok = true;  // symbol (1/J^4) xi^4 > 0
    rep.roots_decay = true;
    rep.min_abs_det = std::numeric_limits<double>::infinity();

    const double moduli[3] = {1e-3, 1.0, 1e3};
    for (double m : moduli) {
        for (int k = 0; k < lambda_grid_size; ++k) {
            double phi = -M_PI_2 + M_PI * k / (lambda_grid_size - 1);
            C lambda = std::polar(m, phi);
            double r = std::abs(lambda) / a_endpoint;
            double theta = phi + M_PI;  // arg(-lambda / a) in [pi/2, 3pi/2]
            double ab = std::cos(theta / 4.0);
            double bb = std::sin(theta / 4.0);
            double r4 = std::pow(r, 0.25);
            C mu1 = r4 * C(-bb, ab);
            C mu2 = r4 * C(-ab, -bb);
            if (!(mu1.real() < 0.0 && mu2.real() < 0.0)) rep.roots_decay = false;
            C det_direct = mu1 * mu1 * mu1 * mu2 - mu2 * mu2 * mu2 * mu1;
            C det_formula = mu1 * mu2 * (mu1 * mu1 - mu2 * mu2);
            rep.max_formula_mismatch = std::max(
                rep.max_formula_mismatch,
                std::abs(det_direct - det_formula) / std::max(1.0, std::abs(det_direct)));
            rep.lambda_samples.push_back(lambda);
            rep.det_values.push_back(det_direct);
            rep.min_abs_det = std::min(rep.min_abs_det, std::abs(det_direct));
        }
    }
    return rep;
}

} // namespace curveflow

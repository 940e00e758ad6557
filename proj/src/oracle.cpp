#include "curveflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curveflow/banded.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/splines.hpp"

namespace curveflow {

namespace {

// first/second derivative weights for three points at parameter
// distances (-hl, 0, +hr)
struct Stencil3 {
    double a, b, c;
};

Stencil3 d1_weights(double hl, double hr) {
    return {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
}

Stencil3 d2_weights(double hl, double hr) {
    return {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
}

// one-sided polynomial-fit derivatives at the first of `m` nodes with
// signed parameter offsets off[1..m-1] (off[0] = 0 implied)
template <typename T>
void end_fit_derivs(const double* off, const T* f, int m, T& d1, T& d2) {
    // solve sum_k c_k off_j^k = f_j - f_0, k = 1..m-1
    const int n = m - 1;
    double A[6][6];
    T rhs[6];
    for (int j = 0; j < n; ++j) {
        double p = off[j + 1];
        double pk = p;
        for (int k = 0; k < n; ++k) {
            A[j][k] = pk;
            pk *= p;
        }
        rhs[j] = f[j + 1] - f[0];
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        for (int k = 0; k < n; ++k) std::swap(A[col][k], A[piv][k]);
        std::swap(rhs[col], rhs[piv]);
        for (int r = col + 1; r < n; ++r) {
            double fac = A[r][col] / A[col][col];
            for (int k = col; k < n; ++k) A[r][k] -= fac * A[col][k];
            rhs[r] = rhs[r] - fac * rhs[col];
        }
    }
    T c[6];
    for (int r = n - 1; r >= 0; --r) {
        T acc = rhs[r];
        for (int k = r + 1; k < n; ++k) acc = acc - A[r][k] * c[k];
        c[r] = (1.0 / A[r][r]) * acc;
    }
    d1 = c[0];
    d2 = 2.0 * c[1];
}

std::vector<double> chord_params(const std::vector<Vec2>& p) {
    std::vector<double> s(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i)
        s[i] = s[i - 1] + (p[i] - p[i - 1]).norm();
    return s;
}

// reflect v across the direction of unit vector u
Vec2 reflect(const Vec2& v, const Vec2& u) {
    return 2.0 * dot(v, u) * u - v;
}

// scalar-field derivative along the curve (one-sided or mirror ghosts)
std::vector<double> field_ds(const std::vector<double>& f,
                             const std::vector<double>& s, bool mirror_ends) {
    const int n = static_cast<int>(f.size());
    std::vector<double> out(n);
    for (int i = 1; i + 1 < n; ++i) {
        Stencil3 w = d1_weights(s[i] - s[i - 1], s[i + 1] - s[i]);
        out[i] = w.a * f[i - 1] + w.b * f[i] + w.c * f[i + 1];
    }
    if (mirror_ends) {
        // ghost value f[-1] = f[1] at spacing equal to the first interval
        double h = s[1] - s[0];
        Stencil3 w = d1_weights(h, h);
        out[0] = w.a * f[1] + w.b * f[0] + w.c * f[1];
        h = s[n - 1] - s[n - 2];
        w = d1_weights(h, h);
        out[n - 1] = w.a * f[n - 2] + w.b * f[n - 1] + w.c * f[n - 2];
    } else {
        double dummy;
        double off[4];
        double vals[4];
        for (int j = 0; j < 4; ++j) {
            off[j] = s[j] - s[0];
            vals[j] = f[j];
        }
        end_fit_derivs(off, vals, 4, out[0], dummy);
        for (int j = 0; j < 4; ++j) {
            off[j] = s[n - 1 - j] - s[n - 1];
            vals[j] = f[n - 1 - j];
        }
        end_fit_derivs(off, vals, 4, out[n - 1], dummy);
    }
    return out;
}

} // namespace

OracleGeometry oracle_curvature(const std::vector<Vec2>& points,
                                bool use_bc_ghosts, double alpha) {
    const int n = static_cast<int>(points.size());
    if (n < 9) throw std::invalid_argument("oracle_curvature: need >= 9 nodes");
    std::vector<double> s = chord_params(points);
    for (int i = 0; i + 1 < n; ++i)
        if (s[i + 1] - s[i] <= 0.0)
            throw DegenerateError("oracle_curvature: coincident nodes");
    const double mean = s.back() / (n - 1);
    for (int i = 0; i + 1 < n; ++i)
        if ((s[i + 1] - s[i]) > 3.0 * mean || (s[i + 1] - s[i]) < mean / 3.0)
            throw DegenerateError("oracle_curvature: spacing too nonuniform");

    OracleGeometry g;
    g.kappa.resize(n);

    for (int i = 1; i + 1 < n; ++i) {
        double hl = s[i] - s[i - 1], hr = s[i + 1] - s[i];
        Stencil3 w1 = d1_weights(hl, hr), w2 = d2_weights(hl, hr);
        Vec2 xp = w1.a * points[i - 1] + w1.b * points[i] + w1.c * points[i + 1];
        Vec2 xpp = w2.a * points[i - 1] + w2.b * points[i] + w2.c * points[i + 1];
        g.kappa[i] = dot(xpp, rot90(xp)) / std::pow(xp.norm(), 3);
    }

    if (use_bc_ghosts) {
        // tangent-angle ghost: reflect the first interior node across the
        // normal line of the prescribed contact direction
        const Vec2 tl{std::cos(alpha), std::sin(alpha)};
        const Vec2 nl = rot90(tl);
        Vec2 ghost = points[0] + reflect(points[1] - points[0], nl);
        double hg = (points[0] - ghost).norm();
        Stencil3 w1 = d1_weights(hg, s[1] - s[0]);
        Stencil3 w2 = d2_weights(hg, s[1] - s[0]);
        Vec2 xp = w1.a * ghost + w1.b * points[0] + w1.c * points[1];
        Vec2 xpp = w2.a * ghost + w2.b * points[0] + w2.c * points[1];
        g.kappa[0] = dot(xpp, rot90(xp)) / std::pow(xp.norm(), 3);

        const Vec2 tr{std::cos(alpha), -std::sin(alpha)};
        const Vec2 nr = rot90(tr);
        ghost = points[n - 1] + reflect(points[n - 2] - points[n - 1], nr);
        hg = (points[n - 1] - ghost).norm();
        w1 = d1_weights(s[n - 1] - s[n - 2], hg);
        w2 = d2_weights(s[n - 1] - s[n - 2], hg);
        xp = w1.a * points[n - 2] + w1.b * points[n - 1] + w1.c * ghost;
        xpp = w2.a * points[n - 2] + w2.b * points[n - 1] + w2.c * ghost;
        g.kappa[n - 1] = dot(xpp, rot90(xp)) / std::pow(xp.norm(), 3);
    } else {
        // quartic end fits keep the endpoint curvature error one order
        // better than the interior, so differentiating the kappa field
        // does not lose accuracy at the ends
        Vec2 xp, xpp;
        double off[5];
        Vec2 vals[5];
        for (int j = 0; j < 5; ++j) {
            off[j] = s[j] - s[0];
            vals[j] = points[j];
        }
        end_fit_derivs(off, vals, 5, xp, xpp);
        g.kappa[0] = dot(xpp, rot90(xp)) / std::pow(xp.norm(), 3);
        for (int j = 0; j < 5; ++j) {
            off[j] = s[n - 1 - j] - s[n - 1];
            vals[j] = points[n - 1 - j];
        }
        end_fit_derivs(off, vals, 5, xp, xpp);
        g.kappa[n - 1] = dot(xpp, rot90(xp)) / std::pow(xp.norm(), 3);
    }

    g.ks = field_ds(g.kappa, s, use_bc_ghosts);
    g.kss = field_ds(g.ks, s, false);
    return g;
}

ParametricCurve equilibrium_arc(double alpha, double chord, int M,
                                double center_x) {
    if (!(alpha > 0.0 && alpha < 3.14159265358979323846))
        throw std::invalid_argument("equilibrium_arc: alpha outside (0, pi)");
    if (chord <= 0.0) throw std::invalid_argument("equilibrium_arc: chord <= 0");
    if (M < 8) throw std::invalid_argument("equilibrium_arc: too few nodes");
    const double r = chord / (2.0 * std::sin(alpha));
    ParametricCurve c;
    c.alpha = alpha;
    c.x.resize(M + 1);
    for (int i = 0; i <= M; ++i) {
        double phi = alpha * (2.0 * i / M - 1.0);
        c.x[i] = {center_x + r * std::sin(phi),
                  -r * std::cos(alpha) + r * std::cos(phi)};
    }
    c.x.front().y = 0.0;
    c.x.back().y = 0.0;
    return c;
}

std::vector<double> oracle_velocity(const ParametricCurve& curve) {
    OracleGeometry g = oracle_curvature(curve.x, true, curve.alpha);
    std::vector<double> v(g.kss.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -g.kss[i];
    return v;
}

namespace {

// resample the polyline at uniform arc length (endpoints kept)
std::vector<Vec2> redistribute_nodes(const std::vector<Vec2>& p) {
    const int n = static_cast<int>(p.size());
    std::vector<double> s = chord_params(p);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) { xs[i] = p[i].x; ys[i] = p[i].y; }
    CubicSpline X(s, xs), Y(s, ys);
    std::vector<Vec2> out(n);
    out[0] = p[0];
    out[n - 1] = p[n - 1];
    const double total = s.back();
    for (int i = 1; i + 1 < n; ++i) {
        double target = total * i / (n - 1);
        out[i] = {X.eval(target), Y.eval(target)};
    }
    return out;
}

} // namespace

ParametricCurve oracle_step(const ParametricCurve& curve, double dt,
                            OracleStepOptions opts) {
    const int n = curve.nodes();
    if (n < 9) throw std::invalid_argument("oracle_step: too few nodes");
    std::vector<double> s = chord_params(curve.x);
    const double hmin = [&] {
        double m = s[1] - s[0];
        for (int i = 1; i + 1 < n; ++i) m = std::min(m, s[i + 1] - s[i]);
        return m;
    }();

    OracleGeometry g = oracle_curvature(curve.x, true, curve.alpha);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = -g.kss[i];

    std::vector<double> w(n);
    if (!opts.semi_implicit) {
        if (dt > hmin * hmin * hmin * hmin / 8.0)
            throw StepError("oracle_step: explicit stability bound violated");
        for (int i = 0; i < n; ++i) w[i] = dt * v[i];
    } else {
        // (I + dt Dss^2) w = dt V with even extension at the ends
        // Dss rows as tridiagonal coefficients
        std::vector<Stencil3> D(n);
        for (int i = 1; i + 1 < n; ++i)
            D[i] = d2_weights(s[i] - s[i - 1], s[i + 1] - s[i]);
        {
            double h = s[1] - s[0];
            Stencil3 q = d2_weights(h, h);
            D[0] = {0.0, q.b, q.a + q.c};  // ghost folded onto node 1
            h = s[n - 1] - s[n - 2];
            q = d2_weights(h, h);
            D[n - 1] = {q.a + q.c, q.b, 0.0};
        }
        auto dcoef = [&](int i, int j) -> double {
            if (j == i - 1) return D[i].a;
            if (j == i) return D[i].b;
            if (j == i + 1) return D[i].c;
            return 0.0;
        };
        BandedMatrix A(n, 2, 2);
        for (int i = 0; i < n; ++i) {
            for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
                double sum = 0.0;
                for (int k = std::max({0, i - 1, j - 1});
                     k <= std::min({n - 1, i + 1, j + 1}); ++k)
                    sum += dcoef(i, k) * dcoef(k, j);
                double val = dt * sum + (i == j ? 1.0 : 0.0);
                if (val != 0.0) A.at(i, j) = val;
            }
        }
        if (!A.factor()) throw StepError("oracle_step: singular implicit system");
        w = v;
        for (double& wi : w) wi *= dt;
        A.solve(w);
    }

    // normals from the same divided differences as the curvature
    ParametricCurve out = curve;
    for (int i = 1; i + 1 < n; ++i) {
        Stencil3 w1 = d1_weights(s[i] - s[i - 1], s[i + 1] - s[i]);
        Vec2 xp = w1.a * curve.x[i - 1] + w1.b * curve.x[i] + w1.c * curve.x[i + 1];
        Vec2 nrm = rot90((1.0 / xp.norm()) * xp);
        out.x[i] = curve.x[i] + w[i] * nrm;
    }
    // endpoints slide along the axis: <delta e1, n> = w
    {
        const Vec2 tl{std::cos(curve.alpha), std::sin(curve.alpha)};
        const Vec2 nl = rot90(tl);
        out.x[0].x = curve.x[0].x + w[0] / nl.x;
        out.x[0].y = 0.0;
        const Vec2 tr{std::cos(curve.alpha), -std::sin(curve.alpha)};
        const Vec2 nr = rot90(tr);
        out.x[n - 1].x = curve.x[n - 1].x + w[n - 1] / nr.x;
        out.x[n - 1].y = 0.0;
    }

    if (opts.redistribute) out.x = redistribute_nodes(out.x);
    return out;
}

double polyline_length(const std::vector<Vec2>& pts) {
    double L = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        L += (pts[i + 1] - pts[i]).norm();
    return L;
}

double spacing_ratio(const std::vector<Vec2>& pts) {
    std::vector<double> s = chord_params(pts);
    const double mean = s.back() / (pts.size() - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        worst = std::max(worst, (s[i + 1] - s[i]) / mean);
    return worst;
}

} // namespace curveflow

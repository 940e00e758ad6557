#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curveflow/jets.hpp"

namespace curveflow::testutil {

std::shared_ptr<CurvilinearMap> cosine_map(double alpha, double amplitude,
                                           int N, double length) {
    return make_map(build_reference_from_angle(alpha, amplitude, N, length));
}

HeightField random_admissible(const CurvilinearMap& map, std::mt19937_64& rng,
                              double target_fraction, int max_mode) {
    const int N = map.grid_size();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> coef(max_mode + 1);
    for (auto& c : coef) c = u(rng);

    HeightField hf;
    hf.rho.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        double s = static_cast<double>(i) / N;
        double v = 0.0;
        for (int k = 0; k <= max_mode; ++k)
            v += coef[k] * std::cos(k * M_PI * s) / (1.0 + k * k);
        hf.rho[i] = v;
    }
    BoundFractions f = bound_fractions(map, hf.rho);
    double worst = std::max(f.frac0, f.frac1);
    if (worst <= 0.0) worst = 1.0;
    double scale = target_fraction / worst;
    for (auto& r : hf.rho) r *= scale;
    return hf;
}

HeightField analytic_field(int N, const std::function<double(double, int)>& f,
                           double time) {
    HeightField hf;
    hf.time = time;
    hf.rho.resize(N + 1);
    std::array<std::vector<double>, 4> d;
    for (auto& v : d) v.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        double s = static_cast<double>(i) / N;
        hf.rho[i] = f(s, 0);
        for (int k = 1; k <= 4; ++k) d[k - 1][i] = f(s, k);
    }
    hf.exact = std::move(d);
    return hf;
}

std::array<double, 5> circle_height_jet(const CurvilinearMap& map, double sigma,
                                        Vec2 center, double radius,
                                        double q_guess) {
    CurvilinearMap::Derivs D = map.derivs(sigma);
    // Newton for the height itself
    double q = q_guess;
    for (int it = 0; it < 60; ++it) {
        Vec2 P = D.A[0] + q * D.B[0] - center;
        double F = P.norm2() - radius * radius;
        double dF = 2.0 * dot(P, D.B[0]);
        double step = F / dF;
        q -= step;
        if (std::fabs(step) < 1e-15) break;
    }
    {
        Vec2 P = D.A[0] + q * D.B[0] - center;
        if (std::fabs(P.norm() - radius) > 1e-10)
            throw std::runtime_error("circle_height_jet: no intersection");
    }

    // vector jets of A - center and B
    Jet5 Ax, Ay, Bx, By;
    for (int k = 0; k <= 4; ++k) {
        Ax[k] = D.A[k].x - (k == 0 ? center.x : 0.0);
        Ay[k] = D.A[k].y - (k == 0 ? center.y : 0.0);
        Bx[k] = D.B[k].x;
        By[k] = D.B[k].y;
    }

    std::array<double, 5> r{q, 0.0, 0.0, 0.0, 0.0};
    for (int k = 1; k <= 4; ++k) {
        Jet5 rj;
        for (int m = 0; m <= 4; ++m) rj[m] = r[m];
        Jet5 Px = Ax + rj * Bx;
        Jet5 Py = Ay + rj * By;
        Jet5 G = Px * Px + Py * Py;
        double coef = 2.0 * (Px[0] * Bx[0] + Py[0] * By[0]);
        r[k] = -G[k] / coef;
    }
    return r;
}

ArcFit best_fit_arc(const std::vector<Vec2>& pts, double alpha) {
    // unknowns: center_x, radius; center_y = -radius cos(alpha)
    double cx = 0.0;
    for (const auto& p : pts) cx += p.x;
    cx /= pts.size();
    double r = 0.0;
    const double ca = std::cos(alpha);
    for (const auto& p : pts) r = std::max(r, (p - Vec2{cx, 0.0}).norm());
    if (r <= 0.0) r = 1.0;

    for (int it = 0; it < 200; ++it) {
        double JtJ[2][2] = {{0, 0}, {0, 0}};
        double Jtr[2] = {0, 0};
        for (const auto& p : pts) {
            Vec2 c{cx, -r * ca};
            Vec2 d = p - c;
            double dist = d.norm();
            if (dist < 1e-14) continue;
            double res = dist - r;
            // d res / d cx, d res / d r
            double gx = -d.x / dist;
            double gr = (d.y / dist) * ca - 1.0;
            JtJ[0][0] += gx * gx;
            JtJ[0][1] += gx * gr;
            JtJ[1][0] += gr * gx;
            JtJ[1][1] += gr * gr;
            Jtr[0] += gx * res;
            Jtr[1] += gr * res;
        }
        double det = JtJ[0][0] * JtJ[1][1] - JtJ[0][1] * JtJ[1][0];
        if (std::fabs(det) < 1e-30) break;
        double dx = (JtJ[1][1] * Jtr[0] - JtJ[0][1] * Jtr[1]) / det;
        double dr = (JtJ[0][0] * Jtr[1] - JtJ[1][0] * Jtr[0]) / det;
        cx -= dx;
        r -= dr;
        if (std::fabs(dx) + std::fabs(dr) < 1e-15 * (1.0 + r)) break;
    }

    ArcFit fit;
    fit.center_x = cx;
    fit.radius = r;
    Vec2 c{cx, -r * ca};
    for (const auto& p : pts)
        fit.max_dist = std::max(fit.max_dist, std::fabs((p - c).norm() - r));
    return fit;
}

namespace {
double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = dot(p - a, ab) / std::max(ab.norm2(), 1e-300);
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double directed_hausdorff(const std::vector<Vec2>& a,
                          const std::vector<Vec2>& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = 1e300;
        for (std::size_t i = 0; i + 1 < b.size(); ++i)
            best = std::min(best, point_segment_dist(p, b[i], b[i + 1]));
        worst = std::max(worst, best);
    }
    return worst;
}
} // namespace

double hausdorff(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double max_abs_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

} // namespace curveflow::testutil

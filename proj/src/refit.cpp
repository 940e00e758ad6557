#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"
#include "curveflow/oracle.hpp"
#include "curveflow/solver.hpp"
#include "curveflow/splines.hpp"

namespace curveflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 5-point Gauss-Legendre on [0,1]
constexpr int kG5 = 5;
constexpr double kG5x[kG5] = {0.5, 0.2307653449471584544819, 0.7692346550528415455181,
                              0.0469100770306680036012, 0.9530899229693319963988};
constexpr double kG5w[kG5] = {0.2844444444444444444444, 0.2393143352496832340206,
                              0.2393143352496832340206, 0.1184634425280945437571,
                              0.1184634425280945437571};

struct DataCurve {
    CubicSpline X, Y;          // chord-length parametrized
    std::vector<double> u;     // knots
    std::vector<double> s_at_u;  // arc length at knots
    double total = 0.0;

    Vec2 at(double t) const { return {X.eval(t), Y.eval(t)}; }
    Vec2 d1(double t) const { return {X.eval(t, 1), Y.eval(t, 1)}; }
    Vec2 d2(double t) const { return {X.eval(t, 2), Y.eval(t, 2)}; }

    double speed(double t) const { return d1(t).norm(); }

    // invert s(u) = target by safeguarded Newton
    double param_at_arclength(double target) const {
        auto it = std::upper_bound(s_at_u.begin(), s_at_u.end(), target);
        int i = std::clamp(static_cast<int>(it - s_at_u.begin()) - 1, 0,
                           static_cast<int>(u.size()) - 2);
        double lo = u[i], hi = u[i + 1];
        double slo = s_at_u[i];
        double t = lo + (hi - lo) * 0.5;
        for (int k = 0; k < 80; ++k) {
            // arc length from u[i] to t with local Gauss panels
            double acc = slo;
            double w = t - u[i];
            for (int g = 0; g < kG5; ++g) acc += w * kG5w[g] * speed(u[i] + w * kG5x[g]);
            double err = acc - target;
            if (std::fabs(err) < 1e-14 * std::max(1.0, total)) break;
            double t_next = t - err / std::max(speed(t), 1e-12);
            if (t_next <= lo || t_next >= hi)
                t_next = err > 0 ? 0.5 * (lo + t) : 0.5 * (t + hi);
            if (err > 0) hi = t; else lo = t;
            t = t_next;
        }
        return t;
    }
};

DataCurve make_data_curve(const std::vector<Vec2>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<double> u(n, 0.0), xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = pts[i].x;
        ys[i] = pts[i].y;
        if (i)
            u[i] = u[i - 1] + (pts[i] - pts[i - 1]).norm();
    }
    DataCurve c{CubicSpline(u, xs), CubicSpline(u, ys), u, {}, 0.0};
    c.s_at_u.assign(n, 0.0);
    for (int i = 1; i < n; ++i) {
        double w = u[i] - u[i - 1];
        double acc = 0.0;
        for (int g = 0; g < kG5; ++g) acc += w * kG5w[g] * c.speed(u[i - 1] + w * kG5x[g]);
        c.s_at_u[i] = c.s_at_u[i - 1] + acc;
    }
    c.total = c.s_at_u.back();
    return c;
}

// C4 cutoff pair on [0,1]: phi0(0) = 1, phi1'(0) = 1, both vanish with
// four derivatives at 1
double phi0(double t) { return t >= 1.0 ? 0.0 : 1.0 - smooth_step(t); }
double phi1(double t) { return t >= 1.0 ? 0.0 : t * (1.0 - smooth_step(t)); }

// closing bump supported in the middle third
double closing_bump(double s) {
    return smooth_step(3.0 * s - 1.0) * smooth_step(2.0 - 3.0 * s);
}

struct BlendResult {
    std::vector<double> theta;  // on the fine uniform grid
    double delta = 0.0;         // closing correction amplitude
};

BlendResult blend_theta(const std::vector<double>& theta_data,
                        double slope0, double slope1, double alpha, double w) {
    const int M = static_cast<int>(theta_data.size()) - 1;
    BlendResult out;
    out.theta = theta_data;
    const double aL = alpha - theta_data.front();
    const double bL = -w * slope0;
    const double aR = -alpha - theta_data.back();
    const double bR = w * slope1;
    for (int i = 0; i <= M; ++i) {
        double s = static_cast<double>(i) / M;
        if (s / w < 1.0)
            out.theta[i] += aL * phi0(s / w) + bL * phi1(s / w);
        double tr = (1.0 - s) / w;
        if (tr < 1.0) out.theta[i] += aR * phi0(tr) + bR * phi1(tr);
    }

    // closing condition: integral of sin(theta) must vanish so the right
    // endpoint lands back on the axis
    auto integral = [&](double delta) {
        // composite Simpson (M even)
        double acc = 0.0;
        for (int i = 0; i <= M; ++i) {
            double s = static_cast<double>(i) / M;
            double v = std::sin(out.theta[i] + delta * closing_bump(s));
            double wq = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += wq * v;
        }
        return acc / (3.0 * M);
    };
    auto dintegral = [&](double delta) {
        double acc = 0.0;
        for (int i = 0; i <= M; ++i) {
            double s = static_cast<double>(i) / M;
            double g = closing_bump(s);
            double v = std::cos(out.theta[i] + delta * g) * g;
            double wq = (i == 0 || i == M) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += wq * v;
        }
        return acc / (3.0 * M);
    };
    double delta = 0.0;
    for (int it = 0; it < 60; ++it) {
        double f = integral(delta);
        if (std::fabs(f) < 1e-15) break;
        double df = dintegral(delta);
        if (std::fabs(df) < 1e-12)
            throw RefitError("refit: closing correction is degenerate");
        delta -= f / df;
        if (std::fabs(delta) > 0.5)
            throw RefitError("refit: closing correction out of range");
    }
    for (int i = 0; i <= M; ++i) {
        double s = static_cast<double>(i) / M;
        out.theta[i] += delta * closing_bump(s);
    }
    out.delta = delta;
    return out;
}

} // namespace

RefitResult build_reference_from_curve(const std::vector<Vec2>& pts,
                                       double alpha, int N,
                                       const RefitOptions& opts) {
    if (pts.size() < 9) throw RefitError("refit: too few curve samples");
    if (!(alpha > 0.0 && alpha < kPi))
        throw std::invalid_argument("refit: alpha outside (0, pi)");
    const double scale = std::max(1.0, polyline_length(pts));
    if (std::fabs(pts.front().y) > 1e-9 * scale ||
        std::fabs(pts.back().y) > 1e-9 * scale)
        throw RefitError("refit: endpoints off the axis");

    DataCurve data = make_data_curve(pts);
    const double L = data.total;

    // tangent angles on a fine uniform arc-length grid
    const int M = 2 * N;
    std::vector<double> theta(M + 1), tpar(M + 1);
    for (int i = 0; i <= M; ++i) {
        double target = L * i / M;
        double t = i == 0 ? 0.0 : (i == M ? data.u.back() : data.param_at_arclength(target));
        tpar[i] = t;
        Vec2 d = data.d1(t);
        double th = std::atan2(d.y, d.x);
        if (i > 0) {
            while (th - theta[i - 1] > kPi) th -= 2.0 * kPi;
            while (th - theta[i - 1] < -kPi) th += 2.0 * kPi;
        }
        theta[i] = th;
    }
    if (std::fabs(theta.front() - alpha) > 0.5 ||
        std::fabs(theta.back() + alpha) > 0.5)
        throw RefitError("refit: data tangents far from the contact angle");

    // endpoint angle slopes d theta / d sigma = L kappa
    auto kappa_of = [&](double t) {
        Vec2 d1 = data.d1(t), d2 = data.d2(t);
        return dot(d2, rot90(d1)) / std::pow(d1.norm(), 3);
    };
    const double slope0 = L * kappa_of(tpar.front());
    const double slope1 = L * kappa_of(tpar.back());

    RefitResult best;
    bool have = false;
    std::string failures;
    auto note = [&](double w, const std::string& why) {
        failures += " [w=" + std::to_string(w) + ": " + why + "]";
    };
    for (double w : opts.blend_widths) {
        BlendResult blended;
        try {
            blended = blend_theta(theta, slope0, slope1, alpha, w);
        } catch (const RefitError& e) {
            note(w, e.what());
            continue;
        }

        // quintic profile: exact endpoint values and zero endpoint slope
        std::vector<double> knots(M + 1);
        for (int i = 0; i <= M; ++i) knots[i] = static_cast<double>(i) / M;
        const double hM = 1.0 / M;
        double curv0 = (blended.theta[2] - 2 * blended.theta[1] + blended.theta[0]) / (hM * hM);
        double curv1 = (blended.theta[M] - 2 * blended.theta[M - 1] + blended.theta[M - 2]) / (hM * hM);
        auto prof = std::make_shared<const SplineProfile>(
            QuinticSpline(knots, blended.theta, 0.0, curv0, 0.0, curv1));

        std::shared_ptr<CurvilinearMap> map;
        try {
            ReferenceCurve ref(prof, alpha, L, N, Vec2{pts.front().x, 0.0});
            map = make_map(std::move(ref));
        } catch (const std::exception& e) {
            note(w, std::string("reference: ") + e.what());
            continue;
        }

        // express the data curve as a height field over the new reference
        HeightField hf;
        hf.rho.assign(N + 1, 0.0);
        bool ok = true;
        for (int i = 0; i <= N && ok; ++i) {
            double sg = static_cast<double>(i) / N;
            CurvilinearMap::Derivs D = map->derivs(sg);
            // root of cross(B, C(t) - Phi*) = 0 near the same arc fraction
            double lo = data.u.front(), hi = data.u.back();
            double t = (i == 0) ? lo : (i == N ? hi : data.param_at_arclength(L * sg));
            double root = t;
            bool found = false;
            auto fval = [&](double tt) {
                return cross(D.B[0], data.at(tt) - D.A[0]);
            };
            double f0 = fval(t);
            if (std::fabs(f0) < 1e-15 * scale) {
                found = true;
            } else {
                // expand a bracket around the initial guess
                double span = std::max(1e-3 * data.u.back(), 1e-12);
                double ta = t, tb = t;
                double fa = f0, fb = f0;
                for (int k = 0; k < 60 && fa * fb > 0.0; ++k) {
                    ta = std::max(lo, ta - span);
                    tb = std::min(hi, tb + span);
                    fa = fval(ta);
                    fb = fval(tb);
                    span *= 1.6;
                    if (ta == lo && tb == hi && fa * fb > 0.0) break;
                }
                if (fa * fb <= 0.0) {
                    for (int k = 0; k < 200; ++k) {
                        double tm = 0.5 * (ta + tb);
                        double fm = fval(tm);
                        if (fa * fm <= 0.0) { tb = tm; fb = fm; }
                        else { ta = tm; fa = fm; }
                        if (tb - ta < 1e-15 * std::max(1.0, data.u.back())) break;
                    }
                    root = 0.5 * (ta + tb);
                    found = true;
                }
            }
            if (!found) {
                note(w, "fiber " + std::to_string(sg) + ": no intersection");
                ok = false;
                break;
            }
            Vec2 rel = data.at(root) - D.A[0];
            double q = dot(rel, D.B[0]) / D.B[0].norm2();
            if ((rel - q * D.B[0]).norm() > 1e-7 * scale) {
                note(w, "fiber " + std::to_string(sg) + ": residual " +
                            std::to_string((rel - q * D.B[0]).norm()));
                ok = false;
                break;
            }
            hf.rho[i] = q;
        }
        if (!ok) continue;

        BoundFractions f = bound_fractions(*map, hf.rho);

        // Hausdorff distance between the represented curve and the data
        // spline (both sampled finely, so polyline sagitta stays below the
        // comparison scale)
        std::vector<Vec2> fine, data_fine;
        {
            std::vector<double> sg(N + 1), rr = hf.rho;
            for (int i = 0; i <= N; ++i) sg[i] = static_cast<double>(i) / N;
            CubicSpline rs(sg, rr);
            const int Mf = 8 * N;
            fine.resize(Mf + 1);
            data_fine.resize(Mf + 1);
            for (int i = 0; i <= Mf; ++i) {
                double s = static_cast<double>(i) / Mf;
                fine[i] = map->psi(s, rs.eval(s));
                data_fine[i] = data.at(data.u.back() * s);
            }
        }
        double hd = 0.0;
        {
            auto seg_dist = [](const Vec2& p, const Vec2& a, const Vec2& b) {
                Vec2 ab = b - a;
                double tt = dot(p - a, ab) / std::max(ab.norm2(), 1e-300);
                tt = std::clamp(tt, 0.0, 1.0);
                return (p - (a + tt * ab)).norm();
            };
            auto directed = [&](const std::vector<Vec2>& A,
                                const std::vector<Vec2>& B) {
                double worst = 0.0;
                std::size_t hint = 0;
                for (const auto& p : A) {
                    double bestd = 1e300;
                    std::size_t lo = hint > 64 ? hint - 64 : 0;
                    std::size_t hi = std::min(B.size() - 1, hint + 64);
                    std::size_t bestk = hint;
                    for (std::size_t k = lo; k + 1 <= hi; ++k) {
                        double dk = seg_dist(p, B[k], B[k + 1]);
                        if (dk < bestd) { bestd = dk; bestk = k; }
                    }
                    hint = bestk;
                    worst = std::max(worst, bestd);
                }
                return worst;
            };
            hd = std::max(directed(fine, data_fine), directed(data_fine, fine));
        }

        RefitResult cand;
        cand.map = map;
        cand.height = std::move(hf);
        cand.hausdorff = hd;
        cand.frac0 = f.frac0;
        cand.frac1 = f.frac1;
        cand.blend_width = w;
        if (!have || std::max(cand.frac0, cand.frac1) <
                         std::max(best.frac0, best.frac1)) {
            best = std::move(cand);
            have = true;
        }
    }
    if (!have)
        throw RefitError("refit: no admissible blend width produced a graph;" +
                         failures);
    return best;
}

FlowState reparametrize(const FlowState& state, const RefitOptions& opts) {
    BoundFractions f = bound_fractions(*state.map, state.height.rho);
    if (std::max(f.frac0, f.frac1) < opts.target_fraction) return state;

    auto pts = curve_points(*state.map, state.height);
    RefitResult r = build_reference_from_curve(
        pts, state.map->reference().alpha(), state.height.grid_size(), opts);
    if (std::max(r.frac0, r.frac1) >= opts.target_fraction)
        throw RefitError("reparametrize: refit left the height above K0/3");
    const double L = state.map->reference().length();
    if (r.hausdorff > opts.hausdorff_tol * std::max(1.0, L))
        throw RefitError("reparametrize: curve moved beyond the Hausdorff budget");

    FlowState next = state;
    next.map = r.map;
    next.height = r.height;
    next.height.time = state.t;
    next.repar_count = state.repar_count + 1;
    return next;
}

} // namespace curveflow

#include "curveflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "curveflow/errors.hpp"
#include "curveflow/geometry.hpp"

namespace curveflow {

LinearOperator::LinearOperator(std::vector<double> a, double b2_left,
                               double b2_right, double dt, Scheme scheme)
    : N_(static_cast<int>(a.size()) - 1), dt_(dt), h_(1.0 / N_),
      b2l_(b2_left), b2r_(b2_right), a_(std::move(a)), scheme_(scheme),
      A_(N_ + 1, 2, 2) {
    if (dt <= 0.0) throw std::invalid_argument("LinearOperator: dt <= 0");
    if (N_ < 8) throw std::invalid_argument("LinearOperator: grid too small");
    if (b2l_ == 0.0 || b2r_ == 0.0)
        throw DegenerateError("LinearOperator: b2 vanishes at an endpoint");

    const double s = scheme_ == Scheme::CrankNicolson ? 0.5 : 1.0;
    const double h4 = h_ * h_ * h_ * h_;
    for (int i = 0; i <= N_; ++i) {
        const double w = s * dt_ * a_[i] / h4;
        if (i == 0) {
            A_.at(0, 0) = 1.0 + 6.0 * w;
            A_.at(0, 1) = -8.0 * w;
            A_.at(0, 2) = 2.0 * w;
        } else if (i == 1) {
            A_.at(1, 0) = -4.0 * w;
            A_.at(1, 1) = 1.0 + 7.0 * w;
            A_.at(1, 2) = -4.0 * w;
            A_.at(1, 3) = w;
        } else if (i == N_ - 1) {
            A_.at(i, N_) = -4.0 * w;
            A_.at(i, N_ - 1) = 1.0 + 7.0 * w;
            A_.at(i, N_ - 2) = -4.0 * w;
            A_.at(i, N_ - 3) = w;
        } else if (i == N_) {
            A_.at(i, N_) = 1.0 + 6.0 * w;
            A_.at(i, N_ - 1) = -8.0 * w;
            A_.at(i, N_ - 2) = 2.0 * w;
        } else {
            A_.at(i, i - 2) = w;
            A_.at(i, i - 1) = -4.0 * w;
            A_.at(i, i) = 1.0 + 6.0 * w;
            A_.at(i, i + 1) = -4.0 * w;
            A_.at(i, i + 2) = w;
        }
    }
    if (!A_.factor())
        throw DegenerateError("LinearOperator: singular implicit matrix");
}

std::vector<double> LinearOperator::apply_d4(const std::vector<double>& rho,
                                             double c0, double c1) const {
    const double h3 = h_ * h_ * h_;
    const double h4 = h3 * h_;
    auto f = [&](int i) -> double {
        if (i >= 0 && i <= N_) return rho[i];
        if (i == -1) return rho[1];
        if (i == -2) return rho[2] - 2.0 * h3 * c0;
        if (i == N_ + 1) return rho[N_ - 1];
        return rho[N_ - 2] + 2.0 * h3 * c1;  // i == N + 2
    };
    std::vector<double> out(N_ + 1);
    for (int i = 0; i <= N_; ++i)
        out[i] = (f(i + 2) - 4 * f(i + 1) + 6 * f(i) - 4 * f(i - 1) + f(i - 2)) / h4;
    return out;
}

std::vector<double> LinearOperator::solve_step(
    const std::vector<double>& rho_prev, const std::vector<double>& F,
    double G2_left, double G2_right) const {
    if (static_cast<int>(rho_prev.size()) != N_ + 1 ||
        static_cast<int>(F.size()) != N_ + 1)
        throw std::invalid_argument("solve_step: size mismatch");

    const double c0 = G2_left / b2l_;
    const double c1 = G2_right / b2r_;
    const double s = scheme_ == Scheme::CrankNicolson ? 0.5 : 1.0;

    std::vector<double> rhs(N_ + 1);
    if (scheme_ == Scheme::CrankNicolson) {
        std::vector<double> expl = apply_d4(rho_prev, c0, c1);
        for (int i = 0; i <= N_; ++i)
            rhs[i] = rho_prev[i] - 0.5 * dt_ * a_[i] * expl[i] + dt_ * F[i];
    } else {
        for (int i = 0; i <= N_; ++i) rhs[i] = rho_prev[i] + dt_ * F[i];
    }
    // boundary inhomogeneity from the eliminated ghosts of the implicit part
    rhs[0] += s * dt_ * a_[0] * 2.0 * c0 / h_;
    rhs[N_] -= s * dt_ * a_[N_] * 2.0 * c1 / h_;

    A_.solve(rhs);
    return rhs;
}

LinearOperator assemble_linear(const CurvilinearMap& map,
                               const HeightField& height0, double dt,
                               Scheme scheme) {
    PdeCoefficients c = coefficients(map, height0, Closure::OneSided);
    return LinearOperator(std::move(c.a), c.b2_left, c.b2_right, dt, scheme);
}

void check_compatibility(const HeightField& height0, double tol) {
    const int N = height0.grid_size();
    double d0, d1;
    if (height0.exact) {
        d0 = (*height0.exact)[0].front();
        d1 = (*height0.exact)[0].back();
    } else {
        // 4th-order one-sided first derivative
        const double h = height0.h();
        auto& r = height0.rho;
        d0 = (-25.0 * r[0] + 48.0 * r[1] - 36.0 * r[2] + 16.0 * r[3] -
              3.0 * r[4]) / (12.0 * h);
        d1 = (25.0 * r[N] - 48.0 * r[N - 1] + 36.0 * r[N - 2] -
              16.0 * r[N - 3] + 3.0 * r[N - 4]) / (12.0 * h);
    }
    if (std::fabs(d0) > tol || std::fabs(d1) > tol)
        throw CompatibilityError(
            "initial datum violates the angle compatibility condition "
            "(d rho/d sigma != 0 at an endpoint)");
}

PicardResult picard_solve(const CurvilinearMap& map, const HeightField& height0,
                          double T_horizon, double dt,
                          const PicardOptions& opts) {
    if (T_horizon <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("picard_solve: need T_horizon, dt > 0");
    if (opts.check_compatibility) check_compatibility(height0);
    if (opts.check_bounds) {
        BoundFractions f = bound_fractions(map, height0.rho);
        if (!f.admissible())
            throw BoundViolationError("picard_solve: initial datum violates the smallness bounds");
    }

    const int n_t = std::max(1, static_cast<int>(std::llround(T_horizon / dt)));
    const int N = height0.grid_size();
    LinearOperator L = assemble_linear(map, height0, dt, opts.scheme);

    NonlinearityEval eval = opts.nonlinearity;
    if (!eval)
        eval = [&map, &height0](const HeightField& h) {
            return nonlinearity_F(map, h, height0, Closure::Flow);
        };

    PicardResult res;
    res.trajectory.assign(n_t + 1, height0);
    for (int j = 0; j <= n_t; ++j)
        res.trajectory[j].time = height0.time + j * dt;

    // nonlinearity data along the current iterate
    std::vector<NonlinearityF> data(n_t + 1);
    for (int j = 0; j <= n_t; ++j) data[j] = eval(res.trajectory[j]);

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        std::vector<HeightField> next = res.trajectory;
        double diff = 0.0;
        for (int j = 1; j <= n_t; ++j) {
            std::vector<double> sol;
            if (opts.scheme == Scheme::CrankNicolson) {
                std::vector<double> Fh(N + 1);
                for (int i = 0; i <= N; ++i)
                    Fh[i] = 0.5 * (data[j - 1].F[i] + data[j].F[i]);
                sol = L.solve_step(next[j - 1].rho, Fh,
                                   0.5 * (data[j - 1].G2_left + data[j].G2_left),
                                   0.5 * (data[j - 1].G2_right + data[j].G2_right));
            } else {
                sol = L.solve_step(next[j - 1].rho, data[j].F, data[j].G2_left,
                                   data[j].G2_right);
            }
            for (int i = 0; i <= N; ++i) {
                diff = std::max(diff, std::fabs(sol[i] - res.trajectory[j].rho[i]));
            }
            next[j].rho = std::move(sol);
            next[j].exact.reset();
        }
        res.trajectory = std::move(next);
        res.iterations = iter;
        if (diff < opts.tol) {
            res.converged = true;
            return res;
        }
        // refresh the nonlinearity along the new iterate; if the data did
        // not move, the next sweep would reproduce this trajectory
        double fdiff = 0.0;
        for (int j = 0; j <= n_t; ++j) {
            NonlinearityF nd = eval(res.trajectory[j]);
            for (int i = 0; i <= N; ++i)
                fdiff = std::max(fdiff, std::fabs(nd.F[i] - data[j].F[i]));
            fdiff = std::max(fdiff, std::fabs(nd.G2_left - data[j].G2_left));
            fdiff = std::max(fdiff, std::fabs(nd.G2_right - data[j].G2_right));
            data[j] = std::move(nd);
        }
        if (fdiff * dt < opts.tol) {
            res.converged = true;
            return res;
        }
        // admissibility along the iterate
        for (int j = 1; j <= n_t; ++j) {
            BoundFractions f = bound_fractions(map, res.trajectory[j].rho);
            if (!f.admissible())
                throw BoundViolationError(
                    "picard_solve: iterate violates the smallness bounds");
        }
    }
    throw StepError(
        "picard_solve: no contraction within max_iter (horizon too large?)");
}

namespace {

DiagnosticsSeries& push_diagnostics(FlowState& st, int iters) {
    const CurvilinearMap& map = *st.map;
    GeometryEval g = evaluate_geometry(map, st.height, Closure::OneSided);
    auto pts = curve_points(map, st.height);
    auto [r0, r1] = angle_residual(map, st.height);
    BoundFractions f = bound_fractions(map, st.height.rho);

    double kmax = 0.0;
    for (double k : g.kappa) kmax = std::max(kmax, std::fabs(k));

    DiagnosticsSeries& s = st.series;
    s.t.push_back(st.t);
    s.length.push_back(curve_length(map, st.height));
    s.area.push_back(curve_area(pts));
    s.max_kappa.push_back(kmax);
    s.angle_res_0.push_back(r0);
    s.angle_res_1.push_back(r1);
    s.bound_frac_0.push_back(f.frac0);
    s.bound_frac_1.push_back(f.frac1);
    s.picard_iters.push_back(iters);
    return s;
}

} // namespace

FlowState init_flow_state(std::shared_ptr<const CurvilinearMap> map,
                          HeightField height0) {
    FlowState st;
    st.t = height0.time;
    st.height = std::move(height0);
    st.map = std::move(map);
    push_diagnostics(st, 0);
    st.area0 = st.series.area.front();
    return st;
}

FlowState advance(const FlowState& state, double dt,
                  const AdvanceConfig& config) {
    if (dt <= 0.0) throw std::invalid_argument("advance: dt <= 0");
    BoundFractions f0 = bound_fractions(*state.map, state.height.rho);
    if (!f0.admissible())
        throw BoundViolationError("advance: state requires reparametrization");

    const double len_prev = state.series.length.empty()
                                ? curve_length(*state.map, state.height)
                                : state.series.length.back();

    double step = dt;
    for (int attempt = 0; attempt <= config.max_halvings; ++attempt) {
        PicardOptions popts;
        popts.tol = config.picard_tol;
        popts.max_iter = config.picard_max_iter;
        popts.scheme = config.scheme;
        popts.check_compatibility = false;  // enforced by the boundary rows
        PicardResult pr;
        try {
            pr = picard_solve(*state.map, state.height, step, step, popts);
        } catch (const StepError&) {
            step *= 0.5;
            continue;
        }

        FlowState next = state;
        next.t = state.t + step;
        next.height = pr.trajectory.back();
        next.height.time = next.t;

        double len = curve_length(*next.map, next.height);
        double area = curve_area(curve_points(*next.map, next.height));
        bool ok_len = len <= len_prev + config.length_tol;
        bool ok_area = std::fabs(area - state.area0) <=
                       config.area_tol * std::max(std::fabs(state.area0), 1e-300);
        BoundFractions f = bound_fractions(*next.map, next.height.rho);
        if (!f.admissible())
            throw BoundViolationError("advance: step exits the admissible ball");
        if (ok_len && ok_area) {
            push_diagnostics(next, pr.iterations);
            return next;
        }
        step *= 0.5;
    }
    throw StepError("advance: dt underflow, monitors keep failing");
}

ContractionReport measure_contraction(const CurvilinearMap& map,
                                      const HeightField& height0,
                                      const std::vector<double>& T_list,
                                      int pair_count,
                                      const ContractionOptions& opts) {
    if (T_list.empty()) throw std::invalid_argument("measure_contraction: empty T_list");
    const int N = height0.grid_size();
    const double T0 = *std::max_element(T_list.begin(), T_list.end());
    const double mu = opts.mu;

    BoundFractions base = bound_fractions(map, height0.rho);
    const double margin =
        opts.amplitude * std::max(0.0, 2.0 / 3.0 - std::max(base.frac0, base.frac1));

    // mode amplitudes per pair member, shared across horizons
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto make_shape = [&]() {
        std::vector<double> shape(N + 1, 0.0);
        for (int k = 0; k <= opts.max_mode; ++k) {
            double c = u(rng) / (1.0 + k * k);
            for (int i = 0; i <= N; ++i)
                shape[i] += c * std::cos(k * M_PI * static_cast<double>(i) / N);
        }
        HeightField probe;
        probe.rho = shape;
        BoundFractions f = bound_fractions(map, probe.rho);
        double worst = std::max(f.frac0, f.frac1);
        double scale = worst > 0 ? margin / worst : 0.0;
        for (double& v : shape) v *= scale;
        return shape;
    };
    std::vector<std::vector<double>> shapes1(pair_count), shapes2(pair_count);
    for (int p = 0; p < pair_count; ++p) {
        shapes1[p] = make_shape();
        shapes2[p] = make_shape();
    }

    auto w4_norm = [&](const std::vector<double>& v) {
        HeightDerivs d = compute_derivs(v, Closure::OneSided);
        double s = 0.0;
        const double h = 1.0 / N;
        for (int i = 0; i <= N; ++i) {
            double w = (i == 0 || i == N) ? 0.5 : 1.0;
            s += w * h * (v[i] * v[i] + d.d1[i] * d.d1[i] + d.d2[i] * d.d2[i] +
                          d.d3[i] * d.d3[i] + d.d4[i] * d.d4[i]);
        }
        return s;  // squared
    };
    auto l2_sigma = [&](const std::vector<double>& v) {
        double s = 0.0;
        const double h = 1.0 / N;
        for (int i = 0; i <= N; ++i) {
            double w = (i == 0 || i == N) ? 0.5 : 1.0;
            s += w * h * v[i] * v[i];
        }
        return s;  // squared
    };

    ContractionReport rep;
    rep.T_list = T_list;
    for (double T : T_list) {
        const int nt = opts.time_nodes;
        const double dts = T / nt;
        double worst_ratio = 0.0;
        for (int p = 0; p < pair_count; ++p) {
            double num2 = 0.0, den2 = 0.0;
            std::vector<double> delta_prev(N + 1, 0.0);
            for (int j = 1; j <= nt; ++j) {
                double t = j * dts;
                double ramp = t / T0;  // trajectories share the trace rho_0
                HeightField h1, h2;
                h1.rho.resize(N + 1);
                h2.rho.resize(N + 1);
                std::vector<double> delta(N + 1), ddelta(N + 1);
                for (int i = 0; i <= N; ++i) {
                    h1.rho[i] = height0.rho[i] + ramp * shapes1[p][i];
                    h2.rho[i] = height0.rho[i] + ramp * shapes2[p][i];
                    delta[i] = h1.rho[i] - h2.rho[i];
                    ddelta[i] = (delta[i] - delta_prev[i]) / dts;
                }
                NonlinearityF F1 = opts.nonlinearity
                                       ? opts.nonlinearity(h1)
                                       : nonlinearity_F(map, h1, height0, Closure::Flow);
                NonlinearityF F2 = opts.nonlinearity
                                       ? opts.nonlinearity(h2)
                                       : nonlinearity_F(map, h2, height0, Closure::Flow);
                std::vector<double> dF(N + 1);
                for (int i = 0; i <= N; ++i) dF[i] = F1.F[i] - F2.F[i];
                const double wgt = dts * std::pow(t, 2.0 * (1.0 - mu));
                num2 += wgt * (l2_sigma(dF) +
                               std::pow(F1.G2_left - F2.G2_left, 2) +
                               std::pow(F1.G2_right - F2.G2_right, 2));
                // discrete maximal-regularity norm: spatial W4 part plus the
                // time-derivative part of E_{mu,T}
                den2 += wgt * (w4_norm(delta) + l2_sigma(ddelta));
                delta_prev = delta;
            }
            if (den2 < 1e-28) continue;  // identical pair guarded
            worst_ratio = std::max(worst_ratio, std::sqrt(num2 / den2));
        }
        rep.C_list.push_back(worst_ratio);

        PicardOptions popts;
        popts.check_compatibility = false;
        PicardResult pr = picard_solve(map, height0, T, T0 * opts.picard_dt_fraction, popts);
        rep.iteration_counts.push_back(pr.iterations);
    }
    return rep;
}

} // namespace curveflow

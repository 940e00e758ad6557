#include "curveflow/refcurve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace curveflow {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 7-point Gauss-Legendre on [-1,1]
constexpr int kGaussN = 7;
constexpr double kGx[kGaussN] = {
    0.0,
    -0.4058451513773971669066064, 0.4058451513773971669066064,
    -0.7415311855993944398638648, 0.7415311855993944398638648,
    -0.9491079123427585245261897, 0.9491079123427585245261897};
constexpr double kGw[kGaussN] = {
    0.4179591836734693877551020,
    0.3818300505051189449503698, 0.3818300505051189449503698,
    0.2797053914892766679014678, 0.2797053914892766679014678,
    0.1294849661688696932706114, 0.1294849661688696932706114};

// C3 ramp pieces for the step derivative
double b3(double t) { return ((( -20.0 * t + 70.0) * t - 84.0) * t + 35.0) * t * t * t * t; }
double b3_d1(double t) { return (((-140.0 * t + 420.0) * t - 420.0) * t + 140.0) * t * t * t; }
double b3_d2(double t) { return (((-840.0 * t + 2100.0) * t - 1680.0) * t + 420.0) * t * t; }
double b3_d3(double t) { return (((-4200.0 * t + 8400.0) * t - 5040.0) * t + 840.0) * t; }
double ib3(double t) { return ((((-2.5 * t + 10.0) * t - 14.0) * t + 7.0)) * t * t * t * t * t; }

constexpr double kStepEase = 0.25;               // corner width of the ramp
constexpr double kStepSlope = 1.0 / (1.0 - kStepEase);

} // namespace

double smooth_step(double x, int order) {
    const double e = kStepEase, c = kStepSlope;
    if (x <= 0.0) return order == 0 ? 0.0 : 0.0;
    if (x >= 1.0) return order == 0 ? 1.0 : 0.0;
    if (x < e) {
        double t = x / e;
        switch (order) {
            case 0: return c * e * ib3(t);
            case 1: return c * b3(t);
            case 2: return c * b3_d1(t) / e;
            case 3: return c * b3_d2(t) / (e * e);
            case 4: return c * b3_d3(t) / (e * e * e);
        }
    } else if (x <= 1.0 - e) {
        switch (order) {
            case 0: return c * (0.5 * e + (x - e));
            case 1: return c;
            default: return 0.0;
        }
    } else {
        double t = (1.0 - x) / e;
        switch (order) {
            case 0: return c * (1.0 - e - e * ib3(t));
            case 1: return c * b3(t);
            case 2: return -c * b3_d1(t) / e;
            case 3: return c * b3_d2(t) / (e * e);
            case 4: return -c * b3_d3(t) / (e * e * e);
        }
    }
    throw std::invalid_argument("smooth_step: order out of range");
}

double CutoffEta::eval(double x, int order) const {
    if (order < 0 || order > 4)
        throw std::invalid_argument("eta: order out of range");
    const double s6 = 1.0 / 6.0;
    if (x < s6) return order == 0 ? -1.0 : 0.0;
    if (x < 2.0 * s6) {
        double v = smooth_step(6.0 * (x - s6), order) * std::pow(6.0, order);
        return order == 0 ? -1.0 + v : v;
    }
    if (x < 4.0 * s6) return 0.0;
    if (x < 5.0 * s6)
        return smooth_step(6.0 * (x - 4.0 * s6), order) * std::pow(6.0, order);
    return order == 0 ? 1.0 : 0.0;
}

Jet5 CutoffEta::jet(double x) const {
    Jet5 j;
    for (int k = 0; k <= 4; ++k) j[k] = eval(x, k);
    return j;
}

double CutoffEta::max_abs_slope() const { return 6.0 * kStepSlope; }

double eta_eval(double sigma, int order) {
    if (sigma < 0.0 || sigma > 1.0)
        throw std::domain_error("eta_eval: sigma outside [0,1]");
    return CutoffEta{}.eval(sigma, order);
}

// --- profiles ------------------------------------------------------------

CosineProfile::CosineProfile(double alpha, double amplitude)
    : alpha_(alpha), amplitude_(amplitude) {}

double CosineProfile::theta(double sigma, int order) const {
    const double a = alpha_, b = amplitude_ - 1.0;
    const double p = kPi;
    const double c1 = std::cos(p * sigma), s1 = std::sin(p * sigma);
    const double c2 = std::cos(2 * p * sigma), s2 = std::sin(2 * p * sigma);
    const double c4 = std::cos(4 * p * sigma), s4 = std::sin(4 * p * sigma);
    switch (order) {
        case 0: return a * c1 + b * (0.5 * s2 - 0.25 * s4);
        case 1: return -a * p * s1 + b * p * (c2 - c4);
        case 2: return -a * p * p * c1 + b * p * p * (-2.0 * s2 + 4.0 * s4);
        case 3: return a * p * p * p * s1 + b * p * p * p * (-4.0 * c2 + 16.0 * c4);
        case 4: return a * p * p * p * p * c1 + b * p * p * p * p * (8.0 * s2 - 64.0 * s4);
    }
    throw std::invalid_argument("CosineProfile: order out of range");
}

double ArcProfile::theta(double sigma, int order) const {
    switch (order) {
        case 0: return alpha_ * (1.0 - 2.0 * sigma);
        case 1: return -2.0 * alpha_;
        default: return 0.0;
    }
}

// --- reference curve ------------------------------------------------------

ReferenceCurve::ReferenceCurve(std::shared_ptr<const ThetaProfile> profile,
                               double alpha, double length, int N, Vec2 anchor)
    : profile_(std::move(profile)), alpha_(alpha), length_(length), N_(N),
      anchor_(anchor) {
    if (!(alpha > 0.0 && alpha < kPi))
        throw std::invalid_argument("reference curve: alpha outside (0, pi)");
    if (length <= 0.0) throw std::invalid_argument("reference curve: length <= 0");
    if (N < 16 || N % 2 != 0)
        throw std::invalid_argument("reference curve: need N >= 16 even");
    if (anchor_.y != 0.0)
        throw std::invalid_argument("reference curve: anchor off the axis");

    cot_alpha_ = std::cos(alpha) / std::sin(alpha);
    if (std::fabs(std::cos(alpha)) < 1e-14) cot_alpha_ = 0.0;

    const double h = 1.0 / N_;
    cum_.assign(N_ + 1, Vec2{});
    for (int i = 0; i < N_; ++i) {
        Vec2 acc{};
        double s0 = i * h;
        for (int g = 0; g < kGaussN; ++g) {
            double s = s0 + 0.5 * h * (1.0 + kGx[g]);
            double th = profile_->theta(s, 0);
            acc += (0.5 * h * kGw[g]) * Vec2{std::cos(th), std::sin(th)};
        }
        cum_[i + 1] = cum_[i] + acc;
    }

    phi_.resize(N_ + 1);
    tau_.resize(N_ + 1);
    n_.resize(N_ + 1);
    kappa_.resize(N_ + 1);
    for (int i = 0; i <= N_; ++i) {
        phi_[i] = anchor_ + length_ * cum_[i];
        double th = profile_->theta(sigma(i), 0);
        tau_[i] = {std::cos(th), std::sin(th)};
        n_[i] = rot90(tau_[i]);
        kappa_[i] = profile_->theta(sigma(i), 1) / length_;
    }

    kappa_max_ = 0.0;
    const int over = 8;
    for (int i = 0; i <= N_ * over; ++i) {
        double s = static_cast<double>(i) / (N_ * over);
        kappa_max_ = std::max(kappa_max_, std::fabs(profile_->theta(s, 1)) / length_);
    }
}

double ReferenceCurve::theta(double sigma, int order) const {
    return profile_->theta(sigma, order);
}

Vec2 ReferenceCurve::phi(double s) const {
    if (s < 0.0 || s > 1.0) throw std::domain_error("phi: sigma outside [0,1]");
    const double h = 1.0 / N_;
    int i = std::min(static_cast<int>(s * N_), N_ - 1);
    double s0 = i * h;
    Vec2 acc = cum_[i];
    double w = s - s0;
    if (w > 0.0) {
        for (int g = 0; g < kGaussN; ++g) {
            double u = s0 + 0.5 * w * (1.0 + kGx[g]);
            double th = profile_->theta(u, 0);
            acc += (0.5 * w * kGw[g]) * Vec2{std::cos(th), std::sin(th)};
        }
    }
    return anchor_ + length_ * acc;
}

Vec2 ReferenceCurve::tau(double s) const {
    double th = profile_->theta(s, 0);
    return {std::cos(th), std::sin(th)};
}

Vec2 ReferenceCurve::normal(double s) const { return rot90(tau(s)); }

double ReferenceCurve::kappa(double s) const {
    return profile_->theta(s, 1) / length_;
}

Jet5 ReferenceCurve::kappa_jet(double s) const {
    Jet5 j;
    for (int k = 0; k <= 3; ++k) j[k] = profile_->theta(s, k + 1) / length_;
    j[4] = 0.0;
    return j;
}

// --- curvilinear map ------------------------------------------------------

CurvilinearMap::CurvilinearMap(std::shared_ptr<const ReferenceCurve> ref,
                               CutoffEta eta)
    : ref_(std::move(ref)), eta_(eta) {
    sm_ = compute_smallness(*ref_, eta_);
    d_ = (2.0 / 3.0) * sm_.K0;
    node_cache_.resize(ref_->grid_size() + 1);
    for (int i = 0; i <= ref_->grid_size(); ++i)
        node_cache_[i] = derivs(ref_->sigma(i));
}

CurvilinearMap::Derivs CurvilinearMap::derivs(double s) const {
    const double L = ref_->length();
    const double c = ref_->cot_alpha();
    const Jet5 kj = ref_->kappa_jet(s);
    const Jet5 ej = eta_.jet(s);
    const Vec2 tau = ref_->tau(s);
    const Vec2 nrm = ref_->normal(s);

    struct FrameVec { Jet5 p, q; };  // p*tau + q*n
    auto fderiv = [&](const FrameVec& f) {
        FrameVec g;
        g.p = f.p.shifted() - L * (kj * f.q);
        g.q = f.q.shifted() + L * (kj * f.p);
        return g;
    };
    auto value = [&](const FrameVec& f) {
        return f.p.value() * tau + f.q.value() * nrm;
    };

    Derivs D;
    D.A[0] = ref_->phi(s);
    FrameVec a{Jet5::constant(L), Jet5::constant(0.0)};
    for (int k = 1; k <= 4; ++k) {
        D.A[k] = value(a);
        a = fderiv(a);
    }
    FrameVec b{c * ej, Jet5::constant(1.0)};
    for (int k = 0; k <= 4; ++k) {
        D.B[k] = value(b);
        b = fderiv(b);
    }
    return D;
}

Vec2 CurvilinearMap::psi(double s, double q) const {
    Derivs D = derivs(s);
    return D.A[0] + q * D.B[0];
}

std::shared_ptr<CurvilinearMap> make_map(ReferenceCurve curve) {
    auto ref = std::make_shared<const ReferenceCurve>(std::move(curve));
    return std::make_shared<CurvilinearMap>(ref, CutoffEta{});
}

SmallnessConstants compute_smallness(const ReferenceCurve& ref,
                                     const CutoffEta& eta) {
    SmallnessConstants out;
    const double alpha = ref.alpha();
    const double cot = ref.cot_alpha();
    const double chat = std::sqrt(2.0) * std::sin(alpha);
    const double kmax = ref.max_abs_kappa();
    const double etap = eta.max_abs_slope();
    double denom = 2.0 * kmax * (1.0 + cot * cot + chat * std::fabs(cot) * etap);
    out.K0 = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    out.K1 = cot == 0.0 ? std::numeric_limits<double>::infinity()
                        : ref.length() / (12.0 * std::fabs(cot));
    return out;
}

// --- operations -----------------------------------------------------------

ReferenceCurve build_reference_from_angle(double alpha, double amplitude,
                                          int N, double length) {
    if (!(alpha > 0.0 && alpha < kPi))
        throw std::invalid_argument("build_reference_from_angle: alpha outside (0, pi)");
    auto prof = std::make_shared<const CosineProfile>(alpha, amplitude);
    ReferenceCurve curve(prof, alpha, length, N);
    for (int i = 1; i < N; ++i) {
        if (curve.phi_samples()[i].y < -1e-12 * length)
            throw std::invalid_argument(
                "build_reference_from_angle: profile dips below the axis "
                "(amplitude too extreme)");
    }
    return curve;
}

Vec2 psi_eval(const CurvilinearMap& map, double sigma, double q, int i, int j) {
    if (sigma < 0.0 || sigma > 1.0)
        throw std::domain_error("psi_eval: sigma outside [0,1]");
    if (std::fabs(q) >= map.tube_halfwidth())
        throw std::domain_error("psi_eval: |q| outside the tube");
    if (i < 0 || j < 0 || i + j > 4)
        throw std::domain_error("psi_eval: bad multi-index");
    if (j >= 2) return {0.0, 0.0};
    CurvilinearMap::Derivs D = map.derivs(sigma);
    if (j == 1) return D.B[i];
    return D.A[i] + q * D.B[i];
}

ValidationReport validate_reference(const ReferenceCurve& curve, double tol) {
    ValidationReport rep;
    const int N = curve.grid_size();
    const double h = 1.0 / N;
    const double L = curve.length();
    const auto& phi = curve.phi_samples();

    // arc-length residual via 6th-order interior / 4th-order one-sided FD
    double worst = 0.0;
    for (int i = 0; i <= N; ++i) {
        Vec2 d;
        if (i >= 3 && i <= N - 3) {
            d = (1.0 / (60.0 * h)) *
                (-1.0 * phi[i - 3] + 9.0 * phi[i - 2] - 45.0 * phi[i - 1] +
                 45.0 * phi[i + 1] - 9.0 * phi[i + 2] + 1.0 * phi[i + 3]);
        } else {
            // 6th-order one-sided stencil, mirrored on the right
            static const double c[7] = {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3,
                                        -15.0 / 4, 6.0 / 5, -1.0 / 6};
            int dir = i < 3 ? 1 : -1;
            Vec2 acc{};
            for (int j = 0; j < 7; ++j) acc += c[j] * phi[i + dir * j];
            d = (dir / h) * acc;
        }
        worst = std::max(worst, std::fabs(d.norm() - L) / L);
    }
    rep.checks.push_back({"arclength_constant", worst, tol, worst < tol});

    double hend = std::max(std::fabs(phi[0].y), std::fabs(phi[N].y)) /
                  std::max(1.0, L);
    rep.checks.push_back({"endpoint_height", hend, tol, hend < tol});

    const double a = curve.alpha();
    Vec2 t0 = curve.tau_samples()[0] - Vec2{std::cos(a), std::sin(a)};
    Vec2 t1 = curve.tau_samples()[N] - Vec2{std::cos(a), -std::sin(a)};
    double tend = std::max(t0.norm(), t1.norm());
    rep.checks.push_back({"endpoint_tangent", tend, tol, tend < tol});

    double kend = std::max(std::fabs(curve.kappa_samples()[0]),
                           std::fabs(curve.kappa_samples()[N])) * L;
    rep.checks.push_back({"endpoint_curvature", kend, tol, kend < tol});

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

} // namespace curveflow

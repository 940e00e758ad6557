#ifndef CURVEFLOW_REFCURVE_HPP
#define CURVEFLOW_REFCURVE_HPP

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "curveflow/jets.hpp"
#include "curveflow/splines.hpp"
#include "curveflow/vec2.hpp"

namespace curveflow {

// C4 step: 0 on (-inf,0], 1 on [1,inf), monotone, four vanishing
// derivatives at both ends. Built from a plateaued C3 ramp so the
// maximal slope stays small (~1.33).
double smooth_step(double x, int order = 0);

// Cutoff weighting the tangential tilt of the coordinate fibers:
// -1 on [0,1/6], 0 on [2/6,4/6], +1 on [5/6,1], C4 transitions.
class CutoffEta {
public:
    double eval(double x, int order = 0) const;
    Jet5 jet(double x) const;
    double max_abs_slope() const;
};

// Tangent-angle profile sigma -> theta(sigma) with derivatives up to 4.
class ThetaProfile {
public:
    virtual ~ThetaProfile() = default;
    virtual double theta(double sigma, int order) const = 0;
    virtual std::string id() const = 0;
};

// theta(sigma) = alpha cos(pi sigma) + (amplitude-1) [sin(2 pi sigma)/2 - sin(4 pi sigma)/4]
class CosineProfile : public ThetaProfile {
public:
    CosineProfile(double alpha, double amplitude);
    double theta(double sigma, int order) const override;
    std::string id() const override { return "cosine"; }
    double alpha() const { return alpha_; }
    double amplitude() const { return amplitude_; }

private:
    double alpha_, amplitude_;
};

// theta(sigma) = alpha (1 - 2 sigma): circular arc (nonzero endpoint
// curvature; fails the reference-curve conditions by design, used for
// validation tests).
class ArcProfile : public ThetaProfile {
public:
    explicit ArcProfile(double alpha) : alpha_(alpha) {}
    double theta(double sigma, int order) const override;
    std::string id() const override { return "arc"; }

private:
    double alpha_;
};

// Quintic-spline profile (result of refitting a sampled curve).
class SplineProfile : public ThetaProfile {
public:
    explicit SplineProfile(QuinticSpline s) : s_(std::move(s)) {}
    double theta(double sigma, int order) const override {
        return s_.eval(sigma, order);
    }
    std::string id() const override { return "spline"; }

private:
    QuinticSpline s_;
};

// Reference curve Phi* parametrized proportional to arc length on [0,1],
// endpoints on the horizontal axis, endpoint tangent angles +-alpha,
// zero endpoint curvature.
class ReferenceCurve {
public:
    ReferenceCurve(std::shared_ptr<const ThetaProfile> profile, double alpha,
                   double length, int N, Vec2 anchor = {0.0, 0.0});

    double alpha() const { return alpha_; }
    double length() const { return length_; }
    int grid_size() const { return N_; }
    double sigma(int i) const { return static_cast<double>(i) / N_; }
    const ThetaProfile& profile() const { return *profile_; }
    std::shared_ptr<const ThetaProfile> profile_ptr() const { return profile_; }
    Vec2 anchor() const { return anchor_; }

    const std::vector<Vec2>& phi_samples() const { return phi_; }
    const std::vector<double>& kappa_samples() const { return kappa_; }
    const std::vector<Vec2>& tau_samples() const { return tau_; }
    const std::vector<Vec2>& normal_samples() const { return n_; }

    double theta(double sigma, int order = 0) const;
    Vec2 phi(double sigma) const;      // Phi*(sigma), quadrature-backed
    Vec2 tau(double sigma) const;
    Vec2 normal(double sigma) const;
    double kappa(double sigma) const;  // theta'(sigma)/L
    // curvature jet (kappa..kappa''' valid, top slot zero)
    Jet5 kappa_jet(double sigma) const;

    // cot(alpha), exactly 0 on the perpendicular branch
    double cot_alpha() const { return cot_alpha_; }

    double max_abs_kappa() const { return kappa_max_; }

private:
    std::shared_ptr<const ThetaProfile> profile_;
    double alpha_, length_;
    int N_;
    Vec2 anchor_;
    double cot_alpha_;
    double kappa_max_;
    std::vector<Vec2> phi_, tau_, n_;
    std::vector<double> kappa_;
    std::vector<Vec2> cum_;  // cumulative unit-tangent integral at nodes
};

// Smallness constants of the admissibility bounds: K0 for ||rho||_C and
// K1 for ||d rho||_C (K1 = +inf on the perpendicular branch).
struct SmallnessConstants {
    double K0 = 0.0;
    double K1 = 0.0;
};

// Curvilinear coordinates Psi(sigma, q) = Phi*(sigma) + q B(sigma),
// B = n + cot(alpha) eta tau, with tube half-width d.
class CurvilinearMap {
public:
    CurvilinearMap(std::shared_ptr<const ReferenceCurve> ref, CutoffEta eta);

    const ReferenceCurve& reference() const { return *ref_; }
    std::shared_ptr<const ReferenceCurve> reference_ptr() const { return ref_; }
    const CutoffEta& eta() const { return eta_; }
    double tube_halfwidth() const { return d_; }
    SmallnessConstants smallness() const { return sm_; }

    // Bundle of sigma-derivatives of A = Phi* and the fiber direction B.
    struct Derivs {
        std::array<Vec2, 5> A;  // A[k] = d^k/dsigma^k Phi*
        std::array<Vec2, 5> B;  // B[k] = d^k/dsigma^k B
    };
    Derivs derivs(double sigma) const;
    const Derivs& node_derivs(int i) const { return node_cache_[i]; }

    Vec2 psi(double sigma, double q) const;
    int grid_size() const { return ref_->grid_size(); }

private:
    std::shared_ptr<const ReferenceCurve> ref_;
    CutoffEta eta_;
    double d_;
    SmallnessConstants sm_;
    std::vector<Derivs> node_cache_;
};

// --- operations ---------------------------------------------------------

ReferenceCurve build_reference_from_angle(double alpha, double amplitude,
                                          int N, double length = 2.0);

std::shared_ptr<CurvilinearMap> make_map(ReferenceCurve curve);

double eta_eval(double sigma, int order);

// d^i/dsigma^i d^j/dq^j Psi(sigma, q), i + j <= 4
Vec2 psi_eval(const CurvilinearMap& map, double sigma, double q, int i, int j);

struct ValidationCheck {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass = false;
};

ValidationReport validate_reference(const ReferenceCurve& curve,
                                    double tol = 1e-10);

SmallnessConstants compute_smallness(const ReferenceCurve& ref,
                                     const CutoffEta& eta);

} // namespace curveflow

#endif

#ifndef CURVEFLOW_GEOMETRY_HPP
#define CURVEFLOW_GEOMETRY_HPP

#include <array>
#include <optional>
#include <vector>

#include "curveflow/refcurve.hpp"
#include "curveflow/vec2.hpp"

namespace curveflow {

// Height function on the uniform sigma-grid. Spatial derivatives are
// obtained from second-order finite differences unless exact derivative
// arrays were supplied at construction.
struct HeightField {
    double time = 0.0;
    std::vector<double> rho;  // N+1 values
    // optional exact derivatives d1..d4 (e.g. analytic test states)
    std::optional<std::array<std::vector<double>, 4>> exact;

    int grid_size() const { return static_cast<int>(rho.size()) - 1; }
    double h() const { return 1.0 / grid_size(); }
};

// Boundary treatment for the finite-difference derivatives.
//   Mirror   : odd derivatives vanish at the ends (compatible fields)
//   Flow     : mirror for d1 plus prescribed third derivative (no-flux data)
//   OneSided : no boundary assumption, one-sided interior-order stencils
enum class Closure { Mirror, Flow, OneSided };

struct FlowBC {
    double c0 = 0.0, c1 = 0.0;  // d^3 rho at sigma = 0, 1
};

struct HeightDerivs {
    std::vector<double> d1, d2, d3, d4;
};

HeightDerivs compute_derivs(const std::vector<double>& rho, Closure closure,
                            FlowBC bc = {});

// All evolving-curve geometry at one node, from exact map derivatives and
// the local 5-jet of the height function.
struct NodeGeometry {
    double J = 0.0;       // metric |d Phi / d sigma|
    Vec2 tau, n;          // unit tangent / normal of the evolving curve
    double ip = 0.0;      // <Psi_q, R Psi_sigma>
    double kappa = 0.0;
    double ks = 0.0;      // d kappa / ds
    double kss = 0.0;     // d^2 kappa / ds^2
};

// rho_jet = {rho, rho', rho'', rho''', rho''''}
NodeGeometry eval_node(const CurvilinearMap::Derivs& D,
                       const std::array<double, 5>& rho_jet, double length);

struct GeometryEval {
    std::vector<double> J, kappa, ks, kss, ip;
    std::vector<Vec2> tau, n;
};

GeometryEval evaluate_geometry(const CurvilinearMap& map,
                               const HeightField& height,
                               Closure closure = Closure::OneSided);

// third-derivative boundary values making d kappa / ds vanish at the ends
FlowBC noflux_boundary(const CurvilinearMap& map,
                       const std::vector<double>& rho);

// --- spec operations ------------------------------------------------------

double metric_J(const CurvilinearMap& map, double rho, double drho,
                double sigma);

std::vector<double> curvature(const CurvilinearMap& map,
                              const HeightField& height,
                              Closure closure = Closure::OneSided);

std::pair<std::vector<double>, std::vector<double>> arc_derivatives_kappa(
    const CurvilinearMap& map, const HeightField& height,
    Closure closure = Closure::OneSided);

std::vector<double> normal_velocity(const CurvilinearMap& map,
                                    const HeightField& height,
                                    const std::vector<double>& rho_t,
                                    Closure closure = Closure::OneSided);

// endpoint residuals of the contact-angle condition
std::pair<double, double> angle_residual(const CurvilinearMap& map,
                                         const HeightField& height);

struct LengthBoundResult {
    double lhs = 0.0;  // 1 / L
    double rhs = 0.0;  // ||kappa||_C / (sqrt(2) sin alpha)
    bool pass = false;
};

// samples parametrized proportional to arc length, endpoint tangents
// (cos alpha, +-sin alpha)
LengthBoundResult length_bound_check(const std::vector<Vec2>& samples,
                                     double alpha);

SmallnessConstants smallness_constants(const CurvilinearMap& map);

struct BoundFractions {
    double frac0 = 0.0;  // ||rho||_C / K0
    double frac1 = 0.0;  // ||d rho||_C / K1
    bool admissible() const { return frac0 < 2.0 / 3.0 && frac1 < 2.0 / 3.0; }
};

BoundFractions bound_fractions(const CurvilinearMap& map,
                               const std::vector<double>& rho);

// polyline diagnostics of the composite curve sigma -> Psi(sigma, rho)
std::vector<Vec2> curve_points(const CurvilinearMap& map,
                               const HeightField& height);
double curve_length(const CurvilinearMap& map, const HeightField& height);
double curve_area(const std::vector<Vec2>& pts);  // signed, vs the axis

} // namespace curveflow

#endif

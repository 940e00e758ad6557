#ifndef CURVEFLOW_ORACLE_HPP
#define CURVEFLOW_ORACLE_HPP

#include <vector>

#include "curveflow/vec2.hpp"

namespace curveflow {

// Front-tracking ground truth for V = -d^2 kappa / ds^2 with endpoints on
// the axis, contact angle alpha, and no-flux condition. Independent of the
// height-function machinery: all geometry comes from divided differences
// of the node polygon.
struct ParametricCurve {
    std::vector<Vec2> x;
    double alpha = 0.0;

    int nodes() const { return static_cast<int>(x.size()); }
};

struct OracleGeometry {
    std::vector<double> kappa, ks, kss;
};

// Arc-length FD geometry of a sampled curve, second order.
// With use_bc_ghosts the endpoint stencils use the tangent-angle ghost
// reflection (angle condition) and mirror extension of kappa (no flux);
// otherwise one-sided stencils make no boundary assumption.
OracleGeometry oracle_curvature(const std::vector<Vec2>& points,
                                bool use_bc_ghosts = false,
                                double alpha = 0.0);

// Constant-curvature arc meeting the axis at angle alpha with the given
// chord; M+1 nodes, uniform arc spacing, traversed left to right.
ParametricCurve equilibrium_arc(double alpha, double chord, int M = 200,
                                double center_x = 0.0);

struct OracleStepOptions {
    bool semi_implicit = true;
    bool redistribute = true;
};

std::vector<double> oracle_velocity(const ParametricCurve& curve);

ParametricCurve oracle_step(const ParametricCurve& curve, double dt,
                            OracleStepOptions opts = {});

double polyline_length(const std::vector<Vec2>& pts);

// spacing quasi-uniformity: max spacing over mean spacing
double spacing_ratio(const std::vector<Vec2>& pts);

} // namespace curveflow

#endif

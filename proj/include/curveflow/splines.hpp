#ifndef CURVEFLOW_SPLINES_HPP
#define CURVEFLOW_SPLINES_HPP

#include <vector>

namespace curveflow {

// Scalar C2 cubic spline on strictly increasing knots.
class CubicSpline {
public:
    enum class End { NotAKnot, Clamped };

    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> f,
                End end = End::NotAKnot,
                double slope_left = 0.0, double slope_right = 0.0);

    double eval(double x, int order = 0) const;  // order <= 3
    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

private:
    std::vector<double> x_, f_, m_;  // nodes, values, nodal slopes
    int locate(double x) const;
};

// Scalar C4 quintic spline, clamped: first and second derivative
// prescribed at both ends. Supports derivatives up to order 4.
class QuinticSpline {
public:
    QuinticSpline() = default;
    QuinticSpline(std::vector<double> x, std::vector<double> f,
                  double m0, double M0, double mN, double MN);

    double eval(double x, int order = 0) const;  // order <= 4
    double xmin() const { return x_.front(); }
    double xmax() const { return x_.back(); }

private:
    std::vector<double> x_, f_, m_, M_;  // nodes, values, slopes, curvatures
    int locate(double x) const;
};

} // namespace curveflow

#endif

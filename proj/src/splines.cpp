#include "curveflow/splines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "curveflow/banded.hpp"

namespace curveflow {

namespace {

// value of a polynomial given by coefficients c[k] t^k, derivative `order`
double poly_eval(const std::array<double, 6>& c, double t, int order) {
    std::array<double, 6> a = c;
    for (int d = 0; d < order; ++d) {
        for (int k = 0; k + 1 < 6; ++k) a[k] = (k + 1) * a[k + 1];
        a[5] = 0.0;
    }
    double r = 0.0;
    for (int k = 5; k >= 0; --k) r = r * t + a[k];
    return r;
}

// quintic Hermite basis on [0,1]: value/slope/curvature at each end
const std::array<std::array<double, 6>, 6> kQuinticBasis = {{
    {1, 0, 0, -10, 15, -6},      // A0: value left
    {0, 1, 0, -6, 8, -3},        // A1: slope left
    {0, 0, 0.5, -1.5, 1.5, -0.5},// A2: curvature left
    {0, 0, 0, 10, -15, 6},       // B0: value right
    {0, 0, 0, -4, 7, -3},        // B1: slope right
    {0, 0, 0, 0.5, -1, 0.5},     // B2: curvature right
}};

void check_knots(const std::vector<double>& x, std::size_t nf) {
    if (x.size() != nf || x.size() < 3)
        throw std::invalid_argument("spline: bad knot/value sizes");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i]))
            throw std::invalid_argument("spline: knots not increasing");
}

} // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> f,
                         End end, double slope_left, double slope_right)
    : x_(std::move(x)), f_(std::move(f)) {
    check_knots(x_, f_.size());
    const int n = static_cast<int>(x_.size()) - 1;  // intervals
    BandedMatrix A(n + 1, 2, 2);
    std::vector<double> rhs(n + 1, 0.0);

    for (int i = 1; i < n; ++i) {
        double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        A.at(i, i - 1) = 1.0 / hl;
        A.at(i, i) = 2.0 * (1.0 / hl + 1.0 / hr);
        A.at(i, i + 1) = 1.0 / hr;
        rhs[i] = 3.0 * ((f_[i] - f_[i - 1]) / (hl * hl) +
                        (f_[i + 1] - f_[i]) / (hr * hr));
    }
    if (end == End::Clamped) {
        A.at(0, 0) = 1.0;
        rhs[0] = slope_left;
        A.at(n, n) = 1.0;
        rhs[n] = slope_right;
    } else {
        // third derivative continuous across the first/last interior knot
        double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
        A.at(0, 0) = 1.0 / (h0 * h0);
        A.at(0, 1) = 1.0 / (h0 * h0) - 1.0 / (h1 * h1);
        A.at(0, 2) = -1.0 / (h1 * h1);
        rhs[0] = 2.0 * (f_[1] - f_[0]) / (h0 * h0 * h0) +
                 2.0 * (f_[1] - f_[2]) / (h1 * h1 * h1);
        double hm = x_[n - 1] - x_[n - 2], hl = x_[n] - x_[n - 1];
        A.at(n, n - 2) = 1.0 / (hm * hm);
        A.at(n, n - 1) = 1.0 / (hm * hm) - 1.0 / (hl * hl);
        A.at(n, n) = -1.0 / (hl * hl);
        rhs[n] = 2.0 * (f_[n - 1] - f_[n - 2]) / (hm * hm * hm) +
                 2.0 * (f_[n - 1] - f_[n]) / (hl * hl * hl);
    }
    if (!A.factor()) throw std::runtime_error("cubic spline: singular system");
    A.solve(rhs);
    m_ = std::move(rhs);
}

int CubicSpline::locate(double x) const {
    int n = static_cast<int>(x_.size()) - 1;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(i, 0, n - 1);
}

double CubicSpline::eval(double x, int order) const {
    if (order < 0 || order > 3) throw std::invalid_argument("cubic eval order");
    int i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    // cubic Hermite basis
    static const std::array<std::array<double, 6>, 4> basis = {{
        {1, 0, -3, 2, 0, 0},   // value left
        {0, 1, -2, 1, 0, 0},   // slope left
        {0, 0, 3, -2, 0, 0},   // value right
        {0, 0, -1, 1, 0, 0},   // slope right
    }};
    double v = f_[i] * poly_eval(basis[0], t, order) +
               h * m_[i] * poly_eval(basis[1], t, order) +
               f_[i + 1] * poly_eval(basis[2], t, order) +
               h * m_[i + 1] * poly_eval(basis[3], t, order);
    return v / std::pow(h, order);
}

QuinticSpline::QuinticSpline(std::vector<double> x, std::vector<double> f,
                             double m0, double M0, double mN, double MN)
    : x_(std::move(x)), f_(std::move(f)) {
    check_knots(x_, f_.size());
    const int n = static_cast<int>(x_.size()) - 1;  // intervals
    const int nu = 2 * (n + 1);                     // unknowns m_i, M_i

    BandedMatrix A(nu, 3, 3);
    std::vector<double> rhs(nu, 0.0);

    A.at(0, 0) = 1.0;
    rhs[0] = m0;
    A.at(1, 1) = 1.0;
    rhs[1] = M0;

    // derivative of basis poly `b` of order `ord` at t (0 or 1)
    auto dB = [](int b, int ord, double t) {
        return poly_eval(kQuinticBasis[b], t, ord);
    };

    for (int i = 1; i < n; ++i) {
        double g = x_[i] - x_[i - 1];  // left interval width
        double h = x_[i + 1] - x_[i];  // right interval width
        for (int ord = 3; ord <= 4; ++ord) {
            int row = 2 * i + (ord - 3);
            double sg = std::pow(g, ord), sh = std::pow(h, ord);
            // scale the row by sg*sh to keep entries O(1)
            // left interval at t=1: f_{i-1}, m_{i-1}, M_{i-1}, f_i, m_i, M_i
            double cl_f0 = dB(0, ord, 1.0) / sg * (sg * sh);
            double cl_m0 = dB(1, ord, 1.0) * g / sg * (sg * sh);
            double cl_M0 = dB(2, ord, 1.0) * g * g / sg * (sg * sh);
            double cl_f1 = dB(3, ord, 1.0) / sg * (sg * sh);
            double cl_m1 = dB(4, ord, 1.0) * g / sg * (sg * sh);
            double cl_M1 = dB(5, ord, 1.0) * g * g / sg * (sg * sh);
            // right interval at t=0: f_i, m_i, M_i, f_{i+1}, m_{i+1}, M_{i+1}
            double cr_f0 = dB(0, ord, 0.0) / sh * (sg * sh);
            double cr_m0 = dB(1, ord, 0.0) * h / sh * (sg * sh);
            double cr_M0 = dB(2, ord, 0.0) * h * h / sh * (sg * sh);
            double cr_f1 = dB(3, ord, 0.0) / sh * (sg * sh);
            double cr_m1 = dB(4, ord, 0.0) * h / sh * (sg * sh);
            double cr_M1 = dB(5, ord, 0.0) * h * h / sh * (sg * sh);

            A.at(row, 2 * (i - 1)) = cl_m0;
            A.at(row, 2 * (i - 1) + 1) = cl_M0;
            A.at(row, 2 * i) = cl_m1 - cr_m0;
            A.at(row, 2 * i + 1) = cl_M1 - cr_M0;
            A.at(row, 2 * (i + 1)) = -cr_m1;
            A.at(row, 2 * (i + 1) + 1) = -cr_M1;
            rhs[row] = -cl_f0 * f_[i - 1] - cl_f1 * f_[i] + cr_f0 * f_[i] +
                       cr_f1 * f_[i + 1];
        }
    }

    A.at(nu - 2, nu - 2) = 1.0;
    rhs[nu - 2] = mN;
    A.at(nu - 1, nu - 1) = 1.0;
    rhs[nu - 1] = MN;

    if (!A.factor()) throw std::runtime_error("quintic spline: singular system");
    A.solve(rhs);
    m_.resize(n + 1);
    M_.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        m_[i] = rhs[2 * i];
        M_[i] = rhs[2 * i + 1];
    }
}

int QuinticSpline::locate(double x) const {
    int n = static_cast<int>(x_.size()) - 1;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    int i = static_cast<int>(it - x_.begin()) - 1;
    return std::clamp(i, 0, n - 1);
}

double QuinticSpline::eval(double x, int order) const {
    if (order < 0 || order > 4) throw std::invalid_argument("quintic eval order");
    int i = locate(x);
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double v = f_[i] * poly_eval(kQuinticBasis[0], t, order) +
               h * m_[i] * poly_eval(kQuinticBasis[1], t, order) +
               h * h * M_[i] * poly_eval(kQuinticBasis[2], t, order) +
               f_[i + 1] * poly_eval(kQuinticBasis[3], t, order) +
               h * m_[i + 1] * poly_eval(kQuinticBasis[4], t, order) +
               h * h * M_[i + 1] * poly_eval(kQuinticBasis[5], t, order);
    return v / std::pow(h, order);
}

} // namespace curveflow

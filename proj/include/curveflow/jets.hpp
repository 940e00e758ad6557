#ifndef CURVEFLOW_JETS_HPP
#define CURVEFLOW_JETS_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace curveflow {

// Truncated Taylor jet: a value together with derivatives up to order 4.
// Used to propagate exact derivatives of scalar coefficient functions
// (cutoff, curvature profile, ...) through products and frame recursions.
struct Jet5 {
    std::array<double, 5> d{};  // d[k] = k-th derivative

    Jet5() = default;
    explicit Jet5(double v) { d[0] = v; }
    Jet5(double v0, double v1, double v2, double v3, double v4)
        : d{v0, v1, v2, v3, v4} {}

    static Jet5 constant(double v) { return Jet5(v); }

    double value() const { return d[0]; }
    double& operator[](std::size_t k) { return d[k]; }
    double operator[](std::size_t k) const { return d[k]; }

    Jet5 operator+(const Jet5& o) const {
        Jet5 r;
        for (int k = 0; k < 5; ++k) r.d[k] = d[k] + o.d[k];
        return r;
    }
    Jet5 operator-(const Jet5& o) const {
        Jet5 r;
        for (int k = 0; k < 5; ++k) r.d[k] = d[k] - o.d[k];
        return r;
    }
    Jet5 operator-() const {
        Jet5 r;
        for (int k = 0; k < 5; ++k) r.d[k] = -d[k];
        return r;
    }
    Jet5 operator*(double s) const {
        Jet5 r;
        for (int k = 0; k < 5; ++k) r.d[k] = d[k] * s;
        return r;
    }
    // Leibniz product
    Jet5 operator*(const Jet5& o) const {
        static const double binom[5][5] = {
            {1, 0, 0, 0, 0},
            {1, 1, 0, 0, 0},
            {1, 2, 1, 0, 0},
            {1, 3, 3, 1, 0},
            {1, 4, 6, 4, 1},
        };
        Jet5 r;
        for (int k = 0; k < 5; ++k) {
            double s = 0.0;
            for (int j = 0; j <= k; ++j) s += binom[k][j] * d[j] * o.d[k - j];
            r.d[k] = s;
        }
        return r;
    }

    // Jet of the derivative function (loses the top order).
    Jet5 shifted() const {
        Jet5 r;
        for (int k = 0; k < 4; ++k) r.d[k] = d[k + 1];
        r.d[4] = 0.0;
        return r;
    }
};

inline Jet5 operator*(double s, const Jet5& j) { return j * s; }

} // namespace curveflow

#endif

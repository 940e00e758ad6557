#ifndef CURVEFLOW_PDE_HPP
#define CURVEFLOW_PDE_HPP

#include <complex>
#include <vector>

#include "curveflow/geometry.hpp"

namespace curveflow {

// temporal Sobolev exponents of the boundary data spaces (m = 2, m_j = 1, 3)
inline constexpr double kOmega1 = 5.0 / 8.0;
inline constexpr double kOmega2 = 1.0 / 8.0;

struct PdeCoefficients {
    std::vector<double> a;      // 1 / J^4 per node
    double b1 = 1.0;
    double b2_left = 0.0;       // (1/J^4) <Psi_q, R Psi_sigma> at sigma = 0
    double b2_right = 0.0;
};

struct NonlinearRhs {
    std::vector<double> f;      // interior right-hand side
    double g1 = 0.0;            // identically zero
    double g2_left = 0.0;
    double g2_right = 0.0;
    std::vector<double> N;      // raw evolution rho_t = N(rho)
    std::vector<double> d4;     // fourth derivative used in the splitting
};

PdeCoefficients coefficients(const CurvilinearMap& map,
                             const HeightField& height,
                             Closure closure = Closure::Flow);

NonlinearRhs nonlinear_rhs(const CurvilinearMap& map, const HeightField& height,
                           Closure closure = Closure::Flow);

struct NonlinearityF {
    std::vector<double> F;
    double G1 = 0.0;
    double G2_left = 0.0;
    double G2_right = 0.0;
};

NonlinearityF nonlinearity_F(const CurvilinearMap& map,
                             const HeightField& height,
                             const HeightField& height0,
                             Closure closure = Closure::Flow);

struct LsReport {
    std::vector<std::complex<double>> lambda_samples;
    std::vector<std::complex<double>> det_values;
    double min_abs_det = 0.0;
    double max_formula_mismatch = 0.0;  // |direct 2x2 det - product formula|
    bool roots_decay = false;           // Re mu_1, Re mu_2 < 0 everywhere
    bool symbol_spectrum_ok = false;    // ellipticity (E): a > 0
    double a = 0.0, b2 = 0.0;
};

LsReport ls_check(double a_endpoint, double b2_endpoint, int lambda_grid_size);

} // namespace curveflow

#endif

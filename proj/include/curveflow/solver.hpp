#ifndef CURVEFLOW_SOLVER_HPP
#define CURVEFLOW_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "curveflow/banded.hpp"
#include "curveflow/pde.hpp"

namespace curveflow {

enum class Scheme { ImplicitEuler, CrankNicolson };

// Implicit stage operator: identity plus dt-scaled fourth difference with
// coefficients frozen at the interval's initial datum; boundary rows encode
// d rho/d sigma = 0 and b2 d^3 rho/d sigma^3 = G2 by ghost elimination.
class LinearOperator {
public:
    LinearOperator(std::vector<double> a, double b2_left, double b2_right,
                   double dt, Scheme scheme);

    // one implicit stage: rho_prev -> solution with data (F, G2)
    std::vector<double> solve_step(const std::vector<double>& rho_prev,
                                   const std::vector<double>& F,
                                   double G2_left, double G2_right) const;

    int grid_size() const { return N_; }
    double dt() const { return dt_; }
    double b2_left() const { return b2l_; }
    double b2_right() const { return b2r_; }
    const BandedMatrix& matrix() const { return A_; }

private:
    int N_;
    double dt_, h_;
    double b2l_, b2r_;
    std::vector<double> a_;
    Scheme scheme_;
    BandedMatrix A_;

    // fourth-difference application with boundary ghosts (c = d^3 rho values)
    std::vector<double> apply_d4(const std::vector<double>& rho, double c0,
                                 double c1) const;
};

LinearOperator assemble_linear(const CurvilinearMap& map,
                               const HeightField& height0, double dt,
                               Scheme scheme = Scheme::ImplicitEuler);

using NonlinearityEval =
    std::function<NonlinearityF(const HeightField&)>;

struct PicardResult {
    std::vector<HeightField> trajectory;  // [0] is the initial datum
    int iterations = 0;
    bool converged = false;
};

struct PicardOptions {
    double tol = 1e-11;
    int max_iter = 40;
    Scheme scheme = Scheme::ImplicitEuler;
    // test hook: replaces the nonlinearity evaluation
    NonlinearityEval nonlinearity;
    bool check_compatibility = true;
    bool check_bounds = true;
};

PicardResult picard_solve(const CurvilinearMap& map, const HeightField& height0,
                          double T_horizon, double dt,
                          const PicardOptions& opts = {});

// compatibility gate (d rho/d sigma = 0 at the endpoints, within 1e-10)
void check_compatibility(const HeightField& height0, double tol = 1e-10);

struct DiagnosticsSeries {
    std::vector<double> t, length, area, max_kappa;
    std::vector<double> angle_res_0, angle_res_1;
    std::vector<double> bound_frac_0, bound_frac_1;
    std::vector<int> picard_iters;

    std::size_t rows() const { return t.size(); }
};

struct FlowState {
    double t = 0.0;
    HeightField height;
    std::shared_ptr<const CurvilinearMap> map;
    DiagnosticsSeries series;
    double area0 = 0.0;      // signed area at the start of the run segment
    int repar_count = 0;
};

struct AdvanceConfig {
    double picard_tol = 1e-11;
    int picard_max_iter = 40;
    Scheme scheme = Scheme::ImplicitEuler;
    double length_tol = 1e-10;       // allowed per-step length increase
    double area_tol = 1e-6;          // relative drift against area0
    int max_halvings = 10;
};

FlowState init_flow_state(std::shared_ptr<const CurvilinearMap> map,
                          HeightField height0);

// one accepted step of the flow; halves dt on monitor violations
FlowState advance(const FlowState& state, double dt,
                  const AdvanceConfig& config = {});

struct ContractionReport {
    std::vector<double> T_list;
    std::vector<double> C_list;          // measured Lipschitz ratios
    std::vector<int> iteration_counts;   // picard iterations per horizon
};

struct ContractionOptions {
    double mu = 15.0 / 16.0;
    int time_nodes = 16;       // trajectory samples per horizon
    int max_mode = 4;
    double amplitude = 0.25;   // fraction of the remaining admissibility gap
    unsigned long long seed = 2024;
    double picard_dt_fraction = 1.0 / 64.0;  // dt for iteration counting
    NonlinearityEval nonlinearity;           // test hook
};

ContractionReport measure_contraction(const CurvilinearMap& map,
                                      const HeightField& height0,
                                      const std::vector<double>& T_list,
                                      int pair_count,
                                      const ContractionOptions& opts = {});

// --- reference refitting (reparametrization) -----------------------------

struct RefitOptions {
    std::vector<double> blend_widths = {1.0 / 6, 1.0 / 8, 1.0 / 12,
                                        1.0 / 16, 1.0 / 24};
    double hausdorff_tol = 1e-8;
    double target_fraction = 1.0 / 3.0;
};

struct RefitResult {
    std::shared_ptr<const CurvilinearMap> map;
    HeightField height;
    double hausdorff = 0.0;
    double frac0 = 0.0, frac1 = 0.0;
    double blend_width = 0.0;
};

// Build a fresh reference curve (endpoint conditions enforced by blending
// the tangent angle on the outer sixths) for a sampled curve and express
// the curve as a height field over it.
RefitResult build_reference_from_curve(const std::vector<Vec2>& pts,
                                       double alpha, int N,
                                       const RefitOptions& opts = {});

FlowState reparametrize(const FlowState& state, const RefitOptions& opts = {});

} // namespace curveflow

#endif

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "robin/mesh.hpp"
#include "robin/model.hpp"
#include "robin/solver.hpp"

namespace robin
{

// Boundary integrals against v.n making up the shape derivative of the
// first eigenvalue:
//   int [ |grad u|^p + V|u|^p - lambda|u|^p + beta kappa |u|^p
//         + p beta u |u|^{p-2} grad u.n ] (v.n) ds
// with u of unit p-mass.
struct ShapeTerms
{
  double grad_term = 0.0;
  double potential_term = 0.0;
  double eigen_term = 0.0;
  double curvature_term = 0.0;
  double robin_term = 0.0;

  double total() const { return grad_term + potential_term + eigen_term + curvature_term + robin_term; }
};

// How grad u is obtained at boundary quadrature points.
enum class GradientRecovery
{
  Element,  // constant gradient of the adjacent triangle
  Patch     // quadratic least-squares fit around each boundary vertex, interpolated
};

struct ShapeFormulaOptions
{
  GradientRecovery recovery = GradientRecovery::Element;
  // Replace the normal derivative of the element gradient by the Robin
  // condition value -(beta u^{p-1})^{1/(p-1)}.
  bool robin_normal = false;
  // Use the circumcircle curvature even when the mesh carries its curve.
  bool discrete_curvature = false;
  // The alternative form divides by |grad u|^{p-2}; below this fraction of
  // max|u| / length it is declared singular.
  double alt_threshold = 1e-6;
};

struct ShapeDerivativeReport
{
  std::string field;
  double lambda = 0.0;
  ShapeTerms terms;
  double formula_value = 0.0;
  // Robin term replaced by -p beta^2 |u|^{2p-2} / |grad u|^{p-2}.
  double alt_robin_term = 0.0;
  double alt_form_value = 0.0;
  bool alt_form_valid = false;
  double fd_value = 0.0;
  double fd_step = 0.0;
  double rel_err = 0.0;      // formula against fd
  double alt_rel_diff = 0.0;  // alt form against formula
  // Filled with Richardson: D(t0/2) and (4 D(t0/2) - D(t0)) / 3.
  double fd_half = 0.0;
  double fd_richardson = 0.0;
  double richardson_rel_err = 0.0;
};

// Gradient at every boundary vertex from a least-squares quadratic fit to
// the nodal values of its two-ring patch; exact for quadratic u. Interior
// entries are zero.
std::vector<Vec2> patch_recovered_gradients(const Mesh &mesh, std::span<const double> u);

// Primary form. A sup-unit eigenfunction is rescaled to unit p-mass first.
// Throws InvalidInput when the curvature is unavailable or not finite.
ShapeDerivativeReport shape_derivative_formula(const EigenResult &result, const ProblemSpec &spec,
                                               const Mesh &mesh, const VectorField &v,
                                               const ShapeFormulaOptions &fopts = {});

// Alternative form; throws NumericalFailure "alt form singular here" when
// |grad u| vanishes at a boundary point for p != 2.
double shape_derivative_alt_form(const EigenResult &result, const ProblemSpec &spec,
                                 const Mesh &mesh, const VectorField &v,
                                 const ShapeFormulaOptions &fopts = {});

// (lambda(Omega_{t0}) - lambda(Omega_{-t0})) / 2 t0 with Omega_t = {x + t v(x)},
// warm-started from `base` (solved here when null).
double shape_derivative_fd(const ProblemSpec &spec, const Mesh &mesh, const VectorField &v,
                           double t0, const SolverOptions &opts = {},
                           const EigenResult *base = nullptr);

// Solve, formula, alt form (when valid) and FD in one go.
ShapeDerivativeReport shape_derivative_report(const ProblemSpec &spec, const Mesh &mesh,
                                              const VectorField &v, double t0,
                                              const SolverOptions &opts = {},
                                              const ShapeFormulaOptions &fopts = {},
                                              bool richardson = false);

// -p lambda + (p - 1) beta dlambda/dbeta: the shape derivative along v = x
// when V = 0, from differentiating the rescaling identity.
double dilation_prediction(const EigenResult &result, const ProblemSpec &spec, const Mesh &mesh);

struct ExpansionRow
{
  double t = 0.0;
  double value = 0.0;          // quantity on Omega_t
  double slope = 0.0;          // (Q(t) - Q(0)) / t
  double central_slope = 0.0;  // (Q(t) - Q(-t)) / 2t
  double remainder = 0.0;      // Q(t) - Q(0) - t * predicted
};

struct HadamardReport
{
  std::string quantity;  // "volume" or "perimeter"
  std::string field;
  double base = 0.0;
  // First-order coefficient: int div v for the volume, int kappa v.n for
  // the perimeter.
  double predicted = 0.0;
  std::vector<ExpansionRow> rows;
  // remainder(t_k) / remainder(t_{k+1}); about 4 for halved t.
  std::vector<double> remainder_ratios;
  // |slope - predicted| / max(|predicted|, 1e-14) at the smallest t.
  double slope_rel_err = 0.0;
};

// int div v with v interpolated linearly on each triangle.
double divergence_integral(const Mesh &mesh, const VectorField &v);
// int kappa (v.n) ds with the analytic curvature when available.
double curvature_flux_integral(const Mesh &mesh, const VectorField &v);

HadamardReport hadamard_volume_expansion_check(const Mesh &mesh, const VectorField &v,
                                               const std::vector<double> &ts);
HadamardReport hadamard_surface_expansion_check(const Mesh &mesh, const VectorField &v,
                                                const std::vector<double> &ts);

struct BallSignReport
{
  double p = 2.0, beta = 1.0, R = 1.0;
  int n = 2;
  double lambda = 0.0;
  double V_boundary = 0.0;
  double u_boundary = 0.0;  // u(R) for unit p-mass
  // (1 - p) beta^{p/(p-1)} + V(R) - lambda + beta (n - 1) / R
  double coefficient = 0.0;
  double integrand = 0.0;           // u(R)^p * coefficient
  double integrand_discrete = 0.0;  // same with the grid's u'(R)
  double v_normal = 1.0;
  double derivative = 0.0;  // integrand * v_normal * |boundary sphere|
  bool condition_a = false;  // beta >= ((n - 1) / (R (p - 1)))^{p-1}
  bool condition_b = false;  // R >= 1, beta >= 1, p >= n
  bool potential_below_lambda = false;
  bool hypotheses_met = false;
  // Predicted sign of the derivative (0 without a claim), observed sign.
  int predicted_sign = 0;
  int observed_sign = 0;
  std::string verdict;  // "decreasing", "increasing", "hypotheses not met", "contradiction"
};

// V(r) may be null for V = 0.
BallSignReport ball_monotonicity_sign_check(double p, double beta, double R, int n,
                                            const std::function<double(double)> &V,
                                            double v_normal = 1.0, int intervals = 10000,
                                            const SolverOptions &opts = {});

}  // namespace robin

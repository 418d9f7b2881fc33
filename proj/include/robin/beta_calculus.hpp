#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robin/discretization.hpp"
#include "robin/mesh.hpp"
#include "robin/model.hpp"
#include "robin/solver.hpp"

namespace robin
{

// Analytic derivative against a finite-difference value.
struct DerivativeReport
{
  double formula_value = 0.0;
  double fd_value = 0.0;
  double fd_step = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;  // abs_err / max(|fd|, 1e-14)
  std::vector<std::pair<std::string, double>> extras;

  static DerivativeReport compare(double formula, double fd, double step);
  // NaN when absent.
  double extra(const std::string &name) const;
};

// int_boundary |u|^p / int |u|^p with the discretization's quadrature.
// Invariant under u -> c u.
double boundary_mass_ratio(const Discretization &disc, std::span<const double> u);

// d lambda / d beta of the discrete first eigenvalue: the boundary to
// volume p-mass ratio of the eigenfunction.
double dlambda_dbeta_formula(const EigenResult &result, const Mesh &mesh);

// Throws NumericalFailure when a result is not converged.
void require_converged(const EigenResult &r, const std::string &what);

// Default beta step: 1e-3 max(1, beta).
double default_beta_step(double beta);

// Central difference (lambda(beta + h) - lambda(beta - h)) / 2h on the same
// mesh, both solves warm-started from `base` (solved here when null).
double dlambda_dbeta_fd(const ProblemSpec &spec, const Mesh &mesh, const SolverOptions &opts,
                        double h_beta, const EigenResult *base = nullptr);

// Formula against FD. With `richardson` the FD is repeated at h/2 and h/4;
// extras then hold fd_half, fd_richardson = (4 D(h/2) - D(h))/3, its
// relative error, and the order ratio (D(h) - D(h/2))/(D(h/2) - D(h/4)).
DerivativeReport dbeta_report(const ProblemSpec &spec, const Mesh &mesh, const SolverOptions &opts,
                              double h_beta = 0.0, bool richardson = false);

struct SandwichResult
{
  double beta = 0.0, beta1 = 0.0;
  double lambda = 0.0, lambda1 = 0.0;
  double lower = 0.0;     // boundary mass ratio at beta1
  double quotient = 0.0;  // (lambda1 - lambda) / (beta1 - beta)
  double upper = 0.0;     // boundary mass ratio at beta
  // Both inequalities measured on the eigenvalue scale, i.e. multiplied by
  // beta1 - beta; pass requires each to be >= -10 tol_lambda |lambda1|.
  double margin_lower = 0.0;
  double margin_upper = 0.0;
  bool pass = false;
};

SandwichResult sandwich_from(const EigenResult &at_beta, const EigenResult &at_beta1,
                             const Mesh &mesh, double beta, double beta1, double tol_lambda);
SandwichResult sandwich_check(const ProblemSpec &spec, const Mesh &mesh, double beta, double beta1,
                              const SolverOptions &opts = {});

struct SweepRow
{
  double beta = 0.0;
  double lambda = 0.0;
  double dldb_formula = 0.0;
  double dldb_fd = 0.0;
  double rel_err = 0.0;
  // Sandwich against the next beta; NaN on the last row.
  double sandwich_lower = 0.0;
  double sandwich_upper = 0.0;
  double sandwich_quotient = 0.0;
  bool sandwich_pass = true;
  bool converged = false;
};

struct SweepReport
{
  std::vector<SweepRow> rows;
  double lambda_dirichlet = 0.0;
  bool dirichlet_converged = false;
  bool increasing = false;
  bool below_dirichlet = false;
  bool gap_decreasing = false;
  bool sandwich_pass = false;
  bool all_converged = false;
  double max_rel_err = 0.0;

  bool pass(double rel_err_tol) const;
};

// Independent solves per beta (run concurrently), the Dirichlet eigenvalue
// on the same mesh, and FD derivatives when `with_fd`. Unconverged points
// are flagged, not thrown.
SweepReport beta_sweep(const ProblemSpec &spec, const Mesh &mesh, const std::vector<double> &betas,
                       const SolverOptions &opts = {}, bool with_fd = true);

struct ScalingReport
{
  double t = 1.0;
  double lambda_base = 0.0;    // lambda(Omega, beta)
  double lambda_scaled = 0.0;  // lambda(t Omega, beta / t^{p-1})
  double rescaled = 0.0;       // t^p lambda_scaled
  double rel_diff = 0.0;
  bool pass = false;
};

// Requires V = 0; throws InvalidInput "identity stated for V ≡ 0" otherwise.
ScalingReport scaling_identity_check(const ProblemSpec &spec, const Mesh &mesh, double t,
                                     const SolverOptions &opts = {}, double tol = 1e-8);

struct DomainMonotonicityReport
{
  double t = 1.0;
  double lambda_base = 0.0;    // lambda(Omega, beta)
  double lambda_scaled = 0.0;  // lambda(t Omega, beta)
  double middle = 0.0;         // lambda_base / t
  double margin_first = 0.0;   // middle - lambda_scaled
  double margin_second = 0.0;  // lambda_base - middle
  // f(beta) = lambda(beta) / beta at beta and t^{p-1} beta.
  double f_beta = 0.0;
  double f_scaled_beta = 0.0;
  bool chain_holds = false;
  bool f_decreasing = false;
  bool pass = false;
};

// lambda(t Omega, beta) <= lambda(Omega, beta) / t <= lambda(Omega, beta) for
// t >= 1 and V = 0, with slack 10 tol_lambda |lambda|.
DomainMonotonicityReport scaled_domain_monotonicity_check(const ProblemSpec &spec, const Mesh &mesh,
                                                          double t, const SolverOptions &opts = {});

}  // namespace robin

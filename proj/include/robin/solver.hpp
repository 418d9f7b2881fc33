#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "robin/discretization.hpp"
#include "robin/mesh.hpp"
#include "robin/model.hpp"

namespace robin
{

struct SolverOptions
{
  double tol_lambda = 1e-12;   // relative quotient stagnation per step
  double tol_residual = 1e-8;  // weak residual, see weak_residual()
  int max_iter = 4000;         // per regularization stage
  // Decreasing, ending at the final epsilon. Empty selects the default
  // schedule for the problem.
  std::vector<double> epsilon_schedule;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  // Intermediate stages stop at tolerances multiplied by this factor.
  double stage_tol_factor = 1e4;
  // Preconditioner refresh period for p != 2.
  int refresh_every = 5;
  std::uint64_t seed = 0;
  bool record_trace = true;
};

// 0.1 * (typical gradient size) halved over 8 stages, then 0. Just {0}
// when p = 2 since the regularization is inert there.
std::vector<double> default_epsilon_schedule(const Discretization &disc);

// Throws InvalidInput on bad tolerances or a schedule that is not strictly
// decreasing.
void validate_options(const SolverOptions &opts);

// Minimizes the regularized quotient over the free coefficients, starting
// from `start` (constant one when empty) and running the epsilon stages.
// With a start vector the continuation is skipped and only the final
// epsilon stage runs.
EigenResult minimize_quotient(const Discretization &disc, const SolverOptions &opts,
                              std::span<const double> start = {});

EigenResult solve_first_eigenpair(const ProblemSpec &spec, const Mesh &mesh,
                                  const SolverOptions &opts = {},
                                  std::span<const double> start = {});
EigenResult solve_dirichlet_first(const ProblemSpec &spec, const Mesh &mesh,
                                  const SolverOptions &opts = {},
                                  std::span<const double> start = {});

// max_i |(1/p)(dN/du_i - lambda dD/du_i)| / int phi_i over free coefficients,
// divided by max|u|^{p-1}; N is the unregularized numerator and D the p-mass.
// Invariant under u -> c u.
double weak_residual(const Discretization &disc, std::span<const double> u, double lambda);
double weak_residual(const EigenResult &result, const ProblemSpec &spec, const Mesh &mesh);

// Gradient of the 0-homogeneous regularized quotient
// Phi(u) = N_eps(u / D(u)^{1/p}); returns Phi(u).
double regularized_quotient_gradient(const Discretization &disc, std::span<const double> u,
                                     double eps, std::span<double> grad);

}  // namespace robin

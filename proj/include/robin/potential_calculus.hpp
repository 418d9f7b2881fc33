#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "robin/mesh.hpp"
#include "robin/model.hpp"
#include "robin/solver.hpp"

namespace robin
{

// max |V| over the volume quadrature points, the only places the discrete
// energy samples V. A lower estimate of the continuum sup-norm.
double potential_sup(const Potential &V, const Mesh &mesh);
double potential_sup_difference(const Potential &V1, const Potential &V2, const Mesh &mesh);
// V1 <= V2 at every volume quadrature point.
bool potentials_ordered(const Potential &V1, const Potential &V2, const Mesh &mesh);

// Allowed excess in eigenvalue comparisons: 10 tol_lambda max(1, |lambda|).
double solver_slack(const SolverOptions &opts, double lambda);

struct PotentialComparison
{
  double lambda1 = 0.0;  // with V1
  double lambda2 = 0.0;  // with V2
  // Monotonicity: 0. Continuity: sup |V1 - V2|. Shift: the shift c.
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string note;
};

// lambda(V1) <= lambda(V2) + slack. Throws InvalidInput "inputs not ordered"
// unless V1 <= V2 at all quadrature points.
PotentialComparison monotonicity_check(const Potential &V1, const Potential &V2,
                                       const ProblemSpec &spec, const Mesh &mesh,
                                       const SolverOptions &opts = {});

// |lambda(V1) - lambda(V2)| <= sup |V1 - V2| + slack.
PotentialComparison continuity_check(const Potential &V1, const Potential &V2,
                                     const ProblemSpec &spec, const Mesh &mesh,
                                     const SolverOptions &opts = {});

// lambda(V + c) - lambda(V) = c within tol; both solves start from u = 1.
PotentialComparison shift_identity_check(const Potential &V, double c, const ProblemSpec &spec,
                                         const Mesh &mesh, const SolverOptions &opts = {},
                                         double tol = 1e-8);

struct CoercivityReport
{
  double lambda1 = 0.0;
  double V_sup = 0.0;
  double C = 0.0;  // 1/2 lambda / (lambda + V_sup)
  double M = 0.0;  // 1/2 min(C, lambda)
  int samples = 0;
  int violations = 0;
  // Smallest (rhs - lhs) / (int |grad u|^p + int |u|^p) over the samples.
  double worst_margin = 0.0;
  bool pass = false;
};

// (int F(grad u) + int V|u|^p + beta int_boundary |u|^p) - M (int |grad u|^p + int |u|^p),
// divided by the bracket. Non-negative when the inequality holds.
double coercivity_margin(const ProblemSpec &spec, const Mesh &mesh, std::span<const double> u,
                         double M);

// Samples standard normal nodal values with the seed. Throws InvalidInput
// "theorem hypothesis fails" when lambda(V) <= 0.
CoercivityReport coercivity_check(const ProblemSpec &spec, const Mesh &mesh, int samples,
                                  std::uint64_t seed, const SolverOptions &opts = {});

// Random smooth bounded potentials: quadratics plus a sine mode.
std::vector<std::pair<Potential, Potential>> ordered_potential_pairs(int count, std::uint64_t seed);
std::vector<std::pair<Potential, Potential>> random_potential_pairs(int count, std::uint64_t seed);

// Runs the checks over the pairs (concurrently); results in pair order.
std::vector<PotentialComparison> monotonicity_suite(
    const std::vector<std::pair<Potential, Potential>> &pairs, const ProblemSpec &spec,
    const Mesh &mesh, const SolverOptions &opts = {});
std::vector<PotentialComparison> continuity_suite(
    const std::vector<std::pair<Potential, Potential>> &pairs, const ProblemSpec &spec,
    const Mesh &mesh, const SolverOptions &opts = {});

}  // namespace robin

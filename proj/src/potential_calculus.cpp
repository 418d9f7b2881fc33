#include "robin/potential_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "robin/beta_calculus.hpp"
#include "robin/discretization.hpp"
#include "robin/errors.hpp"
#include "robin/parallel.hpp"

namespace robin
{

namespace
{

constexpr const char *kLipschitzNote =
    "sup-norm Lipschitz bound derived from the inf characterization of lambda";

std::array<double, 2> solve_pair(const Potential &V1, const Potential &V2, const ProblemSpec &spec,
                                 const Mesh &mesh, const SolverOptions &opts)
{
  std::array<double, 2> lam{};
  const std::array<const Potential *, 2> vs = {&V1, &V2};
  parallel_for(2,
               [&](std::size_t k)
               {
                 const EigenResult r =
                     solve_first_eigenpair(spec.with_potential(*vs[k]), mesh, opts);
                 require_converged(r, "potential solve");
                 lam[k] = r.lambda;
               });
  return lam;
}

Potential random_potential(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> wave(0.5, 3.0);
  Potential::Quadratic q;
  q.c0 = coef(rng);
  q.cx = coef(rng);
  q.cy = coef(rng);
  q.cxx = coef(rng);
  q.cxy = coef(rng);
  q.cyy = coef(rng);
  const double amplitude = 0.5 * coef(rng);
  const double k = wave(rng);
  const int axis = static_cast<int>(rng() % 2);
  return Potential::quadratic(q).plus(Potential::sine(amplitude, k, axis));
}

// Non-negative everywhere: c0, cxx, cyy >= 0 and |cxy| <= 2 sqrt(cxx cyy).
Potential random_nonnegative(std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Potential::Quadratic q;
  q.c0 = unit(rng);
  q.cxx = unit(rng);
  q.cyy = unit(rng);
  q.cxy = (2.0 * unit(rng) - 1.0) * 2.0 * std::sqrt(q.cxx * q.cyy);
  return Potential::quadratic(q);
}

}  // namespace

double potential_sup(const Potential &V, const Mesh &mesh)
{
  double m = 0.0;
  for (const auto &q : volume_quadrature(mesh))
  {
    m = std::max(m, std::abs(V(q.x)));
  }
  return m;
}

double potential_sup_difference(const Potential &V1, const Potential &V2, const Mesh &mesh)
{
  double m = 0.0;
  for (const auto &q : volume_quadrature(mesh))
  {
    m = std::max(m, std::abs(V1(q.x) - V2(q.x)));
  }
  return m;
}

bool potentials_ordered(const Potential &V1, const Potential &V2, const Mesh &mesh)
{
  for (const auto &q : volume_quadrature(mesh))
  {
    if (V1(q.x) > V2(q.x))
    {
      return false;
    }
  }
  return true;
}

double solver_slack(const SolverOptions &opts, double lambda)
{
  return 10.0 * opts.tol_lambda * std::max(1.0, std::abs(lambda));
}

PotentialComparison monotonicity_check(const Potential &V1, const Potential &V2,
                                       const ProblemSpec &spec, const Mesh &mesh,
                                       const SolverOptions &opts)
{
  if (!potentials_ordered(V1, V2, mesh))
  {
    throw InvalidInput("inputs not ordered");
  }
  const auto lam = solve_pair(V1, V2, spec, mesh, opts);
  PotentialComparison r;
  r.lambda1 = lam[0];
  r.lambda2 = lam[1];
  r.slack = solver_slack(opts, lam[1]);
  r.pass = lam[0] <= lam[1] + r.slack;
  return r;
}

PotentialComparison continuity_check(const Potential &V1, const Potential &V2,
                                     const ProblemSpec &spec, const Mesh &mesh,
                                     const SolverOptions &opts)
{
  const auto lam = solve_pair(V1, V2, spec, mesh, opts);
  PotentialComparison r;
  r.lambda1 = lam[0];
  r.lambda2 = lam[1];
  r.bound = potential_sup_difference(V1, V2, mesh);
  r.slack = solver_slack(opts, std::max(std::abs(lam[0]), std::abs(lam[1])));
  r.pass = std::abs(lam[0] - lam[1]) <= r.bound + r.slack;
  r.note = kLipschitzNote;
  return r;
}

PotentialComparison shift_identity_check(const Potential &V, double c, const ProblemSpec &spec,
                                         const Mesh &mesh, const SolverOptions &opts, double tol)
{
  if (!std::isfinite(c))
  {
    throw InvalidInput("shift must be finite");
  }
  const auto lam = solve_pair(V, V.shifted(c), spec, mesh, opts);
  PotentialComparison r;
  r.lambda1 = lam[0];
  r.lambda2 = lam[1];
  r.bound = c;
  r.slack = tol;
  r.pass = std::abs((lam[1] - lam[0]) - c) <= tol;
  return r;
}

double coercivity_margin(const ProblemSpec &spec, const Mesh &mesh, std::span<const double> u,
                         double M)
{
  const FemDiscretization disc(spec, mesh);
  const EnergyParts e = disc.evaluate(u, 0.0, {}, {});
  const double norm_p = e.gradient + e.mass;
  if (!(norm_p > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  return (disc.numerator(e) - M * norm_p) / norm_p;
}

CoercivityReport coercivity_check(const ProblemSpec &spec, const Mesh &mesh, int samples,
                                  std::uint64_t seed, const SolverOptions &opts)
{
  if (samples <= 0)
  {
    throw InvalidInput("sample count must be positive");
  }
  const EigenResult base = solve_first_eigenpair(spec, mesh, opts);
  require_converged(base, "coercivity solve");
  if (!(base.lambda > 0.0))
  {
    throw InvalidInput("theorem hypothesis fails");
  }
  CoercivityReport r;
  r.lambda1 = base.lambda;
  r.V_sup = potential_sup(spec.potential, mesh);
  r.C = 0.5 * r.lambda1 / (r.lambda1 + r.V_sup);
  r.M = 0.5 * std::min(r.C, r.lambda1);
  r.samples = samples;
  r.worst_margin = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> u(mesh.num_vertices());
  for (int s = 0; s < samples; ++s)
  {
    for (double &x : u)
    {
      x = normal(rng);
    }
    const double margin = coercivity_margin(spec, mesh, u, r.M);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -1e-10)
    {
      ++r.violations;
    }
  }
  r.pass = r.violations == 0;
  return r;
}

std::vector<std::pair<Potential, Potential>> ordered_potential_pairs(int count, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Potential, Potential>> pairs;
  for (int k = 0; k < count; ++k)
  {
    Potential V1 = random_potential(rng);
    Potential V2 = V1.plus(random_nonnegative(rng));
    pairs.emplace_back(std::move(V1), std::move(V2));
  }
  return pairs;
}

std::vector<std::pair<Potential, Potential>> random_potential_pairs(int count, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Potential, Potential>> pairs;
  for (int k = 0; k < count; ++k)
  {
    Potential V1 = random_potential(rng);
    Potential V2 = random_potential(rng);
    pairs.emplace_back(std::move(V1), std::move(V2));
  }
  return pairs;
}

std::vector<PotentialComparison> monotonicity_suite(
    const std::vector<std::pair<Potential, Potential>> &pairs, const ProblemSpec &spec,
    const Mesh &mesh, const SolverOptions &opts)
{
  std::vector<PotentialComparison> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k)
               { out[k] = monotonicity_check(pairs[k].first, pairs[k].second, spec, mesh, opts); });
  return out;
}

std::vector<PotentialComparison> continuity_suite(
    const std::vector<std::pair<Potential, Potential>> &pairs, const ProblemSpec &spec,
    const Mesh &mesh, const SolverOptions &opts)
{
  std::vector<PotentialComparison> out(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k)
               { out[k] = continuity_check(pairs[k].first, pairs[k].second, spec, mesh, opts); });
  return out;
}

}  // namespace robin

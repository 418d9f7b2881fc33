#include "robin/beta_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "robin/errors.hpp"
#include "robin/parallel.hpp"

namespace robin
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rel_diff(double a, double b)
{
  return std::abs(a - b) / std::max(std::abs(b), 1e-14);
}

EigenResult solve_checked(const ProblemSpec &spec, const Mesh &mesh, const SolverOptions &opts,
                          std::span<const double> start, const std::string &what)
{
  EigenResult r = solve_first_eigenpair(spec, mesh, opts, start);
  require_converged(r, what);
  return r;
}

ProblemSpec scaled_spec(const ProblemSpec &spec, double t, double beta)
{
  ProblemSpec s = spec.with_beta(beta);
  if (spec.domain)
  {
    s.domain = spec.domain->scaled(t);
  }
  return s;
}

void require_zero_potential(const ProblemSpec &spec)
{
  if (!spec.potential.is_zero())
  {
    throw InvalidInput("identity stated for V ≡ 0");
  }
}

}  // namespace

DerivativeReport DerivativeReport::compare(double formula, double fd, double step)
{
  DerivativeReport r;
  r.formula_value = formula;
  r.fd_value = fd;
  r.fd_step = step;
  r.abs_err = std::abs(formula - fd);
  r.rel_err = r.abs_err / std::max(std::abs(fd), 1e-14);
  return r;
}

double DerivativeReport::extra(const std::string &name) const
{
  for (const auto &[k, v] : extras)
  {
    if (k == name)
    {
      return v;
    }
  }
  return kNaN;
}

double boundary_mass_ratio(const Discretization &disc, std::span<const double> u)
{
  const EnergyParts e = disc.evaluate(u, 0.0, {}, {});
  if (!(e.mass > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  return e.boundary / e.mass;
}

double dlambda_dbeta_formula(const EigenResult &result, const Mesh &mesh)
{
  if (result.u.size() != mesh.num_vertices())
  {
    throw InvalidInput("eigenfunction does not match the mesh");
  }
  ProblemSpec s;
  s.p = result.p;
  const FemDiscretization disc(s, mesh);
  return boundary_mass_ratio(disc, result.u);
}

void require_converged(const EigenResult &r, const std::string &what)
{
  if (!r.converged)
  {
    throw NumericalFailure(what + ": " + (r.message.empty() ? "solve not converged" : r.message));
  }
}

double default_beta_step(double beta)
{
  return 1e-3 * std::max(1.0, beta);
}

double dlambda_dbeta_fd(const ProblemSpec &spec, const Mesh &mesh, const SolverOptions &opts,
                        double h_beta, const EigenResult *base)
{
  if (!(h_beta > 0.0) || !(spec.beta - h_beta > 0.0))
  {
    throw InvalidInput("beta step must satisfy 0 < h < beta");
  }
  EigenResult own;
  if (base == nullptr)
  {
    own = solve_checked(spec, mesh, opts, {}, "beta solve");
    base = &own;
  }
  std::array<double, 2> lam{};
  const std::array<double, 2> betas = {spec.beta + h_beta, spec.beta - h_beta};
  parallel_for(2,
               [&](std::size_t k)
               {
                 lam[k] = solve_checked(spec.with_beta(betas[k]), mesh, opts, base->u,
                                        "beta neighbor solve")
                              .lambda;
               });
  return (lam[0] - lam[1]) / (2.0 * h_beta);
}

DerivativeReport dbeta_report(const ProblemSpec &spec, const Mesh &mesh, const SolverOptions &opts,
                              double h_beta, bool richardson)
{
  const double h = h_beta > 0.0 ? h_beta : default_beta_step(spec.beta);
  const EigenResult base = solve_checked(spec, mesh, opts, {}, "beta solve");
  const double formula = dlambda_dbeta_formula(base, mesh);
  const double d1 = dlambda_dbeta_fd(spec, mesh, opts, h, &base);
  DerivativeReport r = DerivativeReport::compare(formula, d1, h);
  r.extras.emplace_back("lambda", base.lambda);
  if (richardson)
  {
    const double d2 = dlambda_dbeta_fd(spec, mesh, opts, 0.5 * h, &base);
    const double d4 = dlambda_dbeta_fd(spec, mesh, opts, 0.25 * h, &base);
    const double extrapolated = (4.0 * d2 - d1) / 3.0;
    r.extras.emplace_back("fd_half", d2);
    r.extras.emplace_back("fd_quarter", d4);
    r.extras.emplace_back("fd_richardson", extrapolated);
    r.extras.emplace_back("richardson_rel_err", rel_diff(formula, extrapolated));
    r.extras.emplace_back("order_ratio", (d1 - d2) / (d2 - d4));
  }
  return r;
}

SandwichResult sandwich_from(const EigenResult &at_beta, const EigenResult &at_beta1,
                             const Mesh &mesh, double beta, double beta1, double tol_lambda)
{
  if (!(beta > 0.0) || !(beta1 > beta))
  {
    throw InvalidInput("sandwich needs beta1 > beta > 0");
  }
  SandwichResult s;
  s.beta = beta;
  s.beta1 = beta1;
  s.lambda = at_beta.lambda;
  s.lambda1 = at_beta1.lambda;
  s.lower = dlambda_dbeta_formula(at_beta1, mesh);
  s.upper = dlambda_dbeta_formula(at_beta, mesh);
  const double db = beta1 - beta;
  s.quotient = (s.lambda1 - s.lambda) / db;
  s.margin_lower = (s.lambda1 - s.lambda) - db * s.lower;
  s.margin_upper = db * s.upper - (s.lambda1 - s.lambda);
  const double slack = -10.0 * tol_lambda * std::abs(s.lambda1);
  s.pass = s.margin_lower >= slack && s.margin_upper >= slack;
  return s;
}

SandwichResult sandwich_check(const ProblemSpec &spec, const Mesh &mesh, double beta, double beta1,
                              const SolverOptions &opts)
{
  if (!(beta > 0.0) || !(beta1 > beta))
  {
    throw InvalidInput("sandwich needs beta1 > beta > 0");
  }
  std::array<EigenResult, 2> r;
  const std::array<double, 2> betas = {beta, beta1};
  parallel_for(2,
               [&](std::size_t k)
               { r[k] = solve_checked(spec.with_beta(betas[k]), mesh, opts, {}, "sandwich solve"); });
  return sandwich_from(r[0], r[1], mesh, beta, beta1, opts.tol_lambda);
}

bool SweepReport::pass(double rel_err_tol) const
{
  return all_converged && dirichlet_converged && increasing && below_dirichlet && gap_decreasing &&
         sandwich_pass && !(max_rel_err > rel_err_tol);
}

SweepReport beta_sweep(const ProblemSpec &spec, const Mesh &mesh, const std::vector<double> &betas,
                       const SolverOptions &opts, bool with_fd)
{
  if (betas.empty())
  {
    throw InvalidInput("empty beta list");
  }
  for (std::size_t k = 0; k < betas.size(); ++k)
  {
    if (!(betas[k] > 0.0) || (k > 0 && !(betas[k] > betas[k - 1])))
    {
      throw InvalidInput("betas must be positive and strictly increasing");
    }
  }
  require_valid(spec);
  require_mesh_matches(spec, mesh);

  const std::size_t n = betas.size();
  std::vector<EigenResult> results(n);
  std::vector<double> fd(n, kNaN);
  EigenResult dirichlet;
  // Index n is the Dirichlet solve.
  parallel_for(n + 1,
               [&](std::size_t k)
               {
                 if (k == n)
                 {
                   dirichlet = solve_dirichlet_first(spec, mesh, opts);
                   return;
                 }
                 const ProblemSpec s = spec.with_beta(betas[k]);
                 results[k] = solve_first_eigenpair(s, mesh, opts);
                 if (with_fd && results[k].converged)
                 {
                   fd[k] = dlambda_dbeta_fd(s, mesh, opts, default_beta_step(betas[k]), &results[k]);
                 }
               });

  SweepReport rep;
  rep.lambda_dirichlet = dirichlet.lambda;
  rep.dirichlet_converged = dirichlet.converged;
  rep.all_converged = true;
  rep.increasing = true;
  rep.below_dirichlet = true;
  rep.gap_decreasing = true;
  rep.sandwich_pass = true;
  for (std::size_t k = 0; k < n; ++k)
  {
    SweepRow row;
    row.beta = betas[k];
    row.lambda = results[k].lambda;
    row.converged = results[k].converged;
    row.dldb_formula = dlambda_dbeta_formula(results[k], mesh);
    row.dldb_fd = fd[k];
    row.rel_err = with_fd ? rel_diff(row.dldb_formula, fd[k]) : kNaN;
    row.sandwich_lower = row.sandwich_upper = row.sandwich_quotient = kNaN;
    if (k + 1 < n)
    {
      const SandwichResult s =
          sandwich_from(results[k], results[k + 1], mesh, betas[k], betas[k + 1], opts.tol_lambda);
      row.sandwich_lower = s.lower;
      row.sandwich_upper = s.upper;
      row.sandwich_quotient = s.quotient;
      row.sandwich_pass = s.pass;
      rep.sandwich_pass = rep.sandwich_pass && s.pass;
      rep.increasing = rep.increasing && results[k + 1].lambda > results[k].lambda;
      rep.gap_decreasing = rep.gap_decreasing && (dirichlet.lambda - results[k + 1].lambda) <
                                                     (dirichlet.lambda - results[k].lambda);
    }
    rep.all_converged = rep.all_converged && row.converged;
    rep.below_dirichlet = rep.below_dirichlet && row.lambda < dirichlet.lambda;
    if (with_fd)
    {
      rep.max_rel_err = std::isfinite(row.rel_err) ? std::max(rep.max_rel_err, row.rel_err)
                                                   : std::numeric_limits<double>::infinity();
    }
    rep.rows.push_back(row);
  }
  return rep;
}

ScalingReport scaling_identity_check(const ProblemSpec &spec, const Mesh &mesh, double t,
                                     const SolverOptions &opts, double tol)
{
  require_zero_potential(spec);
  if (!(t > 0.0))
  {
    throw InvalidInput("scale factor must be positive");
  }
  const Mesh scaled = scale_mesh(mesh, t);
  const ProblemSpec s = scaled_spec(spec, t, spec.beta / std::pow(t, spec.p - 1.0));
  std::array<double, 2> lam{};
  parallel_for(2,
               [&](std::size_t k)
               {
                 lam[k] = k == 0 ? solve_checked(spec, mesh, opts, {}, "base solve").lambda
                                 : solve_checked(s, scaled, opts, {}, "scaled solve").lambda;
               });
  ScalingReport r;
  r.t = t;
  r.lambda_base = lam[0];
  r.lambda_scaled = lam[1];
  r.rescaled = std::pow(t, spec.p) * lam[1];
  r.rel_diff = rel_diff(r.rescaled, r.lambda_base);
  r.pass = r.rel_diff <= tol;
  return r;
}

DomainMonotonicityReport scaled_domain_monotonicity_check(const ProblemSpec &spec, const Mesh &mesh,
                                                          double t, const SolverOptions &opts)
{
  require_zero_potential(spec);
  if (!(t >= 1.0))
  {
    throw InvalidInput("domain monotonicity needs t >= 1");
  }
  const Mesh scaled = scale_mesh(mesh, t);
  const ProblemSpec s = scaled_spec(spec, t, spec.beta);
  const double beta_t = std::pow(t, spec.p - 1.0) * spec.beta;
  std::array<double, 3> lam{};
  parallel_for(3,
               [&](std::size_t k)
               {
                 if (k == 0)
                 {
                   lam[k] = solve_checked(spec, mesh, opts, {}, "base solve").lambda;
                 }
                 else if (k == 1)
                 {
                   lam[k] = solve_checked(s, scaled, opts, {}, "scaled solve").lambda;
                 }
                 else
                 {
                   lam[k] = solve_checked(spec.with_beta(beta_t), mesh, opts, {}, "f solve").lambda;
                 }
               });
  DomainMonotonicityReport r;
  r.t = t;
  r.lambda_base = lam[0];
  r.lambda_scaled = lam[1];
  r.middle = lam[0] / t;
  r.margin_first = r.middle - r.lambda_scaled;
  r.margin_second = r.lambda_base - r.middle;
  r.f_beta = lam[0] / spec.beta;
  r.f_scaled_beta = lam[2] / beta_t;
  const double slack = 10.0 * opts.tol_lambda * std::abs(r.lambda_base);
  r.chain_holds = r.margin_first >= -slack && r.margin_second >= -slack;
  r.f_decreasing = r.f_scaled_beta <= r.f_beta + slack / spec.beta;
  r.pass = r.chain_holds && r.f_decreasing;
  return r;
}

}  // namespace robin

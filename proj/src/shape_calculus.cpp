#include "robin/shape_calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "robin/beta_calculus.hpp"
#include "robin/discretization.hpp"
#include "robin/errors.hpp"
#include "robin/parallel.hpp"
#include "robin/radial.hpp"

namespace robin
{

namespace
{

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// sign(x) |x|^q
double signed_power(double x, double q)
{
  return std::copysign(std::pow(std::abs(x), q), x);
}

double rel_diff(double a, double b)
{
  return std::abs(a - b) / std::max(std::abs(b), 1e-14);
}

// Everything the boundary integrands need at one Gauss point.
struct BoundarySample
{
  double weight;
  double u;
  double V;
  double kappa;
  double v_normal;
  Vec2 grad;
  Vec2 normal;
};

// Visits the two Gauss points of every boundary edge with u of unit p-mass.
template <class F>
void for_each_boundary_point(const EigenResult &result, const ProblemSpec &spec, const Mesh &mesh,
                             const VectorField &v, const ShapeFormulaOptions &fopts, F &&f)
{
  if (result.u.size() != mesh.num_vertices())
  {
    throw InvalidInput("eigenfunction does not match the mesh");
  }
  const FemDiscretization disc(spec, mesh);
  const EnergyParts e = disc.evaluate(result.u, 0.0, {}, {});
  if (!(e.mass > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  const double scale = std::pow(e.mass, -1.0 / spec.p);
  std::vector<double> u(result.u);
  for (double &x : u)
  {
    x *= scale;
  }

  const bool analytic = mesh.analytic_boundary().has_value() && !fopts.discrete_curvature;
  const BoundaryGeometry geo = analytic ? boundary_geometry(mesh) : discrete_boundary_geometry(mesh);
  const auto &x = mesh.vertices();
  const double exponent = 1.0 / (spec.p - 1.0);
  std::vector<Vec2> recovered;
  if (fopts.recovery == GradientRecovery::Patch)
  {
    recovered = patch_recovered_gradients(mesh, u);
  }
  for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i)
  {
    const auto &edge = mesh.boundary_edges()[i];
    const int a = edge[0], b = edge[1];
    const Vec2 n = geo.normals[i];
    Vec2 g = disc.triangle_gradient(u, static_cast<std::size_t>(mesh.boundary_triangle(i)));
    const double w = 0.5 * mesh.edge_length(edge);
    for (double s : kEdgeGaussParams)
    {
      const Vec2 pt = (1.0 - s) * x[a] + s * x[b];
      BoundarySample q;
      q.weight = w;
      q.u = (1.0 - s) * u[a] + s * u[b];
      q.V = spec.potential(pt);
      q.kappa = analytic ? mesh.analytic_boundary()->curvature_at(pt)
                         : (1.0 - s) * geo.curvature[a] + s * geo.curvature[b];
      if (!std::isfinite(q.kappa))
      {
        throw InvalidInput("boundary curvature unavailable");
      }
      q.v_normal = dot(v.on_segment(mesh, a, b, s), n);
      q.normal = n;
      q.grad = recovered.empty() ? g : (1.0 - s) * recovered[a] + s * recovered[b];
      if (fopts.robin_normal)
      {
        const double gn = -signed_power(spec.beta * signed_power(q.u, spec.p - 1.0), exponent);
        q.grad = q.grad - dot(q.grad, n) * n + gn * n;
      }
      f(q);
    }
  }
}

}  // namespace

std::vector<Vec2> patch_recovered_gradients(const Mesh &mesh, std::span<const double> u)
{
  if (u.size() != mesh.num_vertices())
  {
    throw InvalidInput("nodal values do not match the mesh");
  }
  const std::size_t nv = mesh.num_vertices();
  std::vector<std::vector<int>> adj(nv);
  for (const auto &tri : mesh.triangles())
  {
    for (int k = 0; k < 3; ++k)
    {
      adj[tri[k]].push_back(tri[(k + 1) % 3]);
      adj[tri[k]].push_back(tri[(k + 2) % 3]);
    }
  }
  for (auto &a : adj)
  {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  const auto &x = mesh.vertices();
  std::vector<Vec2> grads(nv);
  std::vector<int> patch;
  std::vector<char> seen(nv, 0);
  for (std::size_t i = 0; i < nv; ++i)
  {
    if (!mesh.is_boundary_vertex(static_cast<int>(i)))
    {
      continue;
    }
    patch.assign(1, static_cast<int>(i));
    seen[i] = 1;
    std::size_t ring_begin = 0;
    for (int ring = 0; ring < 3 && (ring < 2 || patch.size() < 10); ++ring)
    {
      const std::size_t ring_end = patch.size();
      for (std::size_t k = ring_begin; k < ring_end; ++k)
      {
        for (int j : adj[patch[k]])
        {
          if (!seen[j])
          {
            seen[j] = 1;
            patch.push_back(j);
          }
        }
      }
      ring_begin = ring_end;
    }
    double h = 0.0;
    for (int j : adj[i])
    {
      h = std::max(h, norm(x[j] - x[i]));
    }
    Eigen::MatrixXd A(patch.size(), 6);
    Eigen::VectorXd b(patch.size());
    for (std::size_t k = 0; k < patch.size(); ++k)
    {
      const Vec2 d = (1.0 / h) * (x[patch[k]] - x[i]);
      A.row(k) << 1.0, d.x, d.y, d.x * d.x, d.x * d.y, d.y * d.y;
      b[k] = u[patch[k]];
      seen[patch[k]] = 0;
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    grads[i] = {c[1] / h, c[2] / h};
  }
  return grads;
}

namespace
{

ProblemSpec mesh_spec(const ProblemSpec &spec)
{
  return spec.with_domain(DomainRef::any_mesh());
}

}  // namespace

ShapeDerivativeReport shape_derivative_formula(const EigenResult &result, const ProblemSpec &spec,
                                               const Mesh &mesh, const VectorField &v,
                                               const ShapeFormulaOptions &fopts)
{
  const double p = spec.p;
  const double lambda = result.lambda;
  ShapeDerivativeReport r;
  r.field = v.name();
  r.lambda = lambda;
  ShapeTerms &t = r.terms;
  for_each_boundary_point(result, spec, mesh, v, fopts,
                          [&](const BoundarySample &q)
                          {
                            const double wv = q.weight * q.v_normal;
                            const double up = std::pow(std::abs(q.u), p);
                            t.grad_term += wv * std::pow(norm(q.grad), p);
                            t.potential_term += wv * q.V * up;
                            t.eigen_term -= wv * lambda * up;
                            t.curvature_term += wv * spec.beta * q.kappa * up;
                            t.robin_term += wv * p * spec.beta * signed_power(q.u, p - 1.0) *
                                            dot(q.grad, q.normal);
                          });
  r.formula_value = t.total();
  r.alt_form_value = kNaN;
  r.alt_robin_term = kNaN;
  r.alt_rel_diff = kNaN;
  r.fd_value = kNaN;
  r.rel_err = kNaN;
  r.fd_half = r.fd_richardson = r.richardson_rel_err = kNaN;
  return r;
}

double shape_derivative_alt_form(const EigenResult &result, const ProblemSpec &spec,
                                 const Mesh &mesh, const VectorField &v,
                                 const ShapeFormulaOptions &fopts)
{
  const double p = spec.p;
  const double lambda = result.lambda;
  double umax = 0.0;
  for (double x : result.u)
  {
    umax = std::max(umax, std::abs(x));
  }
  // Threshold in the units of the unit-mass eigenfunction.
  double mass = 0.0;
  {
    const FemDiscretization disc(spec, mesh);
    mass = disc.evaluate(result.u, 0.0, {}, {}).mass;
  }
  const double threshold = fopts.alt_threshold * umax * std::pow(mass, -1.0 / p) /
                           std::sqrt(mesh.area());
  double total = 0.0;
  for_each_boundary_point(
      result, spec, mesh, v, fopts,
      [&](const BoundarySample &q)
      {
        const double g = norm(q.grad);
        if (p > 2.0 && !(g > threshold))
        {
          throw NumericalFailure("alt form singular here");
        }
        const double up = std::pow(std::abs(q.u), p);
        const double robin = p == 2.0 ? -2.0 * spec.beta * spec.beta * q.u * q.u
                                      : -p * spec.beta * spec.beta *
                                            std::pow(std::abs(q.u), 2.0 * p - 2.0) *
                                            std::pow(g, 2.0 - p);
        total += q.weight * q.v_normal *
                 (std::pow(g, p) + q.V * up - lambda * up + spec.beta * q.kappa * up + robin);
      });
  return total;
}

double shape_derivative_fd(const ProblemSpec &spec, const Mesh &mesh, const VectorField &v,
                           double t0, const SolverOptions &opts, const EigenResult *base)
{
  if (!(t0 > 0.0))
  {
    throw InvalidInput("shape step must be positive");
  }
  EigenResult own;
  if (base == nullptr)
  {
    own = solve_first_eigenpair(spec, mesh, opts);
    require_converged(own, "shape base solve");
    base = &own;
  }
  // Throws on inversion before any solve starts.
  const std::array<Mesh, 2> meshes = {perturb_mesh(mesh, v, t0), perturb_mesh(mesh, v, -t0)};
  const ProblemSpec s = mesh_spec(spec);
  std::array<double, 2> lam{};
  parallel_for(2,
               [&](std::size_t k)
               {
                 const EigenResult r = solve_first_eigenpair(s, meshes[k], opts, base->u);
                 require_converged(r, "perturbed domain solve");
                 lam[k] = r.lambda;
               });
  return (lam[0] - lam[1]) / (2.0 * t0);
}

ShapeDerivativeReport shape_derivative_report(const ProblemSpec &spec, const Mesh &mesh,
                                              const VectorField &v, double t0,
                                              const SolverOptions &opts,
                                              const ShapeFormulaOptions &fopts, bool richardson)
{
  const EigenResult base = solve_first_eigenpair(spec, mesh, opts);
  require_converged(base, "shape base solve");
  ShapeDerivativeReport r = shape_derivative_formula(base, spec, mesh, v, fopts);
  try
  {
    r.alt_form_value = shape_derivative_alt_form(base, spec, mesh, v, fopts);
    r.alt_robin_term = r.alt_form_value - (r.formula_value - r.terms.robin_term);
    r.alt_form_valid = true;
    r.alt_rel_diff = rel_diff(r.alt_form_value, r.formula_value);
  }
  catch (const NumericalFailure &)
  {
    r.alt_form_valid = false;
  }
  r.fd_step = t0;
  r.fd_value = shape_derivative_fd(spec, mesh, v, t0, opts, &base);
  r.rel_err = rel_diff(r.formula_value, r.fd_value);
  if (richardson)
  {
    r.fd_half = shape_derivative_fd(spec, mesh, v, 0.5 * t0, opts, &base);
    r.fd_richardson = (4.0 * r.fd_half - r.fd_value) / 3.0;
    r.richardson_rel_err = rel_diff(r.formula_value, r.fd_richardson);
  }
  return r;
}

double dilation_prediction(const EigenResult &result, const ProblemSpec &spec, const Mesh &mesh)
{
  return -spec.p * result.lambda +
         (spec.p - 1.0) * spec.beta * dlambda_dbeta_formula(result, mesh);
}

double divergence_integral(const Mesh &mesh, const VectorField &v)
{
  // area * div of the linear interpolant = 1/2 sum_k v_k . rot(opposite edge)
  const auto &x = mesh.vertices();
  double total = 0.0;
  for (const auto &tri : mesh.triangles())
  {
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
    {
      const Vec2 e = x[tri[(k + 2) % 3]] - x[tri[(k + 1) % 3]];
      s += dot(v.at_vertex(mesh, tri[k]), Vec2{-e.y, e.x});
    }
    total += 0.5 * s;
  }
  return total;
}

double curvature_flux_integral(const Mesh &mesh, const VectorField &v)
{
  const bool analytic = mesh.analytic_boundary().has_value();
  const BoundaryGeometry geo = boundary_geometry(mesh);
  const auto &x = mesh.vertices();
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.boundary_edges().size(); ++i)
  {
    const auto &edge = mesh.boundary_edges()[i];
    const int a = edge[0], b = edge[1];
    const double w = 0.5 * mesh.edge_length(edge);
    for (double s : kEdgeGaussParams)
    {
      const Vec2 pt = (1.0 - s) * x[a] + s * x[b];
      const double kappa = analytic ? mesh.analytic_boundary()->curvature_at(pt)
                                    : (1.0 - s) * geo.curvature[a] + s * geo.curvature[b];
      total += w * kappa * dot(v.on_segment(mesh, a, b, s), geo.normals[i]);
    }
  }
  return total;
}

namespace
{

HadamardReport expansion_check(const Mesh &mesh, const VectorField &v, std::vector<double> ts,
                               const std::string &quantity, double predicted,
                               double (*measure)(const Mesh &))
{
  if (ts.empty())
  {
    throw InvalidInput("empty t list");
  }
  for (double t : ts)
  {
    if (!(t > 0.0))
    {
      throw InvalidInput("expansion steps must be positive");
    }
  }
  std::sort(ts.begin(), ts.end(), std::greater<>());
  HadamardReport r;
  r.quantity = quantity;
  r.field = v.name();
  r.base = measure(mesh);
  r.predicted = predicted;
  for (double t : ts)
  {
    ExpansionRow row;
    row.t = t;
    row.value = measure(perturb_mesh(mesh, v, t));
    const double minus = measure(perturb_mesh(mesh, v, -t));
    row.slope = (row.value - r.base) / t;
    row.central_slope = (row.value - minus) / (2.0 * t);
    row.remainder = row.value - r.base - t * predicted;
    r.rows.push_back(row);
  }
  for (std::size_t k = 0; k + 1 < r.rows.size(); ++k)
  {
    r.remainder_ratios.push_back(r.rows[k].remainder / r.rows[k + 1].remainder);
  }
  r.slope_rel_err = rel_diff(r.rows.back().central_slope, predicted);
  return r;
}

double mesh_area(const Mesh &m)
{
  return m.area();
}

double mesh_perimeter(const Mesh &m)
{
  return m.perimeter();
}

}  // namespace

HadamardReport hadamard_volume_expansion_check(const Mesh &mesh, const VectorField &v,
                                               const std::vector<double> &ts)
{
  return expansion_check(mesh, v, ts, "volume", divergence_integral(mesh, v), mesh_area);
}

HadamardReport hadamard_surface_expansion_check(const Mesh &mesh, const VectorField &v,
                                                const std::vector<double> &ts)
{
  return expansion_check(mesh, v, ts, "perimeter", curvature_flux_integral(mesh, v),
                         mesh_perimeter);
}

BallSignReport ball_monotonicity_sign_check(double p, double beta, double R, int n,
                                            const std::function<double(double)> &V,
                                            double v_normal, int intervals,
                                            const SolverOptions &opts)
{
  if (!(p > 1.0) || !(beta > 0.0) || !(R > 0.0) || n < 2 || !(v_normal != 0.0))
  {
    throw InvalidInput("ball sign check needs p > 1, beta > 0, R > 0, n >= 2, v.n != 0");
  }
  const RadialGrid grid = RadialGrid::graded(R, n, intervals);
  const EigenResult res = radial_lambda1(p, beta, V, grid, opts);
  require_converged(res, "radial solve");

  BallSignReport r;
  r.p = p;
  r.beta = beta;
  r.R = R;
  r.n = n;
  r.lambda = res.lambda;
  r.V_boundary = V ? V(R) : 0.0;
  r.u_boundary = res.u.back();
  r.v_normal = v_normal;
  const double up = std::pow(r.u_boundary, p);
  r.coefficient = (1.0 - p) * std::pow(beta, p / (p - 1.0)) + r.V_boundary - r.lambda +
                  beta * (n - 1) / R;
  r.integrand = up * r.coefficient;

  const std::size_t m = res.u.size();
  const double du = (res.u[m - 1] - res.u[m - 2]) / (grid.nodes[m - 1] - grid.nodes[m - 2]);
  r.integrand_discrete = std::pow(std::abs(du), p) + (r.V_boundary - r.lambda) * up +
                         beta * (n - 1) / R * up +
                         p * beta * std::pow(r.u_boundary, p - 1.0) * du;

  const double sphere = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n) *
                        std::pow(R, n - 1);
  r.derivative = r.integrand * v_normal * sphere;

  r.condition_a = beta >= std::pow((n - 1) / (R * (p - 1.0)), p - 1.0);
  r.condition_b = R >= 1.0 && beta >= 1.0 && p >= n;
  r.potential_below_lambda = r.V_boundary <= r.lambda;
  r.hypotheses_met = (r.condition_a || r.condition_b) && r.potential_below_lambda;
  r.observed_sign = (r.derivative > 0.0) - (r.derivative < 0.0);
  if (!r.hypotheses_met)
  {
    r.predicted_sign = 0;
    r.verdict = "hypotheses not met";
  }
  else
  {
    r.predicted_sign = v_normal > 0.0 ? -1 : 1;
    if (r.observed_sign != r.predicted_sign)
    {
      r.verdict = "contradiction";
    }
    else
    {
      r.verdict = r.predicted_sign < 0 ? "decreasing" : "increasing";
    }
  }
  return r;
}

}  // namespace robin

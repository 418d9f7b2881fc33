#include "robin/discretization.hpp"

#include <algorithm>
#include <cmath>

#include "robin/errors.hpp"

namespace robin
{

namespace
{

// Value and derivative factor of F_eps: F'(xi) = dens * xi.
struct Density
{
  double value;
  double dens;
};

Density gradient_density(double xi2, double eps, double p)
{
  if (p == 2.0)
  {
    return {xi2, 2.0};
  }
  const double s = xi2 + eps * eps;
  if (s == 0.0)
  {
    return {0.0, 0.0};
  }
  const double w = std::pow(s, 0.5 * (p - 2.0));
  return {w * s - std::pow(eps, p), p * w};
}

// |x|^p and d/dx |x|^p.
inline std::pair<double, double> power_and_slope(double x, double p)
{
  const double ax = std::abs(x);
  if (ax == 0.0)
  {
    return {0.0, 0.0};
  }
  if (p == 2.0)
  {
    return {x * x, 2.0 * x};
  }
  const double a = std::pow(ax, p - 1.0);
  return {a * ax, p * std::copysign(a, x)};
}

}  // namespace

namespace detail
{

double power_change(double x, double y, double p)
{
  if (x == 0.0)
  {
    return std::pow(std::abs(y), p);
  }
  const double r = y / x;
  if (r > -0.5)
  {
    return std::pow(std::abs(x), p) * std::expm1(p * std::log1p(r));
  }
  return std::pow(std::abs(x + y), p) - std::pow(std::abs(x), p);
}

double gradient_power_change(double a2, double c, double e2, double p)
{
  if (p == 2.0)
  {
    return c;
  }
  if (a2 == 0.0)
  {
    return std::pow(e2, 0.5 * p);
  }
  const double r = c / a2;
  if (r > -0.5)
  {
    return std::pow(a2, 0.5 * p) * std::expm1(0.5 * p * std::log1p(r));
  }
  return std::pow(std::max(a2 + c, 0.0), 0.5 * p) - std::pow(a2, 0.5 * p);
}

}  // namespace detail

double Discretization::quotient(std::span<const double> u, double eps) const
{
  const EnergyParts e = evaluate(u, eps, {}, {});
  if (!(e.mass > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  return numerator(e) / e.mass;
}

FemDiscretization::FemDiscretization(const ProblemSpec &spec, const Mesh &mesh, bool dirichlet)
  : mesh_(&mesh), p_(spec.p), beta_(spec.beta)
{
  const auto &x = mesh.vertices();
  const std::size_t nt = mesh.num_triangles();
  areas_.resize(nt);
  basis_gradients_.resize(nt);
  potential_.resize(3 * nt);
  masses_.assign(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < nt; ++t)
  {
    const auto &tri = mesh.triangles()[t];
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0))
    {
      throw NumericalFailure("inverted element " + std::to_string(t) + " during assembly");
    }
    areas_[t] = area;
    area_ += area;
    for (int k = 0; k < 3; ++k)
    {
      // grad phi_k is the rotated opposite edge over twice the area.
      const Vec2 e = x[tri[(k + 2) % 3]] - x[tri[(k + 1) % 3]];
      basis_gradients_[t][k] = (1.0 / (2.0 * area)) * Vec2{-e.y, e.x};
      potential_[3 * t + k] = spec.potential(0.5 * (x[tri[k]] + x[tri[(k + 1) % 3]]));
      masses_[tri[k]] += area / 3.0;
    }
  }
  for (double v : potential_)
  {
    if (!std::isfinite(v))
    {
      throw InvalidInput("potential is not finite at a quadrature point");
    }
  }
  pinned_.assign(mesh.num_vertices(), 0);
  if (dirichlet)
  {
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i)
    {
      pinned_[i] = mesh.is_boundary_vertex(static_cast<int>(i)) ? 1 : 0;
    }
  }
}

double FemDiscretization::length_scale() const
{
  return std::sqrt(area_);
}

Vec2 FemDiscretization::triangle_gradient(std::span<const double> u, std::size_t t) const
{
  const auto &tri = mesh_->triangles()[t];
  const auto &g = basis_gradients_[t];
  return u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
}

EnergyParts FemDiscretization::evaluate(std::span<const double> u, double eps,
                                        std::span<double> grad_num,
                                        std::span<double> grad_mass) const
{
  if (u.size() != size())
  {
    throw InvalidInput("coefficient vector does not match the mesh");
  }
  const bool want_num = !grad_num.empty();
  const bool want_mass = !grad_mass.empty();
  if (want_num)
  {
    std::fill(grad_num.begin(), grad_num.end(), 0.0);
  }
  if (want_mass)
  {
    std::fill(grad_mass.begin(), grad_mass.end(), 0.0);
  }

  EnergyParts e;
  const auto &tris = mesh_->triangles();
  for (std::size_t t = 0; t < tris.size(); ++t)
  {
    const auto &tri = tris[t];
    const double area = areas_[t];
    const Vec2 xi = triangle_gradient(u, t);
    const Density d = gradient_density(norm2(xi), eps, p_);
    e.gradient += area * d.value;
    if (want_num && d.dens != 0.0)
    {
      for (int k = 0; k < 3; ++k)
      {
        grad_num[tri[k]] += area * d.dens * dot(xi, basis_gradients_[t][k]);
      }
    }
    const double w = area / 3.0;
    for (int k = 0; k < 3; ++k)
    {
      const int a = tri[k], b = tri[(k + 1) % 3];
      const auto [up, slope] = power_and_slope(0.5 * (u[a] + u[b]), p_);
      const double v = potential_[3 * t + k];
      e.mass += w * up;
      e.potential += w * v * up;
      if (want_num)
      {
        grad_num[a] += 0.5 * w * v * slope;
        grad_num[b] += 0.5 * w * v * slope;
      }
      if (want_mass)
      {
        grad_mass[a] += 0.5 * w * slope;
        grad_mass[b] += 0.5 * w * slope;
      }
    }
  }

  const auto &x = mesh_->vertices();
  for (const auto &edge : mesh_->boundary_edges())
  {
    const double w = 0.5 * norm(x[edge[1]] - x[edge[0]]);
    for (double s : kEdgeGaussParams)
    {
      const auto [up, slope] = power_and_slope((1.0 - s) * u[edge[0]] + s * u[edge[1]], p_);
      e.boundary += w * up;
      if (want_num)
      {
        grad_num[edge[0]] += beta_ * w * (1.0 - s) * slope;
        grad_num[edge[1]] += beta_ * w * s * slope;
      }
    }
  }
  return e;
}

EnergyParts FemDiscretization::change(std::span<const double> u,
                                      std::span<const double> delta) const
{
  EnergyParts e;
  const auto &tris = mesh_->triangles();
  for (std::size_t t = 0; t < tris.size(); ++t)
  {
    const auto &tri = tris[t];
    const Vec2 xi = triangle_gradient(u, t);
    const Vec2 eta = triangle_gradient(delta, t);
    e.gradient += areas_[t] * detail::gradient_power_change(norm2(xi), 2.0 * robin::dot(xi, eta) + norm2(eta),
                                                           norm2(eta), p_);
    const double w = areas_[t] / 3.0;
    for (int k = 0; k < 3; ++k)
    {
      const int a = tri[k], b = tri[(k + 1) % 3];
      const double dm = w * detail::power_change(0.5 * (u[a] + u[b]), 0.5 * (delta[a] + delta[b]), p_);
      e.mass += dm;
      e.potential += potential_[3 * t + k] * dm;
    }
  }
  const auto &x = mesh_->vertices();
  for (const auto &edge : mesh_->boundary_edges())
  {
    const double w = 0.5 * norm(x[edge[1]] - x[edge[0]]);
    for (double s : kEdgeGaussParams)
    {
      e.boundary += w * detail::power_change((1.0 - s) * u[edge[0]] + s * u[edge[1]],
                                             (1.0 - s) * delta[edge[0]] + s * delta[edge[1]], p_);
    }
  }
  return e;
}

Eigen::SparseMatrix<double> FemDiscretization::preconditioner(std::span<const double> u,
                                                              double eps, double floor) const
{
  const std::size_t n = size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * mesh_->num_triangles() + 4 * mesh_->boundary_edges().size() + n);

  // Typical magnitude of u for the zero-order weights.
  double umass = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    umass += masses_[i] * std::pow(std::abs(u[i]), p_);
  }
  const double uscale = std::pow(umass / area_, 1.0 / p_);
  const double delta = 0.1 * uscale;
  auto zero_order = [this, delta](double value)
  {
    if (p_ == 2.0)
    {
      return 2.0;
    }
    return p_ * (p_ - 1.0) * std::pow(std::max(value * value, delta * delta), 0.5 * (p_ - 2.0));
  };
  const double sigma = 1.0 / (length_scale() * length_scale());

  const auto &tris = mesh_->triangles();
  for (std::size_t t = 0; t < tris.size(); ++t)
  {
    const auto &tri = tris[t];
    const Vec2 xi = triangle_gradient(u, t);
    double c = 2.0;
    if (p_ != 2.0)
    {
      const double s = std::max(norm2(xi) + eps * eps, floor * floor);
      c = p_ * std::pow(s, 0.5 * (p_ - 2.0));
    }
    c *= areas_[t];
    const auto &g = basis_gradients_[t];
    const double w = areas_[t] / 3.0;
    for (int k = 0; k < 3; ++k)
    {
      for (int l = 0; l < 3; ++l)
      {
        trip.emplace_back(tri[k], tri[l], c * dot(g[k], g[l]));
      }
      const int a = tri[k], b = tri[(k + 1) % 3];
      const double m = sigma * w * zero_order(0.5 * (u[a] + u[b])) * 0.25;
      trip.emplace_back(a, a, m);
      trip.emplace_back(a, b, m);
      trip.emplace_back(b, a, m);
      trip.emplace_back(b, b, m);
    }
  }
  const auto &x = mesh_->vertices();
  for (const auto &edge : mesh_->boundary_edges())
  {
    const double w = 0.5 * norm(x[edge[1]] - x[edge[0]]);
    for (double s : kEdgeGaussParams)
    {
      const double m = beta_ * w * zero_order((1.0 - s) * u[edge[0]] + s * u[edge[1]]);
      const double phi[2] = {1.0 - s, s};
      for (int k = 0; k < 2; ++k)
      {
        for (int l = 0; l < 2; ++l)
        {
          trip.emplace_back(edge[k], edge[l], m * phi[k] * phi[l]);
        }
      }
    }
  }

  // Pinned rows and columns become identity.
  std::erase_if(trip, [this](const Eigen::Triplet<double> &t)
                { return pinned_[t.row()] || pinned_[t.col()]; });
  for (std::size_t i = 0; i < n; ++i)
  {
    if (pinned_[i])
    {
      trip.emplace_back(i, i, 1.0);
    }
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double rayleigh_quotient(std::span<const double> u, const ProblemSpec &spec, const Mesh &mesh)
{
  require_mesh_matches(spec, mesh);
  if (std::all_of(u.begin(), u.end(), [](double x) { return x == 0.0; }))
  {
    throw InvalidInput("degenerate test function");
  }
  return FemDiscretization(spec, mesh).quotient(u);
}

}  // namespace robin

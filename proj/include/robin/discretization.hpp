#pragma once

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "robin/mesh.hpp"
#include "robin/model.hpp"

namespace robin
{

// Integrals making up the Rayleigh quotient at one coefficient vector.
// The numerator is gradient + potential + beta * boundary.
struct EnergyParts
{
  double gradient = 0.0;   // int F_eps(grad u), F_0 = |.|^p
  double potential = 0.0;  // int V |u|^p
  double boundary = 0.0;   // int over the boundary of |u|^p
  double mass = 0.0;       // int |u|^p
};

// Piecewise-linear discretization of the energy. The solver only talks to
// this interface, so the planar FEM and the radial reduction share it.
//
// Regularized gradient density: F_eps(xi) = (|xi|^2 + eps^2)^{p/2} - eps^p,
// exactly |xi|^2 when p = 2.
class Discretization
{
public:
  virtual ~Discretization() = default;

  virtual std::size_t size() const = 0;
  virtual double p() const = 0;
  virtual double beta() const = 0;

  // Fills the gradients of numerator and mass when the spans are non-empty.
  virtual EnergyParts evaluate(std::span<const double> u, double eps, std::span<double> grad_num,
                               std::span<double> grad_mass) const = 0;

  // SPD model Hessian of the numerator at u, independent of V. Gradient
  // weights are floored at `floor` for p < 2.
  virtual Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps,
                                                     double floor) const = 0;

  // int phi_i for every hat function.
  virtual const std::vector<double> &test_masses() const = 0;
  // Total measure of the domain in the quotient's measure.
  virtual double measure() const = 0;
  virtual double length_scale() const = 0;
  // Nonzero for coefficients pinned to zero.
  virtual const std::vector<char> &pinned() const = 0;

  // Parts at u + delta minus parts at u, at eps = 0, computed without
  // cancellation so that tiny changes near a minimizer stay resolvable.
  virtual EnergyParts change(std::span<const double> u, std::span<const double> delta) const = 0;

  double numerator(const EnergyParts &e) const { return e.gradient + e.potential + beta() * e.boundary; }
  double quotient(std::span<const double> u, double eps = 0.0) const;
};

namespace detail
{
// |x + y|^p - |x|^p.
double power_change(double x, double y, double p);
// |xi + eta|^p - |xi|^p from a2 = |xi|^2, c = 2 xi.eta + |eta|^2, e2 = |eta|^2.
double gradient_power_change(double a2, double c, double e2, double p);
}  // namespace detail

class FemDiscretization final : public Discretization
{
public:
  // With `dirichlet` the boundary coefficients are pinned.
  FemDiscretization(const ProblemSpec &spec, const Mesh &mesh, bool dirichlet = false);

  std::size_t size() const override { return mesh_->num_vertices(); }
  double p() const override { return p_; }
  double beta() const override { return beta_; }
  EnergyParts evaluate(std::span<const double> u, double eps, std::span<double> grad_num,
                       std::span<double> grad_mass) const override;
  Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps,
                                             double floor) const override;
  const std::vector<double> &test_masses() const override { return masses_; }
  double measure() const override { return area_; }
  double length_scale() const override;
  const std::vector<char> &pinned() const override { return pinned_; }
  EnergyParts change(std::span<const double> u, std::span<const double> delta) const override;

  const Mesh &mesh() const { return *mesh_; }
  // Constant gradient of u on triangle t.
  Vec2 triangle_gradient(std::span<const double> u, std::size_t t) const;

private:
  const Mesh *mesh_;
  double p_, beta_;
  double area_ = 0.0;
  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> basis_gradients_;
  std::vector<double> potential_;  // at the three edge midpoints of each triangle
  std::vector<double> masses_;
  std::vector<char> pinned_;
};

}  // namespace robin

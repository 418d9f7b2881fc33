#pragma once

#include <functional>
#include <vector>

#include "robin/discretization.hpp"
#include "robin/solver.hpp"

namespace robin
{

// Graded grid on [0, R] for radial functions on the ball B(0, R) in R^n.
struct RadialGrid
{
  double R = 1.0;
  int n = 2;
  std::vector<double> nodes;    // 0 = r_0 < ... < r_M = R
  std::vector<double> weights;  // int phi_i r^{n-1} dr per node

  // r_k = R (x + g sin(pi x) / pi) with x = k/M: cells shrink smoothly from
  // (1 + g) R/M at the center to (1 - g) R/M at the boundary.
  static RadialGrid graded(double R, int n, int intervals, double grading = 0.75);
  RadialGrid scaled(double t) const;
};

// P1 radial energy
//   int_0^R (F_eps(u') + V |u|^p) r^{n-1} dr + beta R^{n-1} |u(R)|^p
// over int_0^R |u|^p r^{n-1} dr. The gradient term is integrated exactly,
// zero-order terms with 3-point Gauss per interval.
class RadialDiscretization final : public Discretization
{
public:
  RadialDiscretization(double p, double beta, std::function<double(double)> V, RadialGrid grid,
                       bool dirichlet = false);

  std::size_t size() const override { return grid_.nodes.size(); }
  double p() const override { return p_; }
  double beta() const override { return beta_; }
  EnergyParts evaluate(std::span<const double> u, double eps, std::span<double> grad_num,
                       std::span<double> grad_mass) const override;
  Eigen::SparseMatrix<double> preconditioner(std::span<const double> u, double eps,
                                             double floor) const override;
  const std::vector<double> &test_masses() const override { return grid_.weights; }
  double measure() const override;
  double length_scale() const override { return grid_.R; }
  const std::vector<char> &pinned() const override { return pinned_; }
  EnergyParts change(std::span<const double> u, std::span<const double> delta) const override;

  const RadialGrid &grid() const { return grid_; }

private:
  struct GaussPoint
  {
    double left, right;  // hat values of the interval's two nodes
    double weight;       // Gauss weight times r^{n-1}
    double V;
  };
  double p_, beta_;
  RadialGrid grid_;
  std::vector<double> gradient_weights_;  // (r_{k+1}^n - r_k^n) / n
  std::vector<GaussPoint> gauss_;         // 3 per interval
  std::vector<char> pinned_;
};

EigenResult radial_lambda1(double p, double beta, const std::function<double(double)> &V,
                           const RadialGrid &grid, const SolverOptions &opts = {});
EigenResult radial_dirichlet_lambda1(double p, const std::function<double(double)> &V,
                                     const RadialGrid &grid, const SolverOptions &opts = {});

// Convenience wrapper with a default grid of `intervals` cells.
EigenResult solve_radial_first(double p, double beta, const std::function<double(double)> &V,
                               double R, int n, int intervals = 10000,
                               const SolverOptions &opts = {});

// Power series in long double, accurate to ~1e-15 on [0, 12].
double bessel_j0(double x);
double bessel_j1(double x);
// First positive zero of J0.
double bessel_j0_first_zero();
// lambda = s^2 for the smallest positive root s of s J1(s) = beta J0(s).
double bessel_robin_root(double beta);

}  // namespace robin

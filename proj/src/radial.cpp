#include "robin/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "robin/errors.hpp"

namespace robin
{

namespace
{

constexpr double kPi = std::numbers::pi;

constexpr double kGaussNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kGaussWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

template <class F>
double bisect(F f, double lo, double hi)
{
  double flo = f(lo);
  if (!(flo * f(hi) < 0.0))
  {
    throw NumericalFailure("root is not bracketed");
  }
  for (int k = 0; k < 200 && hi - lo > 4e-16 * hi; ++k)
  {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0)
    {
      return mid;
    }
    if ((fm < 0.0) == (flo < 0.0))
    {
      lo = mid;
      flo = fm;
    }
    else
    {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// sum_k (-1)^k (x/2)^{2k+nu} / (k! (k+nu)!)
double bessel_series(double x, int nu)
{
  if (std::abs(x) > 12.0)
  {
    throw InvalidInput("series Bessel evaluation limited to |x| <= 12");
  }
  const long double h = 0.5L * x;
  long double term = nu == 0 ? 1.0L : h;
  long double sum = term;
  for (int k = 1; k < 80; ++k)
  {
    term *= -h * h / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-22L * std::max(1.0L, std::abs(sum)))
    {
      break;
    }
  }
  return static_cast<double>(sum);
}

}  // namespace

RadialGrid RadialGrid::graded(double R, int n, int intervals, double grading)
{
  if (!(R > 0.0) || n < 1 || intervals < 2 || !(grading >= 0.0 && grading < 1.0))
  {
    throw InvalidInput("radial grid needs R > 0, n >= 1, at least 2 intervals, 0 <= grading < 1");
  }
  RadialGrid g;
  g.R = R;
  g.n = n;
  g.nodes.resize(intervals + 1);
  for (int k = 0; k <= intervals; ++k)
  {
    const double x = static_cast<double>(k) / intervals;
    g.nodes[k] = R * (x + grading * std::sin(kPi * x) / kPi);
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = R;
  g.weights.assign(g.nodes.size(), 0.0);
  for (int k = 0; k < intervals; ++k)
  {
    const double a = g.nodes[k], b = g.nodes[k + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < 3; ++q)
    {
      const double r = mid + half * kGaussNodes[q];
      const double w = half * kGaussWeights[q] * std::pow(r, n - 1);
      const double s = (r - a) / (b - a);
      g.weights[k] += w * (1.0 - s);
      g.weights[k + 1] += w * s;
    }
  }
  return g;
}

RadialGrid RadialGrid::scaled(double t) const
{
  if (!(t > 0.0))
  {
    throw InvalidInput("scale factor must be positive");
  }
  RadialGrid g = *this;
  g.R *= t;
  for (double &r : g.nodes)
  {
    r *= t;
  }
  const double f = std::pow(t, n);
  for (double &w : g.weights)
  {
    w *= f;
  }
  return g;
}

RadialDiscretization::RadialDiscretization(double p, double beta,
                                           std::function<double(double)> V, RadialGrid grid,
                                           bool dirichlet)
  : p_(p), beta_(beta), grid_(std::move(grid))
{
  if (!(p > 1.0) || !(beta > 0.0))
  {
    throw InvalidInput("radial problem needs p > 1 and beta > 0");
  }
  const auto &r = grid_.nodes;
  const std::size_t m = r.size() - 1;
  for (std::size_t k = 0; k < m; ++k)
  {
    if (!(r[k + 1] > r[k]))
    {
      throw InvalidInput("radial grid nodes must increase strictly");
    }
    const double a = r[k], b = r[k + 1];
    gradient_weights_.push_back((std::pow(b, grid_.n) - std::pow(a, grid_.n)) / grid_.n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (int q = 0; q < 3; ++q)
    {
      const double x = mid + half * kGaussNodes[q];
      const double s = (x - a) / (b - a);
      const double v = V ? V(x) : 0.0;
      if (!std::isfinite(v))
      {
        throw InvalidInput("radial potential is not finite");
      }
      gauss_.push_back({1.0 - s, s, half * kGaussWeights[q] * std::pow(x, grid_.n - 1), v});
    }
  }
  pinned_.assign(r.size(), 0);
  if (dirichlet)
  {
    pinned_.back() = 1;
  }
}

double RadialDiscretization::measure() const
{
  return std::pow(grid_.R, grid_.n) / grid_.n;
}

EnergyParts RadialDiscretization::evaluate(std::span<const double> u, double eps,
                                           std::span<double> grad_num,
                                           std::span<double> grad_mass) const
{
  if (u.size() != size())
  {
    throw InvalidInput("coefficient vector does not match the radial grid");
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
  const auto &r = grid_.nodes;
  EnergyParts e;
  for (std::size_t k = 0; k + 1 < r.size(); ++k)
  {
    const double dr = r[k + 1] - r[k];
    const double s = (u[k + 1] - u[k]) / dr;
    double value, dens;
    if (p_ == 2.0)
    {
      value = s * s;
      dens = 2.0;
    }
    else
    {
      const double q = s * s + eps * eps;
      const double w = q > 0.0 ? std::pow(q, 0.5 * (p_ - 2.0)) : 0.0;
      value = w * q - std::pow(eps, p_);
      dens = p_ * w;
    }
    e.gradient += gradient_weights_[k] * value;
    if (want_num)
    {
      const double g = gradient_weights_[k] * dens * s / dr;
      grad_num[k] -= g;
      grad_num[k + 1] += g;
    }
    for (int q = 0; q < 3; ++q)
    {
      const GaussPoint &gp = gauss_[3 * k + q];
      const double x = gp.left * u[k] + gp.right * u[k + 1];
      const double ax = std::abs(x);
      const double up = p_ == 2.0 ? x * x : std::pow(ax, p_);
      const double slope = ax == 0.0 ? 0.0 : p_ * up / x;
      e.mass += gp.weight * up;
      e.potential += gp.weight * gp.V * up;
      if (want_num)
      {
        grad_num[k] += gp.weight * gp.V * slope * gp.left;
        grad_num[k + 1] += gp.weight * gp.V * slope * gp.right;
      }
      if (want_mass)
      {
        grad_mass[k] += gp.weight * slope * gp.left;
        grad_mass[k + 1] += gp.weight * slope * gp.right;
      }
    }
  }
  const double rb = std::pow(grid_.R, grid_.n - 1);
  const double ub = u.back();
  const double up = std::pow(std::abs(ub), p_);
  e.boundary = rb * up;
  if (want_num && ub != 0.0)
  {
    grad_num.back() += beta_ * rb * p_ * up / ub;
  }
  return e;
}

EnergyParts RadialDiscretization::change(std::span<const double> u,
                                         std::span<const double> delta) const
{
  const auto &r = grid_.nodes;
  EnergyParts e;
  for (std::size_t k = 0; k + 1 < r.size(); ++k)
  {
    const double dr = r[k + 1] - r[k];
    const double s = (u[k + 1] - u[k]) / dr;
    const double t = (delta[k + 1] - delta[k]) / dr;
    e.gradient +=
        gradient_weights_[k] * detail::gradient_power_change(s * s, 2.0 * s * t + t * t, t * t, p_);
    for (int q = 0; q < 3; ++q)
    {
      const GaussPoint &gp = gauss_[3 * k + q];
      const double dm = gp.weight * detail::power_change(gp.left * u[k] + gp.right * u[k + 1],
                                                         gp.left * delta[k] + gp.right * delta[k + 1],
                                                         p_);
      e.mass += dm;
      e.potential += gp.V * dm;
    }
  }
  e.boundary = std::pow(grid_.R, grid_.n - 1) * detail::power_change(u.back(), delta.back(), p_);
  return e;
}

Eigen::SparseMatrix<double> RadialDiscretization::preconditioner(std::span<const double> u,
                                                                 double eps, double floor) const
{
  const auto &r = grid_.nodes;
  const std::size_t n = size();
  double umass = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    umass += grid_.weights[i] * std::pow(std::abs(u[i]), p_);
  }
  const double delta = 0.1 * std::pow(umass / measure(), 1.0 / p_);
  auto zero_order = [this, delta](double value)
  {
    if (p_ == 2.0)
    {
      return 2.0;
    }
    return p_ * (p_ - 1.0) * std::pow(std::max(value * value, delta * delta), 0.5 * (p_ - 2.0));
  };
  const double sigma = 1.0 / (grid_.R * grid_.R);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * n + 12 * n);
  for (std::size_t k = 0; k + 1 < r.size(); ++k)
  {
    const double dr = r[k + 1] - r[k];
    const double s = (u[k + 1] - u[k]) / dr;
    double c = 2.0;
    if (p_ != 2.0)
    {
      c = p_ * std::pow(std::max(s * s + eps * eps, floor * floor), 0.5 * (p_ - 2.0));
    }
    c *= gradient_weights_[k] / (dr * dr);
    for (int q = 0; q < 3; ++q)
    {
      const GaussPoint &gp = gauss_[3 * k + q];
      const double m = sigma * gp.weight * zero_order(gp.left * u[k] + gp.right * u[k + 1]);
      trip.emplace_back(k, k, m * gp.left * gp.left);
      trip.emplace_back(k, k + 1, m * gp.left * gp.right);
      trip.emplace_back(k + 1, k, m * gp.left * gp.right);
      trip.emplace_back(k + 1, k + 1, m * gp.right * gp.right);
    }
    trip.emplace_back(k, k, c);
    trip.emplace_back(k, k + 1, -c);
    trip.emplace_back(k + 1, k, -c);
    trip.emplace_back(k + 1, k + 1, c);
  }
  trip.emplace_back(n - 1, n - 1,
                    beta_ * std::pow(grid_.R, grid_.n - 1) * zero_order(u.back()));
  if (pinned_.back())
  {
    std::erase_if(trip, [n](const Eigen::Triplet<double> &t)
                  { return t.row() == Eigen::Index(n - 1) || t.col() == Eigen::Index(n - 1); });
    trip.emplace_back(n - 1, n - 1, 1.0);
  }
  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

EigenResult radial_lambda1(double p, double beta, const std::function<double(double)> &V,
                           const RadialGrid &grid, const SolverOptions &opts)
{
  const RadialDiscretization disc(p, beta, V, grid);
  return minimize_quotient(disc, opts);
}

EigenResult radial_dirichlet_lambda1(double p, const std::function<double(double)> &V,
                                     const RadialGrid &grid, const SolverOptions &opts)
{
  const RadialDiscretization disc(p, 1.0, V, grid, true);
  return minimize_quotient(disc, opts);
}

EigenResult solve_radial_first(double p, double beta, const std::function<double(double)> &V,
                               double R, int n, int intervals, const SolverOptions &opts)
{
  if (n < 2)
  {
    throw InvalidInput("ball dimension must be at least 2");
  }
  return radial_lambda1(p, beta, V, RadialGrid::graded(R, n, intervals), opts);
}

double bessel_j0(double x)
{
  return bessel_series(x, 0);
}

double bessel_j1(double x)
{
  return bessel_series(x, 1);
}

double bessel_j0_first_zero()
{
  static const double z = bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0);
  return z;
}

double bessel_robin_root(double beta)
{
  if (!(beta > 0.0) || !std::isfinite(beta))
  {
    throw InvalidInput("Robin parameter must be positive");
  }
  const double j = bessel_j0_first_zero();
  const double s =
      bisect([beta](double x) { return x * bessel_j1(x) - beta * bessel_j0(x); }, 0.0, j);
  return s * s;
}

}  // namespace robin

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "robin/discretization.hpp"
#include "robin/errors.hpp"

using namespace robin;

namespace
{

ProblemSpec spec(double p, double beta, Potential V = {})
{
  ProblemSpec s;
  s.p = p;
  s.beta = beta;
  s.potential = V;
  s.domain = DomainRef::any_mesh();
  return s;
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.2, 1.5);
  std::vector<double> u(n);
  for (double &x : u)
  {
    x = d(rng);
  }
  return u;
}

}  // namespace

TEST(Fem, ConstantFunctionQuotientIsBoundaryRatio)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.1);
  for (double p : {2.0, 2.5, 1.5})
  {
    const FemDiscretization d(spec(p, 0.7), m);
    const std::vector<double> one(m.num_vertices(), 3.0);
    EXPECT_NEAR(d.quotient(one), 0.7 * m.perimeter() / m.area(), 1e-12) << p;
  }
}

TEST(Fem, PotentialIntegratedExactlyForQuadratics)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  const Potential V = Potential::quadratic({0.5, 0.0, 0.0, 1.0, 0.0, 0.0});
  const FemDiscretization d(spec(2.0, 1.0, V), m);
  const std::vector<double> one(m.num_vertices(), 1.0);
  const EnergyParts e = d.evaluate(one, 0.0, {}, {});
  EXPECT_NEAR(e.potential, volume_integral(m, [&](Vec2 x) { return V(x); }), 1e-12);
  EXPECT_NEAR(e.mass, m.area(), 1e-12);
  EXPECT_NEAR(e.boundary, m.perimeter(), 1e-12);
  EXPECT_NEAR(e.gradient, 0.0, 1e-24);
}

TEST(Fem, QuotientIsScaleAndSignInvariant)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  const FemDiscretization d(spec(2.5, 1.0, Potential::sine(1.0, 2.0, 1)), m);
  std::vector<double> u = random_vector(m.num_vertices(), 4);
  const double q = d.quotient(u);
  for (double c : {-1.0, 3.0, 1e-3})
  {
    std::vector<double> v = u;
    for (double &x : v)
    {
      x *= c;
    }
    EXPECT_NEAR(d.quotient(v), q, 1e-12 * q) << c;
  }
}

TEST(Fem, EnergyGradientMatchesFiniteDifferences)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  for (double p : {2.0, 2.5, 1.7})
  {
    const FemDiscretization d(spec(p, 1.3, Potential::quadratic({0, 0, 0, 1, 0, 0})), m);
    const std::vector<double> u = random_vector(m.num_vertices(), 9);
    std::vector<double> gn(u.size()), gm(u.size());
    const double eps = 0.05;
    d.evaluate(u, eps, gn, gm);
    const double h = 1e-6;
    for (std::size_t i = 0; i < u.size(); i += 7)
    {
      std::vector<double> a = u, b = u;
      a[i] += h;
      b[i] -= h;
      const EnergyParts ea = d.evaluate(a, eps, {}, {}), eb = d.evaluate(b, eps, {}, {});
      const double fd_num = (d.numerator(ea) - d.numerator(eb)) / (2 * h);
      const double fd_mass = (ea.mass - eb.mass) / (2 * h);
      EXPECT_NEAR(gn[i], fd_num, 1e-6 * std::max(1.0, std::abs(fd_num))) << p << " " << i;
      EXPECT_NEAR(gm[i], fd_mass, 1e-6 * std::max(1.0, std::abs(fd_mass))) << p << " " << i;
    }
  }
}

TEST(Fem, ChangeMatchesDifferenceOfEvaluations)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const FemDiscretization d(spec(2.5, 1.0, Potential::constant(0.3)), m);
  const std::vector<double> u = random_vector(m.num_vertices(), 1);
  std::vector<double> delta = random_vector(m.num_vertices(), 2);
  for (double &x : delta)
  {
    x -= 0.8;
  }
  std::vector<double> w = u;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    w[i] += delta[i];
  }
  const EnergyParts a = d.evaluate(w, 0.0, {}, {}), b = d.evaluate(u, 0.0, {}, {});
  const EnergyParts c = d.change(u, delta);
  EXPECT_NEAR(c.gradient, a.gradient - b.gradient, 1e-12 * std::abs(a.gradient));
  EXPECT_NEAR(c.mass, a.mass - b.mass, 1e-12 * a.mass);
  EXPECT_NEAR(c.potential, a.potential - b.potential, 1e-12 * a.mass);
  EXPECT_NEAR(c.boundary, a.boundary - b.boundary, 1e-12 * a.boundary);
}

TEST(Fem, ChangeResolvesTinySteps)
{
  // Differences of order 1e-14 relative are lost by subtraction, not by change().
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const FemDiscretization d(spec(3.0, 1.0), m);
  const std::vector<double> u = random_vector(m.num_vertices(), 3);
  std::vector<double> delta(u.size(), 0.0);
  delta[0] = 1e-13;
  const EnergyParts c = d.change(u, delta);
  std::vector<double> gn(u.size()), gm(u.size());
  d.evaluate(u, 0.0, gn, gm);
  EXPECT_NEAR(c.mass, gm[0] * 1e-13, 1e-6 * std::abs(gm[0] * 1e-13));
}

TEST(Fem, DirichletPinsBoundary)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const FemDiscretization d(spec(2.0, 1.0), m, true);
  for (std::size_t i = 0; i < m.num_vertices(); ++i)
  {
    EXPECT_EQ(d.pinned()[i] != 0, m.is_boundary_vertex(static_cast<int>(i)));
  }
}

TEST(Fem, PreconditionerIsSymmetricPositive)
{
  const Mesh m = generate_disk_mesh(1.0, 0.25);
  const FemDiscretization d(spec(2.5, 1.0), m);
  const std::vector<double> u = random_vector(m.num_vertices(), 5);
  const Eigen::MatrixXd K = Eigen::MatrixXd(d.preconditioner(u, 0.1, 1e-8));
  EXPECT_LT((K - K.transpose()).norm(), 1e-12 * K.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Fem, DegenerateInputRejected)
{
  const Mesh m = generate_disk_mesh(1.0, 0.25);
  const FemDiscretization d(spec(2.0, 1.0), m);
  EXPECT_THROW(d.quotient(std::vector<double>(m.num_vertices(), 0.0)), InvalidInput);
  EXPECT_THROW(d.quotient(std::vector<double>(3, 1.0)), InvalidInput);
}

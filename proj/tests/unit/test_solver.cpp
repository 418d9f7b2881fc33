#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "robin/discretization.hpp"
#include "robin/errors.hpp"
#include "robin/solver.hpp"

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

// Smallest eigenvalue of the quadratic forms of a p = 2 discretization,
// assembled by polarization and solved densely.
double dense_lambda(const FemDiscretization &d, bool dirichlet = false)
{
  const std::size_t n = d.size();
  auto form = [&](const std::vector<double> &u)
  {
    const EnergyParts e = d.evaluate(u, 0.0, {}, {});
    return std::pair{d.numerator(e), e.mass};
  };
  std::vector<double> diagN(n), diagM(n);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
  {
    u[i] = 1.0;
    std::tie(diagN[i], diagM[i]) = form(u);
    u[i] = 0.0;
  }
  Eigen::MatrixXd A(n, n), B(n, n);
  for (std::size_t i = 0; i < n; ++i)
  {
    A(i, i) = diagN[i];
    B(i, i) = diagM[i];
    for (std::size_t j = i + 1; j < n; ++j)
    {
      u[i] = u[j] = 1.0;
      const auto [N, M] = form(u);
      u[i] = u[j] = 0.0;
      A(i, j) = A(j, i) = 0.5 * (N - diagN[i] - diagN[j]);
      B(i, j) = B(j, i) = 0.5 * (M - diagM[i] - diagM[j]);
    }
  }
  std::vector<int> keep;
  for (std::size_t i = 0; i < n; ++i)
  {
    if (!dirichlet || !d.pinned()[i])
    {
      keep.push_back(static_cast<int>(i));
    }
  }
  const Eigen::MatrixXd Ak = A(keep, keep), Bk = B(keep, keep);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ak, Bk);
  return es.eigenvalues().minCoeff();
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, 1.0);
  std::vector<double> u(n);
  for (double &x : u)
  {
    x = d(rng);
  }
  return u;
}

}  // namespace

TEST(Solver, MatchesDenseEigensolverAtP2)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.2);
  for (double beta : {0.3, 1.0, 10.0})
  {
    const ProblemSpec s = spec(2.0, beta, Potential::quadratic({0, 0, 0, 1, 0, 0}));
    const FemDiscretization d(s, m);
    const EigenResult r = solve_first_eigenpair(s, m);
    ASSERT_TRUE(r.converged) << r.message;
    const double ref = dense_lambda(d);
    EXPECT_NEAR(r.lambda, ref, 1e-9 * ref) << beta;
  }
}

TEST(Solver, DirichletMatchesDenseEigensolver)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const ProblemSpec s = spec(2.0, 1.0);
  const EigenResult r = solve_dirichlet_first(s, m);
  ASSERT_TRUE(r.converged);
  const double ref = dense_lambda(FemDiscretization(s, m, true), true);
  EXPECT_NEAR(r.lambda, ref, 1e-9 * ref);
  EXPECT_GT(r.lambda, solve_first_eigenpair(s, m).lambda);
}

TEST(Solver, EigenfunctionIsSignedAndNormalized)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  for (double p : {2.0, 2.5, 1.6})
  {
    const ProblemSpec s = spec(p, 1.0, Potential::sine(1.0, 1.0, 0));
    const EigenResult r = solve_first_eigenpair(s, m);
    ASSERT_TRUE(r.converged) << p << " " << r.message;
    EXPECT_LE(r.residual, SolverOptions{}.tol_residual * 10) << p;
    const double umin = *std::min_element(r.u.begin(), r.u.end());
    EXPECT_GT(umin, 0.0) << p;
    const EnergyParts e = FemDiscretization(s, m).evaluate(r.u, 0.0, {}, {});
    EXPECT_NEAR(e.mass, 1.0, 1e-12);
    EXPECT_NEAR(FemDiscretization(s, m).quotient(r.u), r.lambda, 1e-12 * r.lambda);
    const EigenResult sup = to_sup_unit(r);
    EXPECT_NEAR(*std::max_element(sup.u.begin(), sup.u.end()), 1.0, 1e-15);
  }
}

TEST(Solver, LambdaBoundsEveryQuotient)
{
  const Mesh m = generate_disk_mesh(1.0, 0.15);
  const ProblemSpec s = spec(2.5, 1.0);
  const FemDiscretization d(s, m);
  const double lambda = solve_first_eigenpair(s, m).lambda;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
  {
    std::vector<double> v = random_vector(m.num_vertices(), seed);
    const double q = d.quotient(v);
    EXPECT_GE(q, lambda * (1 - 1e-10));
    for (double &x : v)
    {
      x = std::abs(x);
    }
    EXPECT_LE(d.quotient(v), q * (1 + 1e-14)) << "quotient of |v| exceeds quotient of v";
  }
}

TEST(Solver, IteratesNonIncreasingPerStage)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  for (double p : {2.0, 2.5, 1.7})
  {
    const EigenResult r = solve_first_eigenpair(spec(p, 1.0), m);
    ASSERT_FALSE(r.stages.empty());
    for (const StageRecord &st : r.stages)
    {
      for (std::size_t k = 1; k < st.trace.size(); ++k)
      {
        ASSERT_LE(st.trace[k], st.trace[k - 1]) << p << " eps " << st.epsilon << " step " << k;
      }
    }
    EXPECT_EQ(r.stages.back().epsilon, 0.0);
  }
}

TEST(Solver, RegularizedGradientMatchesFiniteDifferences)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const ProblemSpec s = spec(2.5, 1.0, Potential::constant(0.5));
  const FemDiscretization d(s, m);
  const std::vector<double> u = random_vector(m.num_vertices(), 11, 0.3);
  std::vector<double> g(u.size());
  const double eps = 0.1;
  regularized_quotient_gradient(d, u, eps, g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 10; ++k)
  {
    std::vector<double> dir(u.size());
    for (double &x : dir)
    {
      x = nd(rng);
    }
    const double h = 1e-5;
    std::vector<double> a = u, b = u;
    double analytic = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
    {
      a[i] += h * dir[i];
      b[i] -= h * dir[i];
      analytic += g[i] * dir[i];
    }
    std::vector<double> scratch(u.size());
    const double fa = regularized_quotient_gradient(d, a, eps, scratch);
    const double fb = regularized_quotient_gradient(d, b, eps, scratch);
    const double fd = (fa - fb) / (2 * h);
    EXPECT_LE(std::abs(analytic - fd), 1e-5 * std::abs(fd)) << k;
  }
}

TEST(Solver, P2InsensitiveToEpsilon)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  const FemDiscretization d(spec(2.0, 1.0), m);
  const std::vector<double> u = random_vector(m.num_vertices(), 2);
  std::vector<double> g0(u.size()), g1(u.size());
  const double q0 = regularized_quotient_gradient(d, u, 0.0, g0);
  const double q1 = regularized_quotient_gradient(d, u, 1e-10, g1);
  EXPECT_EQ(q0, q1);
  EXPECT_EQ(g0, g1);
  EXPECT_EQ(default_epsilon_schedule(d), std::vector<double>{0.0});
}

TEST(Solver, DeterministicAndWarmStartConsistent)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  const ProblemSpec s = spec(2.5, 2.0);
  const EigenResult a = solve_first_eigenpair(s, m);
  const EigenResult b = solve_first_eigenpair(s, m);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.u, b.u);
  const EigenResult w = solve_first_eigenpair(s.with_beta(2.01), m, {}, a.u);
  ASSERT_TRUE(w.converged);
  const EigenResult cold = solve_first_eigenpair(s.with_beta(2.01), m);
  EXPECT_NEAR(w.lambda, cold.lambda, 1e-9 * cold.lambda);
  EXPECT_GT(w.lambda, a.lambda);
}

TEST(Solver, InvalidOptionsRejected)
{
  SolverOptions o;
  o.tol_lambda = -1.0;
  EXPECT_THROW(validate_options(o), InvalidInput);
  SolverOptions s;
  s.epsilon_schedule = {0.1, 0.2, 0.0};
  EXPECT_THROW(validate_options(s), InvalidInput);
  SolverOptions z;
  z.max_iter = 0;
  EXPECT_THROW(validate_options(z), InvalidInput);
}

TEST(Solver, MeshDomainMismatchRejected)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  ProblemSpec s = spec(2.0, 1.0);
  s.domain = DomainRef::ellipse(1.5, 1.0);
  EXPECT_THROW(solve_first_eigenpair(s, m), InvalidInput);
}

TEST(Solver, WeakResidualIsScaleInvariant)
{
  const Mesh m = generate_disk_mesh(1.0, 0.15);
  const ProblemSpec s = spec(2.5, 1.0);
  const FemDiscretization d(s, m);
  const std::vector<double> u = random_vector(m.num_vertices(), 8, 0.2);
  std::vector<double> v = u;
  for (double &x : v)
  {
    x *= 7.0;
  }
  const double lam = d.quotient(u);
  EXPECT_NEAR(weak_residual(d, u, lam), weak_residual(d, v, lam), 1e-12 * weak_residual(d, u, lam));
}

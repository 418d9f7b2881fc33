#include <gtest/gtest.h>

#include <cmath>

#include "robin/errors.hpp"
#include "robin/potential_calculus.hpp"

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

const Mesh &disk()
{
  static const Mesh m = generate_disk_mesh(1.0, 0.1);
  return m;
}

}  // namespace

TEST(Potential, ShiftIdentity)
{
  const Potential V = Potential::quadratic({0, 0.5, 0, 1, 0, 0});
  for (double p : {2.0, 2.5})
  {
    for (double c : {-3.0, 0.5, 5.0})
    {
      const PotentialComparison r = shift_identity_check(V, c, spec(p, 1.0, V), disk());
      EXPECT_TRUE(r.pass) << p << " " << c;
      EXPECT_NEAR(r.lambda2 - r.lambda1, c, 1e-8);
    }
  }
}

TEST(Potential, SupOverQuadraturePoints)
{
  const Potential V = Potential::quadratic({-2.0, 0, 0, 1, 0, 0});
  const double s = potential_sup(V, disk());
  EXPECT_LE(s, 2.0);
  EXPECT_GT(s, 1.99);
  EXPECT_NEAR(potential_sup_difference(V, V.shifted(0.75), disk()), 0.75, 1e-14);
  EXPECT_TRUE(potentials_ordered(V, V.shifted(0.1), disk()));
  EXPECT_FALSE(potentials_ordered(V.shifted(0.1), V, disk()));
}

TEST(Potential, MonotoneInOrderedPairs)
{
  const auto pairs = ordered_potential_pairs(6, 7);
  ASSERT_EQ(pairs.size(), 6u);
  const auto res = monotonicity_suite(pairs, spec(2.5, 1.0), disk());
  for (std::size_t k = 0; k < res.size(); ++k)
  {
    EXPECT_TRUE(potentials_ordered(pairs[k].first, pairs[k].second, disk()));
    EXPECT_TRUE(res[k].pass) << k;
    EXPECT_LE(res[k].lambda1, res[k].lambda2 + res[k].slack);
  }
  EXPECT_THROW(monotonicity_check(Potential::constant(1.0), Potential::constant(0.0),
                                  spec(2.0, 1.0), disk()),
               InvalidInput);
}

TEST(Potential, LipschitzInSupNorm)
{
  const auto pairs = random_potential_pairs(6, 3);
  const auto res = continuity_suite(pairs, spec(2.0, 1.0), disk());
  for (std::size_t k = 0; k < res.size(); ++k)
  {
    const double d = potential_sup_difference(pairs[k].first, pairs[k].second, disk());
    EXPECT_TRUE(res[k].pass) << k;
    EXPECT_LE(std::abs(res[k].lambda1 - res[k].lambda2), d + res[k].slack);
  }
}

TEST(Potential, PairGeneratorsAreSeeded)
{
  const auto a = random_potential_pairs(3, 42), b = random_potential_pairs(3, 42);
  for (std::size_t k = 0; k < a.size(); ++k)
  {
    EXPECT_EQ(a[k].first.describe(), b[k].first.describe());
    EXPECT_EQ(a[k].second.describe(), b[k].second.describe());
  }
  EXPECT_NE(random_potential_pairs(1, 1)[0].first.describe(),
            random_potential_pairs(1, 2)[0].first.describe());
}

TEST(Coercivity, NoViolations)
{
  const ProblemSpec s = spec(2.5, 1.0, Potential::quadratic({0, 0, 0, 1, 0, 0}));
  const CoercivityReport r = coercivity_check(s, disk(), 50, 5);
  EXPECT_EQ(r.violations, 0);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.C, 0.5 * r.lambda1 / (r.lambda1 + r.V_sup), 1e-15);
  EXPECT_NEAR(r.M, 0.5 * std::min(r.C, r.lambda1), 1e-15);
  EXPECT_GT(r.worst_margin, 0.0);
}

TEST(Coercivity, RequiresPositiveEigenvalue)
{
  EXPECT_THROW(coercivity_check(spec(2.0, 1.0, Potential::constant(-10.0)), disk(), 10, 1),
               InvalidInput);
}

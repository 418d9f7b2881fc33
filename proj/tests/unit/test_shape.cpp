#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "robin/beta_calculus.hpp"
#include "robin/errors.hpp"
#include "robin/shape_calculus.hpp"

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
  static const Mesh m = generate_disk_mesh(1.0, 0.05);
  return m;
}

}  // namespace

TEST(ShapeDerivative, TermsSumToTotal)
{
  const ProblemSpec s = spec(2.5, 1.0, Potential::quadratic({0, 0, 0, 1, 0, 0}));
  const EigenResult r = solve_first_eigenpair(s, disk());
  const ShapeDerivativeReport f = shape_derivative_formula(r, s, disk(), VectorField::stretch_x());
  EXPECT_NEAR(f.terms.total(), f.formula_value, 1e-14 * std::abs(f.terms.grad_term));
  const ShapeDerivativeReport z = shape_derivative_formula(solve_first_eigenpair(spec(2.5, 1.0), disk()),
                                                           spec(2.5, 1.0), disk(),
                                                           VectorField::stretch_x());
  EXPECT_EQ(z.terms.potential_term, 0.0);
}

TEST(ShapeDerivative, DilationOfDiskMatchesBessel)
{
  // lambda((1 + t) D, beta) = lambda(D, (1 + t) beta) / (1 + t)^2 at p = 2.
  const ProblemSpec s = spec(2.0, 1.0);
  const EigenResult r = solve_first_eigenpair(s, disk());
  const double h = 1e-4;
  const double exact =
      -2.0 * oracle::disk_robin_lambda(1.0) +
      (oracle::disk_robin_lambda(1.0 + h) - oracle::disk_robin_lambda(1.0 - h)) / (2 * h);
  const ShapeDerivativeReport f = shape_derivative_formula(r, s, disk(), VectorField::dilation());
  EXPECT_NEAR(f.formula_value, exact, 1e-2 * std::abs(exact));
  EXPECT_NEAR(dilation_prediction(r, s, disk()), exact, 1e-2 * std::abs(exact));
}

TEST(ShapeDerivative, FormulaMatchesFiniteDifferences)
{
  const Mesh ellipse = generate_ellipse_mesh(1.5, 1.0, 0.1);
  const ProblemSpec s = spec(2.5, 1.0, Potential::quadratic({0, 0, 0, 1, 0, 0}));
  const ShapeDerivativeReport r = shape_derivative_report(s, ellipse, VectorField::dilation(), 1e-3);
  EXPECT_LE(r.rel_err, 3e-2);
  EXPECT_TRUE(std::isfinite(r.fd_value));
}

TEST(ShapeDerivative, TranslationIsInvariant)
{
  const ProblemSpec s = spec(2.5, 1.0);
  const EigenResult r = solve_first_eigenpair(s, disk());
  for (Vec2 dir : {Vec2{1.0, 0.0}, Vec2{0.6, -0.8}})
  {
    const ShapeDerivativeReport f =
        shape_derivative_formula(r, s, disk(), VectorField::translation(dir));
    EXPECT_LE(std::abs(f.formula_value), 1e-3 * r.lambda);
  }
  // A rotation of a disk is a reparametrization too.
  const ShapeDerivativeReport rot = shape_derivative_formula(r, s, disk(), VectorField::rotation());
  EXPECT_LE(std::abs(rot.formula_value), 1e-3 * r.lambda);
}

TEST(ShapeDerivative, AltFormAgreesAtP2)
{
  const ProblemSpec s = spec(2.0, 1.0);
  const EigenResult r = solve_first_eigenpair(s, disk());
  ShapeFormulaOptions o;
  o.recovery = GradientRecovery::Patch;
  const double primary = shape_derivative_formula(r, s, disk(), VectorField::dilation(), o).formula_value;
  const double alt = shape_derivative_alt_form(r, s, disk(), VectorField::dilation(), o);
  EXPECT_NEAR(alt, primary, 1e-2 * std::abs(primary));
}

TEST(ShapeDerivative, PatchRecoveryExactForQuadratics)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.1);
  std::vector<double> u(m.num_vertices());
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    const Vec2 x = m.vertices()[i];
    u[i] = 1.0 + 2.0 * x.x - x.y + 0.5 * x.x * x.x + x.x * x.y - 0.25 * x.y * x.y;
  }
  const std::vector<Vec2> g = patch_recovered_gradients(m, u);
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    if (!m.is_boundary_vertex(static_cast<int>(i)))
    {
      continue;
    }
    const Vec2 x = m.vertices()[i];
    EXPECT_NEAR(g[i].x, 2.0 + x.x + x.y, 1e-9);
    EXPECT_NEAR(g[i].y, -1.0 + x.x - 0.5 * x.y, 1e-9);
  }
}

TEST(Hadamard, DilationVolumeSlopeIsTwiceArea)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  EXPECT_NEAR(divergence_integral(m, VectorField::dilation()), 2.0 * m.area(), 1e-12);
  const HadamardReport v = hadamard_volume_expansion_check(m, VectorField::dilation(), {4e-3, 2e-3, 1e-3});
  EXPECT_NEAR(v.predicted, 2.0 * m.area(), 1e-12);
  // area((1 + t) D_h) = (1 + t)^2 area(D_h): forward slope 2 area + t area.
  for (const ExpansionRow &r : v.rows)
  {
    EXPECT_NEAR(r.slope, (2.0 + r.t) * m.area(), 1e-9);
  }
  EXPECT_NEAR(v.predicted, 2.0 * M_PI, 5e-3 * 2.0 * M_PI);
}

TEST(Hadamard, GenericFieldRemainderIsSecondOrder)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.1);
  const VectorField v = VectorField::analytic(
      [](Vec2 x) { return Vec2{std::sin(x.x + 0.5 * x.y), 0.3 * x.x * x.x + x.y}; }, "generic");
  const HadamardReport r = hadamard_volume_expansion_check(m, v, {4e-3, 2e-3, 1e-3});
  ASSERT_EQ(r.remainder_ratios.size(), 2u);
  for (double q : r.remainder_ratios)
  {
    EXPECT_GE(q, 3.0);
    EXPECT_LE(q, 5.0);
  }
}

TEST(Hadamard, PerimeterDerivativeIsCurvatureFlux)
{
  const Mesh m = generate_disk_mesh(1.0, 0.05);
  // x.eta on a chord is its distance to the center, so the flux is 2 area / R.
  EXPECT_NEAR(curvature_flux_integral(m, VectorField::dilation()), 2.0 * m.area(), 1e-12);
  const HadamardReport s = hadamard_surface_expansion_check(m, VectorField::dilation(), {4e-3, 2e-3, 1e-3});
  EXPECT_LE(s.slope_rel_err, 5e-3);
  EXPECT_NEAR(s.rows.back().central_slope, 2.0 * M_PI, 5e-3 * 2.0 * M_PI);
}

TEST(BallSign, UnitDiskDecreases)
{
  const BallSignReport r = ball_monotonicity_sign_check(2.0, 1.0, 1.0, 2, nullptr);
  EXPECT_TRUE(r.condition_a);
  EXPECT_TRUE(r.hypotheses_met);
  EXPECT_LT(r.integrand, 0.0);
  EXPECT_LT(r.derivative, 0.0);
  EXPECT_EQ(r.verdict, "decreasing");
  // Coefficient from the closed form with the Bessel eigenvalue.
  const double lam = oracle::disk_robin_lambda(1.0);
  EXPECT_NEAR(r.coefficient, -1.0 - lam + 1.0, 1e-6);
}

TEST(BallSign, WeakRobinParameterMakesNoClaim)
{
  const BallSignReport r = ball_monotonicity_sign_check(2.0, 0.1, 0.5, 2, nullptr);
  EXPECT_FALSE(r.condition_a);
  EXPECT_FALSE(r.hypotheses_met);
  EXPECT_EQ(r.predicted_sign, 0);
  EXPECT_EQ(r.verdict, "hypotheses not met");
}

TEST(BallSign, ThreeBallMatchesClosedForm)
{
  const double lam = oracle::ball3_robin_lambda(2.0);
  const BallSignReport r = ball_monotonicity_sign_check(2.0, 2.0, 1.0, 3, nullptr);
  EXPECT_NEAR(r.lambda, lam, 1e-5 * lam);
  EXPECT_NEAR(r.coefficient, -4.0 - lam + 4.0, 1e-4);
  EXPECT_LT(r.integrand, 0.0);
}

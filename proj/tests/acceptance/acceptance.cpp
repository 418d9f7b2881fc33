// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "robin/beta_calculus.hpp"
#include "robin/errors.hpp"
#include "robin/experiment.hpp"
#include "robin/potential_calculus.hpp"
#include "robin/radial.hpp"
#include "robin/shape_calculus.hpp"

using namespace robin;

namespace
{

struct Verdict
{
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string &what)
  {
    if (!ok)
    {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

ProblemSpec spec(double p, double beta, Potential V = {})
{
  ProblemSpec s;
  s.p = p;
  s.beta = beta;
  s.potential = V;
  s.domain = DomainRef::any_mesh();
  return s;
}

Potential x1_squared()
{
  return Potential::quadratic({0, 0, 0, 1, 0, 0});
}

double rel(double a, double b)
{
  return std::abs(a - b) / std::abs(b);
}

void criterion1(Verdict &v)
{
  const double exact = oracle::disk_robin_lambda(1.0);
  ProblemSpec s = spec(2.0, 1.0);
  s.domain = DomainRef::disk(1.0);
  const ConvergenceStudy st = convergence_study(s, {0.1, 0.05, 0.025});
  const double fem = rel(st.extrapolated, exact);
  const EigenResult r = solve_radial_first(2.0, 1.0, nullptr, 1.0, 2, 10000);
  const double radial = rel(r.lambda, exact);
  v.detail << "bessel=" << exact << " fem(h=.1,.05,.025)=" << st.lambdas[0] << "," << st.lambdas[1]
           << "," << st.lambdas[2] << " richardson=" << st.extrapolated << " rel=" << fem
           << " order=" << st.observed_order << " radial=" << r.lambda << " rel=" << radial << " ";
  v.require(fem <= 5e-3, "richardson vs bessel <= 0.5%");
  v.require(radial <= 1e-6, "radial vs bessel <= 1e-6");
  v.require(r.converged, "radial converged");
}

void criterion2(Verdict &v)
{
  const Mesh m = generate_disk_mesh(1.0, 0.05);
  const std::vector<double> betas = {0.5, 1, 2, 4, 8, 16, 32};
  const SweepReport r = beta_sweep(spec(2.0, 1.0), m, betas, {}, false);
  double gap4 = NAN, gap32 = NAN;
  v.detail << "lambda:";
  for (const SweepRow &row : r.rows)
  {
    v.detail << " " << row.lambda;
    if (row.beta == 4.0)
      gap4 = r.lambda_dirichlet - row.lambda;
    if (row.beta == 32.0)
      gap32 = r.lambda_dirichlet - row.lambda;
  }
  v.detail << " dirichlet=" << r.lambda_dirichlet << " gap(4)=" << gap4 << " gap(32)=" << gap32 << " ";
  v.require(r.all_converged && r.dirichlet_converged, "all solves converged");
  v.require(r.increasing, "strictly increasing");
  v.require(r.below_dirichlet, "below discrete dirichlet");
  v.require(gap32 < gap4, "gap(32) < gap(4)");
}

void criterion3(Verdict &v)
{
  const Mesh disk = generate_disk_mesh(1.0, 0.05);
  const Mesh ellipse = generate_ellipse_mesh(1.5, 1.0, 0.05);
  struct Case
  {
    const char *name;
    const Mesh *mesh;
    ProblemSpec s;
  };
  const Case cases[] = {{"disk", &disk, spec(2.0, 1.0)},
                        {"ellipse", &ellipse, spec(2.5, 1.0, x1_squared())}};
  for (const Case &c : cases)
  {
    const DerivativeReport d = dbeta_report(c.s, *c.mesh, {});
    v.detail << c.name << ": formula=" << d.formula_value << " fd=" << d.fd_value
             << " rel=" << d.rel_err << " ";
    v.require(d.rel_err <= 1e-2, std::string(c.name) + " formula vs fd <= 1e-2");
    int sandwich_ok = 0, total = 0;
    for (auto [b, b1] : {std::pair{0.5, 1.0}, {1.0, 1.1}, {2.0, 4.0}, {4.0, 8.0}, {8.0, 32.0}})
    {
      const SandwichResult s = sandwich_check(c.s, *c.mesh, b, b1);
      ++total;
      sandwich_ok += s.pass ? 1 : 0;
    }
    v.detail << "sandwich " << sandwich_ok << "/" << total << " ";
    v.require(sandwich_ok == total, std::string(c.name) + " sandwich");
  }
}

void criterion4(Verdict &v)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.05);
  double worst = 0.0;
  for (double p : {2.0, 3.0})
  {
    for (double t : {0.5, 2.0, 3.0})
    {
      const ScalingReport r = scaling_identity_check(spec(p, 1.0), m, t);
      worst = std::max(worst, r.rel_diff);
      v.require(r.rel_diff <= 1e-8, "scaling p=" + std::to_string(p) + " t=" + std::to_string(t));
    }
    const DomainMonotonicityReport c = scaled_domain_monotonicity_check(spec(p, 1.0), m, 2.0);
    v.detail << "p=" << p << " chain " << c.lambda_scaled << " <= " << c.middle << " <= "
             << c.lambda_base << " ";
    v.require(c.chain_holds, "chain at t=2");
  }
  v.detail << "max rel diff=" << worst << " ";
}

void criterion5(Verdict &v)
{
  const Mesh disk = generate_disk_mesh(1.0, 0.05);
  const std::vector<double> ts = {4e-3, 2e-3, 1e-3};
  const HadamardReport vol = hadamard_volume_expansion_check(disk, VectorField::dilation(), ts);
  const double vol_slope = vol.rows.back().central_slope;
  const double vol_err = rel(vol_slope, 2.0 * M_PI);
  const HadamardReport per = hadamard_surface_expansion_check(disk, VectorField::dilation(), ts);
  const double per_slope = per.rows.back().central_slope;
  const double per_err = rel(per_slope, per.predicted);
  v.detail << "volume slope=" << vol_slope << " rel(2pi)=" << vol_err << " perimeter slope="
           << per_slope << " curvature integral=" << per.predicted << " rel=" << per_err
           << " rel(2pi)=" << rel(per.predicted, 2.0 * M_PI) << " ";
  v.require(vol_err <= 5e-3, "volume slope vs 2pi");
  v.require(per_err <= 5e-3, "perimeter slope vs curvature integral");
  v.require(rel(per.predicted, 2.0 * M_PI) <= 5e-3, "curvature integral vs 2pi");

  const Mesh ellipse = generate_ellipse_mesh(1.5, 1.0, 0.05);
  const VectorField generic = VectorField::analytic(
      [](Vec2 x) { return Vec2{std::sin(x.x + 0.5 * x.y), 0.3 * x.x * x.x + x.y}; }, "generic");
  const HadamardReport g = hadamard_volume_expansion_check(ellipse, generic, ts);
  v.detail << "generic remainder ratios";
  for (double q : g.remainder_ratios)
  {
    v.detail << " " << q;
    v.require(q >= 3.0 && q <= 5.0, "remainder ratio in [3,5]");
  }
  v.detail << " ";
}

void criterion6(Verdict &v)
{
  const double h = 0.025;
  const Mesh disk = generate_disk_mesh(1.0, h);
  const Mesh ellipse = generate_ellipse_mesh(1.5, 1.0, h);
  const std::pair<const char *, const Mesh *> domains[] = {{"disk", &disk}, {"ellipse", &ellipse}};
  const std::pair<const char *, VectorField> fields[] = {{"dilation", VectorField::dilation()},
                                                         {"stretch-x", VectorField::stretch_x()}};
  ShapeFormulaOptions patch;
  patch.recovery = GradientRecovery::Patch;
  double worst_fd = 0.0, worst_alt = 0.0, worst_dil = 0.0, worst_tr = 0.0;
  int alt_checked = 0;
  for (const auto &[dname, mesh] : domains)
  {
    for (double p : {2.0, 2.5})
    {
      for (bool with_v : {false, true})
      {
        const ProblemSpec s = spec(p, 1.0, with_v ? x1_squared() : Potential());
        const EigenResult base = solve_first_eigenpair(s, *mesh);
        const std::string tag = std::string(dname) + " p=" + std::to_string(p) + (with_v ? " V=x1^2" : " V=0");
        for (const auto &[fname, field] : fields)
        {
          const double fd = shape_derivative_fd(s, *mesh, field, 1e-3, {}, &base);
          const ShapeDerivativeReport f = shape_derivative_formula(base, s, *mesh, field);
          const double e = rel(f.formula_value, fd);
          worst_fd = std::max(worst_fd, e);
          v.require(e <= 3e-2, tag + " " + fname + " formula vs fd");
          try
          {
            const double primary = shape_derivative_formula(base, s, *mesh, field, patch).formula_value;
            const double alt = shape_derivative_alt_form(base, s, *mesh, field, patch);
            const double a = rel(alt, primary);
            worst_alt = std::max(worst_alt, a);
            ++alt_checked;
            v.require(a <= 1e-2, tag + " " + fname + " alt vs primary");
          }
          catch (const NumericalFailure &)
          {
            // Alt form singular at this configuration.
          }
          if (!with_v && field.tag() == VectorField::Tag::Dilation)
          {
            const double d = rel(f.formula_value, dilation_prediction(base, s, *mesh));
            worst_dil = std::max(worst_dil, d);
            v.require(d <= 2e-2, tag + " dilation identity");
          }
        }
        const ShapeDerivativeReport t =
            shape_derivative_formula(base, s, *mesh, VectorField::translation({0.6, 0.8}));
        const double tr = std::abs(t.formula_value) / std::abs(base.lambda);
        worst_tr = std::max(worst_tr, tr);
        v.require(tr <= 1e-3, tag + " translation");
      }
    }
  }
  v.detail << "h=" << h << " max rel(formula,fd)=" << worst_fd << " max translation/|lambda|="
           << worst_tr << " max dilation identity rel=" << worst_dil << " max alt rel=" << worst_alt
           << " over " << alt_checked << " nonsingular cases ";
}

void criterion7(Verdict &v)
{
  const Mesh m = generate_disk_mesh(1.0, 0.05);
  const ProblemSpec s = spec(2.5, 1.0, x1_squared());
  double worst_shift = 0.0;
  for (double c : {-2.0, 0.5, 5.0})
  {
    const PotentialComparison r = shift_identity_check(s.potential, c, s, m);
    worst_shift = std::max(worst_shift, std::abs(r.lambda2 - r.lambda1 - c));
  }
  v.require(worst_shift <= 1e-8, "shift identity");
  int mono = 0, cont = 0;
  for (const auto &r : monotonicity_suite(ordered_potential_pairs(20, 1), s, m))
    mono += r.pass ? 1 : 0;
  for (const auto &r : continuity_suite(random_potential_pairs(20, 2), s, m))
    cont += r.pass ? 1 : 0;
  const CoercivityReport co = coercivity_check(s, m, 200, 3);
  v.detail << "shift err=" << worst_shift << " monotone " << mono << "/20 lipschitz " << cont
           << "/20 coercivity violations " << co.violations << "/200 (C=" << co.C << " M=" << co.M
           << " worst margin=" << co.worst_margin << ") ";
  v.require(mono == 20, "monotonicity");
  v.require(cont == 20, "lipschitz");
  v.require(co.violations == 0, "coercivity");
}

void criterion8(Verdict &v)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.2, 1.2);
  double worst_grad = 0.0;
  for (double p : {1.7, 2.5, 3.0})
  {
    const FemDiscretization d(spec(p, 1.0, x1_squared()), m);
    std::vector<double> u(m.num_vertices());
    for (double &x : u)
      x = ud(rng);
    std::vector<double> g(u.size()), scratch(u.size());
    const double eps = 0.05;
    regularized_quotient_gradient(d, u, eps, g);
    for (int k = 0; k < 10; ++k)
    {
      std::vector<double> a = u, b = u;
      double analytic = 0.0;
      const double step = 1e-5;
      for (std::size_t i = 0; i < u.size(); ++i)
      {
        const double dir = nd(rng);
        a[i] += step * dir;
        b[i] -= step * dir;
        analytic += g[i] * dir;
      }
      const double fd = (regularized_quotient_gradient(d, a, eps, scratch) -
                         regularized_quotient_gradient(d, b, eps, scratch)) /
                        (2 * step);
      worst_grad = std::max(worst_grad, rel(analytic, fd));
    }
  }
  v.require(worst_grad <= 1e-5, "gradient vs fd");

  int increases = 0, stages = 0;
  for (double p : {1.7, 2.0, 2.5, 3.0})
  {
    const EigenResult r = solve_first_eigenpair(spec(p, 1.0, x1_squared()), m);
    for (const StageRecord &st : r.stages)
    {
      ++stages;
      for (std::size_t k = 1; k < st.trace.size(); ++k)
        increases += st.trace[k] > st.trace[k - 1] ? 1 : 0;
    }
  }
  v.require(increases == 0, "iterates non-increasing");

  SolverOptions zero, tiny;
  zero.epsilon_schedule = {0.0};
  tiny.epsilon_schedule = {1e-10};
  const ProblemSpec s2 = spec(2.0, 1.0, x1_squared());
  const double l0 = solve_first_eigenpair(s2, m, zero).lambda;
  const double l1 = solve_first_eigenpair(s2, m, tiny).lambda;
  const double insens = rel(l1, l0);
  v.require(insens <= 1e-10, "p=2 insensitive to eps");
  v.detail << "max gradient rel err=" << worst_grad << " trace increases=" << increases << " over "
           << stages << " stages; p=2 lambda(eps=0)=" << l0 << " lambda(eps=1e-10)=" << l1
           << " rel=" << insens << " ";
}

void criterion9(Verdict &v)
{
  const BallSignReport r = ball_monotonicity_sign_check(2.0, 1.0, 1.0, 2, nullptr);
  v.detail << "lambda=" << r.lambda << " coefficient=" << r.coefficient << " integrand="
           << r.integrand << " derivative=" << r.derivative << " condition_a=" << r.condition_a
           << " verdict=" << r.verdict << " ";
  v.require(r.integrand < 0.0, "integrand negative");
  v.require(r.condition_a, "condition (a) holds");
  v.require(r.derivative < 0.0, "derivative negative for outward v");
}

}  // namespace

int main()
{
  const std::pair<int, std::function<void(Verdict &)>> criteria[] = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  bool all = true;
  for (const auto &[id, run] : criteria)
  {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try
    {
      run(v);
    }
    catch (const std::exception &e)
    {
      v.pass = false;
      v.detail << "[exception: " << e.what() << "] ";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s (%.1fs): %s\n", id, v.pass ? "PASS" : "FAIL", secs,
                v.detail.str().c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}

#include "robin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "robin/errors.hpp"

namespace robin
{

namespace
{

using Vector = std::vector<double>;

constexpr int kMaxStalledSteps = 50;
constexpr double kRoundingSafety = 30.0;

double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

double max_abs(std::span<const double> a)
{
  double m = 0.0;
  for (double x : a)
  {
    m = std::max(m, std::abs(x));
  }
  return m;
}

double gradient_scale(const Discretization &disc)
{
  return std::pow(disc.measure(), -1.0 / disc.p()) / disc.length_scale();
}

// Scales u to unit p-mass.
void normalize(const Discretization &disc, Vector &u)
{
  const EnergyParts e = disc.evaluate(u, 0.0, {}, {});
  if (!(e.mass > 0.0) || !std::isfinite(e.mass))
  {
    throw NumericalFailure("iterate lost all mass");
  }
  const double s = std::pow(e.mass, -1.0 / disc.p());
  for (double &x : u)
  {
    x *= s;
  }
}

// Residual of the stage gradient in the units of weak_residual().
double stage_residual(const Discretization &disc, std::span<const double> u,
                      std::span<const double> g)
{
  const auto &m = disc.test_masses();
  const auto &pinned = disc.pinned();
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
  {
    if (!pinned[i])
    {
      r = std::max(r, std::abs(g[i]) / m[i]);
    }
  }
  return r / (disc.p() * std::pow(max_abs(u), disc.p() - 1.0));
}

class Preconditioner
{
public:
  Preconditioner(const Discretization &disc) : disc_(disc) {}

  void factorize(const Eigen::SparseMatrix<double> &K)
  {
    if (!analyzed_)
    {
      ldlt_.analyzePattern(K);
      analyzed_ = true;
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success)
    {
      throw NumericalFailure("preconditioner factorization failed");
    }
  }

  void apply(std::span<const double> g, Vector &z) const
  {
    const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    const Eigen::VectorXd zv = ldlt_.solve(gv);
    z.assign(zv.data(), zv.data() + zv.size());
    const auto &pinned = disc_.pinned();
    for (std::size_t i = 0; i < z.size(); ++i)
    {
      if (pinned[i])
      {
        z[i] = 0.0;
      }
    }
  }

private:
  const Discretization &disc_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

struct Trial
{
  double alpha = 0.0;
  Vector u;
  double value = INFINITY;
  Vector grad;
  double slope = 0.0;
  double change = INFINITY;  // Phi(trial) - Phi(current)
};

class StageRunner
{
public:
  StageRunner(const Discretization &disc, const SolverOptions &opts, double eps, double tol_l,
              double tol_r)
    : disc_(disc), opts_(opts), eps_(eps), tol_l_(tol_l), tol_r_(tol_r), tol_r_requested_(tol_r),
      pre_(disc)
  {
  }

  StageRecord run(Vector &u, int max_iter)
  {
    StageRecord rec;
    rec.epsilon = eps_;
    const std::size_t n = u.size();
    const double floor = 1e-2 * gradient_scale(disc_);

    Vector g(n), z(n), d(n), g_prev(n);
    double phi = value_and_gradient(u, g);
    rec.residual = stage_residual(disc_, u, g);
    if (opts_.record_trace)
    {
      rec.trace.push_back(phi);
    }
    refresh(u, floor);
    rec.residual_tolerance = tol_r_;
    if (rec.residual <= tol_r_)
    {
      rec.value = phi;
      rec.converged = true;
      return rec;
    }

    pre_.apply(g, z);
    for (std::size_t i = 0; i < n; ++i)
    {
      d[i] = -z[i];
    }
    double gz = dot(g, z);
    double alpha = 1.0;
    bool steepest = true;
    int since_refresh = 0;
    int stalled = 0;

    for (int it = 1; it <= max_iter; ++it)
    {
      double slope = dot(g, d);
      if (!(slope < 0.0))
      {
        for (std::size_t i = 0; i < n; ++i)
        {
          d[i] = -z[i];
        }
        slope = -gz;
        steepest = true;
      }
      if (!(slope < 0.0))
      {
        break;
      }

      Trial best;
      const double mass = disc_.evaluate(u, 0.0, {}, {}).mass;
      if (!line_search(u, phi, mass, d, slope, alpha, best))
      {
        if (!steepest)
        {
          // Retry along the preconditioned gradient.
          for (std::size_t i = 0; i < n; ++i)
          {
            d[i] = -z[i];
          }
          steepest = true;
          --it;
          continue;
        }
        break;
      }
      rec.iterations = it;
      const double change = best.change;
      alpha = best.alpha;
      u = std::move(best.u);
      normalize(disc_, u);
      phi = value_and_gradient(u, g_prev);
      std::swap(g, g_prev);
      // g_prev now holds the previous gradient.
      // Accumulate the accepted changes rather than re-evaluating: near the
      // minimizer a fresh evaluation differs from the last one by rounding
      // only, while each accepted change is nonpositive by construction.
      if (opts_.record_trace)
      {
        rec.trace.push_back(rec.trace.back() + change);
      }
      rec.residual = stage_residual(disc_, u, g);
      if (std::abs(change) <= tol_l_ * std::max(std::abs(phi), 1.0) && rec.residual <= tol_r_)
      {
        rec.converged = true;
        break;
      }
      // Steps that only move within rounding of the current value.
      stalled = change < 0.0 ? 0 : stalled + 1;
      if (stalled > kMaxStalledSteps)
      {
        break;
      }

      bool restart = false;
      if (disc_.p() != 2.0 && ++since_refresh >= opts_.refresh_every)
      {
        refresh(u, floor);
        since_refresh = 0;
        restart = true;
      }
      pre_.apply(g, z);
      const double gz_new = dot(g, z);
      double beta_cg = 0.0;
      if (!restart)
      {
        beta_cg = std::max(0.0, (gz_new - dot(g_prev, z)) / gz);
      }
      gz = gz_new;
      for (std::size_t i = 0; i < n; ++i)
      {
        d[i] = -z[i] + beta_cg * d[i];
      }
      steepest = beta_cg == 0.0;
    }
    rec.value = phi;
    rec.residual_tolerance = tol_r_;
    return rec;
  }

private:
  // Refactors the preconditioner and raises the residual tolerance to the
  // rounding floor: one ulp of u_i moves residual i by about K_ii u_i / m_i.
  void refresh(std::span<const double> u, double floor)
  {
    const auto K = disc_.preconditioner(u, eps_, floor);
    pre_.factorize(K);
    const auto &m = disc_.test_masses();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < K.outerSize(); ++i)
    {
      if (!disc_.pinned()[i])
      {
        worst = std::max(worst, K.coeff(i, i) / m[i]);
      }
    }
    const double umax = max_abs(u);
    const double rounding = kRoundingSafety * std::numeric_limits<double>::epsilon() * worst *
                            umax / (disc_.p() * std::pow(umax, disc_.p() - 1.0));
    tol_r_ = std::max(tol_r_requested_, rounding);
  }

  double value_and_gradient(std::span<const double> u, Vector &g) const
  {
    g.resize(u.size());
    const double v = regularized_quotient_gradient(disc_, u, eps_, g);
    const auto &pinned = disc_.pinned();
    for (std::size_t i = 0; i < g.size(); ++i)
    {
      if (pinned[i])
      {
        g[i] = 0.0;
      }
    }
    return v;
  }

  Trial evaluate(std::span<const double> u, double phi, double mass, std::span<const double> d,
                 double alpha) const
  {
    Trial t;
    t.alpha = alpha;
    t.u.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
    {
      t.u[i] = std::abs(u[i] + alpha * d[i]);
    }
    if (max_abs(t.u) == 0.0)
    {
      return t;
    }
    t.value = value_and_gradient(t.u, t.grad);
    // Phi is 0-homogeneous, so the slope at the unnormalized point is fine.
    t.slope = dot(t.grad, d);
    if (eps_ == 0.0)
    {
      Vector delta(u.size());
      for (std::size_t i = 0; i < u.size(); ++i)
      {
        delta[i] = t.u[i] - u[i];
      }
      const EnergyParts c = disc_.change(u, delta);
      t.change = (disc_.numerator(c) - phi * c.mass) / (mass + c.mass);
    }
    else
    {
      t.change = t.value - phi;
    }
    return t;
  }

  // Secant step on the directional derivative, then backtracking. Accepts
  // only points that do not increase Phi.
  bool line_search(std::span<const double> u, double phi, double mass,
                   std::span<const double> d, double slope, double alpha0, Trial &best) const
  {
    const double c1 = opts_.sufficient_decrease;
    auto acceptable = [&](const Trial &t)
    {
      if (!std::isfinite(t.value) || !(t.change <= 0.0))
      {
        return false;
      }
      return t.change <= c1 * t.alpha * slope || t.change < 0.0 ||
             std::abs(t.slope) < 0.5 * std::abs(slope);
    };

    Trial a = evaluate(u, phi, mass, d, alpha0);
    Trial b;
    if (std::isfinite(a.value))
    {
      double alpha_s;
      if (a.slope > slope)
      {
        alpha_s = alpha0 * slope / (slope - a.slope);
      }
      else
      {
        alpha_s = 4.0 * alpha0;
      }
      alpha_s = std::clamp(alpha_s, 0.05 * alpha0, 8.0 * alpha0);
      b = evaluate(u, phi, mass, d, alpha_s);
    }
    Trial *pick = nullptr;
    for (Trial *t : {&a, &b})
    {
      if (acceptable(*t) && (!pick || t->change < pick->change))
      {
        pick = t;
      }
    }
    if (pick)
    {
      best = std::move(*pick);
      return true;
    }

    double alpha = std::min(alpha0, std::isfinite(b.value) ? b.alpha : alpha0);
    for (int k = 0; k < 40; ++k)
    {
      alpha *= opts_.backtrack;
      Trial t = evaluate(u, phi, mass, d, alpha);
      if (acceptable(t))
      {
        best = std::move(t);
        return true;
      }
    }
    return false;
  }

  const Discretization &disc_;
  const SolverOptions &opts_;
  double eps_, tol_l_, tol_r_, tol_r_requested_;
  Preconditioner pre_;
};

}  // namespace

std::vector<double> default_epsilon_schedule(const Discretization &disc)
{
  if (disc.p() == 2.0)
  {
    return {0.0};
  }
  std::vector<double> s;
  double eps = 0.1 * gradient_scale(disc);
  for (int k = 0; k < 8; ++k)
  {
    s.push_back(eps);
    eps *= 0.5;
  }
  s.push_back(0.0);
  return s;
}

void validate_options(const SolverOptions &opts)
{
  if (!(opts.tol_lambda > 0.0) || !(opts.tol_residual > 0.0))
  {
    throw InvalidInput("solver tolerances must be positive");
  }
  if (opts.max_iter < 1)
  {
    throw InvalidInput("max_iter must be positive");
  }
  if (!(opts.backtrack > 0.0 && opts.backtrack < 1.0))
  {
    throw InvalidInput("backtracking factor must lie in (0, 1)");
  }
  if (!(opts.sufficient_decrease > 0.0 && opts.sufficient_decrease < 0.5))
  {
    throw InvalidInput("sufficient-decrease constant must lie in (0, 0.5)");
  }
  if (!(opts.stage_tol_factor >= 1.0) || opts.refresh_every < 1)
  {
    throw InvalidInput("bad stage tolerance factor or refresh period");
  }
  for (std::size_t k = 0; k < opts.epsilon_schedule.size(); ++k)
  {
    const double e = opts.epsilon_schedule[k];
    if (!(e >= 0.0) || !std::isfinite(e))
    {
      throw InvalidInput("epsilon values must be finite and nonnegative");
    }
    if (k > 0 && !(e < opts.epsilon_schedule[k - 1]))
    {
      throw InvalidInput("epsilon schedule must be strictly decreasing");
    }
  }
}

double regularized_quotient_gradient(const Discretization &disc, std::span<const double> u,
                                     double eps, std::span<double> grad)
{
  const double p = disc.p();
  const std::size_t n = u.size();
  Vector gn(n), gm(n);
  if (eps == 0.0 || p == 2.0)
  {
    // N is p-homogeneous: Phi = N / D. F_eps does not depend on eps at p = 2.
    const EnergyParts e = disc.evaluate(u, 0.0, gn, gm);
    const double N = disc.numerator(e), D = e.mass;
    for (std::size_t i = 0; i < n; ++i)
    {
      grad[i] = (gn[i] - (N / D) * gm[i]) / D;
    }
    return N / D;
  }
  const double D = disc.evaluate(u, 0.0, {}, gm).mass;
  const double s = std::pow(D, -1.0 / p);
  Vector w(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    w[i] = s * u[i];
  }
  const EnergyParts e = disc.evaluate(w, eps, gn, {});
  const double gnu = dot(gn, u);
  const double c = s / (p * D);
  for (std::size_t i = 0; i < n; ++i)
  {
    grad[i] = s * gn[i] - c * gnu * gm[i];
  }
  return disc.numerator(e);
}

double weak_residual(const Discretization &disc, std::span<const double> u, double lambda)
{
  const std::size_t n = u.size();
  Vector gn(n), gm(n);
  disc.evaluate(u, 0.0, gn, gm);
  const double scale = std::pow(max_abs(u), disc.p() - 1.0);
  if (!(scale > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  const auto &m = disc.test_masses();
  const auto &pinned = disc.pinned();
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    if (!pinned[i])
    {
      r = std::max(r, std::abs(gn[i] - lambda * gm[i]) / m[i]);
    }
  }
  return r / (disc.p() * scale);
}

double weak_residual(const EigenResult &result, const ProblemSpec &spec, const Mesh &mesh)
{
  const FemDiscretization disc(spec, mesh, result.dirichlet);
  return weak_residual(disc, result.u, result.lambda);
}

EigenResult minimize_quotient(const Discretization &disc, const SolverOptions &opts,
                              std::span<const double> start)
{
  validate_options(opts);
  const std::size_t n = disc.size();
  const auto &pinned = disc.pinned();
  if (std::all_of(pinned.begin(), pinned.end(), [](char c) { return c != 0; }))
  {
    throw InvalidInput("no free coefficients");
  }
  Vector u;
  if (start.empty())
  {
    u.assign(n, 1.0);
  }
  else
  {
    if (start.size() != n)
    {
      throw InvalidInput("start vector does not match the discretization");
    }
    u.assign(start.begin(), start.end());
    for (double &x : u)
    {
      x = std::abs(x);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    if (pinned[i])
    {
      u[i] = 0.0;
    }
  }
  if (max_abs(u) == 0.0)
  {
    throw InvalidInput("degenerate test function");
  }
  normalize(disc, u);

  std::vector<double> schedule =
      opts.epsilon_schedule.empty() ? default_epsilon_schedule(disc) : opts.epsilon_schedule;
  if (!start.empty())
  {
    schedule = {schedule.back()};
  }

  EigenResult result;
  result.p = disc.p();
  result.dirichlet = std::any_of(pinned.begin(), pinned.end(), [](char c) { return c != 0; });
  for (std::size_t k = 0; k < schedule.size(); ++k)
  {
    const bool last = k + 1 == schedule.size();
    const double f = last ? 1.0 : opts.stage_tol_factor;
    StageRunner runner(disc, opts, schedule[k], opts.tol_lambda * f, opts.tol_residual * f);
    StageRecord rec = runner.run(u, opts.max_iter);
    result.iterations += rec.iterations;
    result.stages.push_back(std::move(rec));
  }
  const StageRecord &final_stage = result.stages.back();
  result.epsilon_final = final_stage.epsilon;
  result.lambda = disc.quotient(u, 0.0);
  result.residual = weak_residual(disc, u, result.lambda);
  result.converged = final_stage.converged;
  result.u = std::move(u);
  result.normalization = Normalization::LpUnit;
  if (!result.converged)
  {
    std::ostringstream os;
    os << "not converged after " << result.iterations << " iterations (residual "
       << result.residual << ")";
    result.message = os.str();
  }
  return result;
}

EigenResult solve_first_eigenpair(const ProblemSpec &spec, const Mesh &mesh,
                                  const SolverOptions &opts, std::span<const double> start)
{
  require_valid(spec);
  require_mesh_matches(spec, mesh);
  const FemDiscretization disc(spec, mesh);
  return minimize_quotient(disc, opts, start);
}

EigenResult solve_dirichlet_first(const ProblemSpec &spec, const Mesh &mesh,
                                  const SolverOptions &opts, std::span<const double> start)
{
  require_valid(spec);
  require_mesh_matches(spec, mesh);
  const FemDiscretization disc(spec, mesh, true);
  return minimize_quotient(disc, opts, start);
}

}  // namespace robin

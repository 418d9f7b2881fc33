#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "robin/errors.hpp"
#include "robin/experiment.hpp"
#include "robin/radial.hpp"

namespace robin
{

using nlohmann::json;

namespace
{

void check_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &what)
{
  if (!j.is_object())
  {
    throw InvalidInput(what + " must be a JSON object");
  }
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &[key, value] : j.items())
  {
    if (!ok.contains(key))
    {
      throw InvalidInput("unknown field \"" + key + "\" in " + what);
    }
  }
}

// Typed optional reads; a present field of the wrong type is an error.
template <class T>
void read(const json &j, const char *key, T &out, const std::string &what)
{
  if (!j.contains(key))
  {
    return;
  }
  try
  {
    out = j.at(key).get<T>();
  }
  catch (const json::exception &)
  {
    throw InvalidInput(std::string("field \"") + key + "\" in " + what + " has the wrong type");
  }
}

void require_positive(double x, const std::string &name)
{
  if (!(x > 0.0) || !std::isfinite(x))
  {
    throw InvalidInput(name + " must be positive");
  }
}

void require_positive_list(const std::vector<double> &xs, const std::string &name)
{
  for (double x : xs)
  {
    require_positive(x, name + " entries");
  }
}

}  // namespace

ExperimentConfig parse_config(const json &j)
{
  check_keys(j,
             {"experiment", "spec", "spec_file", "mesh", "solver", "field", "dbeta", "sweep",
              "scaling", "shape", "hadamard", "potential_check", "radial", "study", "thresholds"},
             "config");
  ExperimentConfig c;
  read(j, "experiment", c.experiment, "config");
  if (!c.experiment.empty() &&
      std::find(experiment_names().begin(), experiment_names().end(), c.experiment) ==
          experiment_names().end())
  {
    throw InvalidInput("unknown experiment \"" + c.experiment + "\"");
  }
  if (j.contains("spec"))
  {
    c.spec = j.at("spec").get<ProblemSpec>();
  }
  read(j, "spec_file", c.spec_file, "config");
  if (c.spec && !c.spec_file.empty())
  {
    throw InvalidInput("give either \"spec\" or \"spec_file\", not both");
  }

  if (j.contains("mesh"))
  {
    const json &m = j.at("mesh");
    const std::string w = "mesh settings";
    check_keys(m, {"file", "shape", "h", "refine", "R", "a", "b", "width", "height"}, w);
    read(m, "file", c.mesh.file, w);
    read(m, "shape", c.mesh.shape, w);
    read(m, "h", c.mesh.h, w);
    read(m, "refine", c.mesh.refine, w);
    read(m, "R", c.mesh.R, w);
    read(m, "a", c.mesh.a, w);
    read(m, "b", c.mesh.b, w);
    read(m, "width", c.mesh.width, w);
    read(m, "height", c.mesh.height, w);
  }
  require_positive(c.mesh.h, "mesh h");
  if (c.mesh.refine < 0)
  {
    throw InvalidInput("mesh refine must be non-negative");
  }

  if (j.contains("solver"))
  {
    const json &s = j.at("solver");
    const std::string w = "solver settings";
    check_keys(s,
               {"tol_lambda", "tol_residual", "max_iter", "epsilon_schedule", "seed",
                "refresh_every", "stage_tol_factor"},
               w);
    read(s, "tol_lambda", c.solver.tol_lambda, w);
    read(s, "tol_residual", c.solver.tol_residual, w);
    read(s, "max_iter", c.solver.max_iter, w);
    read(s, "epsilon_schedule", c.solver.epsilon_schedule, w);
    read(s, "seed", c.solver.seed, w);
    read(s, "refresh_every", c.solver.refresh_every, w);
    read(s, "stage_tol_factor", c.solver.stage_tol_factor, w);
  }
  validate_options(c.solver);

  if (j.contains("field"))
  {
    const json &f = j.at("field");
    const std::string w = "field settings";
    check_keys(f, {"kind", "direction", "file"}, w);
    read(f, "kind", c.field.kind, w);
    std::vector<double> d = {c.field.direction.x, c.field.direction.y};
    read(f, "direction", d, w);
    if (d.size() != 2)
    {
      throw InvalidInput("field direction needs two components");
    }
    c.field.direction = {d[0], d[1]};
    read(f, "file", c.field.file, w);
  }
  static const std::set<std::string> kinds = {"dilate", "translate", "stretch-x", "rotate", "file"};
  if (!kinds.contains(c.field.kind))
  {
    throw InvalidInput("field kind must be one of dilate, translate, stretch-x, rotate, file");
  }
  if (c.field.kind == "file" && c.field.file.empty())
  {
    throw InvalidInput("field kind \"file\" needs a field file");
  }

  if (j.contains("dbeta"))
  {
    const json &d = j.at("dbeta");
    const std::string w = "dbeta settings";
    check_keys(d, {"h_beta", "richardson", "beta1"}, w);
    read(d, "h_beta", c.dbeta.h_beta, w);
    read(d, "richardson", c.dbeta.richardson, w);
    read(d, "beta1", c.dbeta.beta1, w);
  }
  if (c.dbeta.h_beta < 0.0)
  {
    throw InvalidInput("h_beta must be non-negative");
  }

  if (j.contains("sweep"))
  {
    const json &s = j.at("sweep");
    check_keys(s, {"betas", "with_fd"}, "sweep settings");
    read(s, "betas", c.sweep.betas, "sweep settings");
    read(s, "with_fd", c.sweep.with_fd, "sweep settings");
  }
  require_positive_list(c.sweep.betas, "betas");

  if (j.contains("scaling"))
  {
    const json &s = j.at("scaling");
    check_keys(s, {"ts", "monotonicity_ts"}, "scaling settings");
    read(s, "ts", c.scaling.ts, "scaling settings");
    read(s, "monotonicity_ts", c.scaling.monotonicity_ts, "scaling settings");
  }
  require_positive_list(c.scaling.ts, "scaling ts");
  for (double t : c.scaling.monotonicity_ts)
  {
    if (!(t >= 1.0))
    {
      throw InvalidInput("monotonicity ts must be >= 1");
    }
  }

  if (j.contains("shape"))
  {
    const json &s = j.at("shape");
    const std::string w = "shape settings";
    check_keys(s, {"t0", "richardson", "recovery", "robin_normal"}, w);
    read(s, "t0", c.shape.t0, w);
    read(s, "richardson", c.shape.richardson, w);
    read(s, "recovery", c.shape.recovery, w);
    read(s, "robin_normal", c.shape.robin_normal, w);
  }
  require_positive(c.shape.t0, "t0");
  if (c.shape.recovery != "element" && c.shape.recovery != "patch")
  {
    throw InvalidInput("gradient recovery must be \"element\" or \"patch\"");
  }

  if (j.contains("hadamard"))
  {
    check_keys(j.at("hadamard"), {"ts"}, "hadamard settings");
    read(j.at("hadamard"), "ts", c.hadamard.ts, "hadamard settings");
  }
  if (c.hadamard.ts.empty())
  {
    throw InvalidInput("hadamard ts must not be empty");
  }
  require_positive_list(c.hadamard.ts, "hadamard ts");

  if (j.contains("potential_check"))
  {
    const json &p = j.at("potential_check");
    const std::string w = "potential_check settings";
    check_keys(p, {"mode", "pairs", "samples", "seed", "shift", "V1", "V2"}, w);
    read(p, "mode", c.potential_check.mode, w);
    read(p, "pairs", c.potential_check.pairs, w);
    read(p, "samples", c.potential_check.samples, w);
    read(p, "seed", c.potential_check.seed, w);
    read(p, "shift", c.potential_check.shift, w);
    if (p.contains("V1"))
    {
      c.potential_check.V1 = p.at("V1").get<Potential>();
    }
    if (p.contains("V2"))
    {
      c.potential_check.V2 = p.at("V2").get<Potential>();
    }
  }
  static const std::set<std::string> modes = {"mono", "cont", "shift", "coercive"};
  if (!modes.contains(c.potential_check.mode))
  {
    throw InvalidInput("potential-check mode must be one of mono, cont, shift, coercive");
  }
  if (c.potential_check.pairs <= 0 || c.potential_check.samples <= 0)
  {
    throw InvalidInput("pairs and samples must be positive");
  }
  if (c.potential_check.V1.has_value() != c.potential_check.V2.has_value())
  {
    throw InvalidInput("give both V1 and V2 or neither");
  }

  if (j.contains("radial"))
  {
    const json &r = j.at("radial");
    const std::string w = "radial settings";
    check_keys(r, {"p", "beta", "R", "n", "V", "intervals"}, w);
    read(r, "p", c.radial.p, w);
    read(r, "beta", c.radial.beta, w);
    read(r, "R", c.radial.R, w);
    read(r, "n", c.radial.n, w);
    read(r, "V", c.radial.V, w);
    read(r, "intervals", c.radial.intervals, w);
  }
  parse_radial_potential(c.radial.V);
  if (!(c.radial.p > 1.0))
  {
    throw InvalidInput("p must exceed 1");
  }
  if (!(c.radial.beta > 0.0))
  {
    throw InvalidInput("Robin parameter must be positive");
  }
  require_positive(c.radial.R, "radius");
  if (c.radial.n < 2 || c.radial.intervals < 2)
  {
    throw InvalidInput("radial problems need n >= 2 and at least 2 intervals");
  }

  if (j.contains("study"))
  {
    check_keys(j.at("study"), {"hs"}, "study settings");
    read(j.at("study"), "hs", c.study.hs, "study settings");
  }
  require_positive_list(c.study.hs, "study hs");

  if (j.contains("thresholds"))
  {
    const json &t = j.at("thresholds");
    const std::string w = "thresholds";
    check_keys(t,
               {"oracle_rel", "radial_oracle_rel", "dbeta_rel", "scaling_rel", "shape_rel",
                "translation_rel", "dilation_rel", "alt_rel", "hadamard_rel", "order_ratio_min",
                "order_ratio_max", "shift_abs", "min_angle"},
               w);
    Thresholds &th = c.thresholds;
    read(t, "oracle_rel", th.oracle_rel, w);
    read(t, "radial_oracle_rel", th.radial_oracle_rel, w);
    read(t, "dbeta_rel", th.dbeta_rel, w);
    read(t, "scaling_rel", th.scaling_rel, w);
    read(t, "shape_rel", th.shape_rel, w);
    read(t, "translation_rel", th.translation_rel, w);
    read(t, "dilation_rel", th.dilation_rel, w);
    read(t, "alt_rel", th.alt_rel, w);
    read(t, "hadamard_rel", th.hadamard_rel, w);
    read(t, "order_ratio_min", th.order_ratio_min, w);
    read(t, "order_ratio_max", th.order_ratio_max, w);
    read(t, "shift_abs", th.shift_abs, w);
    read(t, "min_angle", th.min_angle, w);
  }
  return c;
}

ExperimentConfig read_config_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidInput("cannot open config file " + path);
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig &c)
{
  json j;
  j["experiment"] = c.experiment;
  if (c.spec)
  {
    j["spec"] = *c.spec;
  }
  if (!c.spec_file.empty())
  {
    j["spec_file"] = c.spec_file;
  }
  j["mesh"] = {{"file", c.mesh.file}, {"shape", c.mesh.shape}, {"h", c.mesh.h},
               {"refine", c.mesh.refine}, {"R", c.mesh.R}, {"a", c.mesh.a},
               {"b", c.mesh.b}, {"width", c.mesh.width}, {"height", c.mesh.height}};
  j["solver"] = {{"tol_lambda", c.solver.tol_lambda},
                 {"tol_residual", c.solver.tol_residual},
                 {"max_iter", c.solver.max_iter},
                 {"epsilon_schedule", c.solver.epsilon_schedule},
                 {"seed", c.solver.seed},
                 {"refresh_every", c.solver.refresh_every},
                 {"stage_tol_factor", c.solver.stage_tol_factor}};
  j["field"] = {{"kind", c.field.kind},
                {"direction", {c.field.direction.x, c.field.direction.y}},
                {"file", c.field.file}};
  j["dbeta"] = {{"h_beta", c.dbeta.h_beta}, {"richardson", c.dbeta.richardson},
                {"beta1", c.dbeta.beta1}};
  j["sweep"] = {{"betas", c.sweep.betas}, {"with_fd", c.sweep.with_fd}};
  j["scaling"] = {{"ts", c.scaling.ts}, {"monotonicity_ts", c.scaling.monotonicity_ts}};
  j["shape"] = {{"t0", c.shape.t0},
                {"richardson", c.shape.richardson},
                {"recovery", c.shape.recovery},
                {"robin_normal", c.shape.robin_normal}};
  j["hadamard"] = {{"ts", c.hadamard.ts}};
  json pc = {{"mode", c.potential_check.mode},
             {"pairs", c.potential_check.pairs},
             {"samples", c.potential_check.samples},
             {"seed", c.potential_check.seed},
             {"shift", c.potential_check.shift}};
  if (c.potential_check.V1 && c.potential_check.V2 && c.potential_check.V1->serializable() &&
      c.potential_check.V2->serializable())
  {
    pc["V1"] = *c.potential_check.V1;
    pc["V2"] = *c.potential_check.V2;
  }
  j["potential_check"] = pc;
  j["radial"] = {{"p", c.radial.p},   {"beta", c.radial.beta}, {"R", c.radial.R},
                 {"n", c.radial.n},   {"V", c.radial.V},       {"intervals", c.radial.intervals}};
  j["study"] = {{"hs", c.study.hs}};
  const Thresholds &t = c.thresholds;
  j["thresholds"] = {{"oracle_rel", t.oracle_rel},
                     {"radial_oracle_rel", t.radial_oracle_rel},
                     {"dbeta_rel", t.dbeta_rel},
                     {"scaling_rel", t.scaling_rel},
                     {"shape_rel", t.shape_rel},
                     {"translation_rel", t.translation_rel},
                     {"dilation_rel", t.dilation_rel},
                     {"alt_rel", t.alt_rel},
                     {"hadamard_rel", t.hadamard_rel},
                     {"order_ratio_min", t.order_ratio_min},
                     {"order_ratio_max", t.order_ratio_max},
                     {"shift_abs", t.shift_abs},
                     {"min_angle", t.min_angle}};
  return j;
}

std::string config_hash(const ExperimentConfig &config)
{
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text)
  {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Potential parse_radial_potential(const std::string &text)
{
  const auto colon = text.find(':');
  if (colon == std::string::npos)
  {
    throw InvalidInput("radial potential must look like const:<c> or poly:<c0,c1,...>");
  }
  const std::string kind = text.substr(0, colon);
  std::vector<double> values;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ','))
  {
    std::size_t used = 0;
    double v = 0.0;
    try
    {
      v = std::stod(item, &used);
    }
    catch (const std::exception &)
    {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
    {
      throw InvalidInput("bad number \"" + item + "\" in radial potential");
    }
    values.push_back(v);
  }
  if (kind == "const" && values.size() == 1)
  {
    return Potential::constant(values[0]);
  }
  if (kind == "poly" && !values.empty())
  {
    return Potential::radial_polynomial(values);
  }
  throw InvalidInput("radial potential must look like const:<c> or poly:<c0,c1,...>");
}

ProblemSpec resolve_spec(const ExperimentConfig &config)
{
  ProblemSpec spec;
  if (config.spec)
  {
    spec = *config.spec;
  }
  else if (!config.spec_file.empty())
  {
    spec = read_spec_file(config.spec_file);
  }
  else
  {
    throw InvalidInput("missing problem spec (\"spec\" or --spec)");
  }
  if (!config.mesh.file.empty() && !spec.domain)
  {
    spec.domain = DomainRef::any_mesh(config.mesh.file);
  }
  require_valid(spec);
  return spec;
}

Mesh generate_domain_mesh(const DomainRef &domain, double h)
{
  switch (domain.kind)
  {
    case DomainRef::Kind::Disk:
      return generate_disk_mesh(domain.R, h);
    case DomainRef::Kind::Ellipse:
      return generate_ellipse_mesh(domain.a, domain.b, h);
    case DomainRef::Kind::Rect:
      return generate_rect_mesh(domain.width, domain.height, h);
    case DomainRef::Kind::Ball:
      if (domain.n != 2)
      {
        throw InvalidInput("only two-dimensional balls can be meshed");
      }
      return generate_disk_mesh(domain.R, h);
    case DomainRef::Kind::Mesh:
      if (domain.path.empty())
      {
        throw InvalidInput("mesh domain without a mesh file");
      }
      return read_mesh_file(domain.path);
  }
  throw InvalidInput("unknown domain kind");
}

Mesh resolve_mesh(const ExperimentConfig &config, const ProblemSpec &spec)
{
  Mesh mesh = !config.mesh.file.empty() ? read_mesh_file(config.mesh.file)
                                        : generate_domain_mesh(*spec.domain, config.mesh.h);
  for (int k = 0; k < config.mesh.refine; ++k)
  {
    mesh = refine_uniform(mesh);
  }
  require_mesh_matches(spec, mesh);
  return mesh;
}

VectorField resolve_field(const FieldSettings &field, const Mesh &mesh)
{
  if (field.kind == "dilate")
  {
    return VectorField::dilation();
  }
  if (field.kind == "translate")
  {
    return VectorField::translation(field.direction);
  }
  if (field.kind == "stretch-x")
  {
    return VectorField::stretch_x();
  }
  if (field.kind == "rotate")
  {
    return VectorField::rotation();
  }
  std::ifstream in(field.file);
  if (!in)
  {
    throw InvalidInput("cannot open field file " + field.file);
  }
  std::vector<Vec2> values;
  double x = 0.0, y = 0.0;
  while (in >> x >> y)
  {
    values.push_back({x, y});
  }
  if (!in.eof())
  {
    throw InvalidInput("malformed field file " + field.file);
  }
  if (values.size() != mesh.num_vertices())
  {
    throw InvalidInput("field file has " + std::to_string(values.size()) + " vectors for " +
                       std::to_string(mesh.num_vertices()) + " vertices");
  }
  return VectorField::samples(std::move(values));
}

ConvergenceStudy convergence_study(const ProblemSpec &spec, const std::vector<double> &hs,
                                   const SolverOptions &opts)
{
  if (hs.empty())
  {
    throw InvalidInput("empty h list");
  }
  for (std::size_t k = 0; k < hs.size(); ++k)
  {
    if (!(hs[k] > 0.0) || (k > 0 && !(hs[k] < hs[k - 1])))
    {
      throw InvalidInput("h list must be positive and decreasing");
    }
  }
  require_valid(spec);
  ConvergenceStudy s;
  s.hs = hs;
  for (double h : hs)
  {
    const Mesh mesh = generate_domain_mesh(*spec.domain, h);
    const EigenResult r = solve_first_eigenpair(spec, mesh, opts);
    s.lambdas.push_back(r.lambda);
    s.converged.push_back(r.converged);
    if (!r.converged)
    {
      s.warnings.push_back("solve at h=" + std::to_string(h) + " did not converge");
    }
  }
  const std::size_t n = hs.size();
  s.observed_order = std::numeric_limits<double>::quiet_NaN();
  if (n == 1)
  {
    s.extrapolated = s.lambdas[0];
  }
  else
  {
    const double r = hs[n - 2] / hs[n - 1];
    s.extrapolated = (r * r * s.lambdas[n - 1] - s.lambdas[n - 2]) / (r * r - 1.0);
    if (n >= 3)
    {
      const double d1 = s.lambdas[n - 3] - s.lambdas[n - 2];
      const double d2 = s.lambdas[n - 2] - s.lambdas[n - 1];
      s.observed_order = std::log(std::abs(d1 / d2)) / std::log(r);
    }
  }

  const DomainRef &d = *spec.domain;
  const bool disk = d.kind == DomainRef::Kind::Disk || (d.kind == DomainRef::Kind::Ball && d.n == 2);
  if (disk && spec.p == 2.0 && spec.potential.is_zero())
  {
    s.oracle = bessel_robin_root(spec.beta * d.R) / (d.R * d.R);
    s.oracle_name = "bessel";
  }
  else if (disk && spec.potential.is_radial())
  {
    const EigenResult r =
        solve_radial_first(spec.p, spec.beta, spec.potential.radial_profile(), d.R, 2, 10000, opts);
    if (r.converged)
    {
      s.oracle = r.lambda;
      s.oracle_name = "radial";
    }
  }
  if (s.oracle)
  {
    for (std::size_t k = 1; k < n; ++k)
    {
      if (std::abs(s.lambdas[k] - *s.oracle) >= std::abs(s.lambdas[k - 1] - *s.oracle))
      {
        s.warnings.push_back("error does not decrease from h=" + std::to_string(hs[k - 1]) +
                             " to h=" + std::to_string(hs[k]));
      }
    }
  }
  return s;
}

}  // namespace robin

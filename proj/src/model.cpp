#include "robin/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "robin/errors.hpp"
#include "robin/mesh.hpp"

namespace robin
{

using nlohmann::json;

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

std::string fmt(double x)
{
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

bool all_finite(const std::vector<double> &v)
{
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Rejects keys outside `allowed`.
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

double number_field(const json &j, const char *key, double fallback, const std::string &what)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  if (!j.at(key).is_number())
  {
    throw InvalidInput(std::string("field \"") + key + "\" in " + what + " must be a number");
  }
  return j.at(key).get<double>();
}

double required_number(const json &j, const char *key, const std::string &what)
{
  if (!j.contains(key))
  {
    throw InvalidInput(std::string("missing field \"") + key + "\" in " + what);
  }
  return number_field(j, key, 0.0, what);
}

}  // namespace

// ---------------------------------------------------------------------------
// Potential

Potential::Potential() : kind_(std::make_shared<const Kind>(Constant{0.0})) {}

Potential::Potential(Kind kind) : kind_(std::make_shared<const Kind>(std::move(kind))) {}

Potential Potential::constant(double value)
{
  return Potential(Constant{value});
}

Potential Potential::radial_polynomial(std::vector<double> coeffs)
{
  return Potential(RadialPolynomial{std::move(coeffs)});
}

Potential Potential::quadratic(const Quadratic &q)
{
  return Potential(q);
}

Potential Potential::sine(double amplitude, double wavenumber, int axis)
{
  if (axis != 0 && axis != 1)
  {
    throw InvalidInput("sine potential axis must be 0 or 1");
  }
  return Potential(Sine{amplitude, wavenumber, axis});
}

Potential Potential::grid(GridSamples samples)
{
  if (samples.nx < 2 || samples.ny < 2 ||
      samples.values.size() != static_cast<std::size_t>(samples.nx) * samples.ny)
  {
    throw InvalidInput("grid potential needs nx, ny >= 2 and nx*ny values");
  }
  if (!(samples.dx > 0.0) || !(samples.dy > 0.0))
  {
    throw InvalidInput("grid potential spacing must be positive");
  }
  return Potential(std::move(samples));
}

Potential Potential::callback(std::function<double(Vec2)> fn, std::string name)
{
  if (!fn)
  {
    throw InvalidInput("empty potential callback");
  }
  return Potential(Callback{std::move(fn), std::move(name)});
}

double Potential::operator()(const Vec2 &x) const
{
  return std::visit(
      overloaded{
          [](const Constant &c) { return c.value; },
          [&x](const RadialPolynomial &r)
          {
            const double rho = norm(x);
            double v = 0.0;
            for (auto it = r.coeffs.rbegin(); it != r.coeffs.rend(); ++it)
            {
              v = v * rho + *it;
            }
            return v;
          },
          [&x](const Quadratic &q)
          {
            return q.c0 + q.cx * x.x + q.cy * x.y + q.cxx * x.x * x.x + q.cxy * x.x * x.y +
                   q.cyy * x.y * x.y;
          },
          [&x](const Sine &s)
          { return s.amplitude * std::sin(s.wavenumber * (s.axis == 0 ? x.x : x.y)); },
          [&x](const GridSamples &g)
          {
            const double fx = std::clamp((x.x - g.x0) / g.dx, 0.0, double(g.nx - 1));
            const double fy = std::clamp((x.y - g.y0) / g.dy, 0.0, double(g.ny - 1));
            const int i = std::min(static_cast<int>(fx), g.nx - 2);
            const int j = std::min(static_cast<int>(fy), g.ny - 2);
            const double sx = fx - i, sy = fy - j;
            auto at = [&g](int ii, int jj) { return g.values[jj * g.nx + ii]; };
            return (1 - sx) * (1 - sy) * at(i, j) + sx * (1 - sy) * at(i + 1, j) +
                   (1 - sx) * sy * at(i, j + 1) + sx * sy * at(i + 1, j + 1);
          },
          [&x](const Callback &c) { return c.fn(x); },
          [&x](const Sum &s)
          {
            double v = 0.0;
            for (const auto &t : s.terms)
            {
              v += t(x);
            }
            return v;
          }},
      *kind_);
}

std::optional<double> Potential::constant_value() const
{
  if (const auto *c = std::get_if<Constant>(kind_.get()))
  {
    return c->value;
  }
  if (const auto *s = std::get_if<Sum>(kind_.get()))
  {
    double v = 0.0;
    for (const auto &t : s->terms)
    {
      const auto c = t.constant_value();
      if (!c)
      {
        return std::nullopt;
      }
      v += *c;
    }
    return v;
  }
  return std::nullopt;
}

bool Potential::is_zero() const
{
  const auto c = constant_value();
  return c && *c == 0.0;
}

bool Potential::is_radial() const
{
  return std::visit(overloaded{[](const Constant &) { return true; },
                               [](const RadialPolynomial &) { return true; },
                               [](const Quadratic &q)
                               { return q.cx == 0 && q.cy == 0 && q.cxy == 0 && q.cxx == q.cyy; },
                               [](const Sine &s) { return s.amplitude == 0.0; },
                               [](const GridSamples &) { return false; },
                               [](const Callback &) { return false; },
                               [](const Sum &s)
                               {
                                 return std::all_of(s.terms.begin(), s.terms.end(),
                                                    [](const Potential &t)
                                                    { return t.is_radial(); });
                               }},
                    *kind_);
}

std::function<double(double)> Potential::radial_profile() const
{
  if (!is_radial())
  {
    throw InvalidInput("potential is not radial: " + describe());
  }
  Potential self = *this;
  return [self](double r) { return self(Vec2{r, 0.0}); };
}

bool Potential::has_finite_description() const
{
  return std::visit(
      overloaded{[](const Constant &c) { return std::isfinite(c.value); },
                 [](const RadialPolynomial &r) { return all_finite(r.coeffs); },
                 [](const Quadratic &q)
                 { return all_finite({q.c0, q.cx, q.cy, q.cxx, q.cxy, q.cyy}); },
                 [](const Sine &s) { return all_finite({s.amplitude, s.wavenumber}); },
                 [](const GridSamples &g)
                 { return all_finite(g.values) && all_finite({g.x0, g.y0, g.dx, g.dy}); },
                 [](const Callback &) { return true; },
                 [](const Sum &s)
                 {
                   return std::all_of(s.terms.begin(), s.terms.end(), [](const Potential &t)
                                      { return t.has_finite_description(); });
                 }},
      *kind_);
}

bool Potential::serializable() const
{
  if (std::holds_alternative<Callback>(*kind_))
  {
    return false;
  }
  if (const auto *s = std::get_if<Sum>(kind_.get()))
  {
    return std::all_of(s->terms.begin(), s->terms.end(),
                       [](const Potential &t) { return t.serializable(); });
  }
  return true;
}

Potential Potential::plus(const Potential &other) const
{
  return Potential(Sum{{*this, other}});
}

Potential Potential::shifted(double c) const
{
  if (const auto *k = std::get_if<Constant>(kind_.get()))
  {
    return constant(k->value + c);
  }
  return plus(constant(c));
}

std::string Potential::describe() const
{
  return std::visit(
      overloaded{[](const Constant &c) { return "const:" + fmt(c.value); },
                 [](const RadialPolynomial &r)
                 {
                   std::string s = "poly:";
                   for (std::size_t k = 0; k < r.coeffs.size(); ++k)
                   {
                     s += (k ? "," : "") + fmt(r.coeffs[k]);
                   }
                   return s;
                 },
                 [](const Quadratic &q)
                 {
                   return "quadratic:" + fmt(q.c0) + "," + fmt(q.cx) + "," + fmt(q.cy) + "," +
                          fmt(q.cxx) + "," + fmt(q.cxy) + "," + fmt(q.cyy);
                 },
                 [](const Sine &s)
                 {
                   return "sine:" + fmt(s.amplitude) + "," + fmt(s.wavenumber) + "," +
                          std::to_string(s.axis);
                 },
                 [](const GridSamples &g)
                 { return "grid:" + std::to_string(g.nx) + "x" + std::to_string(g.ny); },
                 [](const Callback &c) { return "callback:" + c.name; },
                 [](const Sum &s)
                 {
                   std::string out = "sum(";
                   for (std::size_t k = 0; k < s.terms.size(); ++k)
                   {
                     out += (k ? " + " : "") + s.terms[k].describe();
                   }
                   return out + ")";
                 }},
      *kind_);
}

// ---------------------------------------------------------------------------
// DomainRef

DomainRef DomainRef::disk(double R)
{
  DomainRef d;
  d.kind = Kind::Disk;
  d.R = R;
  return d;
}

DomainRef DomainRef::ellipse(double a, double b)
{
  DomainRef d;
  d.kind = Kind::Ellipse;
  d.a = a;
  d.b = b;
  return d;
}

DomainRef DomainRef::rect(double width, double height)
{
  DomainRef d;
  d.kind = Kind::Rect;
  d.width = width;
  d.height = height;
  return d;
}

DomainRef DomainRef::ball(double R, int n)
{
  DomainRef d;
  d.kind = Kind::Ball;
  d.R = R;
  d.n = n;
  return d;
}

DomainRef DomainRef::any_mesh(std::string path)
{
  DomainRef d;
  d.kind = Kind::Mesh;
  d.path = std::move(path);
  return d;
}

DomainRef DomainRef::scaled(double t) const
{
  DomainRef d = *this;
  d.R *= t;
  d.a *= t;
  d.b *= t;
  d.width *= t;
  d.height *= t;
  if (kind == Kind::Mesh)
  {
    d.path.clear();
  }
  return d;
}

std::string DomainRef::describe() const
{
  switch (kind)
  {
    case Kind::Disk:
      return "disk R=" + fmt(R);
    case Kind::Ellipse:
      return "ellipse a=" + fmt(a) + " b=" + fmt(b);
    case Kind::Rect:
      return "rect " + fmt(width) + "x" + fmt(height);
    case Kind::Ball:
      return "ball n=" + std::to_string(n) + " R=" + fmt(R);
    case Kind::Mesh:
      return path.empty() ? "mesh" : "mesh " + path;
  }
  return "?";
}

ProblemSpec ProblemSpec::with_beta(double b) const
{
  ProblemSpec s = *this;
  s.beta = b;
  return s;
}

ProblemSpec ProblemSpec::with_potential(Potential v) const
{
  ProblemSpec s = *this;
  s.potential = std::move(v);
  return s;
}

ProblemSpec ProblemSpec::with_domain(DomainRef d) const
{
  ProblemSpec s = *this;
  s.domain = std::move(d);
  return s;
}

// ---------------------------------------------------------------------------
// Validation

std::vector<std::string> validate_spec(const ProblemSpec &spec)
{
  std::vector<std::string> errors;
  if (!(spec.p > 1.0) || !std::isfinite(spec.p))
  {
    errors.emplace_back("p must exceed 1");
  }
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta))
  {
    errors.emplace_back("Robin parameter must be positive");
  }
  if (!spec.potential.has_finite_description())
  {
    errors.emplace_back("potential has unbounded (non-finite) samples");
  }
  if (!spec.domain)
  {
    errors.emplace_back("missing domain");
  }
  else
  {
    const DomainRef &d = *spec.domain;
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    switch (d.kind)
    {
      case DomainRef::Kind::Disk:
        if (!positive(d.R))
          errors.emplace_back("disk radius must be positive");
        break;
      case DomainRef::Kind::Ellipse:
        if (!positive(d.a) || !positive(d.b))
          errors.emplace_back("ellipse semi-axes must be positive");
        break;
      case DomainRef::Kind::Rect:
        if (!positive(d.width) || !positive(d.height))
          errors.emplace_back("rectangle sides must be positive");
        break;
      case DomainRef::Kind::Ball:
        if (!positive(d.R))
          errors.emplace_back("ball radius must be positive");
        if (d.n < 2)
          errors.emplace_back("ball dimension must be at least 2");
        break;
      case DomainRef::Kind::Mesh:
        break;
    }
  }
  return errors;
}

void require_valid(const ProblemSpec &spec)
{
  const auto errors = validate_spec(spec);
  if (!errors.empty())
  {
    std::string msg = "invalid problem spec:";
    for (const auto &e : errors)
    {
      msg += " " + e + ";";
    }
    msg.pop_back();
    throw InvalidInput(msg);
  }
}

void require_mesh_matches(const ProblemSpec &spec, const Mesh &mesh)
{
  if (!spec.domain || spec.domain->kind == DomainRef::Kind::Mesh)
  {
    return;
  }
  const DomainRef &d = *spec.domain;
  std::optional<AnalyticBoundary> expected;
  switch (d.kind)
  {
    case DomainRef::Kind::Disk:
      expected = AnalyticBoundary::circle(d.R);
      break;
    case DomainRef::Kind::Ellipse:
      expected = AnalyticBoundary::ellipse(d.a, d.b);
      break;
    case DomainRef::Kind::Rect:
      expected = AnalyticBoundary::polygon();
      break;
    case DomainRef::Kind::Ball:
      if (d.n != 2)
      {
        throw InvalidInput("a ball in dimension " + std::to_string(d.n) +
                           " cannot be meshed; use the radial solver");
      }
      expected = AnalyticBoundary::circle(d.R);
      break;
    case DomainRef::Kind::Mesh:
      break;
  }
  const auto &have = mesh.analytic_boundary();
  // A circle is also an ellipse with equal axes.
  auto as_ellipse = [](const AnalyticBoundary &c)
  { return c.kind == AnalyticBoundary::Kind::Circle ? AnalyticBoundary::ellipse(c.R, c.R) : c; };
  if (!have || !as_ellipse(*have).same_as(as_ellipse(*expected), 1e-9))
  {
    throw InvalidInput("mesh does not match the spec domain (" + d.describe() + ", mesh " +
                       (have ? have->describe() : std::string("without curve")) + ")");
  }
  if (d.kind == DomainRef::Kind::Rect)
  {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto &x : mesh.vertices())
    {
      xmin = std::min(xmin, x.x);
      xmax = std::max(xmax, x.x);
      ymin = std::min(ymin, x.y);
      ymax = std::max(ymax, x.y);
    }
    if (std::abs((xmax - xmin) - d.width) > 1e-9 * d.width ||
        std::abs((ymax - ymin) - d.height) > 1e-9 * d.height)
    {
      throw InvalidInput("mesh does not match the spec domain (" + d.describe() + ")");
    }
  }
}

EigenResult to_sup_unit(const EigenResult &result)
{
  EigenResult r = result;
  double m = 0.0;
  for (double x : r.u)
  {
    m = std::max(m, std::abs(x));
  }
  if (!(m > 0.0))
  {
    throw InvalidInput("degenerate test function");
  }
  for (double &x : r.u)
  {
    x /= m;
  }
  r.normalization = Normalization::SupUnit;
  return r;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(json &j, const Potential &v)
{
  std::visit(overloaded{[&j](const Potential::Constant &c)
                        { j = json{{"kind", "constant"}, {"value", c.value}}; },
                        [&j](const Potential::RadialPolynomial &r)
                        { j = json{{"kind", "radial_poly"}, {"coeffs", r.coeffs}}; },
                        [&j](const Potential::Quadratic &q)
                        {
                          j = json{{"kind", "quadratic"}, {"c0", q.c0},   {"cx", q.cx},
                                   {"cy", q.cy},          {"cxx", q.cxx}, {"cxy", q.cxy},
                                   {"cyy", q.cyy}};
                        },
                        [&j](const Potential::Sine &s)
                        {
                          j = json{{"kind", "sine"},
                                   {"amplitude", s.amplitude},
                                   {"wavenumber", s.wavenumber},
                                   {"axis", s.axis}};
                        },
                        [&j](const Potential::GridSamples &g)
                        {
                          j = json{{"kind", "grid"}, {"x0", g.x0}, {"y0", g.y0},
                                   {"dx", g.dx},     {"dy", g.dy}, {"nx", g.nx},
                                   {"ny", g.ny},     {"values", g.values}};
                        },
                        [](const Potential::Callback &c)
                        { throw InvalidInput("callback potential " + c.name + " is not serializable"); },
                        [&j](const Potential::Sum &s)
                        {
                          json terms = json::array();
                          for (const auto &t : s.terms)
                          {
                            terms.push_back(t);
                          }
                          j = json{{"kind", "sum"}, {"terms", terms}};
                        }},
             v.kind());
}

void from_json(const json &j, Potential &v)
{
  if (j.is_number())
  {
    v = Potential::constant(j.get<double>());
    return;
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
  {
    throw InvalidInput("potential must be a number or an object with a \"kind\" field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const std::string what = kind + " potential";
  if (kind == "constant")
  {
    check_keys(j, {"kind", "value"}, what);
    v = Potential::constant(required_number(j, "value", what));
  }
  else if (kind == "radial_poly")
  {
    check_keys(j, {"kind", "coeffs"}, what);
    if (!j.contains("coeffs") || !j.at("coeffs").is_array())
    {
      throw InvalidInput("radial_poly potential needs a \"coeffs\" array");
    }
    v = Potential::radial_polynomial(j.at("coeffs").get<std::vector<double>>());
  }
  else if (kind == "quadratic")
  {
    check_keys(j, {"kind", "c0", "cx", "cy", "cxx", "cxy", "cyy"}, what);
    Potential::Quadratic q;
    q.c0 = number_field(j, "c0", 0.0, what);
    q.cx = number_field(j, "cx", 0.0, what);
    q.cy = number_field(j, "cy", 0.0, what);
    q.cxx = number_field(j, "cxx", 0.0, what);
    q.cxy = number_field(j, "cxy", 0.0, what);
    q.cyy = number_field(j, "cyy", 0.0, what);
    v = Potential::quadratic(q);
  }
  else if (kind == "sine")
  {
    check_keys(j, {"kind", "amplitude", "wavenumber", "axis"}, what);
    v = Potential::sine(required_number(j, "amplitude", what),
                        number_field(j, "wavenumber", 1.0, what),
                        static_cast<int>(number_field(j, "axis", 0.0, what)));
  }
  else if (kind == "grid")
  {
    check_keys(j, {"kind", "x0", "y0", "dx", "dy", "nx", "ny", "values"}, what);
    Potential::GridSamples g;
    g.x0 = required_number(j, "x0", what);
    g.y0 = required_number(j, "y0", what);
    g.dx = required_number(j, "dx", what);
    g.dy = required_number(j, "dy", what);
    g.nx = static_cast<int>(required_number(j, "nx", what));
    g.ny = static_cast<int>(required_number(j, "ny", what));
    if (!j.contains("values") || !j.at("values").is_array())
    {
      throw InvalidInput("grid potential needs a \"values\" array");
    }
    for (const auto &x : j.at("values"))
    {
      // Non-finite samples arrive as null and are reported by validate_spec.
      g.values.push_back(x.is_number() ? x.get<double>() : NAN);
    }
    v = Potential::grid(std::move(g));
  }
  else if (kind == "sum")
  {
    check_keys(j, {"kind", "terms"}, what);
    if (!j.contains("terms") || !j.at("terms").is_array())
    {
      throw InvalidInput("sum potential needs a \"terms\" array");
    }
    Potential::Sum s;
    for (const auto &t : j.at("terms"))
    {
      s.terms.push_back(t.get<Potential>());
    }
    v = Potential(std::move(s));
  }
  else
  {
    throw InvalidInput("unknown potential kind \"" + kind + "\"");
  }
}

void to_json(json &j, const DomainRef &d)
{
  switch (d.kind)
  {
    case DomainRef::Kind::Disk:
      j = json{{"kind", "disk"}, {"R", d.R}};
      break;
    case DomainRef::Kind::Ellipse:
      j = json{{"kind", "ellipse"}, {"a", d.a}, {"b", d.b}};
      break;
    case DomainRef::Kind::Rect:
      j = json{{"kind", "rect"}, {"width", d.width}, {"height", d.height}};
      break;
    case DomainRef::Kind::Ball:
      j = json{{"kind", "ball"}, {"R", d.R}, {"n", d.n}};
      break;
    case DomainRef::Kind::Mesh:
      j = json{{"kind", "mesh"}};
      if (!d.path.empty())
      {
        j["path"] = d.path;
      }
      break;
  }
}

void from_json(const json &j, DomainRef &d)
{
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
  {
    throw InvalidInput("domain must be an object with a \"kind\" field");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const std::string what = kind + " domain";
  if (kind == "disk")
  {
    check_keys(j, {"kind", "R"}, what);
    d = DomainRef::disk(number_field(j, "R", 1.0, what));
  }
  else if (kind == "ellipse")
  {
    check_keys(j, {"kind", "a", "b"}, what);
    d = DomainRef::ellipse(required_number(j, "a", what), required_number(j, "b", what));
  }
  else if (kind == "rect")
  {
    check_keys(j, {"kind", "width", "height"}, what);
    d = DomainRef::rect(required_number(j, "width", what), required_number(j, "height", what));
  }
  else if (kind == "ball")
  {
    check_keys(j, {"kind", "R", "n"}, what);
    d = DomainRef::ball(number_field(j, "R", 1.0, what),
                        static_cast<int>(number_field(j, "n", 2.0, what)));
  }
  else if (kind == "mesh")
  {
    check_keys(j, {"kind", "path"}, what);
    d = DomainRef::any_mesh(j.value("path", std::string{}));
  }
  else
  {
    throw InvalidInput("unknown domain kind \"" + kind + "\"");
  }
}

void to_json(json &j, const ProblemSpec &s)
{
  j = json{{"p", s.p}, {"beta", s.beta}, {"potential", s.potential}};
  j["domain"] = s.domain ? json(*s.domain) : json(nullptr);
}

void from_json(const json &j, ProblemSpec &s)
{
  check_keys(j, {"p", "beta", "potential", "domain"}, "problem spec");
  s = ProblemSpec{};
  s.p = required_number(j, "p", "problem spec");
  s.beta = required_number(j, "beta", "problem spec");
  if (j.contains("potential"))
  {
    s.potential = j.at("potential").get<Potential>();
  }
  if (j.contains("domain") && !j.at("domain").is_null())
  {
    s.domain = j.at("domain").get<DomainRef>();
  }
}

void to_json(json &j, const EigenResult &r)
{
  j = json{{"lambda", r.lambda},
           {"residual", r.residual},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"u", r.u},
           {"normalization", r.normalization == Normalization::LpUnit ? "lp" : "sup"}};
}

void from_json(const json &j, EigenResult &r)
{
  check_keys(j, {"lambda", "residual", "iterations", "converged", "u", "normalization"},
             "eigen result");
  r = EigenResult{};
  r.lambda = required_number(j, "lambda", "eigen result");
  r.residual = required_number(j, "residual", "eigen result");
  r.iterations = static_cast<int>(required_number(j, "iterations", "eigen result"));
  r.converged = j.at("converged").get<bool>();
  r.u = j.at("u").get<std::vector<double>>();
  const std::string norm = j.value("normalization", std::string("lp"));
  if (norm != "lp" && norm != "sup")
  {
    throw InvalidInput("normalization must be \"lp\" or \"sup\"");
  }
  r.normalization = norm == "lp" ? Normalization::LpUnit : Normalization::SupUnit;
}

ProblemSpec read_spec_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw InvalidInput("cannot open spec file " + path);
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
  try
  {
    return j.get<ProblemSpec>();
  }
  catch (const json::exception &e)
  {
    throw InvalidInput("bad spec in " + path + ": " + e.what());
  }
}

void write_spec_file(const std::string &path, const ProblemSpec &spec)
{
  std::ofstream out(path);
  if (!out)
  {
    throw InvalidInput("cannot write " + path);
  }
  out << json(spec).dump(2) << "\n";
}

}  // namespace robin

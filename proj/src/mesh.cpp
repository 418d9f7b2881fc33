#include "robin/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "robin/errors.hpp"

namespace robin
{

namespace
{

constexpr double kPi = std::numbers::pi;

double ellipse_perimeter(double a, double b)
{
  // Trapezoid rule is spectrally accurate for the periodic integrand.
  constexpr int n = 4096;
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
  {
    const double th = 2.0 * kPi * k / n;
    sum += std::hypot(a * std::sin(th), b * std::cos(th));
  }
  return sum * 2.0 * kPi / n;
}

std::uint64_t edge_key(int a, int b, std::size_t n)
{
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return lo * static_cast<std::uint64_t>(n) + hi;
}

}  // namespace

double AnalyticBoundary::curvature_at(const Vec2 &x) const
{
  switch (kind)
  {
    case Kind::Circle:
      return 1.0 / R;
    case Kind::Ellipse:
    {
      const double th = std::atan2(x.y / b, x.x / a);
      const double s = std::sin(th), c = std::cos(th);
      return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
    }
    case Kind::Polygon:
      return 0.0;
  }
  return 0.0;
}

Vec2 AnalyticBoundary::project(const Vec2 &x) const
{
  switch (kind)
  {
    case Kind::Circle:
      return (R / norm(x)) * x;
    case Kind::Ellipse:
      return (1.0 / std::hypot(x.x / a, x.y / b)) * x;
    case Kind::Polygon:
      return x;
  }
  return x;
}

double AnalyticBoundary::perimeter() const
{
  switch (kind)
  {
    case Kind::Circle:
      return 2.0 * kPi * R;
    case Kind::Ellipse:
      return ellipse_perimeter(a, b);
    case Kind::Polygon:
      break;
  }
  throw InvalidInput("polygon boundary has no analytic perimeter");
}

double AnalyticBoundary::area() const
{
  switch (kind)
  {
    case Kind::Circle:
      return kPi * R * R;
    case Kind::Ellipse:
      return kPi * a * b;
    case Kind::Polygon:
      break;
  }
  throw InvalidInput("polygon boundary has no analytic area");
}

AnalyticBoundary AnalyticBoundary::scaled(double t) const
{
  AnalyticBoundary s = *this;
  s.R *= t;
  s.a *= t;
  s.b *= t;
  return s;
}

bool AnalyticBoundary::same_as(const AnalyticBoundary &other, double rtol) const
{
  if (kind != other.kind)
  {
    return false;
  }
  auto close = [rtol](double x, double y)
  { return std::abs(x - y) <= rtol * std::max(std::abs(x), std::abs(y)); };
  switch (kind)
  {
    case Kind::Circle:
      return close(R, other.R);
    case Kind::Ellipse:
      return close(a, other.a) && close(b, other.b);
    case Kind::Polygon:
      return true;
  }
  return false;
}

std::string AnalyticBoundary::describe() const
{
  std::ostringstream os;
  os << std::setprecision(17);
  switch (kind)
  {
    case Kind::Circle:
      os << "circle " << R;
      break;
    case Kind::Ellipse:
      os << "ellipse " << a << " " << b;
      break;
    case Kind::Polygon:
      os << "polygon";
      break;
  }
  return os.str();
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
           std::optional<AnalyticBoundary> analytic)
  : vertices_(std::move(vertices)), triangles_(std::move(triangles)), analytic_(analytic)
{
  const std::size_t nv = vertices_.size();
  if (nv < 3 || triangles_.empty())
  {
    throw InvalidInput("mesh needs at least one triangle");
  }
  for (const auto &x : vertices_)
  {
    if (!std::isfinite(x.x) || !std::isfinite(x.y))
    {
      throw InvalidInput("mesh vertex is not finite");
    }
  }

  struct EdgeUse
  {
    int a, b;
    int triangle;
    int count;
  };
  std::unordered_map<std::uint64_t, EdgeUse> edges;
  edges.reserve(3 * triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t)
  {
    const auto &tri = triangles_[t];
    for (int k = 0; k < 3; ++k)
    {
      if (tri[k] < 0 || static_cast<std::size_t>(tri[k]) >= nv)
      {
        throw InvalidInput("triangle index out of range");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
    {
      throw InvalidInput("degenerate triangle");
    }
    if (triangle_area(t) <= 0.0)
    {
      throw InvalidInput("triangle " + std::to_string(t) + " is not positively oriented");
    }
    for (int k = 0; k < 3; ++k)
    {
      const int a = tri[k], b = tri[(k + 1) % 3];
      auto [it, inserted] = edges.try_emplace(edge_key(a, b, nv), EdgeUse{a, b, int(t), 0});
      if (!inserted && it->second.a == a)
      {
        throw InvalidInput("inconsistent triangle orientation");
      }
      if (++it->second.count > 2)
      {
        throw InvalidInput("edge shared by more than two triangles");
      }
    }
  }

  // Boundary edges keep the orientation of their triangle, so the domain lies
  // on their left.
  std::vector<int> outgoing(nv, -1);
  std::vector<Edge> unordered;
  std::vector<int> owner;
  for (const auto &[key, use] : edges)
  {
    if (use.count == 1)
    {
      if (outgoing[use.a] != -1)
      {
        throw InvalidInput("boundary is not a set of simple closed loops");
      }
      outgoing[use.a] = static_cast<int>(unordered.size());
      unordered.push_back({use.a, use.b});
      owner.push_back(use.triangle);
    }
  }
  if (unordered.empty())
  {
    throw InvalidInput("mesh has no boundary");
  }

  // Chain into loops, starting each loop at its smallest unused edge start
  // vertex so the order does not depend on hash iteration.
  on_boundary_.assign(nv, 0);
  std::vector<char> used(unordered.size(), 0);
  std::vector<int> starts;
  for (std::size_t e = 0; e < unordered.size(); ++e)
  {
    starts.push_back(unordered[e][0]);
  }
  std::sort(starts.begin(), starts.end());
  for (int start : starts)
  {
    int e = outgoing[start];
    if (used[e])
    {
      continue;
    }
    loop_offsets_.push_back(boundary_edges_.size());
    while (!used[e])
    {
      used[e] = 1;
      boundary_edges_.push_back(unordered[e]);
      boundary_triangle_.push_back(owner[e]);
      on_boundary_[unordered[e][0]] = 1;
      const int next = outgoing[unordered[e][1]];
      if (next < 0)
      {
        throw InvalidInput("boundary loop is not closed");
      }
      e = next;
    }
    if (boundary_edges_.back()[1] != boundary_edges_[loop_offsets_.back()][0])
    {
      throw InvalidInput("boundary loop is not closed");
    }
  }
  loop_offsets_.push_back(boundary_edges_.size());
}

double Mesh::triangle_area(std::size_t t) const
{
  const auto &tri = triangles_[t];
  const Vec2 &a = vertices_[tri[0]], &b = vertices_[tri[1]], &c = vertices_[tri[2]];
  return 0.5 * cross(b - a, c - a);
}

double Mesh::area() const
{
  double s = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t)
  {
    s += triangle_area(t);
  }
  return s;
}

double Mesh::edge_length(const Edge &e) const
{
  return norm(vertices_[e[1]] - vertices_[e[0]]);
}

double Mesh::perimeter() const
{
  double s = 0.0;
  for (const auto &e : boundary_edges_)
  {
    s += edge_length(e);
  }
  return s;
}

double Mesh::min_angle_degrees() const
{
  double amin = 180.0;
  for (const auto &tri : triangles_)
  {
    for (int k = 0; k < 3; ++k)
    {
      const Vec2 &o = vertices_[tri[k]];
      const Vec2 u = vertices_[tri[(k + 1) % 3]] - o;
      const Vec2 w = vertices_[tri[(k + 2) % 3]] - o;
      const double ang = std::atan2(std::abs(cross(u, w)), dot(u, w));
      amin = std::min(amin, ang * 180.0 / kPi);
    }
  }
  return amin;
}

double Mesh::max_edge_length() const
{
  double hmax = 0.0;
  for (const auto &tri : triangles_)
  {
    for (int k = 0; k < 3; ++k)
    {
      hmax = std::max(hmax, norm(vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]]));
    }
  }
  return hmax;
}

Mesh Mesh::with_vertices(std::vector<Vec2> vertices,
                         std::optional<AnalyticBoundary> analytic) const
{
  if (vertices.size() != vertices_.size())
  {
    throw InvalidInput("vertex count mismatch");
  }
  return Mesh(std::move(vertices), triangles_, analytic);
}

// ---------------------------------------------------------------------------

VectorField::VectorField(Tag tag, std::string name, std::function<Vec2(Vec2)> fn,
                         std::vector<Vec2> values)
  : tag_(tag), name_(std::move(name)), fn_(std::move(fn)), values_(std::move(values))
{
}

VectorField VectorField::dilation()
{
  return {Tag::Dilation, "dilate", [](Vec2 x) { return x; }, {}};
}

VectorField VectorField::translation(Vec2 direction)
{
  return {Tag::Translation, "translate", [direction](Vec2) { return direction; }, {}};
}

VectorField VectorField::stretch_x()
{
  return {Tag::StretchX, "stretch-x", [](Vec2 x) { return Vec2{x.x, 0.0}; }, {}};
}

VectorField VectorField::rotation()
{
  return {Tag::Rotation, "rotate", [](Vec2 x) { return Vec2{-x.y, x.x}; }, {}};
}

VectorField VectorField::analytic(std::function<Vec2(Vec2)> v, std::string name)
{
  return {Tag::Analytic, std::move(name), std::move(v), {}};
}

VectorField VectorField::samples(std::vector<Vec2> values)
{
  for (const auto &v : values)
  {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
    {
      throw InvalidInput("vector field sample is not finite");
    }
  }
  return {Tag::Samples, "samples", {}, std::move(values)};
}

Vec2 VectorField::at_vertex(const Mesh &mesh, int i) const
{
  if (tag_ == Tag::Samples)
  {
    if (values_.size() != mesh.num_vertices())
    {
      throw InvalidInput("vector field samples do not match the mesh");
    }
    return values_[i];
  }
  return fn_(mesh.vertices()[i]);
}

Vec2 VectorField::on_segment(const Mesh &mesh, int a, int b, double s) const
{
  if (tag_ == Tag::Samples)
  {
    return (1.0 - s) * at_vertex(mesh, a) + s * at_vertex(mesh, b);
  }
  const auto &x = mesh.vertices();
  return fn_((1.0 - s) * x[a] + s * x[b]);
}

Mesh perturb_mesh(const Mesh &mesh, const VectorField &v, double t)
{
  if (!std::isfinite(t))
  {
    throw InvalidInput("perturbation parameter is not finite");
  }
  if (t == 0.0)
  {
    return mesh;
  }
  std::vector<Vec2> moved(mesh.num_vertices());
  for (std::size_t i = 0; i < moved.size(); ++i)
  {
    const Vec2 d = v.at_vertex(mesh, static_cast<int>(i));
    if (!std::isfinite(d.x) || !std::isfinite(d.y))
    {
      throw InvalidInput("vector field is not finite at a vertex");
    }
    moved[i] = mesh.vertices()[i] + t * d;
  }
  for (const auto &tri : mesh.triangles())
  {
    if (cross(moved[tri[1]] - moved[tri[0]], moved[tri[2]] - moved[tri[0]]) <= 0.0)
    {
      throw InvalidInput("perturbation too large: a triangle inverts");
    }
  }

  std::optional<AnalyticBoundary> curve;
  if (const auto &c = mesh.analytic_boundary())
  {
    using K = AnalyticBoundary::Kind;
    switch (v.tag())
    {
      case VectorField::Tag::Dilation:
        curve = c->scaled(1.0 + t);
        break;
      case VectorField::Tag::StretchX:
        if (c->kind == K::Polygon)
        {
          curve = *c;
        }
        else
        {
          curve = AnalyticBoundary::ellipse(c->a * (1.0 + t), c->b);
        }
        break;
      case VectorField::Tag::Translation:
        if (c->kind == K::Polygon)
        {
          curve = *c;
        }
        break;
      case VectorField::Tag::Rotation:
        if (c->kind == K::Circle)
        {
          curve = AnalyticBoundary::circle(c->R * std::sqrt(1.0 + t * t));
        }
        else if (c->kind == K::Polygon)
        {
          curve = *c;
        }
        break;
      default:
        break;
    }
  }
  return mesh.with_vertices(std::move(moved), curve);
}

Mesh scale_mesh(const Mesh &mesh, double t)
{
  if (!(t > 0.0) || !std::isfinite(t))
  {
    throw InvalidInput("scale factor must be positive");
  }
  std::vector<Vec2> scaled(mesh.vertices());
  for (auto &x : scaled)
  {
    x *= t;
  }
  std::optional<AnalyticBoundary> curve;
  if (mesh.analytic_boundary())
  {
    curve = mesh.analytic_boundary()->scaled(t);
  }
  return mesh.with_vertices(std::move(scaled), curve);
}

// ---------------------------------------------------------------------------

std::vector<QuadraturePoint> volume_quadrature(const Mesh &mesh)
{
  std::vector<QuadraturePoint> q;
  q.reserve(3 * mesh.num_triangles());
  const auto &x = mesh.vertices();
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
  {
    const auto &tri = mesh.triangles()[t];
    const double w = mesh.triangle_area(t) / 3.0;
    for (int k = 0; k < 3; ++k)
    {
      q.push_back({0.5 * (x[tri[k]] + x[tri[(k + 1) % 3]]), w});
    }
  }
  return q;
}

std::vector<QuadraturePoint> surface_quadrature(const Mesh &mesh)
{
  std::vector<QuadraturePoint> q;
  q.reserve(2 * mesh.boundary_edges().size());
  const auto &x = mesh.vertices();
  for (const auto &e : mesh.boundary_edges())
  {
    const double w = 0.5 * mesh.edge_length(e);
    for (double s : kEdgeGaussParams)
    {
      q.push_back({(1.0 - s) * x[e[0]] + s * x[e[1]], w});
    }
  }
  return q;
}

namespace
{

double integrate(const std::vector<QuadraturePoint> &q, std::span<const double> samples)
{
  if (samples.size() != q.size())
  {
    throw InvalidInput("sample count does not match the quadrature rule");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    if (!std::isfinite(samples[i]))
    {
      throw InvalidInput("non-finite integrand sample");
    }
    s += q[i].weight * samples[i];
  }
  return s;
}

double integrate(const std::vector<QuadraturePoint> &q, const std::function<double(Vec2)> &f)
{
  std::vector<double> samples(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
  {
    samples[i] = f(q[i].x);
  }
  return integrate(q, samples);
}

}  // namespace

double volume_integral(const Mesh &mesh, std::span<const double> samples)
{
  return integrate(volume_quadrature(mesh), samples);
}

double surface_integral(const Mesh &mesh, std::span<const double> samples)
{
  return integrate(surface_quadrature(mesh), samples);
}

double volume_integral(const Mesh &mesh, const std::function<double(Vec2)> &f)
{
  return integrate(volume_quadrature(mesh), f);
}

double surface_integral(const Mesh &mesh, const std::function<double(Vec2)> &f)
{
  return integrate(surface_quadrature(mesh), f);
}

// ---------------------------------------------------------------------------

namespace
{

BoundaryGeometry edge_geometry(const Mesh &mesh)
{
  BoundaryGeometry g;
  const auto &x = mesh.vertices();
  g.curvature.assign(mesh.num_vertices(), 0.0);
  g.arc_weights.assign(mesh.num_vertices(), 0.0);
  for (const auto &e : mesh.boundary_edges())
  {
    const Vec2 d = x[e[1]] - x[e[0]];
    const double len = norm(d);
    g.normals.push_back({d.y / len, -d.x / len});
    g.arc_weights[e[0]] += 0.5 * len;
    g.arc_weights[e[1]] += 0.5 * len;
  }
  return g;
}

}  // namespace

BoundaryGeometry discrete_boundary_geometry(const Mesh &mesh)
{
  BoundaryGeometry g = edge_geometry(mesh);
  const auto &x = mesh.vertices();
  const auto &edges = mesh.boundary_edges();
  const auto &loops = mesh.loop_offsets();
  for (std::size_t l = 0; l + 1 < loops.size(); ++l)
  {
    const std::size_t begin = loops[l], end = loops[l + 1];
    for (std::size_t e = begin; e < end; ++e)
    {
      const std::size_t prev = (e == begin) ? end - 1 : e - 1;
      const Vec2 &a = x[edges[prev][0]];
      const Vec2 &o = x[edges[e][0]];
      const Vec2 &b = x[edges[e][1]];
      const Vec2 u = o - a, w = b - o;
      const double c = cross(u, w);
      const double scale = norm(u) * norm(w);
      if (std::abs(c) <= 1e-14 * scale)
      {
        ++g.collinear_warnings;
        g.curvature[edges[e][0]] = 0.0;
        continue;
      }
      // Circumcircle through a, o, b; positive for left turns.
      g.curvature[edges[e][0]] = 2.0 * c / (norm(u) * norm(w) * norm(b - a));
    }
  }
  return g;
}

BoundaryGeometry boundary_geometry(const Mesh &mesh)
{
  if (!mesh.analytic_boundary())
  {
    return discrete_boundary_geometry(mesh);
  }
  BoundaryGeometry g = edge_geometry(mesh);
  g.analytic = true;
  for (const auto &e : mesh.boundary_edges())
  {
    g.curvature[e[0]] = mesh.analytic_boundary()->curvature_at(mesh.vertices()[e[0]]);
  }
  return g;
}

// ---------------------------------------------------------------------------

void write_mesh(std::ostream &os, const Mesh &mesh)
{
  os << std::setprecision(17);
  os << "VERTICES " << mesh.num_vertices() << "\n";
  for (const auto &x : mesh.vertices())
  {
    os << x.x << " " << x.y << "\n";
  }
  os << "TRIANGLES " << mesh.num_triangles() << "\n";
  for (const auto &t : mesh.triangles())
  {
    os << t[0] << " " << t[1] << " " << t[2] << "\n";
  }
  os << "BOUNDARY " << mesh.boundary_edges().size() << "\n";
  for (const auto &e : mesh.boundary_edges())
  {
    os << e[0] << " " << e[1] << "\n";
  }
  if (mesh.analytic_boundary())
  {
    os << "CURVE " << mesh.analytic_boundary()->describe() << "\n";
  }
}

namespace
{

std::size_t read_header(std::istream &is, const std::string &name)
{
  std::string word;
  long long n = -1;
  if (!(is >> word) || word != name || !(is >> n) || n < 0)
  {
    throw InvalidInput("mesh file: expected section " + name);
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

Mesh read_mesh(std::istream &is)
{
  const std::size_t nv = read_header(is, "VERTICES");
  std::vector<Vec2> vertices(nv);
  for (auto &x : vertices)
  {
    if (!(is >> x.x >> x.y))
    {
      throw InvalidInput("mesh file: truncated VERTICES section");
    }
  }
  const std::size_t nt = read_header(is, "TRIANGLES");
  std::vector<Mesh::Triangle> triangles(nt);
  for (auto &t : triangles)
  {
    if (!(is >> t[0] >> t[1] >> t[2]))
    {
      throw InvalidInput("mesh file: truncated TRIANGLES section");
    }
  }
  const std::size_t nb = read_header(is, "BOUNDARY");
  std::vector<Mesh::Edge> boundary(nb);
  for (auto &e : boundary)
  {
    if (!(is >> e[0] >> e[1]))
    {
      throw InvalidInput("mesh file: truncated BOUNDARY section");
    }
  }

  std::optional<AnalyticBoundary> curve;
  std::string word;
  if (is >> word)
  {
    if (word != "CURVE")
    {
      throw InvalidInput("mesh file: unexpected section " + word);
    }
    std::string kind;
    is >> kind;
    if (kind == "circle")
    {
      double R = 0.0;
      is >> R;
      curve = AnalyticBoundary::circle(R);
    }
    else if (kind == "ellipse")
    {
      double a = 0.0, b = 0.0;
      is >> a >> b;
      curve = AnalyticBoundary::ellipse(a, b);
    }
    else if (kind == "polygon")
    {
      curve = AnalyticBoundary::polygon();
    }
    else
    {
      throw InvalidInput("mesh file: unknown curve " + kind);
    }
    if (is.fail())
    {
      throw InvalidInput("mesh file: malformed CURVE section");
    }
  }

  Mesh mesh(std::move(vertices), std::move(triangles), curve);

  // The listed boundary must be exactly the derived one, up to order.
  auto sorted = [](std::vector<Mesh::Edge> edges)
  {
    std::sort(edges.begin(), edges.end());
    return edges;
  };
  if (sorted(boundary) != sorted(mesh.boundary_edges()))
  {
    throw InvalidInput("mesh file: BOUNDARY does not match the triangles' boundary");
  }
  return mesh;
}

void write_mesh_file(const std::string &path, const Mesh &mesh)
{
  std::ofstream os(path);
  if (!os)
  {
    throw InvalidInput("cannot write mesh file " + path);
  }
  write_mesh(os, mesh);
}

Mesh read_mesh_file(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw InvalidInput("cannot open mesh file " + path);
  }
  return read_mesh(is);
}

}  // namespace robin

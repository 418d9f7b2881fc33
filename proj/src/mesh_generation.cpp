#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <unordered_map>

#include "robin/errors.hpp"
#include "robin/mesh.hpp"

namespace robin
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kMaxVertices = 4.0e6;
constexpr double kMinAngleDegrees = 20.0;

std::uint64_t undirected_key(int a, int b)
{
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

// Bowyer-Watson. Returns positively oriented triangles over the convex hull.
std::vector<Mesh::Triangle> delaunay(const std::vector<Vec2> &points)
{
  struct Tri
  {
    std::array<int, 3> v;
    Vec2 center;
    double radius2;
    bool alive;
  };

  const int n = static_cast<int>(points.size());
  std::vector<Vec2> pts(points);
  double xmin = pts[0].x, xmax = xmin, ymin = pts[0].y, ymax = ymin;
  for (const auto &p : pts)
  {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const Vec2 mid{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  pts.push_back(mid + Vec2{-20.0 * span, -10.0 * span});
  pts.push_back(mid + Vec2{20.0 * span, -10.0 * span});
  pts.push_back(mid + Vec2{0.0, 20.0 * span});

  auto make = [&pts](int a, int b, int c)
  {
    const Vec2 &pa = pts[a];
    const Vec2 ab = pts[b] - pa, ac = pts[c] - pa;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = norm2(ab), ac2 = norm2(ac);
    const Vec2 off{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return Tri{{a, b, c}, pa + off, norm2(off), true};
  };

  std::vector<Tri> tris;
  tris.reserve(2 * pts.size() + 16);
  tris.push_back(make(n, n + 1, n + 2));
  std::size_t dead = 0;

  std::vector<std::size_t> bad;
  std::unordered_map<std::uint64_t, std::pair<std::array<int, 2>, int>> rim;
  for (int i = 0; i < n; ++i)
  {
    const Vec2 &p = pts[i];
    bad.clear();
    for (std::size_t t = 0; t < tris.size(); ++t)
    {
      if (tris[t].alive && norm2(p - tris[t].center) < tris[t].radius2 * (1.0 - 1e-12))
      {
        bad.push_back(t);
      }
    }
    rim.clear();
    for (std::size_t t : bad)
    {
      const auto &v = tris[t].v;
      for (int k = 0; k < 3; ++k)
      {
        const int a = v[k], b = v[(k + 1) % 3];
        auto [it, inserted] = rim.try_emplace(undirected_key(a, b), std::array<int, 2>{a, b}, 0);
        ++it->second.second;
      }
      tris[t].alive = false;
      ++dead;
    }
    for (const auto &[key, entry] : rim)
    {
      if (entry.second == 1)
      {
        tris.push_back(make(entry.first[0], entry.first[1], i));
      }
    }
    if (dead > tris.size() / 2)
    {
      std::erase_if(tris, [](const Tri &t) { return !t.alive; });
      dead = 0;
    }
  }

  std::vector<Mesh::Triangle> out;
  for (const auto &t : tris)
  {
    if (t.alive && t.v[0] < n && t.v[1] < n && t.v[2] < n)
    {
      out.push_back(t.v);
    }
  }
  // Deterministic order independent of the cavity bookkeeping.
  for (auto &t : out)
  {
    std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_vertex_budget(double area, double h)
{
  if (area / (h * h * std::sqrt(3.0) / 2.0) > kMaxVertices)
  {
    throw InvalidInput("mesh size h too small for the memory budget");
  }
}

// Boundary samples (counterclockwise) plus a hexagonal lattice of interior
// points, triangulated and smoothed.
Mesh mesh_convex_domain(std::vector<Vec2> boundary,
                        const std::function<double(Vec2)> &signed_distance, double h,
                        const AnalyticBoundary &curve)
{
  const std::size_t nb = boundary.size();
  double xmax = 0.0, ymax = 0.0;
  for (const auto &p : boundary)
  {
    xmax = std::max(xmax, std::abs(p.x));
    ymax = std::max(ymax, std::abs(p.y));
  }
  std::vector<Vec2> pts(std::move(boundary));
  const double dy = h * std::sqrt(3.0) / 2.0;
  const int jmax = static_cast<int>(std::ceil(ymax / dy)) + 1;
  const int imax = static_cast<int>(std::ceil(xmax / h)) + 1;
  for (int j = -jmax; j <= jmax; ++j)
  {
    const double shift = (std::abs(j) % 2 == 1) ? 0.5 * h : 0.0;
    for (int i = -imax; i <= imax; ++i)
    {
      const Vec2 x{i * h + shift, j * dy};
      if (signed_distance(x) < -0.55 * h)
      {
        pts.push_back(x);
      }
    }
  }

  std::vector<Mesh::Triangle> tris = delaunay(pts);
  for (int round = 0; round < 3; ++round)
  {
    std::vector<std::vector<int>> neighbors(pts.size());
    for (const auto &t : tris)
    {
      for (int k = 0; k < 3; ++k)
      {
        neighbors[t[k]].push_back(t[(k + 1) % 3]);
        neighbors[t[k]].push_back(t[(k + 2) % 3]);
      }
    }
    for (auto &nb_list : neighbors)
    {
      std::sort(nb_list.begin(), nb_list.end());
      nb_list.erase(std::unique(nb_list.begin(), nb_list.end()), nb_list.end());
    }
    for (int sweep = 0; sweep < 4; ++sweep)
    {
      for (std::size_t i = nb; i < pts.size(); ++i)
      {
        Vec2 avg;
        for (int j : neighbors[i])
        {
          avg += pts[j];
        }
        pts[i] = (1.0 / static_cast<double>(neighbors[i].size())) * avg;
      }
    }
    tris = delaunay(pts);
  }

  Mesh mesh(std::move(pts), std::move(tris), curve);
  if (mesh.min_angle_degrees() < kMinAngleDegrees)
  {
    throw NumericalFailure("mesh generation produced an angle below 20 degrees");
  }
  return mesh;
}

double distance_to_polyline(const Vec2 &x, const std::vector<Vec2> &poly)
{
  double best = INFINITY;
  for (std::size_t i = 0; i < poly.size(); ++i)
  {
    const Vec2 &a = poly[i];
    const Vec2 &b = poly[(i + 1) % poly.size()];
    const Vec2 ab = b - a;
    const double s = std::clamp(dot(x - a, ab) / norm2(ab), 0.0, 1.0);
    best = std::min(best, norm(x - (a + s * ab)));
  }
  return best;
}

}  // namespace

Mesh generate_disk_mesh(double R, double h)
{
  if (!(R > 0.0) || !(h > 0.0) || !(h < R))
  {
    throw InvalidInput("disk mesh needs R > 0 and 0 < h < R");
  }
  check_vertex_budget(kPi * R * R, h);
  const int nb = std::max(12, static_cast<int>(std::ceil(2.0 * kPi * R / h)));
  std::vector<Vec2> boundary(nb);
  for (int k = 0; k < nb; ++k)
  {
    const double th = 2.0 * kPi * k / nb;
    boundary[k] = {R * std::cos(th), R * std::sin(th)};
  }
  return mesh_convex_domain(
      std::move(boundary), [R](Vec2 x) { return norm(x) - R; }, h,
      AnalyticBoundary::circle(R));
}

Mesh generate_ellipse_mesh(double a, double b, double h)
{
  if (!(a > 0.0) || !(b > 0.0) || !(h > 0.0) || !(h < std::min(a, b)))
  {
    throw InvalidInput("ellipse mesh needs a, b > 0 and 0 < h < min(a, b)");
  }
  check_vertex_budget(kPi * a * b, h);

  // Equal arc-length spacing from a fine cumulative-length table.
  constexpr int fine = 20000;
  std::vector<double> s(fine + 1, 0.0);
  auto point = [a, b](double th) { return Vec2{a * std::cos(th), b * std::sin(th)}; };
  for (int k = 1; k <= fine; ++k)
  {
    s[k] = s[k - 1] + norm(point(2.0 * kPi * k / fine) - point(2.0 * kPi * (k - 1) / fine));
  }
  const double perimeter = s[fine];
  const int nb = std::max(12, static_cast<int>(std::ceil(perimeter / h)));
  std::vector<Vec2> boundary(nb);
  for (int k = 0; k < nb; ++k)
  {
    const double target = perimeter * k / nb;
    const auto it = std::lower_bound(s.begin(), s.end(), target);
    const int hi = std::max(1, static_cast<int>(it - s.begin()));
    const double frac = (target - s[hi - 1]) / (s[hi] - s[hi - 1]);
    boundary[k] = point(2.0 * kPi * (hi - 1 + frac) / fine);
  }
  // Curve samples exactly on the ellipse.
  for (auto &x : boundary)
  {
    x = AnalyticBoundary::ellipse(a, b).project(x);
  }

  std::vector<Vec2> outline(4 * nb);
  for (int k = 0; k < 4 * nb; ++k)
  {
    outline[k] = point(2.0 * kPi * k / (4 * nb));
  }
  auto sd = [a, b, outline](Vec2 x)
  {
    const double d = distance_to_polyline(x, outline);
    return (x.x * x.x / (a * a) + x.y * x.y / (b * b) < 1.0) ? -d : d;
  };
  return mesh_convex_domain(std::move(boundary), sd, h, AnalyticBoundary::ellipse(a, b));
}

Mesh generate_rect_mesh(double width, double height, double h)
{
  if (!(width > 0.0) || !(height > 0.0) || !(h > 0.0) || !(h < std::min(width, height)))
  {
    throw InvalidInput("rect mesh needs width, height > 0 and 0 < h < min(width, height)");
  }
  check_vertex_budget(width * height, h);
  const int nx = static_cast<int>(std::ceil(width / h));
  const int ny = static_cast<int>(std::ceil(height / h));
  std::vector<Vec2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
  {
    for (int i = 0; i <= nx; ++i)
    {
      vertices.push_back({-0.5 * width + width * i / nx, -0.5 * height + height * j / ny});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Mesh::Triangle> tris;
  for (int j = 0; j < ny; ++j)
  {
    for (int i = 0; i < nx; ++i)
    {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0)
      {
        tris.push_back({v00, v10, v11});
        tris.push_back({v00, v11, v01});
      }
      else
      {
        tris.push_back({v00, v10, v01});
        tris.push_back({v10, v11, v01});
      }
    }
  }
  return Mesh(std::move(vertices), std::move(tris), AnalyticBoundary::polygon());
}

Mesh refine_uniform(const Mesh &mesh)
{
  std::vector<Vec2> vertices(mesh.vertices());
  std::unordered_map<std::uint64_t, int> midpoint;
  std::unordered_map<std::uint64_t, char> is_boundary;
  for (const auto &e : mesh.boundary_edges())
  {
    is_boundary[undirected_key(e[0], e[1])] = 1;
  }
  auto mid = [&](int a, int b)
  {
    const auto key = undirected_key(a, b);
    auto [it, inserted] = midpoint.try_emplace(key, static_cast<int>(vertices.size()));
    if (inserted)
    {
      Vec2 m = 0.5 * (vertices[a] + vertices[b]);
      if (is_boundary.count(key) && mesh.analytic_boundary())
      {
        m = mesh.analytic_boundary()->project(m);
      }
      vertices.push_back(m);
    }
    return it->second;
  };
  std::vector<Mesh::Triangle> tris;
  tris.reserve(4 * mesh.num_triangles());
  for (const auto &t : mesh.triangles())
  {
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    tris.push_back({t[0], m01, m20});
    tris.push_back({m01, t[1], m12});
    tris.push_back({m20, m12, t[2]});
    tris.push_back({m01, m12, m20});
  }
  return Mesh(std::move(vertices), std::move(tris), mesh.analytic_boundary());
}

}  // namespace robin

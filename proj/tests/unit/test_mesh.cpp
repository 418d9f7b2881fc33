#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "robin/errors.hpp"
#include "robin/mesh.hpp"

using namespace robin;

namespace
{

// Exact integral of x^2 over a triangle.
double triangle_x2(const Vec2 &a, const Vec2 &b, const Vec2 &c)
{
  const double area = 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  return area / 6.0 * (a.x * a.x + b.x * b.x + c.x * c.x + a.x * b.x + b.x * c.x + c.x * a.x);
}

}  // namespace

TEST(Mesh, DiskApproachesCircle)
{
  for (double h : {0.1, 0.05})
  {
    const Mesh m = generate_disk_mesh(1.0, h);
    EXPECT_NEAR(m.area(), M_PI, 2.0 * h * h) << h;
    EXPECT_NEAR(m.perimeter(), 2.0 * M_PI, 2.0 * h * h) << h;
    EXPECT_GE(m.min_angle_degrees(), 20.0);
    EXPECT_LE(m.max_edge_length(), 1.6 * h);
  }
}

TEST(Mesh, BoundaryVerticesLieOnCurve)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.1);
  for (const auto &e : m.boundary_edges())
  {
    const Vec2 x = m.vertices()[e[0]];
    EXPECT_NEAR(x.x * x.x / 2.25 + x.y * x.y, 1.0, 1e-12);
  }
}

TEST(Mesh, OrientationAndOutwardNormals)
{
  const Mesh m = generate_disk_mesh(1.0, 0.1);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
  {
    ASSERT_GT(m.triangle_area(t), 0.0);
  }
  const BoundaryGeometry g = boundary_geometry(m);
  for (std::size_t k = 0; k < m.boundary_edges().size(); ++k)
  {
    const auto &e = m.boundary_edges()[k];
    const Vec2 mid = 0.5 * (m.vertices()[e[0]] + m.vertices()[e[1]]);
    EXPECT_GT(dot(g.normals[k], mid), 0.0);
    EXPECT_NEAR(norm(g.normals[k]), 1.0, 1e-14);
  }
}

TEST(Mesh, CurvatureOfCircle)
{
  const Mesh m = generate_disk_mesh(2.0, 0.1);
  const BoundaryGeometry analytic = boundary_geometry(m);
  const BoundaryGeometry discrete = discrete_boundary_geometry(m);
  for (std::size_t i = 0; i < m.num_vertices(); ++i)
  {
    if (m.is_boundary_vertex(static_cast<int>(i)))
    {
      EXPECT_NEAR(analytic.curvature[i], 0.5, 1e-12);
      EXPECT_NEAR(discrete.curvature[i], 0.5, 5e-3);
    }
  }
}

TEST(Mesh, UniformRefinementPreservesAreaOfPolygon)
{
  const Mesh m = generate_rect_mesh(2.0, 1.0, 0.25);
  const Mesh r = refine_uniform(m);
  EXPECT_EQ(r.num_triangles(), 4 * m.num_triangles());
  EXPECT_NEAR(r.area(), 2.0, 1e-13);
  EXPECT_NEAR(m.area(), 2.0, 1e-13);
  EXPECT_NEAR(r.perimeter(), 6.0, 1e-13);
}

TEST(Mesh, RefinedDiskBoundaryReprojected)
{
  const Mesh r = refine_uniform(generate_disk_mesh(1.0, 0.2));
  for (const auto &e : r.boundary_edges())
  {
    EXPECT_NEAR(norm(r.vertices()[e[0]]), 1.0, 1e-12);
  }
}

TEST(Quadrature, ExactForQuadratics)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.15);
  double exact = 0.0;
  for (const auto &t : m.triangles())
  {
    exact += triangle_x2(m.vertices()[t[0]], m.vertices()[t[1]], m.vertices()[t[2]]);
  }
  EXPECT_NEAR(volume_integral(m, [](Vec2 x) { return x.x * x.x; }), exact, 1e-12);
  EXPECT_NEAR(volume_integral(m, [](Vec2) { return 1.0; }), m.area(), 1e-12);
  EXPECT_NEAR(surface_integral(m, [](Vec2) { return 1.0; }), m.perimeter(), 1e-12);
}

TEST(MeshIo, RoundTrip)
{
  const Mesh m = generate_disk_mesh(1.0, 0.2);
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.num_triangles(), m.num_triangles());
  for (std::size_t i = 0; i < m.num_vertices(); ++i)
  {
    EXPECT_EQ(r.vertices()[i].x, m.vertices()[i].x);
    EXPECT_EQ(r.vertices()[i].y, m.vertices()[i].y);
  }
  EXPECT_EQ(r.triangles(), m.triangles());
}

TEST(MeshIo, RejectsMalformedInput)
{
  for (const char *text : {"", "3 1\n0 0\n1 0\n", "3 1\n0 0\n1 0\n0 1\n0 1 7\n",
                           "3 1\n0 0\n1 0\n0 1\n0 0 1\n", "x y\n"})
  {
    std::istringstream is(text);
    EXPECT_THROW(read_mesh(is), InvalidInput) << text;
  }
}

TEST(Mesh, RejectsInvertedTriangle)
{
  std::vector<Vec2> v = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(Mesh(v, {{0, 2, 1}}), InvalidInput);
  EXPECT_NO_THROW(Mesh(v, {{0, 1, 2}}));
}

TEST(Perturbation, ScalingAndTranslation)
{
  const Mesh m = generate_ellipse_mesh(1.5, 1.0, 0.2);
  EXPECT_NEAR(scale_mesh(m, 2.0).area(), 4.0 * m.area(), 1e-12);
  const Mesh t = perturb_mesh(m, VectorField::translation({1.0, 2.0}), 0.1);
  EXPECT_NEAR(t.area(), m.area(), 1e-12);
  EXPECT_NEAR(t.vertices()[0].y, m.vertices()[0].y + 0.2, 1e-15);
  const Mesh d = perturb_mesh(m, VectorField::dilation(), 0.5);
  EXPECT_NEAR(d.area(), 2.25 * m.area(), 1e-12);
}

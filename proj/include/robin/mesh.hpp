#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robin/geometry.hpp"

namespace robin
{

// Exact description of the curve a mesh boundary was sampled from.
struct AnalyticBoundary
{
  enum class Kind
  {
    Circle,   // radius R, centered at the origin
    Ellipse,  // semi-axes a (x), b (y), centered at the origin
    Polygon   // straight sides; curvature zero away from corners
  };
  Kind kind = Kind::Polygon;
  double R = 0.0;
  double a = 0.0;
  double b = 0.0;

  static AnalyticBoundary circle(double R) { return {Kind::Circle, R, R, R}; }
  static AnalyticBoundary ellipse(double a, double b) { return {Kind::Ellipse, 0.0, a, b}; }
  static AnalyticBoundary polygon() { return {}; }

  // Signed curvature (positive on convex arcs) at the curve point nearest to
  // x along the ray from the origin.
  double curvature_at(const Vec2 &x) const;
  // Radial projection onto the curve; identity for polygons.
  Vec2 project(const Vec2 &x) const;
  double perimeter() const;
  double area() const;
  AnalyticBoundary scaled(double t) const;
  bool same_as(const AnalyticBoundary &other, double rtol = 1e-12) const;
  std::string describe() const;
};

// Triangulated planar domain. Immutable after construction: transformations
// return new meshes.
class Mesh
{
public:
  using Triangle = std::array<int, 3>;
  using Edge = std::array<int, 2>;

  // Triangles must be positively oriented. Boundary edges are derived from
  // the triangles, oriented with the domain on the left and chained into
  // closed loops.
  Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles,
       std::optional<AnalyticBoundary> analytic = std::nullopt);

  const std::vector<Vec2> &vertices() const { return vertices_; }
  const std::vector<Triangle> &triangles() const { return triangles_; }
  const std::vector<Edge> &boundary_edges() const { return boundary_edges_; }
  // Triangle owning boundary edge e.
  int boundary_triangle(std::size_t e) const { return boundary_triangle_[e]; }
  // Start offsets of each closed loop in boundary_edges(), plus a final end.
  const std::vector<std::size_t> &loop_offsets() const { return loop_offsets_; }
  const std::optional<AnalyticBoundary> &analytic_boundary() const { return analytic_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  bool is_boundary_vertex(int i) const { return on_boundary_[i]; }

  double triangle_area(std::size_t t) const;
  double area() const;
  double perimeter() const;
  double edge_length(const Edge &e) const;
  // Smallest interior angle over all triangles, in degrees.
  double min_angle_degrees() const;
  double max_edge_length() const;

  Mesh with_vertices(std::vector<Vec2> vertices,
                     std::optional<AnalyticBoundary> analytic) const;

private:
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Edge> boundary_edges_;
  std::vector<int> boundary_triangle_;
  std::vector<std::size_t> loop_offsets_;
  std::vector<char> on_boundary_;
  std::optional<AnalyticBoundary> analytic_;
};

Mesh generate_disk_mesh(double R, double h);
Mesh generate_ellipse_mesh(double a, double b, double h);
// Rectangle [-width/2, width/2] x [-height/2, height/2].
Mesh generate_rect_mesh(double width, double height, double h);
// Splits every triangle into four; new boundary vertices are projected onto
// the analytic curve when one is present.
Mesh refine_uniform(const Mesh &mesh);

// Perturbation field v driving Omega_t = {x + t v(x)}.
class VectorField
{
public:
  enum class Tag
  {
    Dilation,     // v = x
    Translation,  // v = constant
    StretchX,     // v = (x1, 0)
    Rotation,     // v = (-x2, x1)
    Analytic,
    Samples
  };

  static VectorField dilation();
  static VectorField translation(Vec2 direction);
  static VectorField stretch_x();
  static VectorField rotation();
  static VectorField analytic(std::function<Vec2(Vec2)> v, std::string name);
  // One value per mesh vertex, interpolated linearly in between.
  static VectorField samples(std::vector<Vec2> values);

  Tag tag() const { return tag_; }
  const std::string &name() const { return name_; }
  Vec2 at_vertex(const Mesh &mesh, int i) const;
  // Value at (1 - s) x_a + s x_b on the segment between vertices a and b.
  Vec2 on_segment(const Mesh &mesh, int a, int b, double s) const;

private:
  VectorField(Tag tag, std::string name, std::function<Vec2(Vec2)> fn, std::vector<Vec2> values);
  Tag tag_;
  std::string name_;
  std::function<Vec2(Vec2)> fn_;
  std::vector<Vec2> values_;
};

// Vertex-wise map y = x + t v(x). Throws InvalidInput if a triangle inverts.
Mesh perturb_mesh(const Mesh &mesh, const VectorField &v, double t);
Mesh scale_mesh(const Mesh &mesh, double t);

struct QuadraturePoint
{
  Vec2 x;
  double weight = 0.0;
};
// Three edge-midpoint points per triangle (weight area/3), in triangle order.
std::vector<QuadraturePoint> volume_quadrature(const Mesh &mesh);
// Two Gauss points per boundary edge (weight length/2), in edge order.
std::vector<QuadraturePoint> surface_quadrature(const Mesh &mesh);
// Parameters in [0, 1] of the two Gauss points along an edge.
inline constexpr std::array<double, 2> kEdgeGaussParams = {0.21132486540518713,
                                                           0.78867513459481287};

// Integrals from samples at the quadrature points above. Throws InvalidInput
// on a wrong sample count or a non-finite sample.
double volume_integral(const Mesh &mesh, std::span<const double> samples);
double surface_integral(const Mesh &mesh, std::span<const double> samples);
double volume_integral(const Mesh &mesh, const std::function<double(Vec2)> &f);
double surface_integral(const Mesh &mesh, const std::function<double(Vec2)> &f);

struct BoundaryGeometry
{
  std::vector<Vec2> normals;     // unit outward normal per boundary edge
  std::vector<double> curvature;  // per vertex, zero on interior vertices
  std::vector<double> arc_weights;  // half the adjacent boundary length, per vertex
  int collinear_warnings = 0;
  bool analytic = false;
};

// Curvature from the analytic curve when present, otherwise from the
// circumcircle through consecutive boundary vertices.
BoundaryGeometry boundary_geometry(const Mesh &mesh);
// Always the circumcircle estimator.
BoundaryGeometry discrete_boundary_geometry(const Mesh &mesh);

// Text format: "VERTICES n" / "TRIANGLES m" / "BOUNDARY k" sections with
// whitespace separated values and 0-based indices, optionally followed by
// "CURVE circle R" | "CURVE ellipse a b" | "CURVE polygon".
void write_mesh(std::ostream &os, const Mesh &mesh);
Mesh read_mesh(std::istream &is);
void write_mesh_file(const std::string &path, const Mesh &mesh);
Mesh read_mesh_file(const std::string &path);

}  // namespace robin

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "robin/geometry.hpp"

namespace robin
{

class Mesh;

// Schrödinger potential V(x). Immutable; copies share the underlying
// description.
class Potential
{
public:
  struct Constant
  {
    double value = 0.0;
  };
  // V(r) = sum_k coeffs[k] r^k with r = |x|.
  struct RadialPolynomial
  {
    std::vector<double> coeffs;
  };
  // V = c0 + cx x + cy y + cxx x^2 + cxy x y + cyy y^2.
  struct Quadratic
  {
    double c0 = 0.0, cx = 0.0, cy = 0.0, cxx = 0.0, cxy = 0.0, cyy = 0.0;
  };
  // V = amplitude * sin(wavenumber * x_axis), axis 0 or 1.
  struct Sine
  {
    double amplitude = 0.0;
    double wavenumber = 1.0;
    int axis = 0;
  };
  // Bilinear interpolation of samples on a tensor grid, values[j * nx + i]
  // at (x0 + i dx, y0 + j dy). Points outside the grid are clamped to it.
  struct GridSamples
  {
    double x0 = 0.0, y0 = 0.0, dx = 1.0, dy = 1.0;
    int nx = 0, ny = 0;
    std::vector<double> values;
  };
  struct Callback
  {
    std::function<double(Vec2)> fn;
    std::string name;
  };
  struct Sum
  {
    std::vector<Potential> terms;
  };
  using Kind =
      std::variant<Constant, RadialPolynomial, Quadratic, Sine, GridSamples, Callback, Sum>;

  Potential();
  explicit Potential(Kind kind);

  static Potential constant(double value);
  static Potential radial_polynomial(std::vector<double> coeffs);
  static Potential quadratic(const Quadratic &q);
  static Potential sine(double amplitude, double wavenumber, int axis);
  static Potential grid(GridSamples samples);
  static Potential callback(std::function<double(Vec2)> fn, std::string name);

  double operator()(const Vec2 &x) const;

  // Set when the potential is a single constant (possibly a sum of constants).
  std::optional<double> constant_value() const;
  bool is_zero() const;
  bool is_radial() const;
  // Profile V(r) for radial potentials; throws InvalidInput otherwise.
  std::function<double(double)> radial_profile() const;

  // Finite coefficients / samples everywhere. A callback is assumed finite.
  bool has_finite_description() const;
  // Callbacks cannot be written to JSON.
  bool serializable() const;

  Potential plus(const Potential &other) const;
  Potential shifted(double c) const;

  const Kind &kind() const { return *kind_; }
  std::string describe() const;

private:
  std::shared_ptr<const Kind> kind_;
};

// Domain descriptor. For the analytic kinds the mesh must carry the same
// curve; kind Mesh accepts any mesh.
struct DomainRef
{
  enum class Kind
  {
    Disk,
    Ellipse,
    Rect,
    Ball,
    Mesh
  };
  Kind kind = Kind::Mesh;
  double R = 1.0;       // disk, ball
  double a = 1.0;       // ellipse semi-axis along x
  double b = 1.0;       // ellipse semi-axis along y
  double width = 1.0;   // rect
  double height = 1.0;  // rect
  int n = 2;            // ball dimension
  std::string path;     // mesh file, optional

  static DomainRef disk(double R);
  static DomainRef ellipse(double a, double b);
  static DomainRef rect(double width, double height);
  static DomainRef ball(double R, int n);
  static DomainRef any_mesh(std::string path = {});

  // Domain of t * Omega.
  DomainRef scaled(double t) const;
  std::string describe() const;
};

// One instance of the Robin p-Laplacian Schrödinger eigenproblem.
struct ProblemSpec
{
  double p = 2.0;
  double beta = 1.0;
  Potential potential;
  std::optional<DomainRef> domain;

  ProblemSpec with_beta(double b) const;
  ProblemSpec with_potential(Potential v) const;
  ProblemSpec with_domain(DomainRef d) const;
};

// Empty when valid; otherwise one message per violation.
std::vector<std::string> validate_spec(const ProblemSpec &spec);
// Throws InvalidInput listing every violation.
void require_valid(const ProblemSpec &spec);

// Throws InvalidInput when the mesh does not carry the domain named by the
// spec.
void require_mesh_matches(const ProblemSpec &spec, const Mesh &mesh);

enum class Normalization
{
  LpUnit,  // integral of |u|^p equals one
  SupUnit  // max |u| equals one
};

// Summary of one regularization stage of the minimizer.
struct StageRecord
{
  double epsilon = 0.0;
  double value = 0.0;     // regularized quotient at the end of the stage
  double residual = 0.0;  // stage weak residual
  // Requested residual tolerance, raised to the rounding floor of the grid.
  double residual_tolerance = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // start value plus the accepted changes, one per step
};

struct EigenResult
{
  double lambda = 0.0;
  std::vector<double> u;
  Normalization normalization = Normalization::LpUnit;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double p = 2.0;
  double epsilon_final = 0.0;
  bool dirichlet = false;
  std::vector<StageRecord> stages;
  std::string message;
};

// Divides u by max |u|. Eigenvalue and diagnostics are unchanged.
EigenResult to_sup_unit(const EigenResult &result);

// (int |grad u|^p + int V |u|^p + beta int_{boundary} |u|^p) / int |u|^p on
// piecewise-linear u.
double rayleigh_quotient(std::span<const double> u, const ProblemSpec &spec, const Mesh &mesh);

void to_json(nlohmann::json &j, const Potential &v);
void from_json(const nlohmann::json &j, Potential &v);
void to_json(nlohmann::json &j, const DomainRef &d);
void from_json(const nlohmann::json &j, DomainRef &d);
void to_json(nlohmann::json &j, const ProblemSpec &s);
void from_json(const nlohmann::json &j, ProblemSpec &s);
// {"lambda", "residual", "iterations", "converged", "u", "normalization"}.
void to_json(nlohmann::json &j, const EigenResult &r);
void from_json(const nlohmann::json &j, EigenResult &r);

ProblemSpec read_spec_file(const std::string &path);
void write_spec_file(const std::string &path, const ProblemSpec &spec);

}  // namespace robin

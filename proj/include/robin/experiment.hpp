#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "robin/mesh.hpp"
#include "robin/model.hpp"
#include "robin/solver.hpp"

namespace robin
{

inline const std::vector<std::string> &experiment_names()
{
  static const std::vector<std::string> names = {
      "solve",   "mesh",          "dbeta",           "sweep-beta", "scaling",
      "shape-deriv", "hadamard", "potential-check", "radial",     "convergence-study"};
  return names;
}

struct MeshSettings
{
  std::string file;  // read when set, otherwise generated from the domain
  std::string shape;  // mesh subcommand only: disk, ellipse, rect
  double h = 0.05;
  int refine = 0;
  double R = 1.0, a = 1.5, b = 1.0, width = 1.0, height = 1.0;
};

struct FieldSettings
{
  std::string kind = "dilate";  // dilate, translate, stretch-x, rotate, file
  Vec2 direction{1.0, 0.0};     // translate
  std::string file;             // per-vertex "vx vy" lines
};

struct Thresholds
{
  double oracle_rel = 5e-3;
  double radial_oracle_rel = 1e-6;
  double dbeta_rel = 1e-2;
  double scaling_rel = 1e-8;
  double shape_rel = 3e-2;
  double translation_rel = 1e-3;
  double dilation_rel = 2e-2;
  double alt_rel = 1e-2;
  double hadamard_rel = 5e-3;
  double order_ratio_min = 3.0;
  double order_ratio_max = 5.0;
  double shift_abs = 1e-8;
  double min_angle = 20.0;
};

// Everything one run needs. Unknown JSON fields are rejected.
struct ExperimentConfig
{
  std::string experiment;
  std::optional<ProblemSpec> spec;
  std::string spec_file;
  MeshSettings mesh;
  SolverOptions solver;
  FieldSettings field;

  struct
  {
    double h_beta = 0.0;  // 0 selects 1e-3 max(1, beta)
    bool richardson = false;
    double beta1 = 0.0;  // sandwich partner, 0 selects 1.1 beta
  } dbeta;
  struct
  {
    std::vector<double> betas = {0.5, 1, 2, 4, 8, 16, 32};
    bool with_fd = true;
  } sweep;
  struct
  {
    std::vector<double> ts = {0.5, 2.0, 3.0};
    std::vector<double> monotonicity_ts = {2.0};
  } scaling;
  struct
  {
    double t0 = 1e-3;
    bool richardson = false;
    std::string recovery = "element";  // element, patch
    bool robin_normal = false;
  } shape;
  struct
  {
    std::vector<double> ts = {4e-3, 2e-3, 1e-3};
  } hadamard;
  struct
  {
    std::string mode = "shift";  // mono, cont, shift, coercive
    int pairs = 20;
    int samples = 200;
    std::uint64_t seed = 1;
    double shift = 5.0;
    std::optional<Potential> V1, V2;
  } potential_check;
  struct
  {
    double p = 2.0, beta = 1.0, R = 1.0;
    int n = 2;
    std::string V = "const:0";
    int intervals = 10000;
  } radial;
  struct
  {
    std::vector<double> hs = {0.1, 0.05, 0.025};
  } study;
  Thresholds thresholds;
};

ExperimentConfig parse_config(const nlohmann::json &j);
ExperimentConfig read_config_file(const std::string &path);
// Canonical form with every default filled in; hashed for reports.
nlohmann::json config_to_json(const ExperimentConfig &config);
// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

// "const:c" or "poly:c0,c1,..." (coefficients of r^k).
Potential parse_radial_potential(const std::string &text);

// Spec from the config (inline or file); throws InvalidInput when absent.
ProblemSpec resolve_spec(const ExperimentConfig &config);
// Reads the mesh file or generates one for the spec's domain.
Mesh resolve_mesh(const ExperimentConfig &config, const ProblemSpec &spec);
Mesh generate_domain_mesh(const DomainRef &domain, double h);
VectorField resolve_field(const FieldSettings &field, const Mesh &mesh);

struct ConvergenceStudy
{
  std::vector<double> hs;
  std::vector<double> lambdas;
  std::vector<bool> converged;
  // Order-2 Richardson value from the two finest levels.
  double extrapolated = 0.0;
  // log(|l1 - l2| / |l2 - l3|) / log(h ratio) from the three finest levels;
  // NaN with fewer levels.
  double observed_order = 0.0;
  std::optional<double> oracle;
  std::string oracle_name;
  std::vector<std::string> warnings;
};

// Solves on generated meshes for a decreasing h list. The oracle is the
// Bessel root for disks with p = 2, V = 0, the radial solver for other
// radial problems on disks, and absent otherwise.
ConvergenceStudy convergence_study(const ProblemSpec &spec, const std::vector<double> &hs,
                                   const SolverOptions &opts = {});

struct RunOutcome
{
  int exit_code = 0;  // 0 pass, 1 numerical failure or failed check, 2 invalid input
  nlohmann::json summary;
  std::vector<std::string> files;
};

// Runs the experiment, writing summary.json and tables into out_dir.
RunOutcome run_experiment(const ExperimentConfig &config, const std::string &out_dir);

}  // namespace robin

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robin/errors.hpp"
#include "robin/experiment.hpp"

using namespace robin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

json disk_spec()
{
  return json::parse(R"({"p": 2, "beta": 1, "potential": {"kind": "constant", "value": 0},
                         "domain": {"kind": "disk", "R": 1}})");
}

json config(const std::string &experiment)
{
  return {{"experiment", experiment}, {"spec", disk_spec()}, {"mesh", {{"h", 0.1}}}};
}

fs::path scratch(const std::string &name)
{
  const fs::path p = fs::temp_directory_path() / ("robin_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p)
{
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path &p)
{
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  return line;
}

int run_cli(const std::string &args)
{
  const int status = std::system((std::string(ROBIN_SPECTRA_EXE) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsAndStrictKeys)
{
  const ExperimentConfig c = parse_config(config("dbeta"));
  EXPECT_EQ(c.thresholds.dbeta_rel, 1e-2);
  EXPECT_EQ(c.sweep.betas.size(), 7u);
  json bad = config("dbeta");
  bad["dbeta"]["hbeta"] = 1e-3;
  EXPECT_THROW(parse_config(bad), InvalidInput);
  json typo = config("dbeta");
  typo["thresholds"] = {{"dbeta", 1}};
  EXPECT_THROW(parse_config(typo), InvalidInput);
  json wrong_type = config("dbeta");
  wrong_type["mesh"]["h"] = "small";
  EXPECT_THROW(parse_config(wrong_type), InvalidInput);
  EXPECT_THROW(parse_config(config("frobnicate")), InvalidInput);
}

TEST(Config, CanonicalFormRoundTripsAndHashes)
{
  const ExperimentConfig c = parse_config(config("sweep-beta"));
  const json canon = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(canon)).dump(), canon.dump());
  EXPECT_EQ(config_hash(parse_config(canon)), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  json other = config("sweep-beta");
  other["sweep"]["betas"] = {1, 2};
  EXPECT_NE(config_hash(parse_config(other)), config_hash(c));
}

TEST(Config, RadialPotentialSyntax)
{
  EXPECT_EQ(parse_radial_potential("const:2.5")({0.3, 0.4}), 2.5);
  EXPECT_DOUBLE_EQ(parse_radial_potential("poly:1,0,2")({0.6, 0.8}), 3.0);
  for (const char *bad : {"const:", "poly:", "poly:1,x", "exp:1", "const:1e999"})
  {
    EXPECT_THROW(parse_radial_potential(bad), InvalidInput) << bad;
  }
}

TEST(Run, SolveWritesResultAndSummary)
{
  const fs::path out = scratch("solve");
  const RunOutcome r = run_experiment(parse_config(config("solve")), out.string());
  EXPECT_EQ(r.exit_code, 0);
  const json result = json::parse(slurp(out / "result.json"));
  for (const char *key : {"lambda", "residual", "iterations", "converged", "u"})
  {
    EXPECT_TRUE(result.contains(key)) << key;
  }
  const json summary = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["config_hash"], config_hash(parse_config(config("solve"))));
  EXPECT_TRUE(summary["pass"].get<bool>());
  EXPECT_EQ(summary["config"]["thresholds"]["dbeta_rel"], 1e-2);
  EXPECT_EQ(first_line(out / "stages.csv"), "stage,epsilon,value,residual,residual_tolerance,iterations,converged");
}

TEST(Run, OutputsAreByteDeterministic)
{
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  json c = config("dbeta");
  c["spec"]["p"] = 2.5;
  run_experiment(parse_config(c), a.string());
  setenv("ROBIN_SPECTRA_THREADS", "1", 1);
  run_experiment(parse_config(c), b.string());
  unsetenv("ROBIN_SPECTRA_THREADS");
  for (const char *f : {"dbeta.csv", "summary.json"})
  {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(first_line(a / "dbeta.csv"),
            "beta,lambda,dldb_formula,dldb_fd,rel_err,sandwich_lower,sandwich_upper");
}

TEST(Run, ScalingPasses)
{
  json c = config("scaling");
  c["scaling"] = {{"ts", {2.0}}, {"monotonicity_ts", {2.0}}};
  const fs::path out = scratch("scaling");
  const RunOutcome r = run_experiment(parse_config(c), out.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_LE(r.summary["checks"][0]["value"].get<double>(), 1e-8);
}

TEST(Run, ShapeCsvHasTermRows)
{
  json c = config("shape-deriv");
  c["field"] = {{"kind", "dilate"}};
  const fs::path out = scratch("shape");
  const RunOutcome r = run_experiment(parse_config(c), out.string());
  ASSERT_TRUE(fs::exists(out / "shape.csv"));
  std::ifstream is(out / "shape.csv");
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(is, line))
  {
    terms.push_back(line.substr(0, line.find(',')));
  }
  const std::vector<std::string> expect = {"term",           "grad_term",      "potential_term",
                                           "eigen_term",     "curvature_term", "robin_term",
                                           "total"};
  EXPECT_EQ(terms, expect);
  EXPECT_TRUE(r.summary.contains("dilation_prediction"));
}

TEST(Run, ValidationFailuresExitTwo)
{
  json c = config("convergence-study");
  c["study"] = {{"hs", json::array()}};
  EXPECT_EQ(run_experiment(parse_config(c), scratch("empty").string()).exit_code, 2);
  json neg = config("solve");
  neg["spec"]["beta"] = -1;
  EXPECT_EQ(run_experiment(parse_config(neg), scratch("neg").string()).exit_code, 2);
  json bad_mesh = config("solve");
  bad_mesh["mesh"]["file"] = "/nonexistent/mesh.txt";
  EXPECT_EQ(run_experiment(parse_config(bad_mesh), scratch("nomesh").string()).exit_code, 2);
}

TEST(Run, FailedCheckExitsOne)
{
  json c = config("dbeta");
  c["thresholds"] = {{"dbeta_rel", 1e-30}};
  const RunOutcome r = run_experiment(parse_config(c), scratch("fail").string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_FALSE(r.summary["pass"].get<bool>());
}

TEST(Cli, ExitCodes)
{
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "spec.json") << disk_spec().dump();
    std::ofstream(dir / "bad.json") << "{\"p\": 2,";
    std::ofstream(dir / "cfg.json") << json{{"experiment", "radial"}, {"radial", {{"beta", 2.0}}}}.dump();
  }
  const std::string out = " --out " + (dir / "out").string();
  EXPECT_EQ(run_cli("solve --spec " + (dir / "spec.json").string() + " --h 0.2" + out), 0);
  EXPECT_EQ(run_cli("solve --config " + (dir / "bad.json").string() + out), 2);
  EXPECT_EQ(run_cli("solve --spec " + (dir / "bad.json").string() + out), 2);
  EXPECT_EQ(run_cli("radial --config " + (dir / "cfg.json").string() + out), 0);
  EXPECT_EQ(run_cli("solve --config " + (dir / "cfg.json").string() + out), 2);
  EXPECT_EQ(run_cli("radial --p 0.5" + out), 2);
  EXPECT_EQ(run_cli("radial --V poly:1,x" + out), 2);
  EXPECT_EQ(run_cli("mesh --shape disk --h 0.2" + out), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "mesh.txt"));
  EXPECT_EQ(run_cli("mesh --shape hexagon" + out), 2);
  EXPECT_EQ(run_cli("potential-check --mode sideways --spec " + (dir / "spec.json").string() + out), 2);
  EXPECT_EQ(run_cli("nosuchcommand"), 2);
}

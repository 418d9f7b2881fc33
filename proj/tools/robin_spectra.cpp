// robin-spectra <subcommand> --config file.json [--out dir] [overrides]
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "robin/errors.hpp"
#include "robin/experiment.hpp"

using nlohmann::json;

namespace
{

struct Overrides
{
  std::string config, out = "robin-out";
  std::optional<std::string> spec, mesh, shape, field, field_file, mode, V, recovery;
  std::optional<double> h, R, a, b, h_beta, t0, p, beta, shift;
  std::optional<int> refine, n, pairs, samples, intervals;
  std::optional<std::uint64_t> seed;
  std::vector<double> betas, ts, hs;
  bool richardson = false;
};

std::vector<double> split_numbers(const std::string &s)
{
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size())
    {
      throw robin::InvalidInput("bad number \"" + item + "\"");
    }
    out.push_back(v);
  }
  return out;
}

void add_common(CLI::App *sub, Overrides &o, const std::string &name)
{
  sub->set_help_flag("--help", "print this help");
  sub->add_option("--config", o.config, "experiment config JSON");
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--spec", o.spec, "problem spec JSON");
  sub->add_option("--mesh", o.mesh, "mesh file");
  sub->add_option("--h", o.h, "mesh size for generated meshes");
  sub->add_option("--refine", o.refine, "uniform refinements");
  if (name == "mesh" || name == "hadamard")
  {
    sub->add_option("--shape", o.shape, "disk, ellipse or rect");
    sub->add_option("--R", o.R, "disk radius");
    sub->add_option("--a", o.a, "ellipse semi-axis along x");
    sub->add_option("--b", o.b, "ellipse semi-axis along y");
  }
  if (name == "dbeta")
  {
    sub->add_option("--h-beta", o.h_beta, "finite-difference step in beta");
    sub->add_flag("--richardson", o.richardson, "add a Richardson-extrapolated FD value");
  }
  if (name == "sweep-beta")
  {
    sub->add_option_function<std::string>(
        "--betas", [&o](const std::string &s) { o.betas = split_numbers(s); }, "comma list");
  }
  if (name == "shape-deriv" || name == "hadamard")
  {
    sub->add_option("--field", o.field, "dilate, translate, stretch-x, rotate or file");
    sub->add_option("--field-file", o.field_file, "per-vertex field for --field file");
  }
  if (name == "shape-deriv")
  {
    sub->add_option("--t0", o.t0, "finite-difference step in t");
    sub->add_option("--recovery", o.recovery, "element or patch gradients");
    sub->add_flag("--richardson", o.richardson, "add a Richardson-extrapolated FD value");
  }
  if (name == "hadamard")
  {
    sub->add_option_function<std::string>(
        "--ts", [&o](const std::string &s) { o.ts = split_numbers(s); }, "comma list");
  }
  if (name == "scaling")
  {
    sub->add_option_function<std::string>(
        "--ts", [&o](const std::string &s) { o.ts = split_numbers(s); }, "comma list");
  }
  if (name == "potential-check")
  {
    sub->add_option("--mode", o.mode, "mono, cont, shift or coercive");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--pairs", o.pairs, "number of potential pairs");
    sub->add_option("--samples", o.samples, "coercivity samples");
    sub->add_option("--shift", o.shift, "constant for the shift identity");
  }
  if (name == "radial")
  {
    sub->add_option("--p", o.p, "exponent");
    sub->add_option("--beta", o.beta, "Robin parameter");
    sub->add_option("--R", o.R, "ball radius");
    sub->add_option("--n", o.n, "dimension");
    sub->add_option("--V", o.V, "const:<c> or poly:<c0,c1,...>");
    sub->add_option("--intervals", o.intervals, "radial grid intervals");
  }
  if (name == "convergence-study")
  {
    sub->add_option_function<std::string>(
        "--hs", [&o](const std::string &s) { o.hs = split_numbers(s); }, "comma list");
  }
}

json load_json(const std::string &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw robin::InvalidInput("cannot open " + path);
  }
  return json::parse(is);
}

template <class T>
void set(json &j, const char *section, const char *key, const std::optional<T> &v)
{
  if (v)
  {
    j[section][key] = *v;
  }
}

json build_config(const std::string &name, const Overrides &o)
{
  json j = o.config.empty() ? json::object() : load_json(o.config);
  if (!j.is_object())
  {
    throw robin::InvalidInput("config must be a JSON object");
  }
  if (j.contains("experiment") && j["experiment"] != name)
  {
    throw robin::InvalidInput("config is for \"" + j["experiment"].dump() +
                              "\", not \"" + name + "\"");
  }
  j["experiment"] = name;
  if (o.spec)
  {
    j.erase("spec");
    j["spec_file"] = *o.spec;
  }
  set(j, "mesh", "file", o.mesh);
  set(j, "mesh", "h", o.h);
  set(j, "mesh", "refine", o.refine);
  set(j, "mesh", "shape", o.shape);
  if (name != "radial")
  {
    set(j, "mesh", "R", o.R);
  }
  set(j, "mesh", "a", o.a);
  set(j, "mesh", "b", o.b);
  set(j, "dbeta", "h_beta", o.h_beta);
  if (o.richardson)
  {
    j[name == "dbeta" ? "dbeta" : "shape"]["richardson"] = true;
  }
  if (!o.betas.empty())
  {
    j["sweep"]["betas"] = o.betas;
  }
  if (!o.ts.empty())
  {
    j[name == "scaling" ? "scaling" : "hadamard"]["ts"] = o.ts;
  }
  if (!o.hs.empty())
  {
    j["study"]["hs"] = o.hs;
  }
  set(j, "field", "kind", o.field);
  set(j, "field", "file", o.field_file);
  set(j, "shape", "t0", o.t0);
  set(j, "shape", "recovery", o.recovery);
  set(j, "potential_check", "mode", o.mode);
  set(j, "potential_check", "seed", o.seed);
  set(j, "potential_check", "pairs", o.pairs);
  set(j, "potential_check", "samples", o.samples);
  set(j, "potential_check", "shift", o.shift);
  set(j, "radial", "p", o.p);
  set(j, "radial", "beta", o.beta);
  if (name == "radial")
  {
    set(j, "radial", "R", o.R);
  }
  set(j, "radial", "n", o.n);
  set(j, "radial", "V", o.V);
  set(j, "radial", "intervals", o.intervals);
  return j;
}

void print_summary(const robin::RunOutcome &r)
{
  const json &s = r.summary;
  std::cout << s.value("experiment", "") << " config " << s.value("config_hash", "") << "\n";
  if (s.contains("checks"))
  {
    for (const auto &c : s["checks"])
    {
      std::cout << (c["pass"].get<bool>() ? "  PASS " : "  FAIL ") << c["name"].get<std::string>()
                << " value=" << c["value"].dump() << " threshold=" << c["threshold"].dump() << "\n";
    }
  }
  if (s.contains("warnings"))
  {
    for (const auto &w : s["warnings"])
    {
      std::cout << "  warning: " << w.get<std::string>() << "\n";
    }
  }
  if (s.contains("error"))
  {
    std::cerr << "error: " << s["error"].get<std::string>() << "\n";
  }
  for (const auto &f : r.files)
  {
    std::cout << "  wrote " << f << "\n";
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Robin p-Laplacian eigenvalue solver and verification lab", "robin-spectra"};
  app.require_subcommand(1);
  Overrides o;
  for (const std::string &name : robin::experiment_names())
  {
    add_common(app.add_subcommand(name), o, name);
  }
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError &e)
  {
    app.exit(e);
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  robin::ExperimentConfig config;
  try
  {
    config = robin::parse_config(build_config(name, o));
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const robin::RunOutcome r = robin::run_experiment(config, o.out);
  print_summary(r);
  return r.exit_code;
}

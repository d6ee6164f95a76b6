// sparsekin command line: run presets, fit damping rates, compare marginals

#include "sparsekin/driver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace sparsekin;

namespace
{
int do_run(std::string const &file, std::vector<std::string> const &sets, std::string const &out)
{
  std::map<std::string, std::string> values;
  if (!file.empty())
  {
    std::ifstream is(file);
    if (!is)
      throw std::runtime_error("cannot open config " + file);
    values = read_key_values(is);
  }
  for (auto const &s : sets)
  {
    auto const eq = s.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    values[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!out.empty())
    values["output"] = out;

  run_config const config = make_config(values);
  std::cerr << "problem " << to_string(config.problem) << ", grid " << to_string(config.grid)
            << ", dt " << config.dt << ", T " << config.t_final << '\n';
  run_result const r = run(config, [](int step, adapt_result const &res, adaptive_grid const &) {
    if (step % 10 == 0)
      std::cerr << "step " << step << ": " << res.report.elements_after_refinement
                << " elements, " << res.report.gmres_iterations << " GMRES iterations\n";
  });
  if (!r.records.empty())
  {
    auto const &last = r.records.back();
    std::cout << "steps " << r.steps << " t " << r.t << " dn " << last.dn << " dmom "
              << last.dmom << " denergy " << last.denergy << '\n';
  }
  if (r.solver_failure)
  {
    std::cerr << "failure: " << r.message << '\n';
    return 2;
  }
  return 0;
}

int do_fit(std::string const &csv)
{
  std::ifstream is(csv);
  if (!is)
    throw std::runtime_error("cannot open " + csv);
  auto const records = read_timeseries(is);
  std::vector<double> t, e;
  for (auto const &r : records)
  {
    t.push_back(r.t);
    e.push_back(r.epot);
  }
  std::cout.precision(10);
  std::cout << "gamma " << damping_rate_fit(t, e) << '\n';
  return 0;
}

int do_compare(std::string const &ref, std::string const &dir, std::string const &weight)
{
  std::ifstream a(ref);
  if (!a)
    throw std::runtime_error("cannot open " + ref);
  auto const path = std::filesystem::path(dir) / ("final_" + weight + ".csv");
  std::ifstream b(path);
  if (!b)
    throw std::runtime_error("cannot open " + path.string());
  std::cout.precision(10);
  std::cout << "l2 " << lattice_l2_difference(a, b) << '\n';
  return 0;
}
} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"adaptive sparse-grid DG solver for Vlasov-Poisson-Lenard-Bernstein"};
  app.require_subcommand(1);

  std::string config_file, out_dir;
  std::vector<std::string> sets;
  auto *run_cmd = app.add_subcommand("run", "run a configuration file");
  run_cmd->add_option("config", config_file, "key=value configuration file");
  run_cmd->add_option("--set", sets, "override, key=value")->take_all();
  run_cmd->add_option("--output", out_dir, "output directory");

  std::string csv;
  auto *fit_cmd = app.add_subcommand("fit-gamma", "damping rate of a timeseries.csv");
  fit_cmd->add_option("timeseries", csv)->required();

  std::string ref, run_dir, weight = "g1";
  auto *cmp_cmd = app.add_subcommand("compare", "L2 difference of reduced moments");
  cmp_cmd->add_option("--ref", ref, "reference lattice CSV")->required();
  cmp_cmd->add_option("--run", run_dir, "run output directory")->required();
  cmp_cmd->add_option("--weight", weight)->check(CLI::IsMember({"g1", "g2", "g3"}));

  CLI11_PARSE(app, argc, argv);
  try
  {
    if (*run_cmd)
      return do_run(config_file, sets, out_dir);
    if (*fit_cmd)
      return do_fit(csv);
    return do_compare(ref, run_dir, weight);
  }
  catch (std::exception const &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

// hpmg: adaptive FEM with the local multigrid solver.
//
//   hpmg run      --problem l_shape --p 2 --max-dofs 1e5 --out runs/l2
//   hpmg validate --problem checkerboard --k 2 --p 2 --out runs/c22
//   hpmg rates    runs/l2/history.csv runs/c22/history.csv --skip 3
//   hpmg sweep    --problems checkerboard,stripes --ps 1,2 --ks 1,2,3
//
// Exit status: 0 success, 1 numerical failure, 2 usage error.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hpmg/adaptivity.hpp"
#include "hpmg/errors.hpp"
#include "hpmg/history.hpp"
#include "hpmg/mesh.hpp"
#include "hpmg/problems.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hpmg;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "l_shape";
  int k = 1;
  int p = 1;
  double theta = 0.5;
  double mu = 0.1;
  double max_dofs = 1e4;
  std::string mode = "afem";
  std::string out = ".";
  std::string mesh_size = "area";
  std::vector<int> dump_levels;
  bool plot = false;
};

void to_json(json& j, const RunConfig& c) {
  j = json{{"problem", c.problem}, {"k", c.k},       {"p", c.p},
           {"theta", c.theta},     {"mu", c.mu},     {"max_dofs", c.max_dofs},
           {"mode", c.mode},       {"out", c.out},   {"mesh_size", c.mesh_size}};
}

// Values from the file; flags given on the command line win.
void apply_config_file(const std::string& path, RunConfig& c, const CLI::App& app) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (j.contains(key) && app.count(flag) == 0) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    take("problem", "--problem", c.problem);
    take("k", "--k", c.k);
    take("p", "--p", c.p);
    take("theta", "--theta", c.theta);
    take("mu", "--mu", c.mu);
    take("max_dofs", "--max-dofs", c.max_dofs);
    take("mode", "--mode", c.mode);
    take("out", "--out", c.out);
    take("mesh_size", "--mesh-size", c.mesh_size);
  } catch (const json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

void add_run_options(CLI::App* cmd, RunConfig& c, std::string& config_file) {
  cmd->add_option("--problem", c.problem, "l_shape, checkerboard, stripes, unit_square or zero");
  cmd->add_option("--k", c.k, "contrast parameter of checkerboard and stripes");
  cmd->add_option("--p", c.p, "polynomial degree")->check(CLI::PositiveNumber);
  cmd->add_option("--theta", c.theta, "Doerfler parameter in (0, 1]");
  cmd->add_option("--mu", c.mu, "solver stopping parameter: zeta <= mu * eta");
  cmd->add_option("--max-dofs", c.max_dofs, "stop once a level has more free dofs");
  cmd->add_option("--mode", c.mode, "afem, oversolve (mu = 1e-5) or validate")
      ->check(CLI::IsMember({"afem", "oversolve", "validate"}));
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--config", config_file, "JSON file with the same keys as the flags");
  cmd->add_option("--dump-mesh", c.dump_levels, "levels whose mesh is written to mesh_L<l>.txt")->delimiter(',');
  cmd->add_option("--mesh-size", c.mesh_size, "estimator weight: area (|T|^1/2) or diam")
      ->check(CLI::IsMember({"area", "diam"}));
  cmd->add_flag("--plot", c.plot, "write plot.gp");
}

AfemParams params_of(const RunConfig& c) {
  AfemParams par;
  par.p = c.p;
  par.theta = c.theta;
  par.mu = c.mode == "oversolve" ? 1e-5 : c.mu;
  par.max_dofs = static_cast<long>(c.max_dofs);
  par.validate = c.mode != "afem";
  par.mesh_size = c.mesh_size == "diam" ? MeshSizeWeight::diameter : MeshSizeWeight::area_root;
  par.check();
  return par;
}

fs::path output_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (!fs::is_directory(out)) throw UsageError("output directory " + out + " is not writable");
  return fs::path(out);
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write " + path.string());
  return os;
}

double iteration_mean(const std::vector<int>& its) {
  double s = 0.0;
  for (int i : its) s += i;
  return its.empty() ? 0.0 : s / static_cast<double>(its.size());
}

int cmd_run(const RunConfig& c) {
  const AfemParams par = params_of(c);
  const ProblemSpec problem = problem_by_name(c.problem, c.k);
  const fs::path dir = output_dir(c.out);

  AfemObserver obs;
  if (!c.dump_levels.empty())
    obs.on_level_start = [&](const SolverHierarchy& h) {
      const int L = h.finest_level();
      if (std::find(c.dump_levels.begin(), c.dump_levels.end(), L) == c.dump_levels.end()) return;
      auto os = open_out(dir / ("mesh_L" + std::to_string(L) + ".txt"));
      write_mesh(os, h.finest_mesh());
    };
  const AfemHistory h = afem_run(problem, par, obs);

  {
    auto os = open_out(dir / "history.csv");
    write_history_csv(os, h, par.validate);
  }
  const auto fin = h.final_records();
  const auto its = h.iterations_per_level();
  json summary;
  summary["config"] = c;
  summary["config"]["mu"] = par.mu;
  summary["levels"] = fin.size();
  summary["final_ndof"] = fin.back().ndof;
  summary["final_eta"] = fin.back().eta;
  summary["mean_iterations"] = iteration_mean(its);
  summary["max_iterations"] = *std::max_element(its.begin(), its.end());
  auto os = open_out(dir / "run.json");
  os << summary.dump(2) << '\n';
  if (c.plot) {
    auto gp = open_out(dir / "plot.gp");
    gp << gnuplot_script("history.csv", c.problem + " p=" + std::to_string(c.p));
  }
  std::printf("%s p=%d: %zu levels, final ndof %ld, eta %.4e, iterations mean %.4f max %d\n", c.problem.c_str(),
              c.p, fin.size(), fin.back().ndof, fin.back().eta, iteration_mean(its),
              *std::max_element(its.begin(), its.end()));
  return 0;
}

int cmd_rates(const std::vector<std::string>& files, int skip, const std::string& out) {
  std::ostringstream table;
  table << "problem,p,k,rate_ndof,rate_cost\n";
  for (const auto& f : files) {
    std::ifstream is(f);
    if (!is) throw UsageError("cannot read " + f);
    AfemHistory h;
    try {
      h = read_history_csv(is);
    } catch (const std::runtime_error& e) {
      throw UsageError(f + ": " + e.what());
    }
    // metadata from the run.json written next to the history, if any
    std::string problem = fs::path(f).stem().string();
    int p = 0, k = 0;
    std::ifstream meta(fs::path(f).parent_path() / "run.json");
    if (meta) {
      const json j = json::parse(meta, nullptr, false);
      if (!j.is_discarded() && j.contains("config")) {
        problem = j["config"].value("problem", problem);
        p = j["config"].value("p", 0);
        k = j["config"].value("k", 0);
      }
    }
    int s = skip;
    if (s < 0) {
      s = 0;
      for (const auto& r : h.final_records())
        if (r.ndof < 1000) s = r.L + 1;
      if (static_cast<int>(h.final_records().size()) - s < 2) s = 0;
    }
    char line[256];
    std::snprintf(line, sizeof line, "%s,%d,%d,%.6f,%.6f\n", problem.c_str(), p, k, rate_of(h, RateAxis::ndof, s),
                  rate_of(h, RateAxis::cost, s));
    table << line;
  }
  std::cout << table.str();
  if (!out.empty()) {
    auto os = open_out(output_dir(out) / "rates.csv");
    os << table.str();
  }
  return 0;
}

int cmd_sweep(const std::vector<std::string>& problems, const std::vector<int>& ps, const std::vector<int>& ks,
              const RunConfig& base) {
  const fs::path dir = output_dir(base.out);
  auto os = open_out(dir / "sweep.csv");
  os << "problem,p,k,mean_iter,max_iter\n";
  std::printf("problem,p,k,mean_iter,max_iter\n");
  for (const auto& name : problems) {
    const bool has_k = name == "checkerboard" || name == "stripes" || name == "stripe";
    for (int p : ps)
      for (int k : has_k ? ks : std::vector<int>{0}) {
        RunConfig c = base;
        c.problem = name;
        c.p = p;
        c.k = has_k ? k : 1;
        const AfemHistory h = afem_run(problem_by_name(name, c.k), params_of(c));
        const auto its = h.iterations_per_level();
        char line[256];
        std::snprintf(line, sizeof line, "%s,%d,%d,%.4f,%d\n", name.c_str(), p, k, iteration_mean(its),
                      *std::max_element(its.begin(), its.end()));
        os << line;
        std::fputs(line, stdout);
        std::fflush(stdout);
      }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive FEM with a local multigrid solver"};
  app.require_subcommand(1);

  RunConfig run_cfg, val_cfg, sweep_cfg;
  std::string run_file, val_file, sweep_file;
  auto* run = app.add_subcommand("run", "adaptive loop, writes history.csv and run.json");
  add_run_options(run, run_cfg, run_file);
  auto* validate = app.add_subcommand("validate", "adaptive loop with direct solves, adds alg_err and contraction");
  add_run_options(validate, val_cfg, val_file);

  std::vector<std::string> rate_files;
  int skip = -1;
  std::string rates_out;
  auto* rates = app.add_subcommand("rates", "convergence rates of history files");
  rates->add_option("files", rate_files, "history.csv files")->required();
  rates->add_option("--skip", skip, "levels to skip (default: those with ndof < 1000)");
  rates->add_option("--out", rates_out, "directory for rates.csv");

  std::vector<std::string> sweep_problems;
  std::vector<int> sweep_ps = {1, 2}, sweep_ks = {1, 2, 3};
  auto* sweep = app.add_subcommand("sweep", "iteration counts over problems, degrees and contrasts");
  sweep->add_option("--problems", sweep_problems, "comma separated problem names")->delimiter(',');
  sweep->add_option("--ps", sweep_ps, "degrees")->delimiter(',');
  sweep->add_option("--ks", sweep_ks, "contrast parameters")->delimiter(',');
  sweep->add_option("--theta", sweep_cfg.theta);
  sweep->add_option("--mu", sweep_cfg.mu);
  sweep->add_option("--max-dofs", sweep_cfg.max_dofs);
  sweep->add_option("--mesh-size", sweep_cfg.mesh_size)->check(CLI::IsMember({"area", "diam"}));
  sweep->add_option("--out", sweep_cfg.out, "directory for sweep.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      if (!run_file.empty()) apply_config_file(run_file, run_cfg, *run);
      return cmd_run(run_cfg);
    }
    if (*validate) {
      if (!val_file.empty()) apply_config_file(val_file, val_cfg, *validate);
      if (val_cfg.mode == "afem") val_cfg.mode = "validate";
      return cmd_run(val_cfg);
    }
    if (*rates) return cmd_rates(rate_files, skip, rates_out);
    if (*sweep) return cmd_sweep(sweep_problems, sweep_ps, sweep_ks, sweep_cfg);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "numerical failure: %s (last zeta %.3e)\n", e.what(),
                 e.zeta_history().empty() ? 0.0 : e.zeta_history().back());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 1;
  }
  return 2;
}

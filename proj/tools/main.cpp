#include "mvem/analysis.hpp"
#include "mvem/exceptions.hpp"
#include "mvem/mesh.hpp"
#include "mvem/ocp.hpp"
#include "mvem/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace mvem;

struct MeshArgs {
  std::string family = "square";
  int n = 8;
  std::uint64_t seed = 1;
  double delta = 0.3;
  std::string file;
};

void add_mesh_options(CLI::App* cmd, MeshArgs& args) {
  cmd->add_option("--mesh", args.family, "mesh family: square, random, nonconvex, file")
      ->default_val("square");
  cmd->add_option("--n", args.n, "grid refinement level")->default_val(8);
  cmd->add_option("--seed", args.seed, "seed for the random family");
  cmd->add_option("--delta", args.delta, "perturbation fraction in [0, 0.4]");
  cmd->add_option("--mesh-file", args.file, "mesh JSON path for --mesh file");
}

PolygonalMesh make_mesh(const MeshArgs& args) {
  switch (parse_mesh_family(args.family)) {
    case MeshFamily::Square: return gen_square_grid(args.n);
    case MeshFamily::Random: return gen_perturbed_grid(args.n, args.seed, args.delta);
    case MeshFamily::Nonconvex: return gen_nonconvex_grid(args.n);
    case MeshFamily::File:
      if (args.file.empty()) throw ConfigError("--mesh file requires --mesh-file");
      return load_mesh(args.file);
  }
  throw ConfigError("unreachable mesh family");
}

void maybe_dump(const SaddleSystem& sys, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  sys.dump_matrix(out);
  if (!out) throw IoError("write failed: " + path);
}

int run_mesh(const MeshArgs& args, const std::string& out) {
  const PolygonalMesh mesh = make_mesh(args);
  if (!out.empty()) save_mesh(mesh, out);
  std::printf("family=%s vertices=%d edges=%d cells=%d boundary_edges=%zu h=%.6g\n",
              args.family.c_str(), mesh.num_vertices(), mesh.num_edges(), mesh.num_cells(),
              mesh.boundary_edges.size(), mesh.mesh_size_h);
  return 0;
}

int run_solve(const MeshArgs& margs, const std::string& problem_name,
              const std::string& control, const std::string& dump_path) {
  const ProblemData problem = builtin_problem(problem_name);
  const PolygonalMesh mesh = make_mesh(margs);
  const SaddleSystem sys(mesh, problem);
  maybe_dump(sys, dump_path);

  StateSolution state;
  if (control == "zero") {
    state = sys.solve_state(Eigen::VectorXd::Zero(mesh.num_cells()));
  } else if (control == "exact") {
    if (!problem.exact_u)
      throw ConfigError("problem " + problem_name + " has no exact control");
    state = sys.solve_state(problem.exact_u);
  } else {
    throw ConfigError("--control must be 'zero' or 'exact'");
  }
  std::printf("h=%.6g dofs=%d residual=%.3e\n", mesh.mesh_size_h, sys.dim(),
              state.report.relative_residual);
  if (problem.exact_y && control == "exact") {
    std::printf("err_y=%.6e\n", l2_error_cellwise(state.y, problem.exact_y, mesh));
    if (problem.exact_flux) {
      std::printf("err_flux_boundary=%.6e\n",
                  boundary_flux_error(state.p, problem.exact_flux, mesh));
      std::printf("err_flux_domain=%.6e\n",
                  flux_domain_error(state.p, problem.exact_flux, sys.locals(), mesh));
    }
  }
  return 0;
}

int run_ocp(const MeshArgs& margs, const std::string& problem_name,
            const FixedPointConfig& fp, const std::string& dump_path) {
  const ProblemData problem = builtin_problem(problem_name);
  const PolygonalMesh mesh = make_mesh(margs);
  const SaddleSystem sys(mesh, problem);
  maybe_dump(sys, dump_path);
  const OcpSolution sol = fixed_point_solve(sys, problem, fp);

  std::printf("h=%.6g cells=%d iterations=%d final_update=%.3e objective=%.10e\n",
              mesh.mesh_size_h, mesh.num_cells(), sol.iterations, sol.final_update_norm,
              sol.objective);
  std::printf("max_linear_residual=%.3e\n", sol.max_linear_residual);
  for (std::size_t k = 0; k < sol.update_history.size(); ++k) {
    std::printf("  iter %2zu: update=%.6e J=%.10e\n", k + 1, sol.update_history[k],
                sol.objective_history[k]);
  }
  const double u_min = sol.u.minCoeff(), u_max = sol.u.maxCoeff();
  std::printf("control range: [%.6g, %.6g] within [%g, %g]\n", u_min, u_max,
              problem.bounds.lower, problem.bounds.upper);
  if (problem.has_exact()) {
    std::printf("err_y=%.6e err_z=%.6e err_u=%.6e\n",
                l2_error_cellwise(sol.y, problem.exact_y, mesh),
                l2_error_cellwise(sol.z, problem.exact_z, mesh),
                l2_error_cellwise(sol.u, problem.exact_u, mesh));
  }
  return 0;
}

int run_study_cmd(const std::string& config_path, const std::string& out_dir,
                  std::optional<std::uint64_t> seed_override) {
  StudyConfig cfg = load_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const StudyResult result = run_study_with_output(cfg, out_dir);
  write_markdown(result.table, std::cout);
  std::printf("levels=%zu max_linear_residual=%.3e\n", result.reports.size(),
              result.max_linear_residual);
  return 0;
}

int run_tables(const std::string& in_path, const std::string& csv_out,
               const std::string& md_out) {
  Table table = read_table_csv(in_path);
  compute_missing_orders(table);
  if (!csv_out.empty()) {
    std::ofstream out(csv_out);
    if (!out) throw IoError("cannot open output file: " + csv_out);
    write_csv(table, out);
  }
  if (!md_out.empty()) {
    std::ofstream out(md_out);
    if (!out) throw IoError("cannot open output file: " + md_out);
    write_markdown(table, out);
  } else {
    write_markdown(table, std::cout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest-order mixed virtual element solver for an elliptic optimal "
               "control problem with boundary observations"};
  app.require_subcommand(1);

  MeshArgs mesh_args;
  std::string out_path;
  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh and export it as JSON");
  mesh_cmd->add_option("--family", mesh_args.family,
                       "mesh family: square, random, nonconvex");
  mesh_cmd->add_option("--n", mesh_args.n, "grid refinement level")->required();
  mesh_cmd->add_option("--seed", mesh_args.seed, "seed for the random family");
  mesh_cmd->add_option("--delta", mesh_args.delta, "perturbation fraction in [0, 0.4]");
  mesh_cmd->add_option("--out", out_path, "output JSON path");

  MeshArgs solve_mesh;
  std::string solve_problem = "example1";
  std::string solve_control = "zero";
  std::string solve_dump;
  auto* solve_cmd = app.add_subcommand("solve", "forward state solve only");
  solve_cmd->add_option("--problem", solve_problem, "builtin problem name")->required();
  add_mesh_options(solve_cmd, solve_mesh);
  solve_cmd->add_option("--control", solve_control, "control data: zero or exact");
  solve_cmd->add_option("--dump-matrix", solve_dump, "write the block matrix (row col value)");

  MeshArgs ocp_mesh;
  std::string ocp_problem = "example1";
  std::string ocp_dump;
  FixedPointConfig ocp_fp;
  auto* ocp_cmd = app.add_subcommand("ocp", "single optimal control solve with diagnostics");
  ocp_cmd->add_option("--problem", ocp_problem, "builtin problem name")->required();
  add_mesh_options(ocp_cmd, ocp_mesh);
  ocp_cmd->add_option("--tol", ocp_fp.tol, "fixed-point stopping tolerance");
  ocp_cmd->add_option("--max-iter", ocp_fp.max_iter, "fixed-point iteration cap");
  ocp_cmd->add_option("--omega", ocp_fp.omega, "relaxation factor in (0, 1]");
  ocp_cmd->add_option("--dump-matrix", ocp_dump, "write the block matrix (row col value)");

  std::string study_config, study_out_dir;
  std::optional<std::uint64_t> study_seed;
  auto* study_cmd = app.add_subcommand("study", "convergence study over a mesh sequence");
  study_cmd->add_option("--config", study_config, "key=value config file")->required();
  study_cmd->add_option("--out-dir", study_out_dir, "directory for output files");
  study_cmd->add_option("--seed", study_seed, "override mesh.seed");

  std::string tables_in, tables_csv, tables_md;
  auto* tables_cmd = app.add_subcommand("tables", "re-emit tables from a saved report CSV");
  tables_cmd->add_option("--in", tables_in, "input CSV (h,err_y,order_y,...)")->required();
  tables_cmd->add_option("--csv", tables_csv, "output CSV path");
  tables_cmd->add_option("--md", tables_md, "output Markdown path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mesh_cmd->parsed()) return run_mesh(mesh_args, out_path);
    if (solve_cmd->parsed())
      return run_solve(solve_mesh, solve_problem, solve_control, solve_dump);
    if (ocp_cmd->parsed()) return run_ocp(ocp_mesh, ocp_problem, ocp_fp, ocp_dump);
    if (study_cmd->parsed()) return run_study_cmd(study_config, study_out_dir, study_seed);
    if (tables_cmd->parsed()) return run_tables(tables_in, tables_csv, tables_md);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const FixedPointError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    for (std::size_t k = 0; k < e.update_history.size(); ++k)
      std::cerr << "  iter " << k + 1 << ": update=" << e.update_history[k] << '\n';
    return 3;
  } catch (const SolveError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}

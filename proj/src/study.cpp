#include "mvem/study.hpp"

#include "mvem/exceptions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mvem {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": cannot parse number from '" + value + "'");
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": cannot parse integer from '" + value + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_fixed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string format_sci4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

}  // namespace

MeshFamily parse_mesh_family(const std::string& name) {
  if (name == "square") return MeshFamily::Square;
  if (name == "random") return MeshFamily::Random;
  if (name == "nonconvex") return MeshFamily::Nonconvex;
  if (name == "file") return MeshFamily::File;
  throw ConfigError("unknown mesh family: " + name);
}

std::string mesh_family_name(MeshFamily family) {
  switch (family) {
    case MeshFamily::Square: return "square";
    case MeshFamily::Random: return "random";
    case MeshFamily::Nonconvex: return "nonconvex";
    case MeshFamily::File: return "file";
  }
  return "?";
}

StudyConfig parse_config(std::istream& in) {
  StudyConfig cfg;
  std::optional<double> bound_lower, bound_upper;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "problem") {
      cfg.problem = value;
    } else if (key == "mesh.family") {
      cfg.family = parse_mesh_family(value);
    } else if (key == "mesh.n") {
      cfg.ns.clear();
      for (const auto& part : split(value, ',')) {
        const long n = parse_int(key, part);
        if (n < 1) throw ConfigError("config key mesh.n: levels must be positive");
        cfg.ns.push_back(static_cast<int>(n));
      }
    } else if (key == "mesh.seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "mesh.delta") {
      cfg.delta = parse_double(key, value);
      if (cfg.delta < 0.0 || cfg.delta > 0.4)
        throw ConfigError("config key mesh.delta: must lie in [0, 0.4]");
    } else if (key == "mesh.files") {
      cfg.mesh_files = split(value, ',');
    } else if (key == "gamma") {
      cfg.gamma_override = parse_double(key, value);
    } else if (key == "bounds.lower") {
      bound_lower = parse_double(key, value);
    } else if (key == "bounds.upper") {
      bound_upper = parse_double(key, value);
    } else if (key == "fp.tol") {
      cfg.fp.tol = parse_double(key, value);
      if (!(cfg.fp.tol > 0.0)) throw ConfigError("config key fp.tol: must be positive");
    } else if (key == "fp.max_iter") {
      cfg.fp.max_iter = static_cast<int>(parse_int(key, value));
      if (cfg.fp.max_iter < 1) throw ConfigError("config key fp.max_iter: must be >= 1");
    } else if (key == "fp.omega") {
      cfg.fp.omega = parse_double(key, value);
      if (!(cfg.fp.omega > 0.0) || cfg.fp.omega > 1.0)
        throw ConfigError("config key fp.omega: must lie in (0, 1]");
    } else if (key == "quad.cell_degree") {
      cfg.quad.cell_degree = static_cast<int>(parse_int(key, value));
      if (cfg.quad.cell_degree < 0 || cfg.quad.cell_degree > 10)
        throw ConfigError("config key quad.cell_degree: must lie in 0..=10");
    } else if (key == "quad.edge_points") {
      cfg.quad.edge_points = static_cast<int>(parse_int(key, value));
      if (cfg.quad.edge_points < 1 || cfg.quad.edge_points > 10)
        throw ConfigError("config key quad.edge_points: must lie in 1..=10");
    } else if (key == "ref.n") {
      cfg.ref_n = static_cast<int>(parse_int(key, value));
      if (cfg.ref_n < 1) throw ConfigError("config key ref.n: must be >= 1");
    } else if (key == "out.csv") {
      cfg.out_csv = value;
    } else if (key == "out.md") {
      cfg.out_md = value;
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (bound_lower || bound_upper) {
    if (!(bound_lower && bound_upper))
      throw ConfigError("bounds.lower and bounds.upper must be given together");
    if (!(*bound_lower <= *bound_upper))
      throw ConfigError("bounds.lower must not exceed bounds.upper");
    cfg.bounds_override = ControlBounds{*bound_lower, *bound_upper};
  }
  if (cfg.problem.empty()) throw ConfigError("config: missing required key 'problem'");
  if (cfg.family != MeshFamily::File) {
    if (cfg.ns.empty()) throw ConfigError("config: missing required key 'mesh.n'");
    for (std::size_t i = 1; i < cfg.ns.size(); ++i) {
      if (cfg.ns[i] <= cfg.ns[i - 1])
        throw ConfigError("config key mesh.n: levels must be strictly increasing");
    }
  } else if (cfg.mesh_files.empty()) {
    throw ConfigError("config: mesh.family=file requires mesh.files");
  }
  return cfg;
}

StudyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_config(in);
}

void compute_missing_orders(Table& table) {
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    TableRow& row = table.rows[i];
    const TableRow& prev = table.rows[i - 1];
    const double lh = std::log(prev.h / row.h);
    auto fill = [lh](std::optional<double>& slot, double e_prev, double e_cur) {
      if (!slot && e_prev > 0.0 && e_cur > 0.0) slot = std::log(e_prev / e_cur) / lh;
    };
    fill(row.order_y, prev.err_y, row.err_y);
    fill(row.order_z, prev.err_z, row.err_z);
    fill(row.order_u, prev.err_u, row.err_u);
  }
}

void write_csv(const Table& table, std::ostream& out) {
  out << "h,err_y,order_y,err_z,order_z,err_u,order_u\n";
  for (const TableRow& row : table.rows) {
    auto order = [](const std::optional<double>& o) {
      return o ? format_g17(*o) : std::string();
    };
    out << format_g17(row.h) << ',' << format_g17(row.err_y) << ',' << order(row.order_y)
        << ',' << format_g17(row.err_z) << ',' << order(row.order_z) << ','
        << format_g17(row.err_u) << ',' << order(row.order_u) << '\n';
  }
}

void write_markdown(const Table& table, std::ostream& out) {
  const std::size_t n = table.rows.size();
  auto row_line = [&](const std::string& label, auto value) {
    out << "| " << label << " |";
    for (std::size_t i = 0; i < n; ++i) out << ' ' << value(table.rows[i]) << " |";
    out << '\n';
  };
  auto order_cell = [](const std::optional<double>& o) {
    return o ? format_fixed4(*o) : std::string("\\");
  };
  row_line("h", [](const TableRow& r) { return format_fixed4(r.h); });
  out << "| --- |";
  for (std::size_t i = 0; i < n; ++i) out << " --- |";
  out << '\n';
  row_line("\\|y-y_h\\|", [](const TableRow& r) { return format_sci4(r.err_y); });
  row_line("Order", [&](const TableRow& r) { return order_cell(r.order_y); });
  row_line("\\|z-z_h\\|", [](const TableRow& r) { return format_sci4(r.err_z); });
  row_line("Order", [&](const TableRow& r) { return order_cell(r.order_z); });
  row_line("\\|u-u_h\\|", [](const TableRow& r) { return format_sci4(r.err_u); });
  row_line("Order", [&](const TableRow& r) { return order_cell(r.order_u); });
}

Table read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table file: " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("table file is empty: " + path);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    while (cells.size() < 7) cells.emplace_back();
    TableRow row;
    const std::string where = "table " + path + " line " + std::to_string(line_no);
    row.h = parse_double(where, cells[0]);
    row.err_y = parse_double(where, cells[1]);
    if (!cells[2].empty()) row.order_y = parse_double(where, cells[2]);
    row.err_z = parse_double(where, cells[3]);
    if (!cells[4].empty()) row.order_z = parse_double(where, cells[4]);
    row.err_u = parse_double(where, cells[5]);
    if (!cells[6].empty()) row.order_u = parse_double(where, cells[6]);
    table.rows.push_back(row);
  }
  return table;
}

StudyResult run_study(const StudyConfig& config) {
  ProblemData problem = builtin_problem(config.problem);
  if (config.gamma_override) problem.gamma = *config.gamma_override;
  if (config.bounds_override) problem.bounds = *config.bounds_override;

  std::optional<ReferenceSolution> reference;
  if (!problem.has_exact()) {
    reference = solve_reference(problem, config.ref_n, config.quad, config.fp);
  }

  const std::size_t levels =
      config.family == MeshFamily::File ? config.mesh_files.size() : config.ns.size();
  StudyResult result;
  for (std::size_t level = 0; level < levels; ++level) {
    PolygonalMesh mesh;
    switch (config.family) {
      case MeshFamily::Square: mesh = gen_square_grid(config.ns[level]); break;
      case MeshFamily::Random:
        mesh = gen_perturbed_grid(config.ns[level], config.seed, config.delta);
        break;
      case MeshFamily::Nonconvex: mesh = gen_nonconvex_grid(config.ns[level]); break;
      case MeshFamily::File: mesh = load_mesh(config.mesh_files[level]); break;
    }
    const SaddleSystem sys(mesh, problem, config.quad);
    const OcpSolution sol = fixed_point_solve(sys, problem, config.fp);

    ErrorReport report;
    if (problem.has_exact()) {
      report.h = mesh.mesh_size_h;
      report.err_y =
          l2_error_cellwise(sol.y, problem.exact_y, mesh, config.quad.cell_degree);
      report.err_z =
          l2_error_cellwise(sol.z, problem.exact_z, mesh, config.quad.cell_degree);
      report.err_u =
          l2_error_cellwise(sol.u, problem.exact_u, mesh, config.quad.cell_degree);
      if (problem.exact_flux) {
        report.err_flux_boundary =
            boundary_flux_error(sol.p, problem.exact_flux, mesh);
        report.err_flux_domain = flux_domain_error(sol.p, problem.exact_flux,
                                                   sys.locals(), mesh,
                                                   config.quad.cell_degree);
      }
    } else {
      // The reference integrand is piecewise constant on the fine grid;
      // denser sampling keeps the error estimate quadrature-noise free.
      report = reference_error(mesh, sol.y, sol.z, sol.u, *reference,
                               std::max(config.quad.cell_degree, 8));
    }
    result.reports.push_back(report);
    result.iterations.push_back(sol.iterations);
    result.max_linear_residual =
        std::max(result.max_linear_residual, sol.max_linear_residual);

    TableRow row;
    row.h = report.h;
    row.err_y = report.err_y;
    row.err_z = report.err_z;
    row.err_u = report.err_u;
    result.table.rows.push_back(row);
  }
  compute_missing_orders(result.table);
  return result;
}

StudyResult run_study_with_output(const StudyConfig& config, const std::string& out_dir) {
  StudyResult result = run_study(config);
  auto resolve = [&out_dir](const std::string& name) {
    if (out_dir.empty()) return name;
    return (std::filesystem::path(out_dir) / name).string();
  };
  const std::string csv_path = resolve(config.out_csv);
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open output file: " + csv_path);
  write_csv(result.table, csv);
  if (!csv) throw IoError("write failed: " + csv_path);
  const std::string md_path = resolve(config.out_md);
  std::ofstream md(md_path);
  if (!md) throw IoError("cannot open output file: " + md_path);
  write_markdown(result.table, md);
  if (!md) throw IoError("write failed: " + md_path);
  return result;
}

}  // namespace mvem

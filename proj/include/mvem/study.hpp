#pragma once

#include "mvem/analysis.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mvem {

enum class MeshFamily { Square, Random, Nonconvex, File };

MeshFamily parse_mesh_family(const std::string& name);
std::string mesh_family_name(MeshFamily family);

/// Study parameters; defaults match the convergence runs in the docs.
struct StudyConfig {
  std::string problem;
  MeshFamily family = MeshFamily::Square;
  std::vector<int> ns;  ///< strictly increasing refinement levels
  std::uint64_t seed = 1;
  double delta = 0.3;
  std::optional<double> gamma_override;
  std::optional<ControlBounds> bounds_override;
  FixedPointConfig fp;
  AssemblyOptions quad;
  int ref_n = 500;  ///< reference grid for problems without an exact solution
  std::string out_csv = "study.csv";
  std::string out_md = "study.md";
  std::vector<std::string> mesh_files;  ///< used when family == File
};

/// Flat key=value format; '#' starts a comment. Unknown keys are rejected.
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::string& path);

/// One table of a convergence study: h column plus error/order columns.
struct TableRow {
  double h = 0.0;
  double err_y = 0.0;
  double err_z = 0.0;
  double err_u = 0.0;
  std::optional<double> order_y;
  std::optional<double> order_z;
  std::optional<double> order_u;
};

struct Table {
  std::vector<TableRow> rows;
};

/// Fills empty order cells from consecutive rows; the first row stays blank.
void compute_missing_orders(Table& table);

/// CSV columns: h, err_y, order_y, err_z, order_z, err_u, order_u; floats at
/// 17 significant digits, order cells empty where absent.
void write_csv(const Table& table, std::ostream& out);

/// Markdown in the customary convergence-table layout: h row, then
/// error/Order row pairs, with 4 digits after the decimal point.
void write_markdown(const Table& table, std::ostream& out);

Table read_table_csv(const std::string& path);

struct StudyResult {
  Table table;
  std::vector<ErrorReport> reports;
  std::vector<int> iterations;
  double max_linear_residual = 0.0;
};

/// Runs the full convergence sequence: mesh, assemble, optimize, errors,
/// orders. Deterministic for a fixed config and seed.
StudyResult run_study(const StudyConfig& config);

/// Runs the study and writes both output files.
StudyResult run_study_with_output(const StudyConfig& config,
                                  const std::string& out_dir = "");

}  // namespace mvem

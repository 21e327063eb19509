#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvem/exceptions.hpp"
#include "mvem/study.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace mvem;

namespace {

StudyConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("config parsing accepts the documented keys") {
  const StudyConfig cfg = config_from(R"(
# convergence study
problem = example1
mesh.family = random
mesh.n = 4, 8, 16
mesh.seed = 9
mesh.delta = 0.25
fp.tol = 1e-9
fp.max_iter = 80
fp.omega = 0.9
quad.cell_degree = 6
quad.edge_points = 4
ref.n = 100
out.csv = a.csv
out.md = a.md
)");
  CHECK(cfg.problem == "example1");
  CHECK(cfg.family == MeshFamily::Random);
  CHECK(cfg.ns == std::vector<int>{4, 8, 16});
  CHECK(cfg.seed == 9);
  CHECK(cfg.delta == 0.25);
  CHECK(cfg.fp.tol == 1e-9);
  CHECK(cfg.fp.max_iter == 80);
  CHECK(cfg.fp.omega == 0.9);
  CHECK(cfg.quad.cell_degree == 6);
  CHECK(cfg.quad.edge_points == 4);
  CHECK(cfg.ref_n == 100);
  CHECK(cfg.out_csv == "a.csv");
  CHECK(cfg.out_md == "a.md");
}

TEST_CASE("config parsing rejects bad input") {
  CHECK_THROWS_AS(config_from("problem = example1\nmesh.n = 4\nnot_a_key = 1\n"),
                  ConfigError);
  CHECK_THROWS_AS(config_from("mesh.n = 4\n"), ConfigError);            // missing problem
  CHECK_THROWS_AS(config_from("problem = example1\n"), ConfigError);    // missing mesh.n
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = 8, 4\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = 4\nmesh.delta = 0.6\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = 4\nfp.tol = -1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = 4\nfp.omega = 2\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = 4\nbounds.lower = 1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.n = abc\n"), ConfigError);
  CHECK_THROWS_AS(config_from("problem = p\nmesh.family = hex\nmesh.n = 2\n"), ConfigError);
  CHECK_THROWS_AS(config_from("garbage line\n"), ConfigError);
  CHECK_THROWS_AS(load_config("missing_config_file.cfg"), IoError);
}

TEST_CASE("study on the patch problem: adjoint, control and flux are exact") {
  StudyConfig cfg;
  cfg.problem = "patch_constant_flux";
  cfg.ns = {2, 4};
  cfg.family = MeshFamily::Nonconvex;
  const StudyResult result = run_study(cfg);
  REQUIRE(result.table.rows.size() == 2);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    // z and u vanish identically and the flux is reproduced exactly; the
    // y column measures the projection of the exact linear state onto
    // cellwise constants, which is O(h) by definition.
    CHECK(result.table.rows[i].err_z <= 1e-9);
    CHECK(result.table.rows[i].err_u <= 1e-9);
    CHECK(*result.reports[i].err_flux_boundary <= 1e-9);
    CHECK(*result.reports[i].err_flux_domain <= 1e-9);
  }
  CHECK(result.table.rows[1].err_y < result.table.rows[0].err_y);
  CHECK(result.max_linear_residual <= 1e-10);
}

TEST_CASE("identical config and seed give byte-identical csv") {
  StudyConfig cfg;
  cfg.problem = "example1";
  cfg.family = MeshFamily::Random;
  cfg.ns = {4, 8};
  cfg.seed = 3;
  std::ostringstream first, second;
  write_csv(run_study(cfg).table, first);
  write_csv(run_study(cfg).table, second);
  CHECK(first.str() == second.str());
  CHECK(first.str().substr(0, 46) == "h,err_y,order_y,err_z,order_z,err_u,order_u\n0.");
}

TEST_CASE("csv round trip preserves doubles exactly") {
  StudyConfig cfg;
  cfg.problem = "example1";
  cfg.ns = {2, 4};
  const StudyResult result = run_study(cfg);
  const std::string path = "test_study_roundtrip.csv";
  {
    std::ofstream out(path);
    write_csv(result.table, out);
  }
  const Table back = read_table_csv(path);
  REQUIRE(back.rows.size() == result.table.rows.size());
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].h == result.table.rows[i].h);
    CHECK(back.rows[i].err_y == result.table.rows[i].err_y);
    CHECK(back.rows[i].err_z == result.table.rows[i].err_z);
    CHECK(back.rows[i].err_u == result.table.rows[i].err_u);
    if (i > 0) {
      CHECK(*back.rows[i].order_y == *result.table.rows[i].order_y);
    } else {
      CHECK_FALSE(back.rows[i].order_y.has_value());
    }
  }
  std::remove(path.c_str());
}

TEST_CASE("single-row table emits empty order cells") {
  Table table;
  TableRow row;
  row.h = 0.5;
  row.err_y = 0.25;
  row.err_z = 0.125;
  row.err_u = 0.0625;
  table.rows.push_back(row);
  std::ostringstream out;
  write_csv(table, out);
  CHECK(out.str() ==
        "h,err_y,order_y,err_z,order_z,err_u,order_u\n0.5,0.25,,0.125,,0.0625,\n");
}

TEST_CASE("orders fill in from exact halving") {
  Table table;
  for (int i = 0; i < 2; ++i) {
    TableRow row;
    row.h = i == 0 ? 0.2 : 0.1;
    row.err_y = i == 0 ? 4e-2 : 2e-2;
    row.err_z = row.err_y;
    row.err_u = row.err_y;
    table.rows.push_back(row);
  }
  compute_missing_orders(table);
  CHECK(*table.rows[1].order_y == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("markdown echoes saved tables with their order columns intact") {
  // A saved report that already carries order columns must be re-emitted
  // verbatim, not recomputed from the rounded errors.
  Table table;
  const double hs[] = {0.1414, 0.0707, 0.0471, 0.0353, 0.0236, 0.0176};
  const double ys[] = {9.4677e-03, 3.7207e-03, 2.2582e-03, 1.6256e-03, 1.0456e-03,
                       7.5993e-04};
  const double oy[] = {1.3474, 1.2315, 1.1426, 1.0884, 1.1093};
  const double zs[] = {1.5097e-02, 7.3138e-03, 4.7321e-03, 3.4892e-03, 2.2902e-03,
                       1.6752e-03};
  const double oz[] = {1.0456, 1.0738, 1.0592, 1.0383, 1.0871};
  const double us[] = {1.3039e-02, 6.2118e-03, 4.0437e-03, 3.0181e-03, 2.0064e-03,
                       1.4934e-03};
  const double ou[] = {1.0698, 1.0588, 1.0169, 1.0069, 1.0265};
  for (int i = 0; i < 6; ++i) {
    TableRow row;
    row.h = hs[i];
    row.err_y = ys[i];
    row.err_z = zs[i];
    row.err_u = us[i];
    if (i > 0) {
      row.order_y = oy[i - 1];
      row.order_z = oz[i - 1];
      row.order_u = ou[i - 1];
    }
    table.rows.push_back(row);
  }
  compute_missing_orders(table);
  std::ostringstream out;
  write_markdown(table, out);
  const std::string md = out.str();
  CHECK(md.find("| h | 0.1414 | 0.0707 |") != std::string::npos);
  CHECK(md.find("9.4677e-03") != std::string::npos);
  CHECK(md.find("| Order | \\ | 1.3474 |") != std::string::npos);
  CHECK(md.find("1.0456e-03") != std::string::npos);
  // Each error row is followed by its Order row.
  CHECK(md.find("y-y_h") < md.find("1.3474"));
}

TEST_CASE("run_study writes both output files") {
  StudyConfig cfg;
  cfg.problem = "patch_zero";
  cfg.ns = {2, 3};
  cfg.out_csv = "tmp_study.csv";
  cfg.out_md = "tmp_study.md";
  run_study_with_output(cfg, ".");
  std::ifstream csv("tmp_study.csv"), md("tmp_study.md");
  CHECK(csv.good());
  CHECK(md.good());
  csv.close();
  md.close();
  std::remove("tmp_study.csv");
  std::remove("tmp_study.md");
}

TEST_CASE("reference-backed study runs end to end at desk scale") {
  StudyConfig cfg;
  cfg.problem = "example2";
  cfg.ns = {4, 8};
  cfg.ref_n = 32;
  const StudyResult result = run_study(cfg);
  REQUIRE(result.table.rows.size() == 2);
  CHECK(result.table.rows[0].err_y > 0.0);
  CHECK(result.table.rows[1].err_y < result.table.rows[0].err_y);
  CHECK(result.iterations[0] <= 100);
}

TEST_CASE("file-family study loads meshes from disk") {
  const std::string path_a = "tmp_family_a.json";
  const std::string path_b = "tmp_family_b.json";
  save_mesh(gen_square_grid(2), path_a);
  save_mesh(gen_square_grid(4), path_b);
  StudyConfig cfg;
  cfg.problem = "example1";
  cfg.family = MeshFamily::File;
  cfg.mesh_files = {path_a, path_b};
  const StudyResult result = run_study(cfg);
  REQUIRE(result.table.rows.size() == 2);
  CHECK(result.table.rows[1].err_y < result.table.rows[0].err_y);
  std::remove(path_a.c_str());
  std::remove(path_b.c_str());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "szego_cli/app.hpp"
#include "szego_cli/config.hpp"
#include "szego_cli/norm_io.hpp"

using namespace szego;
using namespace szego::cli;
namespace fs = std::filesystem;

namespace {

const std::string kData = SZEGO_TEST_DATA_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("szego_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "szego");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(R"(
# comment
[domain]
n = 1
l = 2
rho = "m0^2 + 4*m1^2"   ; trailing comment
[point]
x = (0.6, 0), (0, -0.4)
[quadrature]
nodes = 48
mapping = tangent
levels = 2
tol = 1e-9
[run]
k_min = 3
k_max = 9
route = both
workers = 4
out = "results dir"
)");
  CHECK(c.n == 1);
  CHECK(c.l == 2.0);
  CHECK(c.rho == "m0^2 + 4*m1^2");
  CHECK(c.u == "0");
  REQUIRE(c.point);
  CHECK(c.point->x[1].imag() == -0.4);
  CHECK(c.quadrature.nodes_per_dim == 48);
  CHECK(c.quadrature.mapping == ChartMapping::Tangent);
  CHECK(c.quadrature.refinement_levels == 2);
  CHECK(c.quadrature.workers == 4);
  CHECK(c.route == RouteSelection::Both);
  CHECK(c.out == "results dir");
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("[domain\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nn = 1\nn = 2\nl = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nn = 1\nl = 2\ncolor = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[extras]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("n = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nn = one\nl = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nl = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[domain]\nn = 1\nl = 2\n[point]\nmoduli = 0.6, -0.8\n"), ConfigError);
  try {
    (void)parse_config("[domain]\nn = 1\nl = 2\n[run]\nroute = sideways\n");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("route") != std::string::npos);
  }
  RunConfig c = parse_config("[domain]\nn = 1\nl = 2\nrho = m0^2 + m1^2\n[run]\nk_min = 5\nk_max = 4\n");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = parse_config("[domain]\nn = 1\nl = 2\nrho = m0^2 + m1^2\n[point]\nmoduli = 1, 0, 0\n");
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("hashes ignore workers and output paths only") {
  const std::string base = "[domain]\nn = 1\nl = 2\nrho = m0^2 + m1^2\n[run]\nk_max = 9\n";
  const RunConfig a = parse_config(base);
  RunConfig b = a;
  b.quadrature.workers = 8;
  b.out = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(table_hash(a) == table_hash(b));
  b.k_max = 10;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(table_hash(a) == table_hash(b));
  b.quadrature.nodes_per_dim = 40;
  CHECK(table_hash(a) != table_hash(b));
  CHECK(config_hash(a).size() == 16);
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("validate exit codes") {
  TempDir t("validate");
  CHECK(run({"validate", "--config", kData + "/sphere_n1.cfg", "--out", t.path.string()}).code == kSuccess);
  const Run bad = run({"validate", "--config", kData + "/bad_monotone.cfg", "--out", t.path.string()});
  CHECK(bad.code == kCheckFailed);
  const auto j = nlohmann::json::parse(bad.out);
  CHECK_FALSE(j["passed"].get<bool>());
  const auto failures = j["failures"].get<std::vector<std::string>>();
  CHECK(std::find(failures.begin(), failures.end(), "monotonicity") != failures.end());
  CHECK(run({"validate", "--config", kData + "/malformed.cfg"}).code == kUsageError);
  CHECK(run({"validate", "--config", kData + "/does_not_exist.cfg"}).code == kUsageError);
  CHECK(run({"validate"}).code == kUsageError);
  CHECK(run({"frobnicate", "--config", kData + "/sphere_n1.cfg"}).code == kUsageError);
  CHECK(run({"--version"}).code == kSuccess);
}

TEST_CASE("norm tables are written once and reused") {
  TempDir t("norms");
  const std::vector<std::string> args = {"norms", "--config", kData + "/sphere_n1.cfg", "--k-min", "0",
                                         "--k-max", "3", "--out", t.path.string()};
  REQUIRE(run(args).code == kSuccess);
  const fs::path k2 = norm_table_path(t.path.string(), Route::Boundary, 2);
  const std::string first = slurp(k2);
  const auto when = fs::last_write_time(k2);
  CHECK(first.find("# complete: true") != std::string::npos);

  std::istringstream in(first);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'j') continue;
    ++rows;
  }
  CHECK(rows == 3);

  REQUIRE(run(args).code == kSuccess);
  CHECK(slurp(k2) == first);
  CHECK(fs::last_write_time(k2) == when);

  // a different quadrature invalidates the cache
  std::vector<std::string> finer = args;
  finer.push_back("--nodes");
  finer.push_back("40");
  REQUIRE(run(finer).code == kSuccess);
  CHECK(slurp(k2) != first);
}

TEST_CASE("both routes write a consistency summary") {
  TempDir t("both");
  const Run r = run({"norms", "--config", kData + "/sphere_n2.cfg", "--k-min", "1", "--k-max", "2", "--out",
                     t.path.string()});
  CHECK(r.code == kSuccess);
  CHECK(fs::exists(norm_table_path(t.path.string(), Route::Boundary, 2)));
  CHECK(fs::exists(norm_table_path(t.path.string(), Route::Projective, 2)));
  const std::string summary = slurp(t.path / "norms_consistency.csv");
  CHECK(summary.find(",true") != std::string::npos);
  CHECK(summary.find(",false") == std::string::npos);
}

TEST_CASE("verify writes reports") {
  TempDir t("verify");
  const Run r = run({"verify", "--config", kData + "/sphere_n1.cfg", "--k-max", "40", "--out", t.path.string()});
  REQUIRE(r.code == kSuccess);
  const auto j = nlohmann::json::parse(slurp(t.path / "report_boundary.json"));
  for (const char* key : {"ks", "pi_values", "fitted_power", "fitted_a0", "fitted_a1", "closed_a0", "closed_a1",
                          "rel_err_a0", "rel_err_a1", "residual_curve", "config_hash", "tool_version", "warnings"}) {
    CHECK_MESSAGE(j.contains(key), key);
  }
  CHECK(j["rel_err_a0"].get<double>() <= 1e-6);
  const std::string csv = slurp(t.path / "report_boundary.csv");
  CHECK(csv.find("k,pi_k,a0*k^n+a1*k^(n-1),residual") != std::string::npos);
}

TEST_CASE("interior points report the rescaling") {
  TempDir t("interior");
  const Run r = run({"verify", "--config", kData + "/interior.cfg", "--out", t.path.string()});
  REQUIRE(r.code == kSuccess);
  const auto j = nlohmann::json::parse(slurp(t.path / "report_boundary.json"));
  REQUIRE(j.contains("interior"));
  CHECK(j["interior"]["rho"].get<double>() == doctest::Approx(0.25));
  CHECK(j["boundary_point"][0].get<double>() == doctest::Approx(0.6));
}

TEST_CASE("coefficients and kernel values") {
  TempDir t("coeffs");
  const Run c = run({"coeffs", "--config", kData + "/sphere_n1.cfg", "--out", t.path.string()});
  REQUIRE(c.code == kSuccess);
  const auto j = nlohmann::json::parse(c.out);
  CHECK(j["a0"].get<double>() == doctest::Approx(0.0506606).epsilon(1e-6));
  const Run s = run({"szego", "--config", kData + "/sphere_n1.cfg", "--k-max", "12", "--out", t.path.string()});
  CHECK(s.code == kSuccess);
  CHECK(fs::exists(t.path / "szego.csv"));
}

TEST_CASE("verify output is independent of the worker count") {
  TempDir t("workers");
  std::vector<std::string> reports;
  for (const char* w : {"1", "3"}) {
    const fs::path dir = t.path / w;
    REQUIRE(run({"verify", "--config", kData + "/sphere_n1.cfg", "--k-max", "30", "--workers", w, "--out",
                 dir.string()})
                .code == kSuccess);
    reports.push_back(slurp(dir / "report_boundary.json") + slurp(dir / "report_boundary.csv"));
  }
  CHECK(reports[0] == reports[1]);
}

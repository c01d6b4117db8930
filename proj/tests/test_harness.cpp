#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qet/errors.hpp"
#include "qet/models.hpp"
#include "qet/sweep.hpp"

using namespace qet;

namespace {

const char* kMinimalConfig = R"(
# distance sweep on the gapped chain
[model]
name = tfim
n = 10
g = 2.0

[regions]
A = 0

[sweep]
d_min = 2
d_max = 7

[protocol]
scheme = bloch_projective
budget = 200
seed = 1

[output]
dir = out
format = csv
)";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.model_name == "tfim");
  CHECK(cfg.n_sites == 10);
  CHECK(cfg.g == 2.0);
  CHECK(cfg.region_a == std::vector<int>{0});
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->d_min == 2);
  CHECK(cfg.sweep->d_max == 7);
  CHECK(cfg.budget == 200);
  CHECK(cfg.restarts == 8);
  CHECK(cfg.format == "csv");
}

TEST_CASE("config round-trips through its canonical form") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  const std::string canon = serialize_config(cfg);
  const ExperimentConfig again = parse_config(canon);
  CHECK(cfg == again);
  CHECK(serialize_config(again) == canon);

  ExperimentConfig rich = cfg;
  rich.region_b = std::vector<int>{8, 9};
  rich.params = std::vector<double>{0.25, -1.5, 0, 0, 0, 0, 0, 0};
  rich.window_min = 2;
  rich.window_max = 5;
  rich.format = "both";
  const ExperimentConfig rich_again = parse_config(serialize_config(rich));
  CHECK(rich == rich_again);
}

TEST_CASE("config diagnostics name the offending input") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);

  try {
    parse_config("[model]\nname = tfim\nn == 10\n");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }

  // semantic: site outside the lattice
  std::string bad = kMinimalConfig;
  const auto pos = bad.find("A = 0");
  bad.replace(pos, 5, "A = 99");
  try {
    parse_config(bad);
    FAIL("expected a semantic error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("regions.A") != std::string::npos);
    CHECK(std::string(e.what()).find("99") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_config("[model]\nwibble = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("name = tfim\n"), ConfigError);  // no section
  CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("config rejects sweeps that leave the lattice") {
  std::string bad = kMinimalConfig;
  const auto pos = bad.find("d_max = 7");
  bad.replace(pos, 9, "d_max = 12");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("sweep on the product control model marks bounds not applicable") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.model_name = "field_only";
  cfg.g = 1.0;
  cfg.n_sites = 8;
  cfg.sweep->d_min = 2;
  cfg.sweep->d_max = 5;
  cfg.budget = 150;

  const SweepReport report = run_sweep(cfg);
  CHECK(report.fit.degenerate());
  CHECK(report.invariant_failures.empty());
  REQUIRE(report.rows.size() == 4);
  for (const auto& row : report.rows) {
    CHECK(row.delta_e_best <= 1e-10);
    CHECK(!row.C.has_value());
    CHECK(!row.bound.has_value());
    CHECK(!row.slack.has_value());
  }
}

TEST_CASE("sweep on the gapped chain certifies every row") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.n_sites = 10;
  cfg.sweep->d_min = 2;
  cfg.sweep->d_max = 6;
  cfg.budget = 300;
  cfg.seed = 3;

  const SweepReport report = run_sweep(cfg);
  CHECK(report.invariant_failures.empty());
  CHECK(!report.fit.degenerate());
  CHECK(report.fit.quality_ok);
  CHECK(report.gap_delta > 1.0);
  REQUIRE(report.rows.size() == 5);

  int prev_d = 0;
  for (const auto& row : report.rows) {
    CHECK(row.d > prev_d);
    prev_d = row.d;
    REQUIRE(row.bound.has_value());
    REQUIRE(row.slack.has_value());
    CHECK(*row.slack >= -1e-9);
    CHECK(*row.slack == doctest::Approx(*row.bound - row.delta_e_best));
    CHECK(row.evaluations <= cfg.budget);

    // every emitted row is independently re-checkable
    const Region a(cfg.region_a);
    std::vector<int> b_sites;
    for (int i = 0; i < report.b_size; ++i)
      b_sites.push_back(a.max_site() + row.d + i);
    const ProtocolScheme scheme(cfg.scheme, a, Region(b_sites));
    ModelSpec spec;
    spec.name = cfg.model_name;
    spec.g = cfg.g;
    const Hamiltonian h0 = build_chain(cfg.n_sites, spec);
    const GroundState gs = solve_ground(h0);
    const Hamiltonian h = shift_to_zero(h0, gs);
    auto [kraus, decoder] = instantiate(scheme, row.best_parameters);
    const auto result = run_protocol(h, gs, kraus, decoder);
    CHECK(std::abs(result.Delta_E - row.delta_e_best) < 1e-10);
  }
}

TEST_CASE("sweep with a fixed region B produces a single certified row") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.sweep.reset();
  cfg.region_b = std::vector<int>{6};
  cfg.budget = 200;
  const SweepReport report = run_sweep(cfg);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].d == 6);
  CHECK(report.invariant_failures.empty());
}

TEST_CASE("critical sweeps run but carry the fit-quality warning") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.g = 1.0;
  cfg.sweep->d_min = 2;
  cfg.sweep->d_max = 5;
  cfg.budget = 200;
  const SweepReport report = run_sweep(cfg);
  CHECK(!report.fit.degenerate());
  CHECK(!report.fit.quality_ok);
  CHECK(report.invariant_failures.empty());
  for (const auto& row : report.rows) {
    REQUIRE(row.slack.has_value());
    CHECK(*row.slack >= -1e-9);
  }
}

TEST_CASE("sweep refuses degenerate models") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.g = 0.0;  // exactly degenerate Ising chain
  CHECK_THROWS_AS(run_sweep(cfg), DegenerateGroundStateError);
}

TEST_CASE("emitted files are byte-stable and carry the documented columns") {
  ExperimentConfig cfg = parse_config(kMinimalConfig);
  cfg.n_sites = 8;
  cfg.sweep->d_min = 2;
  cfg.sweep->d_max = 4;
  cfg.budget = 120;
  cfg.window_min = 2;
  cfg.window_max = 4;

  const auto dir_a = std::filesystem::temp_directory_path() / "qet_emit_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "qet_emit_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  const SweepReport r1 = run_sweep(cfg);
  const SweepReport r2 = run_sweep(cfg);
  const auto paths_a = emit(r1, "both", dir_a.string());
  const auto paths_b = emit(r2, "both", dir_b.string());
  REQUIRE(paths_a.size() == 2);

  const std::string csv = slurp(paths_a[0]);
  CHECK(csv.rfind("d,delta_E_best,C,mu,C_tilde,bound,slack,p_discarded\n", 0) ==
        0);
  CHECK(csv == slurp(paths_b[0]));
  CHECK(slurp(paths_a[1]) == slurp(paths_b[1]));

  // rows: header + one line per separation
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 4);

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("reports without certificates leave bound columns empty") {
  SweepReport report;
  report.version = "test";
  SweepRow row;
  row.d = 3;
  row.delta_e_best = 1e-12;
  row.p_discarded = 0.0;
  report.rows.push_back(row);

  const auto dir = std::filesystem::temp_directory_path() / "qet_emit_na";
  std::filesystem::remove_all(dir);
  const auto paths = emit(report, "csv", dir.string());
  const std::string csv = slurp(paths[0]);
  // empty C, mu, C_tilde, bound, slack fields
  CHECK(csv.find("3,9.9999999999999998e-13,,,,,,0\n") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("emit rejects unwritable destinations") {
  SweepReport report;
  CHECK_THROWS_AS(emit(report, "csv", "/proc/definitely/not/writable"),
                  std::runtime_error);
  CHECK_THROWS_AS(emit(report, "xml", "/tmp"), std::invalid_argument);
}

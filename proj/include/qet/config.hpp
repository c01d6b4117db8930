#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qet {

struct SweepSpec {
  int d_min = 2;
  int d_max = 2;
  int b_size = 1;

  bool operator==(const SweepSpec&) const = default;
};

// Parsed experiment description. Sections and keys are documented in the
// README; parse -> serialize -> parse is the identity.
struct ExperimentConfig {
  // [model]
  std::string model_name = "tfim";
  int n_sites = 0;
  double g = 1.0;
  double coupling = 1.0;

  // [regions]
  std::vector<int> region_a;
  std::optional<std::vector<int>> region_b;

  // [sweep] — region B placed b_size sites wide at distance d from A
  std::optional<SweepSpec> sweep;

  // [protocol]
  std::string scheme = "bloch_projective";
  std::size_t budget = 2000;
  std::uint64_t seed = 1;
  int restarts = 8;
  std::optional<std::vector<double>> params;  // fixed evaluation point

  // [clustering] — defaults derived from the model when unset
  std::optional<int> clustering_d_min;
  std::optional<int> clustering_d_max;
  std::optional<int> window_min;
  std::optional<int> window_max;

  // [output]
  std::string output_dir = "out";
  std::string format = "csv";  // csv | record | both

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates; throws ConfigError with a line number on parse
// errors and with the offending key on semantic errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: fixed section and key order, so output is byte-stable.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace qet

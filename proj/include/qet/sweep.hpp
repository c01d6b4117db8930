#pragma once

#include "qet/config.hpp"
#include "qet/optimize.hpp"

namespace qet {

struct SweepRow {
  int d = 0;
  double delta_e_best = 0.0;
  // empty when the clustering fit is the degenerate sentinel
  std::optional<double> C, mu, C_tilde, bound, slack;
  double p_discarded = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> best_parameters;
};

struct SweepReport {
  std::string version;
  std::string model_name;
  int n_sites = 0;
  double g = 1.0;
  double coupling = 1.0;
  double energy_e0 = 0.0;
  double gap_delta = 0.0;
  ClusterFit fit;
  std::string scheme;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  int restarts = 0;
  std::vector<int> region_a;
  int b_size = 1;
  std::vector<SweepRow> rows;
  std::vector<std::string> invariant_failures;
};

// Full pipeline: solve, shift, fit clustering once per model, then place B at
// each separation, maximize extraction and certify the bound. Bound-violation
// rows are recorded in invariant_failures rather than thrown.
SweepReport run_sweep(const ExperimentConfig& cfg);

// Writes sweep.csv / sweep.json under out_dir (created if missing) according
// to format = csv | record | both. Returns the written paths. Output is
// byte-stable for identical inputs and seed.
std::vector<std::string> emit(const SweepReport& report,
                              const std::string& format,
                              const std::string& out_dir);

// Default clustering sample distances and fit window for a model: distances
// range_r+1 .. n-3, window excluding the two largest sampled distances.
struct ClusteringPlan {
  std::vector<int> distances;
  int window_min = 0;
  int window_max = 0;
};
ClusteringPlan default_clustering_plan(int n_sites, int range_r);

}  // namespace qet

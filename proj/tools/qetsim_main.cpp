// qetsim: command-line driver for ground-state energy-extraction experiments
// on spin chains. Subcommands: gap, protocol, clustering, bound, optimize,
// sweep. All take a configuration file; see README for the format.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

#include "qet/errors.hpp"
#include "qet/kernels.hpp"
#include "qet/models.hpp"
#include "qet/sweep.hpp"
#include "qet/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<std::string> format_override;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file")
      ->required();
  cmd->add_option("--seed", args.seed_override, "override protocol.seed");
  cmd->add_option("--out", args.out_override, "override output.dir");
  cmd->add_option("--format", args.format_override,
                  "override output.format (csv|record|both)");
}

qet::ExperimentConfig load(const CommonArgs& args) {
  qet::ExperimentConfig cfg = qet::load_config(args.config_path);
  if (args.seed_override) cfg.seed = *args.seed_override;
  if (args.out_override) cfg.output_dir = *args.out_override;
  if (args.format_override) cfg.format = *args.format_override;
  return cfg;
}

struct SolvedModel {
  qet::Hamiltonian shifted;
  qet::GroundState gs;

  SolvedModel(const qet::ExperimentConfig& cfg)
      : SolvedModel(build(cfg)) {}

 private:
  SolvedModel(std::pair<qet::Hamiltonian, qet::GroundState> p)
      : shifted(std::move(p.first)), gs(std::move(p.second)) {}

  static std::pair<qet::Hamiltonian, qet::GroundState> build(
      const qet::ExperimentConfig& cfg) {
    qet::ModelSpec spec;
    spec.name = cfg.model_name;
    spec.g = cfg.g;
    spec.coupling = cfg.coupling;
    qet::Hamiltonian h0 = qet::build_chain(cfg.n_sites, spec);
    qet::GroundState gs = qet::solve_ground(h0);
    return {qet::shift_to_zero(h0, gs), std::move(gs)};
  }
};

qet::Region fixed_region_b(const qet::ExperimentConfig& cfg) {
  if (!cfg.region_b)
    throw qet::ConfigError(
        "this subcommand needs a fixed regions.B in the configuration");
  return qet::Region(*cfg.region_b);
}

std::vector<double> protocol_params(const qet::ExperimentConfig& cfg,
                                    const qet::ProtocolScheme& scheme) {
  if (cfg.params) {
    if (static_cast<int>(cfg.params->size()) != scheme.n_params())
      throw qet::ConfigError("protocol.params: expected " +
                             std::to_string(scheme.n_params()) +
                             " values for scheme " + scheme.name());
    return *cfg.params;
  }
  // anchor point: computational-basis measurement, identity decoders
  return std::vector<double>(static_cast<std::size_t>(scheme.n_params()), 0.0);
}

qet::ClusterFit clustering_fit(const qet::ExperimentConfig& cfg,
                               const SolvedModel& model, bool print) {
  auto plan = qet::default_clustering_plan(cfg.n_sites, model.shifted.range_r());
  if (cfg.clustering_d_min || cfg.clustering_d_max) {
    const int lo = cfg.clustering_d_min.value_or(plan.distances.front());
    const int hi = cfg.clustering_d_max.value_or(plan.distances.back());
    plan.distances.clear();
    for (int d = lo; d <= hi; ++d) plan.distances.push_back(d);
  }
  if (cfg.window_min) plan.window_min = *cfg.window_min;
  if (cfg.window_max) plan.window_max = *cfg.window_max;

  const auto samples =
      qet::measure_clustering(model.gs, model.shifted.lattice(), plan.distances);
  if (print) {
    std::printf("# clustering samples (max connected correlator per distance)\n");
    for (const auto& [d, corr] : samples) std::printf("  d=%2d  %.12e\n", d, corr);
  }
  return qet::fit_clustering(samples, plan.window_min, plan.window_max);
}

int cmd_gap(const CommonArgs& args) {
  const auto cfg = load(args);
  qet::ModelSpec spec;
  spec.name = cfg.model_name;
  spec.g = cfg.g;
  spec.coupling = cfg.coupling;
  const qet::Hamiltonian h0 = qet::build_chain(cfg.n_sites, spec);
  const qet::GroundState gs = qet::solve_ground(h0);
  std::printf("model        : %s (n=%d, g=%.17g, coupling=%.17g)\n",
              cfg.model_name.c_str(), cfg.n_sites, cfg.g, cfg.coupling);
  std::printf("J            : %.17g\n", h0.J());
  std::printf("range_r      : %d\n", h0.range_r());
  std::printf("energy_E0    : %.17g\n", gs.energy_E0);
  std::printf("gap_Delta    : %.17g\n", gs.gap_Delta);
  std::printf("degenerate   : %s\n", gs.degenerate ? "yes" : "no");
  if (!gs.degenerate)
    std::printf("shift applied: %.17g\n", -gs.energy_E0);
  return 0;
}

int cmd_protocol(const CommonArgs& args) {
  const auto cfg = load(args);
  const SolvedModel model(cfg);
  const qet::Region region_a(cfg.region_a);
  const qet::Region region_b = fixed_region_b(cfg);
  const qet::ProtocolScheme scheme(cfg.scheme, region_a, region_b);
  const auto params = protocol_params(cfg, scheme);
  auto [kraus, decoder] = qet::instantiate(scheme, params);

  const auto result = qet::run_protocol(model.shifted, model.gs, kraus, decoder);
  std::printf("outcome   p_a            injected        final\n");
  for (const auto& rec : result.outcomes)
    std::printf("%4d      %-14.10f %-15.12f %-15.12f\n", rec.outcome_index,
                rec.probability, rec.injected_energy, rec.final_energy);
  std::printf("E_A       = %.15e\n", result.E_A);
  std::printf("E_B       = %.15e\n", result.E_B);
  std::printf("Delta_E   = %.15e\n", result.Delta_E);
  std::printf("discarded = %.3e\n", result.discarded_probability_mass);

  const double residual =
      qet::bookkeeping_check(result, model.shifted, model.gs, kraus, decoder);
  std::printf("energy bookkeeping residual = %.3e\n", residual);
  if (residual > 1e-9) {
    std::fprintf(stderr, "FAIL: bookkeeping residual above 1e-9\n");
    return 1;
  }
  return 0;
}

int cmd_clustering(const CommonArgs& args) {
  const auto cfg = load(args);
  const SolvedModel model(cfg);
  const auto fit = clustering_fit(cfg, model, true);
  if (fit.degenerate()) {
    std::printf("fit: degenerate (all correlators zero; product ground state)\n");
    return 0;
  }
  std::printf("fit: c=%.12g xi=%.12g r_squared=%.6f window=[%d,%d]%s\n", fit.c,
              fit.xi, fit.r_squared, fit.window_min, fit.window_max,
              fit.quality_ok ? "" : "  [WARNING: poor exponential fit]");
  return 0;
}

int cmd_bound(const CommonArgs& args) {
  const auto cfg = load(args);
  const SolvedModel model(cfg);
  const qet::Region region_a(cfg.region_a);
  const qet::Region region_b = fixed_region_b(cfg);
  const auto fit = clustering_fit(cfg, model, false);
  if (fit.degenerate()) {
    std::printf(
        "degenerate clustering fit: extraction is zero for this model and no "
        "certificate is needed\n");
    return 0;
  }
  const qet::ProtocolScheme scheme(cfg.scheme, region_a, region_b);
  const auto params = protocol_params(cfg, scheme);
  auto [kraus, decoder] = qet::instantiate(scheme, params);
  const auto cert =
      qet::refined_certificate(fit, kraus, decoder, model.shifted, region_b);
  std::printf("S_A     = %.12g\n", cert.S_A);
  std::printf("S_B     = %.12g\n", cert.S_B);
  std::printf("c       = %.12g\n", cert.c);
  std::printf("xi      = %.12g\n", cert.xi);
  std::printf("range_r = %d\n", cert.range_r);
  std::printf("d       = %d\n", cert.separation_d);
  std::printf("C       = %.12g\n", cert.C);
  std::printf("mu      = %.12g\n", cert.mu);
  std::printf("C_tilde = %.12g\n", cert.C_tilde.value_or(0.0));
  std::printf("bound C e^{-mu d}       = %.12e\n",
              cert.C * std::exp(-cert.mu * cert.separation_d));
  std::printf("bound C_tilde e^{-mu d} = %.12e\n",
              cert.C_tilde.value_or(0.0) * std::exp(-cert.mu * cert.separation_d));
  return 0;
}

int cmd_optimize(const CommonArgs& args) {
  const auto cfg = load(args);
  const SolvedModel model(cfg);
  const qet::Region region_a(cfg.region_a);
  const qet::Region region_b = fixed_region_b(cfg);
  const qet::ProtocolScheme scheme(cfg.scheme, region_a, region_b);
  const auto opt =
      qet::maximize_extraction(model.shifted, model.gs, region_a, region_b,
                               scheme, cfg.budget, cfg.seed, cfg.restarts);
  std::printf("best Delta_E = %.15e\n", opt.best_Delta_E);
  std::printf("evaluations  = %zu\n", opt.evaluations);
  std::printf("best parameters:");
  for (double p : opt.best_parameters) std::printf(" %.17g", p);
  std::printf("\n");

  const auto fit = clustering_fit(cfg, model, false);
  if (!fit.degenerate()) {
    auto [kraus, decoder] = qet::instantiate(scheme, opt.best_parameters);
    const auto cert =
        qet::refined_certificate(fit, kraus, decoder, model.shifted, region_b);
    const double bound = cert.C * std::exp(-cert.mu * cert.separation_d);
    std::printf("certificate bound = %.15e  (slack %.3e)\n", bound,
                bound - opt.best_Delta_E);
    if (opt.best_Delta_E > bound + 1e-9) {
      std::fprintf(stderr, "FAIL: extracted energy exceeds the certificate\n");
      return 1;
    }
  } else if (opt.best_Delta_E > 1e-10) {
    std::fprintf(stderr,
                 "FAIL: zero-correlation model but positive extraction\n");
    return 1;
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const auto cfg = load(args);
  const auto report = qet::run_sweep(cfg);
  std::printf("# d   delta_E_best      bound             slack\n");
  for (const auto& row : report.rows)
    std::printf("%3d   %.9e  %.9e  %.3e\n", row.d, row.delta_e_best,
                row.bound.value_or(0.0), row.slack.value_or(0.0));
  const auto paths = qet::emit(report, cfg.format, cfg.output_dir);
  for (const auto& p : paths) std::printf("wrote %s\n", p.c_str());
  if (!report.invariant_failures.empty()) {
    for (const auto& f : report.invariant_failures)
      std::fprintf(stderr, "FAIL: %s\n", f.c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"energy-extraction bounds laboratory for gapped spin chains"};
  app.set_version_flag("--version", std::string("qetsim ") + qet::kVersion);
  app.require_subcommand(1);

  std::string backend;
  app.add_option("--kernel-backend", backend,
                 "force a kernel backend (scalar|avx2)");

  CommonArgs gap_args, protocol_args, clustering_args, bound_args,
      optimize_args, sweep_args;
  add_common(app.add_subcommand("gap", "solve the ground state and report the gap"),
             gap_args);
  add_common(app.add_subcommand("protocol", "run a single measurement/decoding protocol"),
             protocol_args);
  add_common(app.add_subcommand("clustering", "measure correlators and fit the decay envelope"),
             clustering_args);
  add_common(app.add_subcommand("bound", "compute bound certificates at a fixed separation"),
             bound_args);
  add_common(app.add_subcommand("optimize", "maximize extracted energy at a fixed separation"),
             optimize_args);
  add_common(app.add_subcommand("sweep", "distance sweep with certificates and reports"),
             sweep_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!backend.empty()) {
      if (backend == "scalar")
        qet::kernels::set_backend(qet::kernels::Backend::scalar);
      else if (backend == "avx2")
        qet::kernels::set_backend(qet::kernels::Backend::avx2);
      else
        throw std::invalid_argument("unknown kernel backend: " + backend);
    }
    if (app.got_subcommand("gap")) return cmd_gap(gap_args);
    if (app.got_subcommand("protocol")) return cmd_protocol(protocol_args);
    if (app.got_subcommand("clustering")) return cmd_clustering(clustering_args);
    if (app.got_subcommand("bound")) return cmd_bound(bound_args);
    if (app.got_subcommand("optimize")) return cmd_optimize(optimize_args);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

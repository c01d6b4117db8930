#include "qet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "qet/models.hpp"

namespace qet {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

MatrixXcd bloch_axis_operator(double theta, double phi) {
  return std::sin(theta) * std::cos(phi) * pauli_x() +
         std::sin(theta) * std::sin(phi) * pauli_y() +
         std::cos(theta) * pauli_z();
}

}  // namespace

ProtocolScheme::ProtocolScheme(std::string name, Region region_a,
                               Region region_b)
    : name_(std::move(name)),
      region_a_(std::move(region_a)),
      region_b_(std::move(region_b)) {
  if (name_ != "bloch_projective" && name_ != "povm_sqrt")
    throw std::invalid_argument("unknown protocol scheme: " + name_);
  if (region_a_.size() != 1 || region_b_.size() != 1)
    throw std::invalid_argument(
        "protocol schemes are defined on single-site regions");
  if (region_a_.intersects(region_b_))
    throw std::invalid_argument("scheme regions must be disjoint");

  if (name_ == "bloch_projective") {
    bounds_ = {{0.0, kPi}, {-kPi, kPi}};
  } else {
    bounds_ = {{-kPi / 2.0, kPi / 2.0}, {0.0, kPi}, {-kPi, kPi}};
  }
  for (int a = 0; a < n_outcomes(); ++a)
    for (int i = 0; i < 3; ++i) bounds_.emplace_back(-kPi, kPi);
}

int ProtocolScheme::n_measurement_params() const {
  return name_ == "bloch_projective" ? 2 : 3;
}

int ProtocolScheme::n_params() const {
  return n_measurement_params() + 3 * n_outcomes();
}

std::pair<KrausSet, Decoder> instantiate(const ProtocolScheme& scheme,
                                         std::span<const double> params) {
  if (static_cast<int>(params.size()) != scheme.n_params())
    throw std::invalid_argument("parameter count does not match the scheme");
  const auto& bounds = scheme.parameter_bounds();
  for (std::size_t i = 0; i < params.size(); ++i)
    if (params[i] < bounds[i].first || params[i] > bounds[i].second)
      throw std::invalid_argument("parameter " + std::to_string(i) +
                                  " outside its bounds");

  std::vector<MatrixXcd> elements;
  if (scheme.name() == "bloch_projective") {
    const MatrixXcd ns = bloch_axis_operator(params[0], params[1]);
    elements.push_back(0.5 * (identity2() + ns));
    elements.push_back(0.5 * (identity2() - ns));
  } else {
    const double s = std::sin(params[0]);
    const MatrixXcd ns = bloch_axis_operator(params[1], params[2]);
    const MatrixXcd p_plus = 0.5 * (identity2() + ns);
    const MatrixXcd p_minus = 0.5 * (identity2() - ns);
    const double hi = std::sqrt((1.0 + s) / 2.0);
    const double lo = std::sqrt((1.0 - s) / 2.0);
    elements.push_back(hi * p_plus + lo * p_minus);
    elements.push_back(lo * p_plus + hi * p_minus);
  }

  KrausSet kraus{scheme.region_a(), std::move(elements)};
  validate_kraus(kraus);

  std::vector<MatrixXcd> generators;
  const int off = scheme.n_measurement_params();
  for (int a = 0; a < scheme.n_outcomes(); ++a) {
    generators.push_back(params[off + 3 * a + 0] * pauli_x() +
                         params[off + 3 * a + 1] * pauli_y() +
                         params[off + 3 * a + 2] * pauli_z());
  }
  Decoder decoder = decoder_from_generators(scheme.region_b(), std::move(generators));
  return {std::move(kraus), std::move(decoder)};
}

namespace {

struct RestartOutcome {
  std::vector<std::pair<std::size_t, double>> improvements;  // local indices
  std::vector<double> best_params;
  double best_value = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
};

// Single Nelder-Mead descent (on -Delta E) with uniform-random initialization
// inside the box; re-seeds a fresh simplex when it collapses with budget to
// spare. The anchor point (identity decoding, Delta E = 0 exactly) is
// evaluated first so a restart never reports worse than doing nothing.
template <typename Objective>
RestartOutcome run_restart(const Objective& objective,
                           const std::vector<std::pair<double, double>>& bounds,
                           std::size_t budget, std::uint64_t rng_seed,
                           const std::vector<double>* anchor) {
  RestartOutcome out;
  if (budget == 0) return out;

  const std::size_t p = bounds.size();
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  auto sample = [&] {
    std::vector<double> x(p);
    for (std::size_t i = 0; i < p; ++i)
      x[i] = bounds[i].first + (bounds[i].second - bounds[i].first) * uni(rng);
    return x;
  };
  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < p; ++i)
      x[i] = std::clamp(x[i], bounds[i].first, bounds[i].second);
  };
  auto eval = [&](const std::vector<double>& x) {
    const double de = objective(x);
    ++out.used;
    if (de > out.best_value) {
      out.best_value = de;
      out.best_params = x;
      out.improvements.emplace_back(out.used, de);
    }
    return -de;
  };
  auto can_eval = [&] { return out.used < budget; };

  if (anchor) eval(*anchor);

  while (can_eval()) {
    // fresh simplex
    std::vector<std::vector<double>> pts;
    std::vector<double> fv;
    pts.push_back(sample());
    fv.push_back(eval(pts[0]));
    for (std::size_t i = 0; i < p && can_eval(); ++i) {
      auto x = pts[0];
      const double step = 0.25 * (bounds[i].second - bounds[i].first);
      x[i] += (x[i] + step <= bounds[i].second) ? step : -step;
      pts.push_back(x);
      fv.push_back(eval(x));
    }
    if (pts.size() < p + 1) break;  // budget ran out during setup

    std::vector<std::size_t> order(p + 1);
    while (can_eval()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t worst = order[p];
      const std::size_t second_worst = order[p - 1];
      const std::size_t best = order[0];

      // collapse check; re-seed a new simplex if converged
      double spread = 0.0;
      for (std::size_t i = 0; i < p; ++i)
        spread = std::max(spread, std::abs(pts[order[0]][i] - pts[worst][i]));
      if (spread < 1e-10 && std::abs(fv[best] - fv[worst]) < 1e-13) break;

      std::vector<double> centroid(p, 0.0);
      for (std::size_t v = 0; v <= p; ++v) {
        if (v == worst) continue;
        for (std::size_t i = 0; i < p; ++i) centroid[i] += pts[v][i];
      }
      for (double& ci : centroid) ci /= static_cast<double>(p);

      auto make_point = [&](double coef) {
        std::vector<double> x(p);
        for (std::size_t i = 0; i < p; ++i)
          x[i] = centroid[i] + coef * (centroid[i] - pts[worst][i]);
        clip(x);
        return x;
      };

      const auto xr = make_point(1.0);  // reflection
      const double fr = eval(xr);
      if (fr < fv[best] && can_eval()) {
        const auto xe = make_point(2.0);  // expansion
        const double fe = eval(xe);
        pts[worst] = fe < fr ? xe : xr;
        fv[worst] = std::min(fe, fr);
        continue;
      }
      if (fr < fv[second_worst]) {
        pts[worst] = xr;
        fv[worst] = fr;
        continue;
      }
      if (!can_eval()) break;
      const auto xc = make_point(fr < fv[worst] ? 0.5 : -0.5);  // contraction
      const double fc = eval(xc);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = xc;
        fv[worst] = fc;
        continue;
      }
      // shrink toward the best vertex
      for (std::size_t v = 0; v <= p && can_eval(); ++v) {
        if (v == best) continue;
        for (std::size_t i = 0; i < p; ++i)
          pts[v][i] = pts[best][i] + 0.5 * (pts[v][i] - pts[best][i]);
        fv[v] = eval(pts[v]);
      }
    }
  }
  return out;
}

}  // namespace

OptResult maximize_extraction(const Hamiltonian& h, const GroundState& gs,
                              const Region& region_a, const Region& region_b,
                              const ProtocolScheme& scheme, std::size_t budget,
                              std::uint64_t seed, int restarts) {
  if (budget < 1) throw std::invalid_argument("optimizer budget must be >= 1");
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  if (region_a.intersects(region_b))
    throw std::invalid_argument("regions A and B must be disjoint");
  if (scheme.region_a().sites() != region_a.sites() ||
      scheme.region_b().sites() != region_b.sites())
    throw std::invalid_argument("scheme regions do not match the requested ones");

  auto objective = [&](const std::vector<double>& params) {
    auto [kraus, decoder] = instantiate(scheme, params);
    return run_protocol(h, gs, kraus, decoder).Delta_E;
  };

  // Budget partition: one evaluation reserved for the final re-check; the
  // rest is split over restarts up front so scheduling cannot affect results.
  const std::size_t usable = budget > 1 ? budget - 1 : budget;
  const auto n_restarts = static_cast<std::size_t>(restarts);
  std::vector<std::size_t> share(n_restarts, usable / n_restarts);
  for (std::size_t i = 0; i < usable % n_restarts; ++i) ++share[i];

  // zero parameters = computational-basis measurement with identity decoding
  const std::vector<double> anchor(
      static_cast<std::size_t>(scheme.n_params()), 0.0);

  std::vector<RestartOutcome> outcomes(n_restarts);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(hw, n_restarts);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t r = t; r < n_restarts; r += n_threads)
        outcomes[r] = run_restart(objective, scheme.parameter_bounds(),
                                  share[r], mix_seed(seed, r), &anchor);
    });
  }
  for (auto& th : pool) th.join();

  OptResult result;
  result.seed = seed;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t offset = 0;
  for (const auto& rout : outcomes) {
    for (const auto& [local_idx, value] : rout.improvements) {
      if (value > best) {
        best = value;
        result.trace.emplace_back(offset + local_idx, value);
        result.best_parameters = rout.best_params;
      }
    }
    offset += rout.used;
  }
  if (result.best_parameters.empty())
    throw std::runtime_error("optimizer evaluated no points");

  if (budget > 1) {
    result.best_Delta_E = objective(result.best_parameters);  // re-evaluation
    result.evaluations = offset + 1;
  } else {
    result.best_Delta_E = best;
    result.evaluations = offset;
  }
  return result;
}

double brute_force_oracle(const Hamiltonian& h, const GroundState& gs,
                          const Region& region_a, const Region& region_b,
                          const ProtocolScheme& scheme, int grid_resolution) {
  if (h.lattice().n_sites() > 6)
    throw std::invalid_argument("brute-force oracle is limited to 6 sites");
  if (grid_resolution < 2)
    throw std::invalid_argument("grid resolution must be at least 2");
  if (scheme.region_a().sites() != region_a.sites() ||
      scheme.region_b().sites() != region_b.sites())
    throw std::invalid_argument("scheme regions do not match the requested ones");

  const std::size_t p = static_cast<std::size_t>(scheme.n_params());
  double total = 1.0;
  for (std::size_t i = 0; i < p; ++i) total *= grid_resolution;
  if (total > 1e7)
    throw std::invalid_argument("grid too large: " + std::to_string(total) +
                                " points");

  const auto& bounds = scheme.parameter_bounds();
  std::vector<int> idx(p, 0);
  std::vector<double> params(p);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t i = 0; i < p; ++i)
      params[i] = bounds[i].first + (bounds[i].second - bounds[i].first) *
                                        idx[i] / (grid_resolution - 1);
    auto [kraus, decoder] = instantiate(scheme, params);
    const double de = run_protocol(h, gs, kraus, decoder).Delta_E;
    if (de > best) best = de;

    std::size_t k = 0;
    while (k < p && ++idx[k] == grid_resolution) idx[k++] = 0;
    if (k == p) break;
  }
  return best;
}

}  // namespace qet

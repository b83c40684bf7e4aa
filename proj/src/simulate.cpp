#include "isosim/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "isosim/common.hpp"

namespace isosim {

namespace {

constexpr std::size_t kTrialBlock = 1000;

struct PairPoints {
  std::array<double, 2> x, y;
};

PairPoints vertical_pair(const std::array<double, 2>& centre, double distance) {
  return {{centre[0], centre[1] - distance / 2}, {centre[0], centre[1] + distance / 2}};
}

void check_pair(const PairPoints& p, double x_lo, double x_hi, const char* which) {
  auto inside = [&](const std::array<double, 2>& q) {
    return q[0] >= x_lo && q[0] <= x_hi && q[1] >= 0.0 && q[1] <= 1.0;
  };
  if (!inside(p.x) || !inside(p.y))
    throw PreconditionError(std::string(which) + " pair does not fit inside its half of the unit square");
}

// Nearest sampled row to a query, by (squared distance, row index).
std::size_t nearest(const std::vector<std::size_t>& sample, const std::vector<double>& dist) {
  std::size_t best = sample[0];
  for (std::size_t s : sample)
    if (dist[s] < dist[best] || (dist[s] == dist[best] && s < best)) best = s;
  return best;
}

std::vector<double> distances_to(const Dataset& bg, const std::array<double, 2>& q) {
  std::vector<double> d(bg.size());
  for (std::size_t i = 0; i < bg.size(); ++i) d[i] = squared_l2(q, bg.point(i));
  return d;
}

struct Counts {
  std::size_t sparse = 0, dense = 0;
};

// Same-cell counts for both pairs over `trials` psi-samples, run as fixed-size
// blocks with coordinate-derived seeds so the totals do not depend on threading.
Counts run_trials(const Dataset& bg, const PairPoints& sparse, const PairPoints& dense, std::size_t psi,
                  std::size_t trials, std::uint64_t seed, std::uint64_t grid_index) {
  const auto dsx = distances_to(bg, sparse.x), dsy = distances_to(bg, sparse.y);
  const auto ddx = distances_to(bg, dense.x), ddy = distances_to(bg, dense.y);
  const std::size_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Counts> per_block(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    Rng rng(derive_seed(seed, grid_index, b));
    const std::size_t todo = std::min(kTrialBlock, trials - b * kTrialBlock);
    Counts c;
    for (std::size_t k = 0; k < todo; ++k) {
      const auto sample = sample_without_replacement(rng, bg.size(), psi);
      c.sparse += nearest(sample, dsx) == nearest(sample, dsy);
      c.dense += nearest(sample, ddx) == nearest(sample, ddy);
    }
    per_block[b] = c;
  });
  Counts total;
  for (const auto& c : per_block) {
    total.sparse += c.sparse;
    total.dense += c.dense;
  }
  return total;
}

SimulationRow make_row(double parameter, const Counts& c, std::size_t trials) {
  const double t = static_cast<double>(trials);
  SimulationRow r;
  r.parameter = parameter;
  r.p_sparse = static_cast<double>(c.sparse) / t;
  r.p_dense = static_cast<double>(c.dense) / t;
  r.se_sparse = std::sqrt(r.p_sparse * (1.0 - r.p_sparse) / t);
  r.se_dense = std::sqrt(r.p_dense * (1.0 - r.p_dense) / t);
  return r;
}

void check_common(const SimulationConfig& cfg) {
  cfg.background.validate();
  if (cfg.background.dim() != 2) throw PreconditionError("simulation background must be 2-D");
  if (cfg.trials == 0) throw PreconditionError("trials must be >= 1");
}

void check_psi(const SimulationConfig& cfg, std::size_t psi) {
  if (psi == 0 || psi > cfg.background.size())
    throw PreconditionError("psi = " + std::to_string(psi) + " outside [1, " + std::to_string(cfg.background.size()) +
                            "]");
}

}  // namespace

SimulationConfig default_simulation_config(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.density_ratio = 4.0;
  cfg.background = synth_two_density(100, 400, cfg.density_ratio, seed);
  for (std::size_t psi = 2; psi <= 64; psi += 2) cfg.psi_values.push_back(psi);
  for (int k = 1; k <= 19; ++k) cfg.distances.push_back(0.05 * k);
  cfg.seed = seed;
  return cfg;
}

SimulationResult simulate_vs_psi(const SimulationConfig& cfg) {
  check_common(cfg);
  for (std::size_t psi : cfg.psi_values) check_psi(cfg, psi);
  const auto sparse = vertical_pair(cfg.sparse_centre, cfg.fixed_distance);
  const auto dense = vertical_pair(cfg.dense_centre, cfg.fixed_distance);
  check_pair(sparse, 0.0, 0.5, "sparse");
  check_pair(dense, 0.5, 1.0, "dense");

  SimulationResult result;
  result.sweep = "psi";
  result.trials = cfg.trials;
  for (std::size_t g = 0; g < cfg.psi_values.size(); ++g) {
    const std::size_t psi = cfg.psi_values[g];
    const auto c = run_trials(cfg.background, sparse, dense, psi, cfg.trials, cfg.seed, g);
    result.rows.push_back(make_row(static_cast<double>(psi), c, cfg.trials));
  }
  return result;
}

SimulationResult simulate_vs_distance(const SimulationConfig& cfg) {
  check_common(cfg);
  check_psi(cfg, cfg.fixed_psi);
  SimulationResult result;
  result.sweep = "distance";
  result.trials = cfg.trials;
  for (std::size_t g = 0; g < cfg.distances.size(); ++g) {
    const double d = cfg.distances[g];
    if (!(d > 0.0)) throw PreconditionError("distances must be positive");
    const auto sparse = vertical_pair(cfg.sparse_centre, d);
    const auto dense = vertical_pair(cfg.dense_centre, d);
    check_pair(sparse, 0.0, 0.5, "sparse");
    check_pair(dense, 0.5, 1.0, "dense");
    const auto c = run_trials(cfg.background, sparse, dense, cfg.fixed_psi, cfg.trials, cfg.seed, g);
    result.rows.push_back(make_row(d, c, cfg.trials));
  }
  return result;
}

double same_cell_probability(const Dataset& background, std::span<const double> x, std::span<const double> y,
                             std::size_t psi, std::size_t trials, std::uint64_t seed) {
  background.validate();
  if (x.size() != 2 || y.size() != 2 || background.dim() != 2) throw PreconditionError("expected 2-D points");
  if (psi == 0 || psi > background.size()) throw PreconditionError("psi outside [1, n]");
  if (trials == 0) throw PreconditionError("trials must be >= 1");
  const PairPoints p{{x[0], x[1]}, {y[0], y[1]}};
  const auto c = run_trials(background, p, p, psi, trials, seed, 0);
  return static_cast<double>(c.sparse) / static_cast<double>(trials);
}

std::string simulation_to_csv(const SimulationResult& result, const std::string& header) {
  std::ostringstream os;
  os << header << result.sweep << ",p_sparse,p_dense,se_sparse,se_dense\n";
  char buf[160];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g\n", r.parameter, r.p_sparse, r.p_dense, r.se_sparse,
                  r.se_dense);
    os << buf;
  }
  return os.str();
}

}  // namespace isosim

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isosim/dataset.hpp"

namespace isosim {

// Monte-Carlo estimate of the probability that two fixed reference points
// share a Voronoi cell of a random psi-sample of the background field, for a
// pair centred in the sparse half and a pair of equal separation centred in
// the dense half. Each pair is laid out vertically around its centre:
// (cx, cy - d/2) and (cx, cy + d/2).
//
// The proof behind the sparse > dense ordering reasons about a ball V(x, y)
// spanning the pair and the region U(x, y, z) in which no other sampled point
// may fall for both references to keep centre z; the same-cell probability
// behaves like (1 - E[vol U] * rho(V) / |D|)^(psi - 1), so it drops faster
// where the local density rho is higher. Those quantities are not
// materialised; the simulation samples the left-hand probability directly.
struct SimulationConfig {
  Dataset background;
  std::array<double, 2> sparse_centre{0.25, 0.5};
  std::array<double, 2> dense_centre{0.75, 0.5};
  std::vector<std::size_t> psi_values;
  std::vector<double> distances;
  double fixed_distance = 0.2;  // used by simulate_vs_psi
  std::size_t fixed_psi = 15;   // used by simulate_vs_distance
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  double density_ratio = 4.0;
};

// Background of 100 sparse + 400 dense points (ratio 4), psi in {2, 4, ..., 64},
// distances {0.05, 0.10, ..., 0.95}, 10000 trials.
SimulationConfig default_simulation_config(std::uint64_t seed = 0);

struct SimulationRow {
  double parameter = 0.0;  // psi or inter-point distance
  double p_sparse = 0.0;
  double p_dense = 0.0;
  double se_sparse = 0.0;
  double se_dense = 0.0;
};

struct SimulationResult {
  std::string sweep;  // "psi" or "distance"
  std::size_t trials = 0;
  std::vector<SimulationRow> rows;

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

inline bool operator==(const SimulationRow& a, const SimulationRow& b) {
  return a.parameter == b.parameter && a.p_sparse == b.p_sparse && a.p_dense == b.p_dense &&
         a.se_sparse == b.se_sparse && a.se_dense == b.se_dense;
}

SimulationResult simulate_vs_psi(const SimulationConfig& config);
SimulationResult simulate_vs_distance(const SimulationConfig& config);

// Estimated same-cell probability of one reference pair at a given psi.
double same_cell_probability(const Dataset& background, std::span<const double> x, std::span<const double> y,
                             std::size_t psi, std::size_t trials, std::uint64_t seed);

// "<sweep>,p_sparse,p_dense,se_sparse,se_dense" rows.
std::string simulation_to_csv(const SimulationResult& result, const std::string& header = {});

}  // namespace isosim

#include <doctest.h>

#include <cmath>

#include "isosim/simulate.hpp"

using namespace isosim;

namespace {

SimulationConfig small_config() {
  auto cfg = default_simulation_config(1);
  cfg.trials = 2000;
  cfg.psi_values = {2, 8, 32};
  cfg.distances = {0.1, 0.3};
  return cfg;
}

}  // namespace

TEST_CASE("simulation is reproducible and thread-count independent") {
  const auto cfg = small_config();
  set_thread_count(1);
  const auto a = simulate_vs_psi(cfg);
  set_thread_count(3);
  const auto b = simulate_vs_psi(cfg);
  set_thread_count(0);
  CHECK(a == b);
  CHECK(a.rows.size() == 3);
  CHECK(a.sweep == "psi");
  CHECK(simulate_vs_distance(cfg) == simulate_vs_distance(cfg));
}

TEST_CASE("standard errors follow the binomial formula") {
  const auto r = simulate_vs_distance(small_config());
  for (const auto& row : r.rows) {
    CHECK(row.se_sparse == doctest::Approx(std::sqrt(row.p_sparse * (1 - row.p_sparse) / 2000.0)));
    CHECK(row.se_dense == doctest::Approx(std::sqrt(row.p_dense * (1 - row.p_dense) / 2000.0)));
  }
}

TEST_CASE("same-cell probability falls with psi") {
  const auto bg = synth_two_density(100, 400, 4.0, 0);
  const std::vector<double> x{0.25, 0.4}, y{0.25, 0.6};
  const double p2 = same_cell_probability(bg, x, y, 2, 4000, 1);
  const double p32 = same_cell_probability(bg, x, y, 32, 4000, 1);
  CHECK(p2 > p32);
  CHECK(same_cell_probability(bg, x, x, 16, 100, 1) == 1.0);
}

TEST_CASE("pairs outside their half are rejected") {
  auto cfg = small_config();
  cfg.distances = {1.5};
  CHECK_THROWS_AS(simulate_vs_distance(cfg), PreconditionError);
  CHECK(simulation_to_csv(simulate_vs_psi(small_config())).rfind("psi,p_sparse,p_dense,se_sparse,se_dense\n", 0) == 0);
}

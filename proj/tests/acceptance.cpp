// Acceptance checks. Prints one line per criterion:
//   criterion <n> <PASS|FAIL|SKIP> <detail>
// Exit status: 0 when nothing failed, 1 on any failure, 77 when every selected
// criterion was skipped (ctest maps 77 to "skipped").

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "isosim/cli.hpp"
#include "isosim/cluster.hpp"
#include "isosim/eval.hpp"
#include "isosim/simulate.hpp"
#include "oracles.hpp"

using namespace isosim;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// 1. Same-cell probability ordering over psi.
Outcome ordering_over_psi() {
  set_thread_count(1);
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = default_simulation_config(0);
  const auto r = simulate_vs_psi(cfg);
  const double elapsed = seconds_since(t0);
  set_thread_count(0);
  std::size_t checked = 0, violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    const bool inside = row.p_sparse > 0.02 && row.p_sparse < 0.98 && row.p_dense > 0.02 && row.p_dense < 0.98;
    if (!inside) continue;
    ++checked;
    const double se = std::sqrt(row.se_sparse * row.se_sparse + row.se_dense * row.se_dense);
    const double margin = (row.p_sparse - row.p_dense) / se;
    worst = std::min(worst, margin);
    if (!(margin > 3.0)) ++violations;
  }
  const bool ok = violations == 0 && checked > 0 && r.rows.size() == 32 && r.trials == 10000 && elapsed < 60.0;
  return pass_if(ok, "psi 2..64 step 2, t=10000, distance 0.2: " + std::to_string(checked) +
                         " psi values with both estimates in (0.02, 0.98), smallest margin " + fmt(worst) +
                         " combined SE (need > 3), " + std::to_string(violations) + " violations, " +
                         fmt(elapsed, 3) + " s single-threaded (limit 60 s)");
}

// 2. The dense pair stops sharing a cell at a smaller distance.
Outcome earlier_zero() {
  const auto cfg = default_simulation_config(0);
  const auto r = simulate_vs_distance(cfg);
  const double inf = std::numeric_limits<double>::infinity();
  double zero_sparse = inf, zero_dense = inf;
  for (const auto& row : r.rows) {
    if (row.p_sparse <= 0.01 && zero_sparse == inf) zero_sparse = row.parameter;
    if (row.p_dense <= 0.01 && zero_dense == inf) zero_dense = row.parameter;
  }
  return pass_if(zero_dense < zero_sparse, "psi=15, distances 0.05..0.95: p_dense <= 0.01 first at " +
                                                fmt(zero_dense) + ", p_sparse <= 0.01 first at " + fmt(zero_sparse));
}

// 3. Monte-Carlo estimate against exhaustive enumeration.
Outcome exact_agreement() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto data = oracle::random_dataset(2024, 12, 2);
  const std::pair<std::size_t, std::size_t> pairs[] = {{0, 1}, {2, 7}, {3, 11}, {4, 5}, {6, 9}};
  double worst = 0.0;
  for (std::size_t psi : {2u, 3u, 4u}) {
    const auto e = build_ensemble(data, PartitionKind::aNNE, psi, 50000, 77 + psi);
    for (const auto& [i, j] : pairs) {
      const double mc = similarity(e, data.point(i), data.point(j));
      const double exact = exact_similarity(data, PartitionKind::aNNE, psi, data.point(i), data.point(j));
      worst = std::max(worst, std::abs(mc - exact));
    }
  }
  const double elapsed = seconds_since(t0);
  return pass_if(worst <= 0.02 && elapsed < 30.0, "n=12, psi in {2,3,4}, 5 pairs, t=50000: max |K - exact| = " +
                                                      fmt(worst) + " (limit 0.02), " + fmt(elapsed, 3) +
                                                      " s (limit 30 s)");
}

// 4. Symmetry, zero diagonal, entries on the 1/t lattice.
Outcome matrix_algebra(const fs::path& data_dir) {
  std::vector<Dataset> sets{synth_two_density(100, 400, 4.0, 1), oracle::random_dataset(3, 200, 5)};
  if (fs::exists(data_dir / "iris.csv")) sets.push_back(min_max_normalize(load_csv(data_dir / "iris.csv", "-1")).first);
  std::size_t bad = 0, checked = 0;
  for (const auto& d : sets)
    for (auto kind : {PartitionKind::aNNE, PartitionKind::iForest})
      for (std::size_t t : {1u, 7u, 200u}) {
        const auto m = dissimilarity_matrix(d, build_ensemble(d, kind, 16, t, 5));
        for (std::size_t i = 0; i < m.size(); ++i) {
          bad += m(i, i) != 0.0;
          for (std::size_t j = 0; j < m.size(); ++j) {
            const double k = std::round(m(i, j) * static_cast<double>(t));
            bad += m(i, j) != m(j, i);
            bad += m(i, j) != k / static_cast<double>(t);
            ++checked;
          }
        }
      }
  return pass_if(bad == 0, std::to_string(sets.size()) + " datasets (n <= 500) x {aNNE, iForest} x t in {1,7,200}: " +
                               std::to_string(checked) + " entries, " + std::to_string(bad) + " violations");
}

// 5. DBSCAN against the transitive-closure oracle.
Outcome dbscan_oracle() {
  Rng rng(555);
  std::size_t mismatches = 0, nontrivial = 0;
  for (std::size_t inst = 0; inst < 50; ++inst) {
    const auto data = oracle::random_dataset(1000 + inst, 30, 2);
    const std::size_t psi = 2 + rng.below(10);
    const auto m = inst % 5 == 0 ? euclidean_matrix(data)
                                 : dissimilarity_matrix(data, build_ensemble(data, PartitionKind::aNNE, psi, 50, inst));
    const double cutoff = inst % 5 == 0 ? rng.uniform(0.05, 0.4) : rng.uniform(0.3, 0.95);
    const std::size_t min_points = 1 + rng.below(8);
    const auto got = dbscan(m, cutoff, min_points);
    const auto expect = oracle::dbscan(m, cutoff, min_points);
    mismatches += oracle::canonical(got.assignment) != oracle::canonical(expect);
    nontrivial += got.n_clusters > 1;
  }
  return pass_if(mismatches == 0, "50 random 30-point instances: " + std::to_string(mismatches) +
                                      " mismatches (" + std::to_string(nontrivial) + " with several clusters)");
}

struct BenchLine {
  std::string name;
  double anne = 0.0;
  double l2 = 0.0;
};

BenchLine bench(const fs::path& path, const std::string& name, bool need_l2) {
  Dataset d = min_max_normalize(load_csv(path, "-1")).first;
  d.name = name;
  const auto ranges = default_ranges(d.size());
  BenchLine b{name};
  b.anne = grid_search(d, parse_algorithm("mbscan-anne"), ranges, 10, 0).best_row().mean_f1;
  if (need_l2) b.l2 = grid_search(d, parse_algorithm("dbscan-l2"), ranges, 1, 0).best_row().mean_f1;
  return b;
}

// 6a. Bundled benchmark datasets.
Outcome benchmark_core(const fs::path& dir) {
  if (!fs::exists(dir / "iris.csv") || !fs::exists(dir / "wine.csv"))
    return {Verdict::Fail, "iris.csv / wine.csv missing from " + dir.string() + " (run scripts/make_datasets.py)"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto iris = bench(dir / "iris.csv", "iris", true);
  const auto wine = bench(dir / "wine.csv", "wine", true);
  const bool ok = iris.anne >= 0.92 && iris.l2 >= 0.79 && iris.l2 <= 0.90 && wine.anne >= 0.90 &&
                  wine.anne - wine.l2 >= 0.20;
  std::string detail = "iris MBSCAN-aNNE " + fmt(iris.anne) + " (>= 0.92), DBSCAN-l2 " + fmt(iris.l2) +
                       " (in [0.79, 0.90]); wine MBSCAN-aNNE " + fmt(wine.anne) + " (>= 0.90), DBSCAN-l2 " +
                       fmt(wine.l2) + ", gap " + fmt(wine.anne - wine.l2) + " (>= 0.20); " +
                       fmt(seconds_since(t0), 3) + " s";
  std::vector<std::string> absent;
  for (const char* f : {"thyroid.csv", "seeds.csv"})
    if (!fs::exists(dir / f)) absent.push_back(f);
  if (!absent.empty()) detail += "; not gated here: thyroid/seeds (see the optional-datasets test)";
  return pass_if(ok, detail);
}

// 6b. Datasets that are not redistributed with the repository.
Outcome benchmark_optional(const fs::path& dir) {
  const std::pair<const char*, double> wanted[] = {{"thyroid", 0.86}, {"seeds", 0.87}};
  std::string detail;
  std::size_t present = 0;
  bool ok = true;
  for (const auto& [name, bar] : wanted) {
    const auto path = dir / (std::string(name) + ".csv");
    if (!detail.empty()) detail += "; ";
    if (!fs::exists(path)) {
      detail += std::string(name) + " absent (" + path.string() + ")";
      continue;
    }
    ++present;
    const auto b = bench(path, name, false);
    ok = ok && b.anne >= bar;
    detail += std::string(name) + " MBSCAN-aNNE " + fmt(b.anne) + " (>= " + fmt(bar) + ")";
  }
  if (present == 0) return {Verdict::Skip, detail};
  return pass_if(ok, detail);
}

// 7. Detectability on the hard three-cluster field. Cutoffs at which some
// mode pair is disconnected satisfy the condition vacuously (valley 0) for any
// data, so the gate counts cutoffs where all modes are mutually reachable.
Outcome detectability() {
  const auto d = synth_three_cluster_hard(0);
  const auto modes = class_medoids(d);
  const auto grid = default_ranges(d.size()).cutoffs;
  auto tally = [&](const DissimilarityMatrix& m) {
    std::size_t connected = 0, satisfied = 0, vacuous = 0;
    for (const auto& row : detectability_diagnostic(m, modes, grid)) {
      const bool joined = std::all_of(row.valley.begin(), row.valley.end(), [](std::size_t g) { return g > 0; });
      connected += joined;
      satisfied += joined && row.condition;
      vacuous += !joined && row.condition;
    }
    return std::array<std::size_t, 3>{connected, satisfied, vacuous};
  };
  const auto iso = tally(dissimilarity_matrix(d, build_ensemble(d, PartitionKind::aNNE, 32, 200, 0)));
  const auto euc = tally(euclidean_matrix(d));
  const bool ok = iso[1] >= 1 && euc[1] == 0 && euc[0] > 0;
  return pass_if(ok, "aNNE psi=32 t=200: condition at " + std::to_string(iso[1]) + " of " + std::to_string(iso[0]) +
                         " connected alphas (need >= 1); euclidean: " + std::to_string(euc[1]) + " of " +
                         std::to_string(euc[0]) + " connected epsilons (need 0); vacuous disconnected cutoffs " +
                         "(reported, not gated): aNNE " + std::to_string(iso[2]) + ", euclidean " +
                         std::to_string(euc[2]));
}

// 8. Bit-identical reruns, including under different thread counts.
Outcome determinism() {
  std::vector<std::string> broken;
  const auto data = synth_three_cluster_hard(4);
  auto at_threads = [](unsigned n, auto&& fn) {
    set_thread_count(n);
    auto r = fn();
    set_thread_count(0);
    return r;
  };
  for (auto kind : {PartitionKind::aNNE, PartitionKind::iForest}) {
    auto build = [&] { return dissimilarity_matrix(data, build_ensemble(data, kind, 24, 100, 9)); };
    const auto a = at_threads(1, build), b = at_threads(1, build), c = at_threads(4, build);
    if (!(a == b && a == c)) broken.push_back("matrix " + to_string(kind));
    if (!(dbscan(a, 0.7, 10).assignment == dbscan(c, 0.7, 10).assignment)) broken.push_back("dbscan");
    if (!(density_peaks(a, 3, 0.7).assignment == density_peaks(c, 3, 0.7).assignment)) broken.push_back("dp");
  }
  auto cfg = default_simulation_config(5);
  cfg.trials = 3000;
  auto sim = [&] { return simulate_vs_psi(cfg); };
  if (!(at_threads(1, sim) == at_threads(3, sim))) broken.push_back("simulation");

  auto ranges = default_ranges(data.size());
  ranges.cutoffs = linear_grid(0.3, 0.95, 8);
  ranges.min_points = {5, 10, 20};
  ranges.ks = {2, 3, 4};
  ranges.psis = {8, 32};
  ranges.t = 50;
  for (const char* alg : {"mbscan-anne", "mbscan-iforest", "dp-anne"}) {
    auto gs = [&] { return grid_search(data, parse_algorithm(alg), ranges, 3, 21); };
    if (!(at_threads(1, gs) == at_threads(4, gs))) broken.push_back(std::string("grid search ") + alg);
  }

  // Whole-tool reruns through the command-line entry point.
  const auto dir = fs::temp_directory_path() / "isosim_acceptance";
  fs::create_directories(dir);
  write_csv(data, dir / "data.csv");
  auto tool = [&](const std::string& threads, const std::string& out) {
    std::ostringstream so, se;
    const std::vector<std::string> args{"isosim",  "--threads", threads, "similarity",          "--data",
                                        (dir / "data.csv").string(), "--psi", "16", "--t", "64", "--seed",
                                        "3",       "--out",     (dir / out).string()};
    if (cli::run(args, so, se) != 0) return DissimilarityMatrix{};
    auto m = read_matrix_binary(dir / out);
    m.provenance.clear();
    return m;
  };
  const auto t1 = tool("1", "m1.bin"), t4 = tool("4", "m4.bin");
  if (t1.size() == 0 || !(t1 == t4)) broken.push_back("cli similarity");

  std::string detail = "ensembles, matrices, dbscan, dp, simulation, grid search and the cli at 1 vs 3-4 threads";
  if (!broken.empty()) {
    detail += "; differing:";
    for (const auto& b : broken) detail += " " + b;
  }
  return pass_if(broken.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isosim acceptance checks"};
  std::string data_dir = "data";
  std::vector<int> only;
  bool optional = false;
  app.add_option("--data-dir", data_dir, "Directory holding iris.csv, wine.csv and optionally thyroid.csv, seeds.csv");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_flag("--optional-datasets", optional, "Run only the criterion-6 rows for thyroid and seeds");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir(data_dir);
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  if (optional) {
    criteria.emplace_back("6", [&] { return benchmark_optional(dir); });
  } else {
    criteria = {{"1", ordering_over_psi},
                {"2", earlier_zero},
                {"3", exact_agreement},
                {"4", [&] { return matrix_algebra(dir); }},
                {"5", dbscan_oracle},
                {"6", [&] { return benchmark_core(dir); }},
                {"7", detectability},
                {"8", determinism}};
  }
  const std::set<int> selected(only.begin(), only.end());
  std::size_t failed = 0, skipped = 0, ran = 0;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && !selected.count(std::stoi(id))) continue;
    ++ran;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::cout << "criterion " << id << ' ' << tag << ' ' << o.detail << std::endl;
    failed += o.verdict == Verdict::Fail;
    skipped += o.verdict == Verdict::Skip;
  }
  if (failed) return 1;
  if (ran > 0 && skipped == ran) return 77;
  return 0;
}

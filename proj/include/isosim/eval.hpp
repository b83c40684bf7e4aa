#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isosim/cluster.hpp"
#include "isosim/dataset.hpp"
#include "isosim/partition.hpp"
#include "isosim/similarity.hpp"

namespace isosim {

// ---------------------------------------------------------------------------
// F1

struct ClassScore {
  int truth_class = 0;  // original truth label
  int cluster = kNoise;  // matched predicted cluster, kNoise when unmatched
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct F1Report {
  std::vector<ClassScore> per_class;  // one entry per truth class, ascending label
  double macro_f1 = 0.0;
  std::map<int, int> matching;  // predicted cluster -> truth class
  std::string matching_rule = "optimal one-to-one cluster/class assignment maximising summed F1";
};

// Clusters are matched one-to-one to truth classes so the summed per-class F1
// is maximal; a class left without a cluster scores 0 and surplus clusters are
// ignored. Noise points belong to no cluster, so they only lower recall. The
// macro average runs over the truth classes.
F1Report f1_score(const std::vector<int>& predicted, const std::vector<int>& truth);
inline F1Report f1_score(const Clustering& predicted, const std::vector<int>& truth) {
  return f1_score(predicted.assignment, truth);
}

// Reusable scorer for many clusterings against one truth vector.
class F1Scorer {
 public:
  explicit F1Scorer(const std::vector<int>& truth);
  double macro_f1(const std::vector<int>& predicted) const;
  F1Report report(const std::vector<int>& predicted) const;

 private:
  std::vector<int> truth_ids_;     // dense class index per point
  std::vector<int> class_labels_;  // original label per dense index
  std::vector<std::size_t> class_sizes_;
};

// Maximum-weight one-to-one assignment of rows to columns of a rows x cols
// weight table (row-major). Returns the column for each row, or -1.
std::vector<int> max_weight_assignment(const std::vector<double>& weights, std::size_t rows, std::size_t cols);

// ---------------------------------------------------------------------------
// Grid search

enum class Algorithm { DBSCAN, DensityPeaks };
enum class Measure { Euclidean, ANNE, IForest };

struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::DBSCAN;
  Measure measure = Measure::Euclidean;

  bool randomized() const { return measure != Measure::Euclidean; }
  std::string name() const;
  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

// Accepts dbscan-l2, mbscan-anne, mbscan-iforest, dp-l2, dp-anne, dp-iforest.
AlgorithmSpec parse_algorithm(const std::string& text);

struct ParameterRanges {
  std::vector<double> cutoffs;           // epsilon / alpha / d_c
  std::vector<std::size_t> min_points;   // DBSCAN
  std::vector<std::size_t> ks;           // DP
  std::vector<std::size_t> psis;         // isolation measures
  std::size_t t = 200;
  std::string cutoff_spacing = "linear";

  std::string describe() const;
};

// min_points and k in [2, 40]; 101 evenly spaced cutoffs over [0.001, 0.999];
// psi: 10 evenly spaced integers over [2, ceil(n/2)]; t = 200.
ParameterRanges default_ranges(std::size_t n);
std::vector<double> linear_grid(double lo, double hi, std::size_t count);
std::vector<std::size_t> psi_grid(std::size_t n, std::size_t count = 10);

struct SweepRow {
  std::size_t psi = 0;  // 0 for euclidean
  double cutoff = 0.0;
  std::size_t parameter = 0;  // min_points or k
  double mean_f1 = 0.0;
  double std_f1 = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
  std::string dataset;
  AlgorithmSpec algorithm;
  std::vector<SweepRow> rows;
  std::size_t best = 0;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
  std::string ranges;

  const SweepRow& best_row() const { return rows.at(best); }
  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

// Evaluates every grid point. Randomised measures average F1 over `repeats`
// ensembles; repeat r at psi index a is seeded with derive_seed(seed, a, r).
// Euclidean runs are deterministic and evaluated once.
SweepReport grid_search(const Dataset& data, const AlgorithmSpec& spec, const ParameterRanges& ranges,
                        std::size_t repeats, std::uint64_t seed);

// All grid rows as CSV.
std::string sweep_to_csv(const SweepReport& report, const std::string& header = {});

// ---------------------------------------------------------------------------
// Detectability

struct DetectabilityRow {
  double cutoff = 0.0;
  std::vector<std::size_t> mode_mass;          // M at each mode
  std::vector<std::size_t> valley;             // g_ij per mode pair (i < j), row-major over pairs
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  bool condition = false;                      // min mode mass > max valley
};

// For each cutoff: the mass of every designated mode and, for every mode pair,
// the largest threshold tau such that the modes stay connected in the cutoff
// graph restricted to points with mass >= tau (0 when never connected). The
// condition holds when some tau separates all modes from all valleys.
std::vector<DetectabilityRow> detectability_diagnostic(const DissimilarityMatrix& matrix,
                                                       const std::vector<std::size_t>& modes,
                                                       const std::vector<double>& cutoffs);

std::string detectability_to_csv(const std::vector<DetectabilityRow>& rows, const std::string& header = {});

// Point of each class minimising the summed euclidean distance to its class.
std::vector<std::size_t> class_medoids(const Dataset& data);

}  // namespace isosim

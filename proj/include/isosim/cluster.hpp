#pragma once

#include <functional>
#include <string>
#include <vector>

#include "isosim/neighbourhood.hpp"
#include "isosim/similarity.hpp"

namespace isosim {

inline constexpr int kNoise = -1;

struct Clustering {
  std::vector<int> assignment;  // cluster id in [0, n_clusters) or kNoise
  std::size_t n_clusters = 0;
  std::string parameters;

  std::size_t size() const { return assignment.size(); }
  std::size_t noise_count() const;
};

// "index,label" rows, noise written as -1.
std::string clustering_to_csv(const Clustering& c, const std::string& header = {});

// DBSCAN over any dissimilarity. A point is core when its cutoff-neighbourhood
// (self included) holds at least min_points points; cores within cutoff of
// each other are chained into one cluster, non-core points within cutoff of a
// core become border points, the rest are noise. Points are scanned in
// ascending index order, so cluster ids follow each cluster's lowest core
// index and a border point reachable from several clusters joins the one with
// the smallest id. Fed an isolation matrix this is MBSCAN.
Clustering dbscan(const DissimilarityMatrix& matrix, double cutoff, std::size_t min_points);
Clustering dbscan(const NeighbourOrder& order, double cutoff, std::size_t min_points);

// Same result as dbscan() for every entry of `min_points`, computed together
// by growing the core set with a union-find. `emit(k, assignment, n_clusters)`
// is called once per entry k of `min_points` (in descending min_points order).
void dbscan_min_points_sweep(const NeighbourOrder& order, double cutoff, const std::vector<std::size_t>& min_points,
                             const std::function<void(std::size_t, const std::vector<int>&, std::size_t)>& emit);

// Mass-connectivity predicate: i == j, or j within cutoff of i with one
// of them core, or a chain i -> c_1 -> ... -> c_m -> j of hops within cutoff
// whose intermediates (distinct from i and j) all have mass >= tau.
bool mass_connected(const DissimilarityMatrix& matrix, std::size_t i, std::size_t j, double cutoff, std::size_t tau);

// Density Peaks state. Points are ranked by (rho descending, index ascending);
// "higher" means earlier in that ranking. The top-ranked point gets delta equal
// to the largest pairwise dissimilarity and nearest_higher equal to itself.
struct DPState {
  std::vector<std::size_t> rho;
  std::vector<double> delta;
  std::vector<std::size_t> nearest_higher;
  std::vector<std::size_t> ranking;  // indices by descending rho
};

DPState density_peaks_state(const DissimilarityMatrix& matrix, double d_c);

// Seeds are the k largest rho * delta (ties to the lower index); the top-ranked
// point is always a seed. Remaining points inherit the label of nearest_higher
// in ranking order. Every point gets a cluster.
Clustering density_peaks(const DissimilarityMatrix& matrix, std::size_t k, double d_c);
Clustering density_peaks(const DPState& state, std::size_t k, double d_c);

}  // namespace isosim

#pragma once

#include <string>
#include <vector>

#include "isosim/similarity.hpp"

namespace isosim {

// Number of j (self included) with matrix(i, j) <= cutoff. On a euclidean
// matrix this is the density count N_eps, on an isolation matrix the mass M_alpha.
std::size_t neighbourhood_count(const DissimilarityMatrix& matrix, std::size_t i, double cutoff);
std::vector<std::size_t> neighbourhood_counts(const DissimilarityMatrix& matrix, double cutoff);

// Counts at each of an ascending list of cutoffs.
std::vector<std::size_t> neighbourhood_curve(const DissimilarityMatrix& matrix, std::size_t i,
                                             const std::vector<double>& cutoffs);

// "cutoff,count" rows.
std::string curve_to_csv(const std::vector<double>& cutoffs, const std::vector<std::size_t>& counts,
                         const std::string& header = {});

// Undirected graph with edge (i, j) iff i != j and matrix(i, j) <= cutoff.
struct NeighbourGraph {
  std::vector<std::vector<std::size_t>> adjacency;  // ascending neighbour ids

  std::size_t size() const { return adjacency.size(); }
  std::size_t edge_count() const;
};

NeighbourGraph alpha_neighbourhood_graph(const DissimilarityMatrix& matrix, double cutoff);

// Each row's columns sorted by (value, column). The cutoff-neighbourhood of i
// is a prefix of order(i), so one sort serves every cutoff.
class NeighbourOrder {
 public:
  explicit NeighbourOrder(const DissimilarityMatrix& matrix);

  std::size_t size() const { return n_; }
  std::span<const std::size_t> order(std::size_t i) const { return {order_.data() + i * n_, n_}; }
  // Length of the cutoff-neighbourhood prefix of row i (self included).
  std::size_t count(std::size_t i, double cutoff) const;
  std::span<const std::size_t> neighbours(std::size_t i, double cutoff) const {
    return order(i).first(count(i, cutoff));
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> order_;
  std::vector<double> sorted_;
};

}  // namespace isosim

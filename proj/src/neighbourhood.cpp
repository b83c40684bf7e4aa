#include "isosim/neighbourhood.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace isosim {

namespace {

void check_index(const DissimilarityMatrix& m, std::size_t i) {
  if (i >= m.size())
    throw PreconditionError("point index " + std::to_string(i) + " out of range for n = " + std::to_string(m.size()));
}

}  // namespace

std::size_t neighbourhood_count(const DissimilarityMatrix& matrix, std::size_t i, double cutoff) {
  check_index(matrix, i);
  const auto row = matrix.row(i);
  return static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [&](double v) { return v <= cutoff; }));
}

std::vector<std::size_t> neighbourhood_counts(const DissimilarityMatrix& matrix, double cutoff) {
  std::vector<std::size_t> counts(matrix.size());
  parallel_for(matrix.size(), [&](std::size_t i) { counts[i] = neighbourhood_count(matrix, i, cutoff); });
  return counts;
}

std::vector<std::size_t> neighbourhood_curve(const DissimilarityMatrix& matrix, std::size_t i,
                                             const std::vector<double>& cutoffs) {
  check_index(matrix, i);
  if (!std::is_sorted(cutoffs.begin(), cutoffs.end())) throw PreconditionError("cutoffs must be sorted ascending");
  const auto row = matrix.row(i);
  std::vector<double> sorted(row.begin(), row.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> counts;
  counts.reserve(cutoffs.size());
  for (double c : cutoffs)
    counts.push_back(static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), c) - sorted.begin()));
  return counts;
}

std::string curve_to_csv(const std::vector<double>& cutoffs, const std::vector<std::size_t>& counts,
                         const std::string& header) {
  std::ostringstream os;
  os << header << "cutoff,count\n";
  char buf[40];
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.9g", cutoffs[k]);
    os << buf << ',' << counts.at(k) << '\n';
  }
  return os.str();
}

std::size_t NeighbourGraph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

NeighbourGraph alpha_neighbourhood_graph(const DissimilarityMatrix& matrix, double cutoff) {
  NeighbourGraph g;
  g.adjacency.resize(matrix.size());
  parallel_for(matrix.size(), [&](std::size_t i) {
    const auto row = matrix.row(i);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (j != i && row[j] <= cutoff) g.adjacency[i].push_back(j);
  });
  return g;
}

NeighbourOrder::NeighbourOrder(const DissimilarityMatrix& matrix)
    : n_(matrix.size()), order_(n_ * n_), sorted_(n_ * n_) {
  parallel_for(n_, [&](std::size_t i) {
    const auto row = matrix.row(i);
    auto first = order_.begin() + static_cast<long>(i * n_);
    std::iota(first, first + static_cast<long>(n_), std::size_t{0});
    std::stable_sort(first, first + static_cast<long>(n_), [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    for (std::size_t k = 0; k < n_; ++k) sorted_[i * n_ + k] = row[first[static_cast<long>(k)]];
  });
}

std::size_t NeighbourOrder::count(std::size_t i, double cutoff) const {
  const auto first = sorted_.begin() + static_cast<long>(i * n_);
  return static_cast<std::size_t>(std::upper_bound(first, first + static_cast<long>(n_), cutoff) - first);
}

}  // namespace isosim

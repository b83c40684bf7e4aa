#include "isosim/cluster.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace isosim {

namespace {

constexpr int kUnvisited = -2;

std::string dbscan_params(double cutoff, std::size_t min_points) {
  std::ostringstream os;
  os << "algorithm=dbscan cutoff=" << cutoff << " min_points=" << min_points;
  return os.str();
}

// Sequential DBSCAN expansion; `neighbours(p, visit)` calls visit(q) for every
// q within cutoff of p (self included).
template <class Neighbours>
Clustering expand(std::size_t n, const std::vector<std::size_t>& counts, std::size_t min_points, Neighbours&& neighbours) {
  Clustering c;
  c.assignment.assign(n, kUnvisited);
  int next = 0;
  std::deque<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (c.assignment[i] != kUnvisited) continue;
    if (counts[i] < min_points) {
      c.assignment[i] = kNoise;
      continue;
    }
    const int id = next++;
    c.assignment[i] = id;
    frontier.push_back(i);
    while (!frontier.empty()) {
      const std::size_t p = frontier.front();
      frontier.pop_front();
      if (counts[p] < min_points) continue;
      neighbours(p, [&](std::size_t q) {
        if (c.assignment[q] == kNoise) {
          c.assignment[q] = id;
        } else if (c.assignment[q] == kUnvisited) {
          c.assignment[q] = id;
          frontier.push_back(q);
        }
      });
    }
  }
  c.n_clusters = static_cast<std::size_t>(next);
  return c;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::size_t Clustering::noise_count() const {
  return static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), kNoise));
}

std::string clustering_to_csv(const Clustering& c, const std::string& header) {
  std::ostringstream os;
  os << header << "index,label\n";
  for (std::size_t i = 0; i < c.size(); ++i) os << i << ',' << c.assignment[i] << '\n';
  return os.str();
}

Clustering dbscan(const DissimilarityMatrix& matrix, double cutoff, std::size_t min_points) {
  if (min_points == 0) throw PreconditionError("min_points must be >= 1");
  const std::size_t n = matrix.size();
  const auto counts = neighbourhood_counts(matrix, cutoff);
  auto c = expand(n, counts, min_points, [&](std::size_t p, auto&& visit) {
    const auto row = matrix.row(p);
    for (std::size_t q = 0; q < n; ++q)
      if (row[q] <= cutoff) visit(q);
  });
  c.parameters = dbscan_params(cutoff, min_points);
  return c;
}

Clustering dbscan(const NeighbourOrder& order, double cutoff, std::size_t min_points) {
  if (min_points == 0) throw PreconditionError("min_points must be >= 1");
  const std::size_t n = order.size();
  std::vector<std::size_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = order.count(i, cutoff);
  auto c = expand(n, counts, min_points, [&](std::size_t p, auto&& visit) {
    for (std::size_t q : order.order(p).first(counts[p])) visit(q);
  });
  c.parameters = dbscan_params(cutoff, min_points);
  return c;
}

void dbscan_min_points_sweep(const NeighbourOrder& order, double cutoff, const std::vector<std::size_t>& min_points,
                             const std::function<void(std::size_t, const std::vector<int>&, std::size_t)>& emit) {
  const std::size_t n = order.size();
  std::vector<std::size_t> counts(n);
  for (std::size_t i = 0; i < n; ++i) counts[i] = order.count(i, cutoff);

  std::vector<std::size_t> by_count(n);
  std::iota(by_count.begin(), by_count.end(), std::size_t{0});
  std::stable_sort(by_count.begin(), by_count.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });

  std::vector<std::size_t> jobs(min_points.size());
  std::iota(jobs.begin(), jobs.end(), std::size_t{0});
  std::stable_sort(jobs.begin(), jobs.end(), [&](std::size_t a, std::size_t b) { return min_points[a] > min_points[b]; });

  UnionFind uf(n);
  std::vector<char> core(n, 0);
  std::vector<int> component_id(n, -1);
  std::vector<int> labels(n);
  std::size_t added = 0;
  for (std::size_t job : jobs) {
    const std::size_t m = min_points[job];
    if (m == 0) throw PreconditionError("min_points must be >= 1");
    while (added < n && counts[by_count[added]] >= m) {
      const std::size_t p = by_count[added++];
      core[p] = 1;
      for (std::size_t q : order.order(p).first(counts[p]))
        if (core[q]) uf.unite(p, q);
    }
    // Cluster ids in order of each component's lowest core index.
    std::fill(component_id.begin(), component_id.end(), -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!core[i]) continue;
      const std::size_t r = uf.find(i);
      if (component_id[r] < 0) component_id[r] = next++;
      labels[i] = component_id[r];
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (core[i]) continue;
      int best = kNoise;
      for (std::size_t q : order.order(i).first(counts[i]))
        if (core[q]) {
          const int id = component_id[uf.find(q)];
          if (best == kNoise || id < best) best = id;
        }
      labels[i] = best;
    }
    emit(job, labels, static_cast<std::size_t>(next));
  }
}

bool mass_connected(const DissimilarityMatrix& matrix, std::size_t i, std::size_t j, double cutoff, std::size_t tau) {
  const std::size_t n = matrix.size();
  if (i >= n || j >= n) throw PreconditionError("point index out of range");
  if (i == j) return true;
  const auto mass = neighbourhood_counts(matrix, cutoff);
  auto is_core = [&](std::size_t p) { return mass[p] >= tau; };
  if (matrix(i, j) <= cutoff && (is_core(i) || is_core(j))) return true;

  // Breadth-first search over core intermediates reachable from i.
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> frontier;
  seen[i] = seen[j] = 1;
  for (std::size_t c = 0; c < n; ++c)
    if (!seen[c] && matrix(i, c) <= cutoff && is_core(c)) {
      seen[c] = 1;
      frontier.push_back(c);
    }
  while (!frontier.empty()) {
    const std::size_t c = frontier.front();
    frontier.pop_front();
    if (matrix(c, j) <= cutoff) return true;
    for (std::size_t q = 0; q < n; ++q)
      if (!seen[q] && matrix(c, q) <= cutoff && is_core(q)) {
        seen[q] = 1;
        frontier.push_back(q);
      }
  }
  return false;
}

DPState density_peaks_state(const DissimilarityMatrix& matrix, double d_c) {
  if (!(d_c > 0.0)) throw PreconditionError("d_c must be > 0");
  const std::size_t n = matrix.size();
  DPState s;
  s.rho = neighbourhood_counts(matrix, d_c);
  s.ranking.resize(n);
  std::iota(s.ranking.begin(), s.ranking.end(), std::size_t{0});
  std::stable_sort(s.ranking.begin(), s.ranking.end(), [&](std::size_t a, std::size_t b) { return s.rho[a] > s.rho[b]; });

  s.delta.assign(n, 0.0);
  s.nearest_higher.assign(n, 0);
  double widest = 0.0;
  for (double v : matrix.values.values()) widest = std::max(widest, v);
  const std::size_t top = s.ranking[0];
  s.delta[top] = widest;
  s.nearest_higher[top] = top;
  for (std::size_t r = 1; r < n; ++r) {
    const std::size_t p = s.ranking[r];
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = s.ranking[0];
    for (std::size_t h = 0; h < r; ++h) {
      const std::size_t q = s.ranking[h];
      const double d = matrix(p, q);
      if (d < best || (d == best && q < arg)) {
        best = d;
        arg = q;
      }
    }
    s.delta[p] = best;
    s.nearest_higher[p] = arg;
  }
  return s;
}

Clustering density_peaks(const DPState& s, std::size_t k, double d_c) {
  const std::size_t n = s.rho.size();
  if (k < 2) throw PreconditionError("k must be >= 2");
  if (k > n) throw PreconditionError("k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));

  std::vector<std::size_t> by_gamma(n);
  std::iota(by_gamma.begin(), by_gamma.end(), std::size_t{0});
  auto gamma = [&](std::size_t p) { return static_cast<double>(s.rho[p]) * s.delta[p]; };
  std::stable_sort(by_gamma.begin(), by_gamma.end(), [&](std::size_t a, std::size_t b) { return gamma(a) > gamma(b); });
  std::vector<char> seed(n, 0);
  for (std::size_t r = 0; r < k; ++r) seed[by_gamma[r]] = 1;
  const std::size_t top = s.ranking[0];
  if (!seed[top]) {
    seed[by_gamma[k - 1]] = 0;
    seed[top] = 1;
  }

  Clustering c;
  c.assignment.assign(n, kNoise);
  int next = 0;
  for (std::size_t p : s.ranking)
    c.assignment[p] = seed[p] ? next++ : c.assignment[s.nearest_higher[p]];
  c.n_clusters = static_cast<std::size_t>(next);
  std::ostringstream os;
  os << "algorithm=dp k=" << k << " d_c=" << d_c;
  c.parameters = os.str();
  return c;
}

Clustering density_peaks(const DissimilarityMatrix& matrix, std::size_t k, double d_c) {
  if (k > matrix.size())
    throw PreconditionError("k = " + std::to_string(k) + " exceeds n = " + std::to_string(matrix.size()));
  return density_peaks(density_peaks_state(matrix, d_c), k, d_c);
}

}  // namespace isosim

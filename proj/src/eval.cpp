#include "isosim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "isosim/neighbourhood.hpp"

namespace isosim {

// ---------------------------------------------------------------------------
// Assignment

std::vector<int> max_weight_assignment(const std::vector<double>& weights, std::size_t rows, std::size_t cols) {
  if (weights.size() != rows * cols) throw PreconditionError("weight table has wrong size");
  if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);
  if (rows > cols) {
    std::vector<double> transposed(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) transposed[c * rows + r] = weights[r * cols + c];
    const auto col_to_row = max_weight_assignment(transposed, cols, rows);
    std::vector<int> out(rows, -1);
    for (std::size_t c = 0; c < cols; ++c)
      if (col_to_row[c] >= 0) out[static_cast<std::size_t>(col_to_row[c])] = static_cast<int>(c);
    return out;
  }

  // Shortest augmenting path Hungarian method on cost = -weight, rows <= cols,
  // 1-based with column 0 as the virtual start.
  const std::size_t n = rows, m = cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = -weights[(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(n, -1);
  for (std::size_t j = 1; j <= m; ++j)
    if (p[j] != 0) out[p[j] - 1] = static_cast<int>(j - 1);
  return out;
}

// ---------------------------------------------------------------------------
// F1

F1Scorer::F1Scorer(const std::vector<int>& truth) {
  if (truth.empty()) throw PreconditionError("truth labels are empty");
  std::set<int> distinct(truth.begin(), truth.end());
  class_labels_.assign(distinct.begin(), distinct.end());
  class_sizes_.assign(class_labels_.size(), 0);
  truth_ids_.reserve(truth.size());
  for (int label : truth) {
    const auto id = static_cast<int>(std::lower_bound(class_labels_.begin(), class_labels_.end(), label) -
                                     class_labels_.begin());
    truth_ids_.push_back(id);
    ++class_sizes_[static_cast<std::size_t>(id)];
  }
}

namespace {

struct Contingency {
  std::vector<int> cluster_labels;  // original predicted id per dense column
  std::vector<std::size_t> cluster_sizes;
  std::vector<std::size_t> overlap;  // classes x clusters
  std::vector<double> f1;            // classes x clusters
};

Contingency contingency(const std::vector<int>& predicted, const std::vector<int>& truth_ids,
                        const std::vector<std::size_t>& class_sizes) {
  Contingency c;
  // Dense remap of non-noise predicted ids.
  int max_id = -1;
  for (int p : predicted) max_id = std::max(max_id, p);
  std::vector<int> dense(static_cast<std::size_t>(max_id + 1), -1);
  for (int p : predicted) {
    if (p < 0) continue;
    if (dense[static_cast<std::size_t>(p)] < 0) {
      dense[static_cast<std::size_t>(p)] = static_cast<int>(c.cluster_labels.size());
      c.cluster_labels.push_back(p);
    }
  }
  const std::size_t k = class_sizes.size(), m = c.cluster_labels.size();
  c.cluster_sizes.assign(m, 0);
  auto& overlap = c.overlap;
  overlap.assign(k * m, 0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0) continue;
    const auto col = static_cast<std::size_t>(dense[static_cast<std::size_t>(predicted[i])]);
    ++c.cluster_sizes[col];
    ++overlap[static_cast<std::size_t>(truth_ids[i]) * m + col];
  }
  c.f1.assign(k * m, 0.0);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t col = 0; col < m; ++col) {
      const auto o = static_cast<double>(overlap[r * m + col]);
      c.f1[r * m + col] = 2.0 * o / static_cast<double>(class_sizes[r] + c.cluster_sizes[col]);
    }
  return c;
}

}  // namespace

double F1Scorer::macro_f1(const std::vector<int>& predicted) const {
  if (predicted.size() != truth_ids_.size()) throw PreconditionError("predicted and truth lengths differ");
  const auto c = contingency(predicted, truth_ids_, class_sizes_);
  const std::size_t k = class_sizes_.size(), m = c.cluster_labels.size();
  const auto match = max_weight_assignment(c.f1, k, m);
  double sum = 0.0;
  for (std::size_t r = 0; r < k; ++r)
    if (match[r] >= 0) sum += c.f1[r * m + static_cast<std::size_t>(match[r])];
  return sum / static_cast<double>(k);
}

F1Report F1Scorer::report(const std::vector<int>& predicted) const {
  if (predicted.size() != truth_ids_.size()) throw PreconditionError("predicted and truth lengths differ");
  const auto c = contingency(predicted, truth_ids_, class_sizes_);
  const std::size_t k = class_sizes_.size(), m = c.cluster_labels.size();
  const auto match = max_weight_assignment(c.f1, k, m);
  F1Report rep;
  double sum = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    ClassScore s;
    s.truth_class = class_labels_[r];
    if (match[r] >= 0) {
      const auto col = static_cast<std::size_t>(match[r]);
      s.cluster = c.cluster_labels[col];
      s.f1 = c.f1[r * m + col];
      const auto overlap = static_cast<double>(c.overlap[r * m + col]);
      s.precision = overlap / static_cast<double>(c.cluster_sizes[col]);
      s.recall = overlap / static_cast<double>(class_sizes_[r]);
      rep.matching[s.cluster] = s.truth_class;
    }
    sum += s.f1;
    rep.per_class.push_back(s);
  }
  rep.macro_f1 = sum / static_cast<double>(k);
  return rep;
}

F1Report f1_score(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw PreconditionError("predicted and truth lengths differ");
  return F1Scorer(truth).report(predicted);
}

// ---------------------------------------------------------------------------
// Grid search

std::string AlgorithmSpec::name() const {
  const char* measure_name = measure == Measure::Euclidean ? "l2" : measure == Measure::ANNE ? "anne" : "iforest";
  if (algorithm == Algorithm::DensityPeaks) return std::string("dp-") + measure_name;
  return std::string(measure == Measure::Euclidean ? "dbscan-" : "mbscan-") + measure_name;
}

AlgorithmSpec parse_algorithm(const std::string& text) {
  static const std::map<std::string, AlgorithmSpec> known = {
      {"dbscan-l2", {Algorithm::DBSCAN, Measure::Euclidean}},
      {"mbscan-anne", {Algorithm::DBSCAN, Measure::ANNE}},
      {"mbscan-iforest", {Algorithm::DBSCAN, Measure::IForest}},
      {"dp-l2", {Algorithm::DensityPeaks, Measure::Euclidean}},
      {"dp-anne", {Algorithm::DensityPeaks, Measure::ANNE}},
      {"dp-iforest", {Algorithm::DensityPeaks, Measure::IForest}},
  };
  const auto it = known.find(text);
  if (it == known.end())
    throw PreconditionError("unknown algorithm '" + text +
                            "' (expected dbscan-l2, mbscan-anne, mbscan-iforest, dp-l2, dp-anne or dp-iforest)");
  return it->second;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = hi;
  return g;
}

std::vector<std::size_t> psi_grid(std::size_t n, std::size_t count) {
  const std::size_t hi = std::max<std::size_t>(2, (n + 1) / 2);
  std::vector<std::size_t> g;
  for (double v : linear_grid(2.0, static_cast<double>(hi), count)) {
    const auto psi = std::min(n, static_cast<std::size_t>(std::llround(v)));
    if (g.empty() || g.back() != psi) g.push_back(psi);
  }
  return g;
}

ParameterRanges default_ranges(std::size_t n) {
  ParameterRanges r;
  r.cutoffs = linear_grid(0.001, 0.999, 101);
  for (std::size_t m = 2; m <= 40; ++m) r.min_points.push_back(m);
  for (std::size_t k = 2; k <= std::min<std::size_t>(40, n); ++k) r.ks.push_back(k);
  r.psis = psi_grid(n);
  r.t = 200;
  return r;
}

std::string ParameterRanges::describe() const {
  std::ostringstream os;
  auto span = [&](const auto& v) {
    std::ostringstream s;
    if (v.empty()) return std::string("[]");
    s << '[' << v.front() << ".." << v.back() << "] x" << v.size();
    return s.str();
  };
  os << "cutoffs=" << span(cutoffs) << " (" << cutoff_spacing;
  if (cutoffs.size() > 1) os << ", step " << (cutoffs[1] - cutoffs[0]);
  os << ") min_points=" << span(min_points) << " k=" << span(ks) << " psi=" << span(psis) << " t=" << t;
  return os.str();
}

namespace {

// F1 for every (cutoff, parameter) cell of one matrix, laid out cutoff-major.
std::vector<double> evaluate_matrix(const DissimilarityMatrix& matrix, const AlgorithmSpec& spec,
                                    const ParameterRanges& ranges, const F1Scorer& scorer) {
  const auto& params = spec.algorithm == Algorithm::DBSCAN ? ranges.min_points : ranges.ks;
  const std::size_t np = params.size();
  std::vector<double> f1(ranges.cutoffs.size() * np, 0.0);
  if (spec.algorithm == Algorithm::DBSCAN) {
    const NeighbourOrder order(matrix);
    for (std::size_t c = 0; c < ranges.cutoffs.size(); ++c)
      dbscan_min_points_sweep(order, ranges.cutoffs[c], params,
                              [&](std::size_t job, const std::vector<int>& labels, std::size_t) {
                                f1[c * np + job] = scorer.macro_f1(labels);
                              });
  } else {
    for (std::size_t c = 0; c < ranges.cutoffs.size(); ++c) {
      const auto state = density_peaks_state(matrix, ranges.cutoffs[c]);
      for (std::size_t j = 0; j < np; ++j)
        f1[c * np + j] = scorer.macro_f1(density_peaks(state, params[j], ranges.cutoffs[c]).assignment);
    }
  }
  return f1;
}

}  // namespace

SweepReport grid_search(const Dataset& data, const AlgorithmSpec& spec, const ParameterRanges& ranges,
                        std::size_t repeats, std::uint64_t seed) {
  data.validate();
  if (!data.labels) throw PreconditionError("grid search needs ground-truth labels");
  const auto& params = spec.algorithm == Algorithm::DBSCAN ? ranges.min_points : ranges.ks;
  if (ranges.cutoffs.empty() || params.empty()) throw PreconditionError("parameter ranges must be non-empty");
  if (spec.randomized() && (ranges.psis.empty() || ranges.t == 0))
    throw PreconditionError("isolation measures need a non-empty psi range and t >= 1");
  if (repeats == 0) throw PreconditionError("repeats must be >= 1");
  if (spec.algorithm == Algorithm::DensityPeaks)
    for (std::size_t k : params)
      if (k < 2 || k > data.size()) throw PreconditionError("DP k values must lie in [2, n]");
  for (double c : ranges.cutoffs)
    if (spec.algorithm == Algorithm::DensityPeaks && !(c > 0.0)) throw PreconditionError("DP d_c must be > 0");

  const F1Scorer scorer(*data.labels);
  const std::size_t cells = ranges.cutoffs.size() * params.size();

  SweepReport report;
  report.dataset = data.name;
  report.algorithm = spec;
  report.seed = seed;
  report.ranges = ranges.describe();

  if (!spec.randomized()) {
    report.repeats = 1;
    const auto f1 = evaluate_matrix(euclidean_matrix(data), spec, ranges, scorer);
    for (std::size_t c = 0; c < ranges.cutoffs.size(); ++c)
      for (std::size_t j = 0; j < params.size(); ++j)
        report.rows.push_back({0, ranges.cutoffs[c], params[j], f1[c * params.size() + j], 0.0});
  } else {
    report.repeats = repeats;
    const PartitionKind kind = spec.measure == Measure::ANNE ? PartitionKind::aNNE : PartitionKind::iForest;
    const std::size_t tasks = ranges.psis.size() * repeats;
    std::vector<std::vector<double>> results(tasks);
    // Nested parallel loops inside a task run serially.
    parallel_for(tasks, [&](std::size_t task) {
      const std::size_t a = task / repeats, r = task % repeats;
      const auto ensemble = build_ensemble(data, kind, ranges.psis[a], ranges.t, derive_seed(seed, a, r));
      results[task] = evaluate_matrix(dissimilarity_matrix(data, ensemble), spec, ranges, scorer);
    });
    for (std::size_t a = 0; a < ranges.psis.size(); ++a) {
      for (std::size_t cell = 0; cell < cells; ++cell) {
        double sum = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) sum += results[a * repeats + r][cell];
        const double mean = sum / static_cast<double>(repeats);
        double sq = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
          const double dlt = results[a * repeats + r][cell] - mean;
          sq += dlt * dlt;
        }
        const double sd = repeats > 1 ? std::sqrt(sq / static_cast<double>(repeats - 1)) : 0.0;
        const std::size_t c = cell / params.size(), j = cell % params.size();
        report.rows.push_back({ranges.psis[a], ranges.cutoffs[c], params[j], mean, sd});
      }
    }
  }

  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].mean_f1 > report.rows[report.best].mean_f1) report.best = i;
  return report;
}

std::string sweep_to_csv(const SweepReport& report, const std::string& header) {
  std::ostringstream os;
  const char* pname = report.algorithm.algorithm == Algorithm::DBSCAN ? "min_points" : "k";
  os << header << "psi,cutoff," << pname << ",mean_f1,std_f1\n";
  char buf[160];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%zu,%.9g,%.9g\n", r.psi, r.cutoff, r.parameter, r.mean_f1, r.std_f1);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Detectability

std::vector<DetectabilityRow> detectability_diagnostic(const DissimilarityMatrix& matrix,
                                                       const std::vector<std::size_t>& modes,
                                                       const std::vector<double>& cutoffs) {
  if (modes.size() < 2) throw PreconditionError("detectability needs at least two modes");
  const std::size_t n = matrix.size();
  for (std::size_t m : modes)
    if (m >= n) throw PreconditionError("mode index out of range");

  const NeighbourOrder order(matrix);
  std::vector<DetectabilityRow> out(cutoffs.size());
  parallel_for(cutoffs.size(), [&](std::size_t ci) {
    const double cutoff = cutoffs[ci];
    std::vector<std::size_t> mass(n);
    for (std::size_t i = 0; i < n; ++i) mass[i] = order.count(i, cutoff);

    // Sweep the threshold tau downward: points enter in descending mass and
    // join their already-present neighbours. Two modes first become connected
    // exactly at the largest tau whose thresholded graph links them.
    std::vector<std::size_t> by_mass(n);
    std::iota(by_mass.begin(), by_mass.end(), std::size_t{0});
    std::stable_sort(by_mass.begin(), by_mass.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<char> present(n, 0);

    DetectabilityRow& row = out[ci];
    row.cutoff = cutoff;
    for (std::size_t a = 0; a < modes.size(); ++a)
      for (std::size_t b = a + 1; b < modes.size(); ++b) row.pairs.emplace_back(a, b);
    row.valley.assign(row.pairs.size(), 0);
    std::vector<char> settled(row.pairs.size(), 0);
    std::size_t remaining = row.pairs.size();

    for (std::size_t k = 0; k < n && remaining > 0;) {
      const std::size_t level = mass[by_mass[k]];
      for (; k < n && mass[by_mass[k]] == level; ++k) {
        const std::size_t p = by_mass[k];
        present[p] = 1;
        for (std::size_t q : order.neighbours(p, cutoff))
          if (present[q]) {
            const std::size_t rp = find(p), rq = find(q);
            if (rp != rq) parent[std::max(rp, rq)] = std::min(rp, rq);
          }
      }
      for (std::size_t pi = 0; pi < row.pairs.size(); ++pi) {
        if (settled[pi]) continue;
        const std::size_t ma = modes[row.pairs[pi].first], mb = modes[row.pairs[pi].second];
        if (present[ma] && present[mb] && find(ma) == find(mb)) {
          row.valley[pi] = level;
          settled[pi] = 1;
          --remaining;
        }
      }
    }

    for (std::size_t m : modes) row.mode_mass.push_back(mass[m]);
    const std::size_t weakest_mode = *std::min_element(row.mode_mass.begin(), row.mode_mass.end());
    const std::size_t deepest = *std::max_element(row.valley.begin(), row.valley.end());
    row.condition = weakest_mode > deepest;
  });
  return out;
}

std::string detectability_to_csv(const std::vector<DetectabilityRow>& rows, const std::string& header) {
  std::ostringstream os;
  os << header << "cutoff";
  if (!rows.empty()) {
    for (std::size_t m = 0; m < rows.front().mode_mass.size(); ++m) os << ",mass_mode" << m;
    for (const auto& [a, b] : rows.front().pairs) os << ",valley_" << a << '_' << b;
  }
  os << ",condition\n";
  char buf[40];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.9g", r.cutoff);
    os << buf;
    for (auto m : r.mode_mass) os << ',' << m;
    for (auto v : r.valley) os << ',' << v;
    os << ',' << (r.condition ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<std::size_t> class_medoids(const Dataset& data) {
  data.validate();
  if (!data.labels) throw PreconditionError("medoids need labels");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < data.size(); ++i) members[(*data.labels)[i]].push_back(i);
  std::vector<std::size_t> medoids;
  for (const auto& [label, idx] : members) {
    std::size_t best = idx[0];
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t a : idx) {
      double s = 0.0;
      for (std::size_t b : idx) s += l2(data.point(a), data.point(b));
      if (s < best_sum) {
        best_sum = s;
        best = a;
      }
    }
    medoids.push_back(best);
  }
  return medoids;
}

}  // namespace isosim

#include "isosim/partition.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace isosim {

namespace {

constexpr int kEnsembleFormatVersion = 1;

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got)
    throw PreconditionError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                            std::to_string(got));
}

}  // namespace

std::string to_string(PartitionKind kind) { return kind == PartitionKind::aNNE ? "anne" : "iforest"; }

PartitionKind parse_partition_kind(const std::string& text) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "anne") return PartitionKind::aNNE;
  if (s == "iforest") return PartitionKind::iForest;
  throw PreconditionError("unknown partition kind '" + text + "' (expected anne or iforest)");
}

CellId VoronoiPartitioning::cell_of(std::span<const double> x) const {
  check_dim(centres.cols(), x.size());
  CellId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < centres.rows(); ++z) {
    const double d = squared_l2(x, centres.row(z));
    if (d < best_d) {
      best_d = d;
      best = static_cast<CellId>(z);
    }
  }
  return best;
}

std::size_t IsolationTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.is_leaf(); }));
}

CellId IsolationTree::cell_of(std::span<const double> x) const {
  std::size_t at = 0;
  while (!nodes[at].is_leaf()) {
    const Node& node = nodes[at];
    if (static_cast<std::size_t>(node.attribute) >= x.size())
      throw PreconditionError("dimension mismatch: query has " + std::to_string(x.size()) + " attributes");
    at = x[static_cast<std::size_t>(node.attribute)] < node.split ? node.left : node.right;
  }
  return nodes[at].leaf;
}

CellId cell_of(const VoronoiPartitioning& partitioning, std::span<const double> x) { return partitioning.cell_of(x); }
CellId cell_of(const IsolationTree& tree, std::span<const double> x) { return tree.cell_of(x); }

bool same_cell(const VoronoiPartitioning& partitioning, std::span<const double> x, std::span<const double> y) {
  check_dim(x.size(), y.size());
  return partitioning.cell_of(x) == partitioning.cell_of(y);
}

bool same_cell(const IsolationTree& tree, std::span<const double> x, std::span<const double> y) {
  check_dim(x.size(), y.size());
  return tree.cell_of(x) == tree.cell_of(y);
}

VoronoiPartitioning build_voronoi(const Matrix& points, std::vector<std::size_t> sample) {
  std::sort(sample.begin(), sample.end());
  VoronoiPartitioning v;
  v.centres = Matrix(sample.size(), points.cols());
  for (std::size_t z = 0; z < sample.size(); ++z) std::ranges::copy(points.row(sample[z]), v.centres.row(z).begin());
  v.sample_indices = std::move(sample);
  return v;
}

IsolationTree build_isolation_tree(const Matrix& points, std::vector<std::size_t> sample, Rng& rng) {
  IsolationTree tree;
  tree.sample_indices = sample;
  const std::size_t d = points.cols();

  struct Pending {
    std::size_t node, begin, end;
  };
  std::vector<std::size_t> work = std::move(sample);
  std::vector<Pending> stack{{0, 0, work.size()}};
  tree.nodes.emplace_back();
  CellId next_leaf = 0;
  std::vector<std::size_t> splittable;

  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();

    splittable.clear();
    std::vector<std::pair<double, double>> range(d);
    for (std::size_t a = 0; a < d; ++a) {
      double lo = points(work[p.begin], a), hi = lo;
      for (std::size_t i = p.begin + 1; i < p.end; ++i) {
        lo = std::min(lo, points(work[i], a));
        hi = std::max(hi, points(work[i], a));
      }
      range[a] = {lo, hi};
      if (lo < hi) splittable.push_back(a);
    }
    // One distinct point left: the node isolates it.
    if (splittable.empty()) {
      tree.nodes[p.node].leaf = next_leaf++;
      continue;
    }

    const std::size_t attr = splittable[rng.below(splittable.size())];
    const auto [lo, hi] = range[attr];
    double split;
    do {
      split = rng.uniform(lo, hi);
    } while (!(split > lo && split < hi));

    const auto mid = std::partition(work.begin() + static_cast<long>(p.begin), work.begin() + static_cast<long>(p.end),
                                    [&](std::size_t r) { return points(r, attr) < split; });
    const auto m = static_cast<std::size_t>(mid - work.begin());

    const auto left = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[p.node];
    node.attribute = static_cast<int>(attr);
    node.split = split;
    node.left = left;
    node.right = left + 1;
    // Right pushed first so leaves are numbered left to right.
    stack.push_back({left + 1, m, p.end});
    stack.push_back({left, p.begin, m});
  }
  return tree;
}

CellId PartitionEnsemble::cell_of(std::size_t member, std::span<const double> x) const {
  check_dim(dim, x.size());
  return kind == PartitionKind::aNNE ? voronoi.at(member).cell_of(x) : trees.at(member).cell_of(x);
}

bool PartitionEnsemble::same_cell(std::size_t member, std::span<const double> x, std::span<const double> y) const {
  return cell_of(member, x) == cell_of(member, y);
}

std::vector<CellId> PartitionEnsemble::cell_table(const Matrix& points) const {
  check_dim(dim, points.cols());
  const std::size_t n = points.rows();
  std::vector<CellId> table(n * t);
  parallel_for(n, [&](std::size_t r) {
    const auto x = points.row(r);
    for (std::size_t m = 0; m < t; ++m)
      table[r * t + m] = kind == PartitionKind::aNNE ? voronoi[m].cell_of(x) : trees[m].cell_of(x);
  });
  return table;
}

std::string PartitionEnsemble::descriptor() const {
  std::ostringstream os;
  os << "kind=" << to_string(kind) << " psi=" << psi << " t=" << t << " seed=" << seed;
  return os.str();
}

PartitionEnsemble build_ensemble(const Dataset& data, PartitionKind kind, std::size_t psi, std::size_t t,
                                 std::uint64_t seed) {
  data.validate();
  const std::size_t n = data.size();
  if (psi == 0) throw PreconditionError("psi must be >= 1");
  if (psi > n) throw PreconditionError("psi = " + std::to_string(psi) + " exceeds n = " + std::to_string(n));
  if (t == 0) throw PreconditionError("t must be >= 1");

  PartitionEnsemble e;
  e.kind = kind;
  e.psi = psi;
  e.t = t;
  e.seed = seed;
  e.dim = data.dim();
  if (kind == PartitionKind::aNNE)
    e.voronoi.resize(t);
  else
    e.trees.resize(t);

  parallel_for(t, [&](std::size_t m) {
    Rng rng(seed + m);
    auto sample = sample_without_replacement(rng, n, psi);
    if (kind == PartitionKind::aNNE)
      e.voronoi[m] = build_voronoi(data.points, std::move(sample));
    else
      e.trees[m] = build_isolation_tree(data.points, std::move(sample), rng);
  });
  return e;
}

std::string serialize_ensemble(const PartitionEnsemble& e) {
  using nlohmann::json;
  json j;
  j["format"] = "isosim-ensemble";
  j["version"] = kEnsembleFormatVersion;
  j["kind"] = to_string(e.kind);
  j["psi"] = e.psi;
  j["t"] = e.t;
  j["seed"] = e.seed;
  j["dim"] = e.dim;
  json members = json::array();
  if (e.kind == PartitionKind::aNNE) {
    for (const auto& v : e.voronoi)
      members.push_back({{"sample", v.sample_indices}, {"centres", v.centres.values()}});
  } else {
    for (const auto& tree : e.trees) {
      json nodes = json::array();
      for (const auto& n : tree.nodes) nodes.push_back({n.attribute, n.split, n.left, n.right, n.leaf});
      members.push_back({{"sample", tree.sample_indices}, {"nodes", nodes}});
    }
  }
  j["members"] = std::move(members);
  return j.dump();
}

PartitionEnsemble deserialize_ensemble(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw FormatError(std::string("ensemble record is not valid JSON: ") + ex.what());
  }
  try {
    if (j.at("format") != "isosim-ensemble") throw FormatError("not an ensemble record");
    if (j.at("version").get<int>() != kEnsembleFormatVersion)
      throw FormatError("unsupported ensemble record version " + j.at("version").dump());
    PartitionEnsemble e;
    e.kind = parse_partition_kind(j.at("kind").get<std::string>());
    e.psi = j.at("psi").get<std::size_t>();
    e.t = j.at("t").get<std::size_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.dim = j.at("dim").get<std::size_t>();
    const auto& members = j.at("members");
    if (members.size() != e.t) throw FormatError("ensemble record member count differs from t");
    for (const auto& m : members) {
      auto sample = m.at("sample").get<std::vector<std::size_t>>();
      if (e.kind == PartitionKind::aNNE) {
        VoronoiPartitioning v;
        v.centres = Matrix(sample.size(), e.dim);
        v.centres.values() = m.at("centres").get<std::vector<double>>();
        if (v.centres.values().size() != sample.size() * e.dim) throw FormatError("centre matrix has wrong size");
        v.sample_indices = std::move(sample);
        e.voronoi.push_back(std::move(v));
      } else {
        IsolationTree tree;
        tree.sample_indices = std::move(sample);
        for (const auto& n : m.at("nodes"))
          tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<std::uint32_t>(),
                                n.at(3).get<std::uint32_t>(), n.at(4).get<CellId>()});
        e.trees.push_back(std::move(tree));
      }
    }
    return e;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("malformed ensemble record: ") + ex.what());
  }
}

void save_ensemble(const PartitionEnsemble& ensemble, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << serialize_ensemble(ensemble) << '\n';
}

PartitionEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return deserialize_ensemble(ss.str());
}

}  // namespace isosim

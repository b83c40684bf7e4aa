#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "isosim/common.hpp"
#include "isosim/dataset.hpp"

namespace isosim {

enum class PartitionKind { aNNE, iForest };

std::string to_string(PartitionKind kind);
PartitionKind parse_partition_kind(const std::string& text);

using CellId = std::uint32_t;

// Voronoi diagram of a psi-point sample. Centres are stored in ascending
// source-row order, and the nearest-centre scan keeps the first minimum, so
// equidistant queries resolve to the lowest source row.
struct VoronoiPartitioning {
  Matrix centres;
  std::vector<std::size_t> sample_indices;

  std::size_t psi() const { return sample_indices.size(); }
  CellId cell_of(std::span<const double> x) const;
};

// Axis-parallel isolation tree. Internal nodes send x left iff
// x[attribute] < split; leaves carry dense ids 0..leaf_count()-1.
struct IsolationTree {
  struct Node {
    int attribute = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    CellId leaf = 0;

    bool is_leaf() const { return attribute < 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  std::vector<Node> nodes;  // nodes[0] is the root
  std::vector<std::size_t> sample_indices;

  std::size_t leaf_count() const;
  CellId cell_of(std::span<const double> x) const;
};

struct PartitionEnsemble {
  PartitionKind kind = PartitionKind::aNNE;
  std::size_t psi = 0;
  std::size_t t = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::vector<VoronoiPartitioning> voronoi;  // filled when kind == aNNE
  std::vector<IsolationTree> trees;          // filled when kind == iForest

  std::size_t size() const { return t; }
  CellId cell_of(std::size_t member, std::span<const double> x) const;
  bool same_cell(std::size_t member, std::span<const double> x, std::span<const double> y) const;

  // Cell of every row of `points` in every member, laid out [row * t + member].
  std::vector<CellId> cell_table(const Matrix& points) const;

  std::string descriptor() const;
};

// Builds t partitionings, member m drawing its psi-subset (uniform, without
// replacement) from an engine seeded with seed + m.
PartitionEnsemble build_ensemble(const Dataset& data, PartitionKind kind, std::size_t psi, std::size_t t,
                                 std::uint64_t seed);

VoronoiPartitioning build_voronoi(const Matrix& points, std::vector<std::size_t> sample);
IsolationTree build_isolation_tree(const Matrix& points, std::vector<std::size_t> sample, Rng& rng);

CellId cell_of(const VoronoiPartitioning& partitioning, std::span<const double> x);
CellId cell_of(const IsolationTree& tree, std::span<const double> x);
bool same_cell(const VoronoiPartitioning& partitioning, std::span<const double> x, std::span<const double> y);
bool same_cell(const IsolationTree& tree, std::span<const double> x, std::span<const double> y);

// Versioned JSON record (kind, psi, t, seed, dim, members).
std::string serialize_ensemble(const PartitionEnsemble& ensemble);
PartitionEnsemble deserialize_ensemble(const std::string& text);
void save_ensemble(const PartitionEnsemble& ensemble, const std::filesystem::path& path);
PartitionEnsemble load_ensemble(const std::filesystem::path& path);

}  // namespace isosim

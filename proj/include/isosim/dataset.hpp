#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "isosim/common.hpp"

namespace isosim {

// n x d point matrix with optional ground-truth class ids (0-based, dense).
struct Dataset {
  Matrix points;
  std::optional<std::vector<int>> labels;
  std::string name;
  // Original label tokens; label id i came from label_names[i].
  std::vector<std::string> label_names;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
  std::span<const double> point(std::size_t i) const { return points.row(i); }
  std::size_t class_count() const;

  // Throws PreconditionError if n == 0, d == 0, a value is not finite, or the
  // label vector has the wrong length.
  void validate() const;
};

struct NormalizationReport {
  std::vector<double> min;
  std::vector<double> max;
  std::set<std::size_t> constant_attributes;
};

// `label_column` selects the label column by header name or by integer index
// (negative counts from the end, so "-1" is the last column). A header row is
// recognised when a feature cell of the first row is not numeric.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

// Writes x0..x{d-1}[,label] with 9 significant digits.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

// Affine map of every attribute onto [0, 1]; constant attributes become 0.
std::pair<Dataset, NormalizationReport> min_max_normalize(const Dataset& data);

// Uniform points on [0,0.5]x[0,1] (label 0) and [0.5,1]x[0,1] (label 1). Each
// half is a jittered grid: one uniform point per cell of a near-square grid,
// surplus cells dropped at random. density_ratio must equal n_dense / n_sparse.
Dataset synth_two_density(std::size_t n_sparse, std::size_t n_dense, double density_ratio,
                          std::uint64_t seed);

// Two dense Gaussian blobs (labels 0, 1) separated by a shallow valley plus one
// broad sparse blob (label 2), all clipped to [0,1]^2. 1500 points.
Dataset synth_three_cluster_hard(std::uint64_t seed);

}  // namespace isosim

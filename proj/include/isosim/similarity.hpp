#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "isosim/common.hpp"
#include "isosim/dataset.hpp"
#include "isosim/partition.hpp"

namespace isosim {

enum class MatrixKind { IsolationANNE, IsolationIForest, Euclidean };

std::string to_string(MatrixKind kind);

// Symmetric n x n dissimilarity with zero diagonal. Isolation kinds hold
// 1 - K_psi, so every entry is (t - matches) / t.
struct DissimilarityMatrix {
  Matrix values;
  MatrixKind kind = MatrixKind::Euclidean;
  std::string provenance;
  std::size_t psi = 0;  // isolation kinds only
  std::size_t t = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return values.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
  std::span<const double> row(std::size_t i) const { return values.row(i); }
  bool is_isolation() const { return kind != MatrixKind::Euclidean; }

  friend bool operator==(const DissimilarityMatrix&, const DissimilarityMatrix&) = default;
};

// Fraction of ensemble members in which x and y share a cell.
double similarity(const PartitionEnsemble& ensemble, std::span<const double> x, std::span<const double> y);
// 1 - similarity, computed as (t - shared) / t so it matches matrix entries bit for bit.
double dissimilarity(const PartitionEnsemble& ensemble, std::span<const double> x, std::span<const double> y);

// Exact expectation of the aNNE same-cell indicator over every psi-subset of
// the data (without replacement), using the lowest-row tie rule. Refuses more
// than kMaxExactSubsets subsets.
inline constexpr double kMaxExactSubsets = 1e6;
double exact_similarity(const Dataset& data, PartitionKind kind, std::size_t psi, std::span<const double> x,
                        std::span<const double> y);

DissimilarityMatrix dissimilarity_matrix(const Dataset& data, const PartitionEnsemble& ensemble);
DissimilarityMatrix euclidean_matrix(const Dataset& data);

struct GridBounds {
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
};

// Dissimilarity from `reference` to every vertex of an nx x ny lattice over
// `bounds`; values[iy * nx + ix] is the vertex (x_min + ix*dx, y_min + iy*dy).
struct ContourGrid {
  std::size_t nx = 0, ny = 0;
  GridBounds bounds;
  std::vector<double> values;

  double x(std::size_t ix) const;
  double y(std::size_t iy) const;
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

ContourGrid contour_grid(const PartitionEnsemble& ensemble, const Dataset& data, std::span<const double> reference,
                         std::size_t nx, std::size_t ny, const GridBounds& bounds);

// CSV: '#'-prefixed header lines, then n rows of n values (9 significant digits).
std::string matrix_to_csv(const DissimilarityMatrix& m, const std::string& header = {});

// Binary record: magic, version, n, kind, psi, t, seed, provenance text, then
// n*n little-endian doubles.
void write_matrix_binary(const DissimilarityMatrix& m, const std::filesystem::path& path);
DissimilarityMatrix read_matrix_binary(const std::filesystem::path& path);

}  // namespace isosim

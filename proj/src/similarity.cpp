#include "isosim/similarity.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace isosim {

namespace {

constexpr char kMatrixMagic[8] = {'I', 'S', 'O', 'S', 'I', 'M', 'D', 'M'};
constexpr std::uint32_t kMatrixFormatVersion = 1;

MatrixKind matrix_kind(PartitionKind kind) {
  return kind == PartitionKind::aNNE ? MatrixKind::IsolationANNE : MatrixKind::IsolationIForest;
}

double binomial(std::size_t n, std::size_t k) {
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError(path.string() + ": truncated matrix record");
  return v;
}

}  // namespace

std::string to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::IsolationANNE:
      return "isolation-anne";
    case MatrixKind::IsolationIForest:
      return "isolation-iforest";
    case MatrixKind::Euclidean:
      return "euclidean";
  }
  return "unknown";
}

namespace {

std::size_t shared_cells(const PartitionEnsemble& ensemble, std::span<const double> x, std::span<const double> y) {
  std::size_t shared = 0;
  for (std::size_t m = 0; m < ensemble.t; ++m) shared += ensemble.same_cell(m, x, y) ? 1 : 0;
  return shared;
}

}  // namespace

double similarity(const PartitionEnsemble& ensemble, std::span<const double> x, std::span<const double> y) {
  return static_cast<double>(shared_cells(ensemble, x, y)) / static_cast<double>(ensemble.t);
}

double dissimilarity(const PartitionEnsemble& ensemble, std::span<const double> x, std::span<const double> y) {
  return static_cast<double>(ensemble.t - shared_cells(ensemble, x, y)) / static_cast<double>(ensemble.t);
}

double exact_similarity(const Dataset& data, PartitionKind kind, std::size_t psi, std::span<const double> x,
                        std::span<const double> y) {
  if (kind != PartitionKind::aNNE)
    throw PreconditionError("exact similarity is only enumerable for aNNE partitionings");
  data.validate();
  const std::size_t n = data.size();
  if (x.size() != data.dim() || y.size() != data.dim()) throw PreconditionError("dimension mismatch");
  if (psi == 0 || psi > n) throw PreconditionError("psi must lie in [1, n]");
  const double subsets = binomial(n, psi);
  if (subsets > kMaxExactSubsets)
    throw PreconditionError("C(" + std::to_string(n) + ", " + std::to_string(psi) + ") subsets exceed the exact-enumeration limit");

  std::vector<double> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = squared_l2(x, data.point(i));
    dy[i] = squared_l2(y, data.point(i));
  }
  auto nearest = [&](const std::vector<std::size_t>& subset, const std::vector<double>& dist) {
    std::size_t best = subset[0];
    for (std::size_t s : subset)
      if (dist[s] < dist[best]) best = s;
    return best;
  };

  std::vector<std::size_t> subset(psi);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  std::size_t shared = 0, total = 0;
  for (;;) {
    ++total;
    if (nearest(subset, dx) == nearest(subset, dy)) ++shared;
    // Next combination in lexicographic order.
    std::size_t i = psi;
    while (i > 0 && subset[i - 1] == n - psi + i - 1) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < psi; ++j) subset[j] = subset[j - 1] + 1;
  }
  return static_cast<double>(shared) / static_cast<double>(total);
}

DissimilarityMatrix dissimilarity_matrix(const Dataset& data, const PartitionEnsemble& ensemble) {
  data.validate();
  if (data.dim() != ensemble.dim) throw PreconditionError("dataset and ensemble dimensions differ");
  const std::size_t n = data.size(), t = ensemble.t;
  const auto cells = ensemble.cell_table(data.points);

  DissimilarityMatrix m;
  m.values = Matrix(n, n);
  m.kind = matrix_kind(ensemble.kind);
  m.provenance = ensemble.descriptor();
  m.psi = ensemble.psi;
  m.t = t;
  m.seed = ensemble.seed;
  const double td = static_cast<double>(t);
  // Row i owns the upper-triangle entries (i, j > i); mirrors are written after.
  parallel_for(n, [&](std::size_t i) {
    const CellId* ci = cells.data() + i * t;
    for (std::size_t j = i + 1; j < n; ++j) {
      const CellId* cj = cells.data() + j * t;
      std::size_t shared = 0;
      for (std::size_t k = 0; k < t; ++k) shared += ci[k] == cj[k];
      m.values(i, j) = static_cast<double>(t - shared) / td;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.values(j, i) = m.values(i, j);
  return m;
}

DissimilarityMatrix euclidean_matrix(const Dataset& data) {
  data.validate();
  const std::size_t n = data.size();
  DissimilarityMatrix m;
  m.values = Matrix(n, n);
  m.kind = MatrixKind::Euclidean;
  m.provenance = "metric=l2";
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) m.values(i, j) = l2(data.point(i), data.point(j));
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.values(j, i) = m.values(i, j);
  return m;
}

double ContourGrid::x(std::size_t ix) const {
  return bounds.x_min + (bounds.x_max - bounds.x_min) * static_cast<double>(ix) / static_cast<double>(nx - 1);
}

double ContourGrid::y(std::size_t iy) const {
  return bounds.y_min + (bounds.y_max - bounds.y_min) * static_cast<double>(iy) / static_cast<double>(ny - 1);
}

ContourGrid contour_grid(const PartitionEnsemble& ensemble, const Dataset& data, std::span<const double> reference,
                         std::size_t nx, std::size_t ny, const GridBounds& bounds) {
  if (data.dim() != 2 || ensemble.dim != 2) throw PreconditionError("contour grids need 2-D data");
  if (reference.size() != 2) throw PreconditionError("contour reference must be 2-D");
  if (nx < 2 || ny < 2) throw PreconditionError("contour resolution must be >= 2 per axis");
  if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max))
    throw PreconditionError("contour bounds must be non-empty");

  ContourGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.bounds = bounds;
  grid.values.assign(nx * ny, 0.0);

  std::vector<CellId> ref_cells(ensemble.t);
  for (std::size_t m = 0; m < ensemble.t; ++m) ref_cells[m] = ensemble.cell_of(m, reference);

  parallel_for(ny, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double g[2] = {grid.x(ix), grid.y(iy)};
      std::size_t shared = 0;
      for (std::size_t m = 0; m < ensemble.t; ++m) shared += ensemble.cell_of(m, g) == ref_cells[m];
      grid.values[iy * nx + ix] = static_cast<double>(ensemble.t - shared) / static_cast<double>(ensemble.t);
    }
  });
  return grid;
}

std::string matrix_to_csv(const DissimilarityMatrix& m, const std::string& header) {
  std::ostringstream os;
  if (!header.empty()) os << header;
  os << "# kind=" << to_string(m.kind) << ' ' << m.provenance << '\n';
  char buf[40];
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", m(i, j));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

void write_matrix_binary(const DissimilarityMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  put(out, kMatrixFormatVersion);
  put(out, static_cast<std::uint64_t>(m.size()));
  put(out, static_cast<std::uint32_t>(m.kind));
  put(out, static_cast<std::uint64_t>(m.psi));
  put(out, static_cast<std::uint64_t>(m.t));
  put(out, m.seed);
  put(out, static_cast<std::uint64_t>(m.provenance.size()));
  out.write(m.provenance.data(), static_cast<std::streamsize>(m.provenance.size()));
  out.write(reinterpret_cast<const char*>(m.values.values().data()),
            static_cast<std::streamsize>(m.values.values().size() * sizeof(double)));
  if (!out) throw FormatError("failed writing " + path.string());
}

DissimilarityMatrix read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[sizeof kMatrixMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0)
    throw FormatError(path.string() + ": not a dissimilarity matrix record");
  if (get<std::uint32_t>(in, path) != kMatrixFormatVersion)
    throw FormatError(path.string() + ": unsupported matrix record version");
  DissimilarityMatrix m;
  const auto n = get<std::uint64_t>(in, path);
  const auto kind = get<std::uint32_t>(in, path);
  if (kind > static_cast<std::uint32_t>(MatrixKind::Euclidean)) throw FormatError(path.string() + ": bad matrix kind");
  m.kind = static_cast<MatrixKind>(kind);
  m.psi = get<std::uint64_t>(in, path);
  m.t = get<std::uint64_t>(in, path);
  m.seed = get<std::uint64_t>(in, path);
  const auto plen = get<std::uint64_t>(in, path);
  if (plen > (1u << 20)) throw FormatError(path.string() + ": bad provenance length");
  m.provenance.resize(plen);
  if (!in.read(m.provenance.data(), static_cast<std::streamsize>(plen))) throw FormatError(path.string() + ": truncated");
  m.values = Matrix(n, n);
  if (!in.read(reinterpret_cast<char*>(m.values.values().data()), static_cast<std::streamsize>(n * n * sizeof(double))))
    throw FormatError(path.string() + ": truncated matrix values");
  return m;
}

}  // namespace isosim

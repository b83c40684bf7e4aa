#include "isosim/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace isosim {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<long> parse_index(const std::string& spec) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), v);
  if (ec != std::errc() || ptr != spec.data() + spec.size()) return std::nullopt;
  return v;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t col) {
  std::string s = path.string() + ": row " + std::to_string(line);
  if (col != 0) s += ", column " + std::to_string(col);
  return s;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::size_t Dataset::class_count() const {
  if (!labels) return 0;
  std::set<int> distinct(labels->begin(), labels->end());
  return distinct.size();
}

void Dataset::validate() const {
  if (points.rows() == 0 || points.cols() == 0) throw PreconditionError("dataset must have n >= 1 and d >= 1");
  for (double v : points.values())
    if (!std::isfinite(v)) throw PreconditionError("dataset contains a non-finite value");
  if (labels) {
    if (labels->size() != points.rows()) throw PreconditionError("label count does not match point count");
    for (int l : *labels)
      if (l < 0) throw PreconditionError("labels must be non-negative");
  }
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());

  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.emplace_back(line_no, split_row(line));
  }
  if (rows.empty()) throw FormatError(path.string() + ": empty file");

  const std::size_t arity = rows.front().second.size();
  for (const auto& [no, cells] : rows) {
    if (cells.size() != arity)
      throw FormatError(where(path, no, 0) + ": ragged row, expected " + std::to_string(arity) + " cells, found " +
                        std::to_string(cells.size()));
  }

  // Resolve the label column; a name forces a header row.
  std::optional<std::size_t> label_idx;
  bool header = false;
  if (label_column) {
    if (auto idx = parse_index(*label_column)) {
      const long a = static_cast<long>(arity);
      const long resolved = *idx < 0 ? a + *idx : *idx;
      if (resolved < 0 || resolved >= a)
        throw FormatError(path.string() + ": label column " + *label_column + " out of range");
      label_idx = static_cast<std::size_t>(resolved);
    } else {
      const auto& first = rows.front().second;
      const auto it = std::find(first.begin(), first.end(), *label_column);
      if (it == first.end()) throw FormatError(path.string() + ": no header column named '" + *label_column + "'");
      label_idx = static_cast<std::size_t>(it - first.begin());
      header = true;
    }
  }
  if (!header) {
    const auto& first = rows.front().second;
    for (std::size_t c = 0; c < arity; ++c)
      if (c != label_idx && !parse_number(first[c])) header = true;
  }

  const std::size_t begin = header ? 1 : 0;
  const std::size_t n = rows.size() - begin;
  const std::size_t d = arity - (label_idx ? 1 : 0);
  if (n == 0) throw FormatError(path.string() + ": no data rows");
  if (d == 0) throw FormatError(path.string() + ": no feature columns");

  Dataset data;
  data.name = path.stem().string();
  data.points = Matrix(n, d);
  std::vector<int> labels;
  std::map<std::string, int> label_ids;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& [no, cells] = rows[begin + r];
    std::size_t out = 0;
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_idx) {
        auto [it, inserted] = label_ids.try_emplace(cells[c], static_cast<int>(label_ids.size()));
        if (inserted) data.label_names.push_back(cells[c]);
        labels.push_back(it->second);
        continue;
      }
      const auto v = parse_number(cells[c]);
      if (!v || !std::isfinite(*v))
        throw FormatError(where(path, no, c + 1) + ": non-numeric cell '" + cells[c] + "'");
      data.points(r, out++) = *v;
    }
  }
  if (label_idx) data.labels = std::move(labels);
  return data;
}

std::string to_csv(const Dataset& data) {
  std::ostringstream os;
  for (std::size_t c = 0; c < data.dim(); ++c) os << (c ? "," : "") << 'x' << c;
  if (data.labels) os << ",label";
  os << '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) os << (c ? "," : "") << format_g9(data.points(r, c));
    if (data.labels) os << ',' << (*data.labels)[r];
    os << '\n';
  }
  return os.str();
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << to_csv(data);
}

std::pair<Dataset, NormalizationReport> min_max_normalize(const Dataset& data) {
  data.validate();
  const std::size_t n = data.size(), d = data.dim();
  NormalizationReport report;
  report.min.assign(d, 0.0);
  report.max.assign(d, 0.0);
  Dataset out = data;
  for (std::size_t c = 0; c < d; ++c) {
    double lo = data.points(0, c), hi = lo;
    for (std::size_t r = 1; r < n; ++r) {
      lo = std::min(lo, data.points(r, c));
      hi = std::max(hi, data.points(r, c));
    }
    report.min[c] = lo;
    report.max[c] = hi;
    if (hi == lo) {
      report.constant_attributes.insert(c);
      for (std::size_t r = 0; r < n; ++r) out.points(r, c) = 0.0;
      continue;
    }
    const double span = hi - lo;
    for (std::size_t r = 0; r < n; ++r) {
      const double v = data.points(r, c);
      // Pin the extremes so a second pass is an exact identity.
      out.points(r, c) = v == lo ? 0.0 : v == hi ? 1.0 : std::clamp((v - lo) / span, 0.0, 1.0);
    }
  }
  return {std::move(out), std::move(report)};
}

namespace {

// m jittered-grid points on [x0, x0 + w] x [0, 1].
void fill_half(Rng& rng, std::size_t m, double x0, double w, Matrix& pts, std::size_t offset) {
  const auto rows = static_cast<std::size_t>(std::max(1.0, std::round(std::sqrt(static_cast<double>(m) / w))));
  const std::size_t cols = (m + rows - 1) / rows;
  const auto cells = sample_without_replacement(rng, rows * cols, m);
  const double cw = w / static_cast<double>(cols), ch = 1.0 / static_cast<double>(rows);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = cells[i] / cols, c = cells[i] % cols;
    pts(offset + i, 0) = x0 + (static_cast<double>(c) + rng.uniform()) * cw;
    pts(offset + i, 1) = (static_cast<double>(r) + rng.uniform()) * ch;
  }
}

}  // namespace

Dataset synth_two_density(std::size_t n_sparse, std::size_t n_dense, double density_ratio, std::uint64_t seed) {
  if (n_sparse == 0 || n_dense == 0) throw PreconditionError("point counts must be >= 1");
  if (!(density_ratio > 1.0)) throw PreconditionError("density_ratio must be > 1");
  const double actual = static_cast<double>(n_dense) / static_cast<double>(n_sparse);
  if (std::abs(actual - density_ratio) > 1e-6 * density_ratio)
    throw PreconditionError("density_ratio disagrees with n_dense / n_sparse");

  Rng rng(seed);
  Dataset data;
  data.points = Matrix(n_sparse + n_dense, 2);
  fill_half(rng, n_sparse, 0.0, 0.5, data.points, 0);
  fill_half(rng, n_dense, 0.5, 0.5, data.points, n_sparse);
  std::vector<int> labels(n_sparse + n_dense, 1);
  std::fill(labels.begin(), labels.begin() + static_cast<long>(n_sparse), 0);
  data.labels = std::move(labels);
  data.label_names = {"sparse", "dense"};
  data.name = "two_density";
  return data;
}

Dataset synth_three_cluster_hard(std::uint64_t seed) {
  struct Blob {
    double cx, cy, sigma;
    std::size_t count;
  };
  // Dense pair close enough that the valley between them is denser than the
  // sparse blob's peak.
  constexpr Blob blobs[] = {
      {0.30, 0.65, 0.06, 600},
      {0.56, 0.65, 0.06, 600},
      {0.55, 0.22, 0.12, 300},
  };
  Rng rng(seed);
  Dataset data;
  std::size_t total = 0;
  for (const auto& b : blobs) total += b.count;
  data.points = Matrix(total, 2);
  std::vector<int> labels;
  labels.reserve(total);
  std::size_t r = 0;
  for (int label = 0; label < 3; ++label) {
    const Blob& b = blobs[label];
    for (std::size_t i = 0; i < b.count; ++i, ++r) {
      data.points(r, 0) = std::clamp(b.cx + b.sigma * rng.normal(), 0.0, 1.0);
      data.points(r, 1) = std::clamp(b.cy + b.sigma * rng.normal(), 0.0, 1.0);
      labels.push_back(label);
    }
  }
  data.labels = std::move(labels);
  data.label_names = {"dense_a", "dense_b", "sparse"};
  data.name = "three_cluster_hard";
  return data;
}

}  // namespace isosim

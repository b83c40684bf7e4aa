#include "isosim/cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "isosim/cluster.hpp"
#include "isosim/dataset.hpp"
#include "isosim/eval.hpp"
#include "isosim/neighbourhood.hpp"
#include "isosim/partition.hpp"
#include "isosim/similarity.hpp"
#include "isosim/simulate.hpp"

namespace isosim::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Parsing helpers

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw PreconditionError("not a number: '" + s + "'");
  return v;
}

std::size_t to_count(const std::string& s) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw PreconditionError("not a non-negative integer: '" + s + "'");
  return v;
}

// "a,b,c" or "lo:hi:count".
std::vector<double> parse_reals(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    const auto p = split(spec, ':');
    if (p.size() != 3) throw PreconditionError("real range must be lo:hi:count, got '" + spec + "'");
    return linear_grid(to_double(p[0]), to_double(p[1]), to_count(p[2]));
  }
  std::vector<double> v;
  for (const auto& s : split(spec, ',')) v.push_back(to_double(s));
  return v;
}

// "a,b,c" or "lo:hi" (unit step).
std::vector<std::size_t> parse_counts(const std::string& spec) {
  std::vector<std::size_t> v;
  if (spec.find(':') != std::string::npos) {
    const auto p = split(spec, ':');
    if (p.size() != 2) throw PreconditionError("integer range must be lo:hi, got '" + spec + "'");
    for (std::size_t x = to_count(p[0]); x <= to_count(p[1]); ++x) v.push_back(x);
    return v;
  }
  for (const auto& s : split(spec, ',')) v.push_back(to_count(s));
  return v;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Writes through a sibling temporary and renames, so a failed run never leaves
// a half-written file under the requested name.
void write_output(const fs::path& path, const std::string& content, bool binary = false) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw FormatError("cannot write " + path.string());
    out << content;
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw FormatError("failed writing " + path.string());
    }
  }
  fs::rename(tmp, path);
}

struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;

  std::string header() const {
    std::ostringstream os;
    os << "# isosim " << kVersion << '\n' << "# command: " << command << '\n';
    for (const auto& [k, v] : config) os << "# " << k << '=' << v << '\n';
    return os.str();
  }
};

Provenance capture(const CLI::App& sub) {
  Provenance p;
  p.command = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();  // every option takes the last occurrence
    } else {
      value = opt->get_default_str();
    }
    if (opt->get_expected_max() == 0) value = opt->count() > 0 ? "true" : "false";
    p.config.emplace_back(name, value);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Shared option groups

struct DataOptions {
  std::string path;
  std::string label;
  bool raw = false;

  void add(CLI::App* app, bool required = true) {
    auto* o = app->add_option("--data", path, "Dataset CSV");
    if (required) o->required();
    app->add_option("--label", label, "Label column: header name or index (-1 = last); empty for none");
    app->add_flag("--raw", raw, "Skip min-max normalisation");
  }

  Dataset load() const {
    if (!fs::exists(path)) throw FormatError("dataset file not found: " + path);
    Dataset d = load_csv(path, label.empty() ? std::nullopt : std::optional<std::string>(label));
    d.validate();
    if (raw) return d;
    auto normalized = min_max_normalize(d).first;
    return normalized;
  }
};

struct MeasureOptions {
  std::string kind = "anne";
  std::size_t psi = 16;
  std::size_t t = 200;
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool allow_l2 = true) {
    app->add_option("--kind", kind, allow_l2 ? "Dissimilarity: anne, iforest or l2" : "Partitioning: anne or iforest")
        ->capture_default_str();
    app->add_option("--psi", psi, "Sample size per partitioning")->capture_default_str();
    app->add_option("--t", t, "Ensemble size")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  bool metric() const { return kind == "l2" || kind == "euclidean"; }

  PartitionEnsemble ensemble(const Dataset& data) const {
    return build_ensemble(data, parse_partition_kind(kind), psi, t, seed);
  }

  DissimilarityMatrix matrix(const Dataset& data) const {
    if (metric()) return euclidean_matrix(data);
    return dissimilarity_matrix(data, ensemble(data));
  }
};

// ---------------------------------------------------------------------------
// Commands

struct SimilarityCmd {
  DataOptions data;
  MeasureOptions measure;
  std::string out;
  std::string ensemble_out;

  void add(CLI::App* app) {
    data.add(app);
    measure.add(app);
    app->add_option("--out", out, "Output matrix (.csv for text, anything else for the binary record)")->required();
    app->add_option("--ensemble-out", ensemble_out, "Also save the partition ensemble (JSON)");
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    DissimilarityMatrix m;
    if (measure.metric()) {
      m = euclidean_matrix(d);
    } else {
      const auto e = measure.ensemble(d);
      if (!ensemble_out.empty()) write_output(ensemble_out, serialize_ensemble(e) + "\n");
      m = dissimilarity_matrix(d, e);
    }
    m.provenance = m.provenance + "\n" + prov.header();
    if (fs::path(out).extension() == ".csv") {
      write_output(out, matrix_to_csv(m, prov.header()));
    } else {
      const fs::path tmp = out + ".partial";
      write_matrix_binary(m, tmp);
      fs::rename(tmp, out);
    }
    os << "wrote " << m.size() << "x" << m.size() << ' ' << to_string(m.kind) << " matrix to " << out << '\n';
    return 0;
  }
};

std::string f1_report_csv(const F1Report& r, const std::string& header) {
  std::ostringstream os;
  os << header << "# matching: " << r.matching_rule << '\n' << "class,cluster,precision,recall,f1\n";
  for (const auto& s : r.per_class)
    os << s.truth_class << ',' << s.cluster << ',' << format_g9(s.precision) << ',' << format_g9(s.recall) << ','
       << format_g9(s.f1) << '\n';
  os << "macro_f1," << format_g9(r.macro_f1) << '\n';
  return os.str();
}

struct ClusterCmd {
  DataOptions data;
  MeasureOptions measure;
  std::string matrix_path;
  std::string algorithm = "dbscan";
  double cutoff = 0.1;
  std::size_t min_points = 5;
  std::size_t k = 2;
  std::string out;
  std::string report;

  void add(CLI::App* app) {
    data.add(app);
    measure.add(app);
    app->add_option("--matrix", matrix_path, "Precomputed binary dissimilarity matrix (replaces --kind/--psi/--t)");
    app->add_option("--algorithm", algorithm, "dbscan or dp")->capture_default_str();
    app->add_option("--cutoff", cutoff, "epsilon / alpha for dbscan, d_c for dp")->capture_default_str();
    app->add_option("--min-points", min_points, "DBSCAN MinPts")->capture_default_str();
    app->add_option("--k", k, "DP target cluster count")->capture_default_str();
    app->add_option("--out", out, "Clustering CSV (index,label; noise = -1)");
    app->add_option("--report", report, "F1 report CSV (needs labels)");
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    DissimilarityMatrix m;
    if (!matrix_path.empty()) {
      if (!fs::exists(matrix_path)) throw FormatError("matrix file not found: " + matrix_path);
      m = read_matrix_binary(matrix_path);
      if (m.size() != d.size()) throw PreconditionError("matrix size does not match the dataset");
    } else {
      m = measure.matrix(d);
    }
    Clustering c;
    if (algorithm == "dbscan")
      c = dbscan(m, cutoff, min_points);
    else if (algorithm == "dp")
      c = density_peaks(m, k, cutoff);
    else
      throw PreconditionError("unknown algorithm '" + algorithm + "' (expected dbscan or dp)");

    if (!out.empty()) write_output(out, clustering_to_csv(c, prov.header()));
    os << "clusters=" << c.n_clusters << " noise=" << c.noise_count();
    if (d.labels) {
      const auto r = f1_score(c, *d.labels);
      os << " macro_f1=" << format_g9(r.macro_f1);
      if (!report.empty()) write_output(report, f1_report_csv(r, prov.header()));
    } else if (!report.empty()) {
      throw PreconditionError("--report needs a labelled dataset");
    }
    os << '\n';
    return 0;
  }
};

struct RangeOptions {
  std::string cutoffs;
  std::string min_points;
  std::string ks;
  std::string psis;
  std::size_t t = 200;

  void add(CLI::App* app) {
    app->add_option("--cutoffs", cutoffs, "Cutoff grid: list or lo:hi:count (default 0.001:0.999:101)");
    app->add_option("--min-points", min_points, "MinPts grid: list or lo:hi (default 2:40)");
    app->add_option("--k", ks, "DP k grid: list or lo:hi (default 2:40)");
    app->add_option("--psi", psis, "psi grid: list (default 10 evenly spaced values in [2, ceil(n/2)])");
    app->add_option("--t", t, "Ensemble size")->capture_default_str();
  }

  ParameterRanges resolve(std::size_t n) const {
    ParameterRanges r = default_ranges(n);
    if (!cutoffs.empty()) {
      r.cutoffs = parse_reals(cutoffs);
      r.cutoff_spacing = "user";
    }
    if (!min_points.empty()) r.min_points = parse_counts(min_points);
    if (!ks.empty()) r.ks = parse_counts(ks);
    if (!psis.empty()) r.psis = parse_counts(psis);
    r.t = t;
    return r;
  }
};

std::string best_summary(const SweepReport& r) {
  const auto& b = r.best_row();
  std::ostringstream os;
  os << r.dataset << ',' << r.algorithm.name() << ",best_f1=" << format_g9(b.mean_f1) << ",std=" << format_g9(b.std_f1)
     << ",psi=" << b.psi << ",cutoff=" << format_g9(b.cutoff)
     << (r.algorithm.algorithm == Algorithm::DBSCAN ? ",min_points=" : ",k=") << b.parameter;
  return os.str();
}

struct SweepCmd {
  DataOptions data;
  RangeOptions ranges;
  std::string algorithm = "mbscan-anne";
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* app) {
    data.add(app);
    ranges.add(app);
    app->add_option("--algorithm", algorithm, "dbscan-l2, mbscan-anne, mbscan-iforest, dp-l2, dp-anne, dp-iforest")
        ->capture_default_str();
    app->add_option("--repeats", repeats, "Ensembles averaged per grid point")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--out", out, "Sweep CSV (every grid row)");
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    const auto spec = parse_algorithm(algorithm);
    const auto rep = grid_search(d, spec, ranges.resolve(d.size()), repeats, seed);
    if (!out.empty())
      write_output(out, sweep_to_csv(rep, prov.header() + "# ranges: " + rep.ranges + "\n# best: " + best_summary(rep) + "\n"));
    os << best_summary(rep) << '\n';
    return 0;
  }
};

struct SimulateCmd {
  std::string sweep = "both";
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::size_t n_sparse = 100;
  std::size_t n_dense = 400;
  std::string psi_values;
  std::string distances;
  double fixed_distance = 0.2;
  std::size_t fixed_psi = 15;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--sweep", sweep, "psi, distance or both")->capture_default_str();
    app->add_option("--trials", trials, "Monte-Carlo trials per grid point")->capture_default_str();
    app->add_option("--seed", seed, "Random seed (background field and trials)")->capture_default_str();
    app->add_option("--n-sparse", n_sparse, "Background points in the sparse half")->capture_default_str();
    app->add_option("--n-dense", n_dense, "Background points in the dense half")->capture_default_str();
    app->add_option("--psi-values", psi_values, "psi grid (default 2:64 step 2 as a list)");
    app->add_option("--distances", distances, "Distance grid: list or lo:hi:count (default 0.05:0.95:19)");
    app->add_option("--fixed-distance", fixed_distance, "Inter-point distance of the psi sweep")->capture_default_str();
    app->add_option("--fixed-psi", fixed_psi, "psi of the distance sweep")->capture_default_str();
    app->add_option("--out", out, "Output CSV; with --sweep both, '-psi' and '-distance' are inserted before the extension")
        ->required();
  }

  int run(const Provenance& prov, std::ostream& os) const {
    SimulationConfig cfg = default_simulation_config(seed);
    const double ratio = static_cast<double>(n_dense) / static_cast<double>(std::max<std::size_t>(1, n_sparse));
    cfg.density_ratio = ratio;
    cfg.background = synth_two_density(n_sparse, n_dense, ratio, seed);
    cfg.trials = trials;
    cfg.fixed_distance = fixed_distance;
    cfg.fixed_psi = fixed_psi;
    if (!psi_values.empty()) cfg.psi_values = parse_counts(psi_values);
    if (!distances.empty()) cfg.distances = parse_reals(distances);

    auto path_for = [&](const std::string& which) {
      if (sweep != "both") return fs::path(out);
      fs::path p(out);
      return p.parent_path() / (p.stem().string() + "-" + which + p.extension().string());
    };
    if (sweep != "psi" && sweep != "distance" && sweep != "both")
      throw PreconditionError("--sweep must be psi, distance or both");
    if (sweep == "psi" || sweep == "both") {
      const auto r = simulate_vs_psi(cfg);
      write_output(path_for("psi"), simulation_to_csv(r, prov.header()));
      os << "psi sweep: " << r.rows.size() << " rows -> " << path_for("psi").string() << '\n';
    }
    if (sweep == "distance" || sweep == "both") {
      const auto r = simulate_vs_distance(cfg);
      write_output(path_for("distance"), simulation_to_csv(r, prov.header()));
      os << "distance sweep: " << r.rows.size() << " rows -> " << path_for("distance").string() << '\n';
    }
    return 0;
  }
};

struct ContourCmd {
  DataOptions data;
  MeasureOptions measure;
  std::string reference;
  std::size_t nx = 101, ny = 101;
  std::string bounds = "0,1,0,1";
  std::string out;

  void add(CLI::App* app) {
    data.add(app);
    measure.add(app, false);
    app->add_option("--reference", reference, "Reference point x,y (default: the data centroid)");
    app->add_option("--nx", nx, "Grid vertices along x")->capture_default_str();
    app->add_option("--ny", ny, "Grid vertices along y")->capture_default_str();
    app->add_option("--bounds", bounds, "x_min,x_max,y_min,y_max")->capture_default_str();
    app->add_option("--out", out, "Grid CSV: ny rows of nx values")->required();
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    if (d.dim() != 2) throw PreconditionError("contour needs 2-D data, got d = " + std::to_string(d.dim()));
    std::vector<double> ref(2, 0.0);
    if (reference.empty()) {
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t c = 0; c < 2; ++c) ref[c] += d.points(i, c) / static_cast<double>(d.size());
    } else {
      ref = parse_reals(reference);
      if (ref.size() != 2) throw PreconditionError("--reference needs two values");
    }
    const auto b = parse_reals(bounds);
    if (b.size() != 4) throw PreconditionError("--bounds needs four values");
    const auto grid = contour_grid(measure.ensemble(d), d, ref, nx, ny, {b[0], b[1], b[2], b[3]});
    std::ostringstream csv;
    csv << prov.header() << "# grid nx=" << nx << " ny=" << ny << " reference=" << format_g9(ref[0]) << ','
        << format_g9(ref[1]) << " rows run along y, columns along x\n";
    for (std::size_t iy = 0; iy < ny; ++iy) {
      for (std::size_t ix = 0; ix < nx; ++ix) csv << (ix ? "," : "") << format_g9(grid.at(ix, iy));
      csv << '\n';
    }
    write_output(out, csv.str());
    os << "wrote " << ny << "x" << nx << " contour grid to " << out << '\n';
    return 0;
  }
};

struct ManifestEntry {
  std::string name;
  fs::path path;
  std::string label;
};

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() < 2 || cells.size() > 3)
      throw FormatError(path.string() + ": row " + std::to_string(no) + ": expected name,path[,label_column]");
    ManifestEntry e{cells[0], cells[1], cells.size() == 3 ? cells[2] : "-1"};
    if (e.path.is_relative()) e.path = path.parent_path() / e.path;
    entries.push_back(std::move(e));
  }
  return entries;
}

struct BenchCmd {
  std::string manifest;
  std::string algorithms = "dp-l2,dbscan-l2,mbscan-iforest,mbscan-anne";
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  RangeOptions ranges;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--manifest", manifest, "Manifest file: name,path[,label_column] per line")->required();
    app->add_option("--algorithms", algorithms, "Comma-separated algorithm list")->capture_default_str();
    app->add_option("--repeats", repeats, "Ensembles averaged per grid point")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    ranges.add(app);
    app->add_option("--out", out, "Result CSV (one row per dataset and algorithm)")->required();
  }

  int run(const Provenance& prov, std::ostream& os) const {
    std::vector<AlgorithmSpec> specs;
    for (const auto& a : split(algorithms, ',')) specs.push_back(parse_algorithm(a));
    std::ostringstream csv;
    csv << prov.header() << "dataset,n,d,classes,algorithm,best_f1,std_f1,psi,cutoff,parameter\n";
    for (const auto& entry : read_manifest(manifest)) {
      if (!fs::exists(entry.path)) throw FormatError("dataset file not found: " + entry.path.string());
      Dataset d = min_max_normalize(load_csv(entry.path, entry.label)).first;
      d.name = entry.name;
      for (const auto& spec : specs) {
        const auto rep = grid_search(d, spec, ranges.resolve(d.size()), repeats, seed);
        const auto& b = rep.best_row();
        csv << entry.name << ',' << d.size() << ',' << d.dim() << ',' << d.class_count() << ',' << spec.name() << ','
            << format_g9(b.mean_f1) << ',' << format_g9(b.std_f1) << ',' << b.psi << ',' << format_g9(b.cutoff) << ','
            << b.parameter << '\n';
        os << best_summary(rep) << '\n';
      }
    }
    write_output(out, csv.str());
    return 0;
  }
};

struct DetectCmd {
  DataOptions data;
  MeasureOptions measure;
  std::string modes = "medoids";
  std::string cutoffs = "0.001:0.999:101";
  std::string out;

  void add(CLI::App* app) {
    data.add(app);
    measure.add(app);
    app->add_option("--modes", modes, "Mode point indices (list) or 'medoids' for ground-truth class medoids")
        ->capture_default_str();
    app->add_option("--cutoffs", cutoffs, "Cutoff grid: list or lo:hi:count")->capture_default_str();
    app->add_option("--out", out, "Diagnostic CSV")->required();
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    const auto mode_idx = modes == "medoids" ? class_medoids(d) : parse_counts(modes);
    const auto rows = detectability_diagnostic(measure.matrix(d), mode_idx, parse_reals(cutoffs));
    write_output(out, detectability_to_csv(rows, prov.header()));
    std::size_t satisfied = 0;
    for (const auto& r : rows) satisfied += r.condition;
    os << "condition satisfied at " << satisfied << " of " << rows.size() << " cutoffs\n";
    return 0;
  }
};

struct CurveCmd {
  DataOptions data;
  MeasureOptions measure;
  std::size_t point = 0;
  std::string cutoffs = "0.001:0.999:101";
  std::string out;

  void add(CLI::App* app) {
    data.add(app);
    measure.add(app);
    app->add_option("--point", point, "Point index")->capture_default_str();
    app->add_option("--cutoffs", cutoffs, "Ascending cutoff grid: list or lo:hi:count")->capture_default_str();
    app->add_option("--out", out, "Curve CSV (cutoff,count)")->required();
  }

  int run(const Provenance& prov, std::ostream& os) const {
    const Dataset d = data.load();
    const auto grid = parse_reals(cutoffs);
    const auto counts = neighbourhood_curve(measure.matrix(d), point, grid);
    write_output(out, curve_to_csv(grid, counts, prov.header()));
    os << "wrote " << counts.size() << " curve points to " << out << '\n';
    return 0;
  }
};

// Expands `--config FILE` into `--key value` tokens placed right after the
// subcommand, ahead of the user's own flags, which therefore win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return rest;
  std::ifstream in(*config);
  if (!in) throw FormatError("config file not found: " + *config);
  std::vector<std::string> injected;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(*config + ": row " + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    std::replace(key.begin(), key.end(), '_', '-');
    if (value == "true") {
      injected.push_back("--" + key);
    } else if (value != "false") {
      injected.push_back("--" + key);
      injected.push_back(value);
    }
  }
  // Locate the subcommand: first token not starting with '-' after any global flags.
  std::size_t pos = 1;
  while (pos < rest.size() && rest[pos].rfind("-", 0) == 0) pos += rest[pos] == "--threads" ? 2 : 1;
  if (pos >= rest.size()) return rest;
  rest.insert(rest.begin() + static_cast<long>(pos + 1), injected.begin(), injected.end());
  return rest;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isolation-similarity clustering toolkit", "isosim"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (results do not depend on it)");
  app.add_option("--config", "Flat key = value file; command-line flags override it");

  SimilarityCmd similarity;
  ClusterCmd cluster;
  SweepCmd sweep;
  SimulateCmd simulate;
  ContourCmd contour;
  BenchCmd bench;
  DetectCmd detect;
  CurveCmd curve;
  auto* s_similarity = app.add_subcommand("similarity", "Compute a dissimilarity matrix");
  auto* s_cluster = app.add_subcommand("cluster", "Run DBSCAN/MBSCAN or Density Peaks");
  auto* s_sweep = app.add_subcommand("sweep", "Parameter grid search scored by F1");
  auto* s_simulate = app.add_subcommand("simulate", "Same-cell probability simulation, sparse vs dense");
  auto* s_contour = app.add_subcommand("contour", "Dissimilarity contour grid on 2-D data");
  auto* s_bench = app.add_subcommand("bench", "Grid-search benchmark over a dataset manifest");
  auto* s_detect = app.add_subcommand("detect", "Mode/valley detectability diagnostic");
  auto* s_curve = app.add_subcommand("curve", "Neighbourhood count of one point versus cutoff");
  similarity.add(s_similarity);
  cluster.add(s_cluster);
  sweep.add(s_sweep);
  simulate.add(s_simulate);
  contour.add(s_contour);
  bench.add(s_bench);
  detect.add(s_detect);
  curve.add(s_curve);

  try {
    auto args = expand_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "isosim: error: " << e.what() << '\n';
    return 1;
  }

  const unsigned saved_threads = thread_count();
  set_thread_count(threads);
  int status = 1;
  try {
    CLI::App* sub = app.get_subcommands().front();
    Provenance prov = capture(*sub);
    prov.config.emplace_back("threads", std::to_string(threads));
    if (sub == s_similarity) status = similarity.run(prov, out);
    else if (sub == s_cluster) status = cluster.run(prov, out);
    else if (sub == s_sweep) status = sweep.run(prov, out);
    else if (sub == s_simulate) status = simulate.run(prov, out);
    else if (sub == s_contour) status = contour.run(prov, out);
    else if (sub == s_bench) status = bench.run(prov, out);
    else if (sub == s_detect) status = detect.run(prov, out);
    else if (sub == s_curve) status = curve.run(prov, out);
  } catch (const std::exception& e) {
    err << "isosim: error: " << e.what() << '\n';
    status = 1;
  }
  set_thread_count(saved_threads);
  return status;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, out, err);
}

}  // namespace isosim::cli

// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "nohis/descriptors.hpp"
#include "nohis/error.hpp"
#include "nohis/image.hpp"
#include "nohis/retrieval.hpp"
#include "nohis/search.hpp"
#include "nohis/synth.hpp"
#include "nohis/tree.hpp"

namespace nohis::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using json = nlohmann::json;

constexpr const char* kStatsSchema = "nohis.search_stats/1";
constexpr const char* kBenchSchema = "nohis.bench_report/1";

/// Raised for cross-mode disagreements and similar broken invariants.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// --- extract ---------------------------------------------------------------

struct ExtractArgs {
  std::string images;
  std::string output;
  std::size_t max_points = 300;
  double kappa = 0.04;
  std::vector<double> scales;
  std::size_t jobs = 1;
};

int cmd_extract(const ExtractArgs& a, std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!fs::is_directory(a.images, ec)) {
    err << "error: cannot read image directory " << a.images << "\n";
    return kDataError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.images, ec)) {
    if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
  }
  if (ec) {
    err << "error: cannot list " << a.images << ": " << ec.message() << "\n";
    return kDataError;
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) err << "warning: no supported images in " << a.images << "\n";

  ExtractionParams params;
  params.harris.max_points = a.max_points;
  params.harris.kappa = a.kappa;
  if (!a.scales.empty()) params.harris.scales = a.scales;
  params.jobs = a.jobs;

  std::vector<std::pair<std::uint32_t, GrayImage>> images;
  std::map<std::uint32_t, fs::path> names;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto id = static_cast<std::uint32_t>(i);
    names[id] = files[i];
    try {
      images.emplace_back(id, load_image(files[i]));
    } catch (const Error& e) {
      err << "warning: skipping " << files[i].string() << ": " << e.what() << "\n";
    }
  }

  const auto result = extract_descriptors(images, params);
  for (const auto& f : result.failures) {
    err << "warning: skipping " << names[f.image_id].string() << ": " << f.message << "\n";
  }
  for (const auto& [id, count] : result.per_image_counts) {
    out << id << '\t' << names[id].filename().string() << '\t' << count << '\n';
  }
  save_descriptors(to_dataset(result.records), a.output);
  out << "descriptors\t" << result.records.size() << '\n';
  return kSuccess;
}

// --- build -----------------------------------------------------------------

struct BuildArgs {
  std::string input;
  std::string output;
  std::size_t cmax = 0;
  std::size_t min_leaf = 32;
  std::string baseline;
};

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  if (!a.baseline.empty() && a.baseline != "pddp") {
    err << "error: unknown baseline '" << a.baseline << "' (expected pddp)\n";
    return kUsageError;
  }
  const Dataset data = load_descriptors(a.input);
  if (data.size() == 0) {
    err << "error: " << a.input << " contains no descriptors\n";
    return kDataError;
  }
  const PddpOptions options{a.cmax, a.min_leaf};
  const auto start = Clock::now();
  const NohisTree tree = a.baseline.empty() ? build_nohis(data, options) : build_pddp_baseline(data, options);
  const double elapsed = seconds_since(start);
  if (tree.leaf_count() == 1 && (a.cmax == 0 ? default_cluster_count(data.size()) : a.cmax) > 1) {
    err << "warning: dataset could not be split; index has a single leaf\n";
  }
  save_index(tree, a.output);
  out << "leaves\t" << tree.leaf_count() << '\n';
  out << "depth\t" << tree.depth() << '\n';
  out << "descriptors\t" << tree.descriptor_count() << '\n';
  out << "build_seconds\t" << format_fixed(elapsed) << '\n';
  return kSuccess;
}

// --- query -----------------------------------------------------------------

struct QueryArgs {
  std::string index;
  std::string vector;
  std::string image;
  std::size_t k = 20;
  std::optional<double> range;
  bool stats = false;
  std::size_t top = 10;
  std::string kernel = "inverse";
};

json stats_json(const SearchStats& s, const NohisTree& tree, std::size_t query) {
  return json{{"schema", kStatsSchema},
              {"query", query},
              {"leaves_visited", s.leaves_visited},
              {"leaf_count", tree.leaf_count()},
              {"internal_nodes_visited", s.internal_nodes_visited},
              {"distance_computations", s.distance_computations},
              {"prunes", s.prunes}};
}

void print_neighbors(std::span<const Neighbor> list, std::ostream& out) {
  std::size_t rank = 1;
  for (const auto& n : list) {
    out << rank++ << '\t' << n.index << '\t' << format_fixed(std::sqrt(n.squared_distance)) << '\t' << n.cluster
        << '\n';
  }
}

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  if (a.vector.empty() == a.image.empty()) {
    err << "error: exactly one of --vector or --image is required\n";
    return kUsageError;
  }
  if (a.kernel != "inverse" && a.kernel != "count") {
    err << "error: --kernel must be 'inverse' or 'count'\n";
    return kUsageError;
  }
  const NohisTree tree = load_index(a.index);

  if (!a.image.empty()) {
    if (a.range) {
      err << "error: --range applies to vector queries only\n";
      return kUsageError;
    }
    QueryOptions options;
    options.k = a.k;
    options.top = a.top;
    options.kernel = a.kernel == "count" ? VoteKernel::count : VoteKernel::inverse_distance;
    const auto ranking = query_by_image(tree, load_image(a.image), options);
    std::size_t rank = 1;
    for (const auto& e : ranking.entries) {
      out << rank++ << '\t' << e.image_id << '\t' << format_fixed(e.score) << '\t' << e.supporting_matches << '\n';
    }
    return kSuccess;
  }

  const Dataset queries = load_descriptors(a.vector);
  if (queries.size() > 0 && queries.dim() != tree.dim()) {
    throw Error(Errc::dimension_mismatch, "query dimension " + std::to_string(queries.dim()) +
                                              " does not match index dimension " + std::to_string(tree.dim()));
  }
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries.size() > 1) out << "# query " << i << '\n';
    SearchStats stats;
    if (a.range) {
      const auto hits = range_search(tree, queries.vectors[i], *a.range, &stats);
      print_neighbors(hits, out);
    } else {
      const auto result = knn_search(tree, queries.vectors[i], a.k);
      stats = result.stats;
      print_neighbors(result.neighbors.entries(), out);
    }
    if (a.stats) out << stats_json(stats, tree, i).dump() << '\n';
  }
  return kSuccess;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string input;
  std::string queries;
  std::size_t k = 20;
  std::string modes = "nohis,pddp,scan";
  std::size_t repeat = 3;
  std::size_t cmax = 0;
  std::size_t min_leaf = 32;
  std::string json_path;
};

struct ModeRun {
  std::string mode;
  std::size_t clusters = 0;
  double mean_query_seconds = 0;
  std::optional<double> mean_leaves;
  std::vector<NeighborList> results;
};

std::vector<std::string> split_modes(const std::string& csv) {
  std::vector<std::string> modes;
  std::stringstream ss(csv);
  for (std::string m; std::getline(ss, m, ',');) {
    if (!m.empty()) modes.push_back(m);
  }
  return modes;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ModeRun run_mode(const std::string& mode, const Dataset& data, const Dataset& queries, const BenchArgs& a) {
  ModeRun run;
  run.mode = mode;
  std::optional<NohisTree> tree;
  if (mode == "nohis") tree = build_nohis(data, {a.cmax, a.min_leaf});
  if (mode == "pddp") tree = build_pddp_baseline(data, {a.cmax, a.min_leaf});
  run.clusters = tree ? tree->leaf_count() : 0;

  std::vector<double> per_repeat;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, a.repeat); ++r) {
    std::vector<NeighborList> results;
    results.reserve(queries.size());
    std::uint64_t leaves = 0;
    const auto start = Clock::now();
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (tree) {
        auto res = knn_search(*tree, queries.vectors[i], a.k);
        leaves += res.stats.leaves_visited;
        results.push_back(std::move(res.neighbors));
      } else {
        results.push_back(brute_force_knn(data, queries.vectors[i], a.k));
      }
    }
    per_repeat.push_back(seconds_since(start) / static_cast<double>(queries.size()));
    if (tree) run.mean_leaves = static_cast<double>(leaves) / static_cast<double>(queries.size());
    run.results = std::move(results);
  }
  run.mean_query_seconds = median(per_repeat);
  return run;
}

void dump_mismatch(const ModeRun& a, const ModeRun& b, std::size_t q, std::ostream& err) {
  err << "error: result mismatch between " << a.mode << " and " << b.mode << " on query " << q << "\n";
  const auto& la = a.results[q].entries();
  const auto& lb = b.results[q].entries();
  for (std::size_t i = 0; i < std::max(la.size(), lb.size()); ++i) {
    err << "  " << i;
    if (i < la.size()) err << '\t' << la[i].index << ':' << la[i].squared_distance;
    else err << "\t-";
    if (i < lb.size()) err << '\t' << lb[i].index << ':' << lb[i].squared_distance;
    else err << "\t-";
    err << '\n';
  }
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  const auto modes = split_modes(a.modes);
  if (modes.empty()) {
    err << "error: --modes is empty\n";
    return kUsageError;
  }
  for (const auto& m : modes) {
    if (m != "nohis" && m != "pddp" && m != "scan") {
      err << "error: unknown mode '" << m << "'\n";
      return kUsageError;
    }
  }
  const Dataset data = load_descriptors(a.input);
  const Dataset queries = load_descriptors(a.queries);
  if (data.size() == 0 || queries.size() == 0) {
    err << "error: dataset and query files must be non-empty\n";
    return kDataError;
  }
  if (data.dim() != queries.dim()) throw Error(Errc::dimension_mismatch, "query and dataset dimensions differ");

  std::vector<ModeRun> runs;
  for (const auto& m : modes) runs.push_back(run_mode(m, data, queries, a));

  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (!equivalent_results(runs[0].results[q].entries(), runs[r].results[q].entries())) {
        dump_mismatch(runs[0], runs[r], q, err);
        throw InvariantViolation("exact searches disagree");
      }
    }
  }

  out << "mode\tdataset_size\tcluster_count\tk\tquery_count\tmean_query_ms\tmean_leaves_visited\n";
  json report{{"schema", kBenchSchema}, {"repeat", a.repeat}, {"rows", json::array()}};
  for (const auto& run : runs) {
    out << run.mode << '\t' << data.size() << '\t' << (run.clusters ? std::to_string(run.clusters) : "-") << '\t'
        << a.k << '\t' << queries.size() << '\t' << format_fixed(run.mean_query_seconds * 1e3, 4) << '\t'
        << (run.mean_leaves ? format_fixed(*run.mean_leaves, 2) : "-") << '\n';
    json row{{"mode", run.mode},
             {"dataset_size", data.size()},
             {"cluster_count", run.clusters ? json(run.clusters) : json(nullptr)},
             {"k", a.k},
             {"query_count", queries.size()},
             {"mean_query_time", run.mean_query_seconds}};
    row["mean_leaves_visited"] = run.mean_leaves ? json(*run.mean_leaves) : json(nullptr);
    report["rows"].push_back(row);
  }
  if (a.json_path.empty()) {
    out << report.dump() << '\n';
  } else {
    std::ofstream js(a.json_path);
    js << report.dump(2) << '\n';
    if (!js) throw Error(Errc::io, "cannot write " + a.json_path);
  }
  return kSuccess;
}

// --- gen -------------------------------------------------------------------

struct GenVectorArgs {
  std::string output;
  std::size_t count = 50000;
  synth::MixtureSpec mixture;
  std::uint64_t sample_seed = 2;
};

int cmd_gen_vectors(const GenVectorArgs& a, std::ostream& out, std::ostream&) {
  const auto mixture = synth::make_mixture(a.mixture);
  save_descriptors(synth::sample(mixture, a.count, a.sample_seed), a.output);
  out << "vectors\t" << a.count << '\n';
  return kSuccess;
}

struct GenImageArgs {
  std::string dir;
  std::size_t count = 50;
  std::size_t size = 128;
  std::uint64_t seed = 1;
};

int cmd_gen_images(const GenImageArgs& a, std::ostream& out, std::ostream&) {
  fs::create_directories(a.dir);
  for (std::size_t i = 0; i < a.count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%04zu.pgm", i);
    save_pgm(synth::textured_shapes(a.size, a.size, a.seed * 1000003 + i), fs::path(a.dir) / name);
  }
  out << "images\t" << a.count << '\n';
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NOHIS-tree indexing and exact k-NN search", "nohis"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Extract Zernike descriptors from a directory of images");
  extract->add_option("--images", ex.images, "Directory of PGM/PNG images")->required();
  extract->add_option("--output", ex.output, "Descriptor file to write")->required();
  extract->add_option("--max-points", ex.max_points, "Interest points kept per image")->check(CLI::PositiveNumber);
  extract->add_option("--kappa", ex.kappa, "Harris sensitivity");
  extract->add_option("--scales", ex.scales, "Derivation scales (sigma)")->delimiter(',');
  extract->add_option("--jobs", ex.jobs, "Worker threads")->check(CLI::PositiveNumber);

  BuildArgs bu;
  auto* build = app.add_subcommand("build", "Build an index from a descriptor file");
  build->add_option("--input", bu.input, "Descriptor file")->required();
  build->add_option("--output", bu.output, "Index file to write")->required();
  build->add_option("--cmax", bu.cmax, "Maximum number of leaves (default: descriptors / 500)");
  build->add_option("--min-leaf", bu.min_leaf, "Smallest leaf a split may produce")->check(CLI::PositiveNumber);
  build->add_option("--baseline", bu.baseline, "Build the overlapping baseline instead (pddp)");

  QueryArgs qu;
  auto* query = app.add_subcommand("query", "Query an index by vector file or image");
  query->add_option("--index", qu.index, "Index file")->required();
  auto* vec = query->add_option("--vector", qu.vector, "Descriptor file of query vectors");
  auto* img = query->add_option("--image", qu.image, "Query image");
  vec->excludes(img);
  query->add_option("-k", qu.k, "Neighbours per query vector")->check(CLI::PositiveNumber);
  query->add_option("--range", qu.range, "Range query radius instead of k-NN")->check(CLI::NonNegativeNumber);
  query->add_flag("--stats", qu.stats, "Emit search statistics as JSON");
  query->add_option("--top", qu.top, "Images reported for image queries");
  query->add_option("--kernel", qu.kernel, "Image vote kernel: inverse or count");

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "Compare NOHIS, PDDP baseline and sequential scan");
  bench->add_option("--input", be.input, "Descriptor file to index")->required();
  bench->add_option("--queries", be.queries, "Descriptor file of query vectors")->required();
  bench->add_option("-k", be.k, "Neighbours per query")->check(CLI::PositiveNumber);
  bench->add_option("--modes", be.modes, "Comma-separated subset of nohis,pddp,scan");
  bench->add_option("--repeat", be.repeat, "Timing repetitions (median reported)")->check(CLI::PositiveNumber);
  bench->add_option("--cmax", be.cmax, "Maximum number of leaves");
  bench->add_option("--min-leaf", be.min_leaf, "Smallest leaf a split may produce")->check(CLI::PositiveNumber);
  bench->add_option("--json", be.json_path, "Write the JSON report here instead of stdout");

  auto* gen = app.add_subcommand("gen", "Generate synthetic data");
  gen->require_subcommand(1);
  GenVectorArgs gv;
  auto* gen_vectors = gen->add_subcommand("vectors", "Gaussian-mixture descriptor file");
  gen_vectors->add_option("--output", gv.output)->required();
  gen_vectors->add_option("--count", gv.count);
  gen_vectors->add_option("--dim", gv.mixture.dim)->check(CLI::PositiveNumber);
  gen_vectors->add_option("--clusters", gv.mixture.components)->check(CLI::PositiveNumber);
  gen_vectors->add_option("--spread", gv.mixture.spread);
  gen_vectors->add_option("--extent", gv.mixture.extent);
  gen_vectors->add_option("--seed", gv.mixture.seed, "Mixture seed");
  gen_vectors->add_option("--sample-seed", gv.sample_seed, "Sampling seed");
  GenImageArgs gi;
  auto* gen_images = gen->add_subcommand("images", "Textured-shape PGM corpus");
  gen_images->add_option("--dir", gi.dir)->required();
  gen_images->add_option("--count", gi.count);
  gen_images->add_option("--size", gi.size)->check(CLI::Range(32, 4096));
  gen_images->add_option("--seed", gi.seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  try {
    if (extract->parsed()) return cmd_extract(ex, out, err);
    if (build->parsed()) return cmd_build(bu, out, err);
    if (query->parsed()) return cmd_query(qu, out, err);
    if (bench->parsed()) return cmd_bench(be, out, err);
    if (gen_vectors->parsed()) return cmd_gen_vectors(gv, out, err);
    if (gen_images->parsed()) return cmd_gen_images(gi, out, err);
  } catch (const InvariantViolation& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariantViolation;
  }
  return kUsageError;
}

}  // namespace nohis::cli

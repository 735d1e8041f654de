#include "depthdist/cli.hpp"

#include "depthdist/bench.hpp"
#include "depthdist/io.hpp"
#include "depthdist/selftest.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace depthdist {

namespace {

constexpr int kOk = 0;
constexpr int kComputationError = 1;
constexpr int kUsageError = 2;

/// Raised for flag values that parse but are out of range.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

Eigen::VectorXd parse_list(const std::string& s) {
  std::vector<double> values;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) values.push_back(parse_real(item));
  if (values.empty()) throw UsageError("empty list");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
}

/// "lo:hi" (broadcast) or "l1,l2,...:u1,u2,...".
std::pair<Eigen::VectorXd, Eigen::VectorXd> parse_box(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--box expects LOWER:UPPER");
  return {parse_list(s.substr(0, colon)), parse_list(s.substr(colon + 1))};
}

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, Index d) {
  if (v.size() == 1) return Eigen::VectorXd::Constant(d, v[0]);
  if (v.size() != d) throw DimensionMismatch("box has " + std::to_string(v.size()) + " coordinates, samples have " + std::to_string(d));
  return v;
}

struct DistOptions {
  std::string x_path, y_path;
  std::string method = "dr";
  std::string depth = "halfspace";
  std::string schedule = "mc";
  std::string format = "json";
  std::string box;
  double p = 2.0;
  double eps = 0.2;
  Index ndirs = 1000;
  Index nalpha = 20;
  Index mc_points = 100000;
  std::uint64_t seed = 0;
  bool levels = false;
  bool trim_upper = false;
};

struct GenOptions {
  std::string family = "gaussian";
  Index d = 2;
  Index n = 1000;
  std::string shift = "10";
  std::string dof = "inf";
  double noise = 0.2;
  double factor = 0.8;
  std::uint64_t seed = 0;
  std::string out_x, out_y;
  std::string format;
  double contam_fraction = 0.0;
  std::string contam_scheme = "uniform_box";
  std::string contam_lower = "-10";
  std::string contam_upper = "20";
  std::string contam_target = "both";
};

struct BenchOptions {
  std::string experiment;
  std::string config;
  std::string format = "csv";
  Index reps = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool timing = false;
};

int run_dist(const DistOptions& o, std::ostream& out) {
  MetricParams params;
  params.p = o.p;
  params.epsilon = o.eps;
  params.directions = o.ndirs;
  params.n_alpha = o.nalpha;
  params.seed = o.seed;
  params.depth = o.depth == "projection" ? DepthNotion::projection : DepthNotion::halfspace;
  params.schedule = o.schedule == "grid" ? LevelSchedule::grid : LevelSchedule::monte_carlo;
  params.trim_upper = o.trim_upper;
  try {
    params.validate();
    if (o.mc_points < 1) throw ParameterError("--mc-points must be >= 1");
    if (o.method == "dd" && params.depth != DepthNotion::halfspace)
      throw ParameterError("--method dd supports --depth halfspace only");
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box;
  if (!o.box.empty()) box = parse_box(o.box);

  const PointCloud x = load_cloud(o.x_path);
  const PointCloud y = load_cloud(o.y_path);

  DistanceResult result;
  if (o.method == "dr") {
    result = dr_distance(x, y, params);
  } else if (o.method == "dd") {
    IntegrationBox b = IntegrationBox::bounding(x, y, 0.1, o.mc_points);
    if (box) {
      b.lower = broadcast(box->first, x.cols());
      b.upper = broadcast(box->second, x.cols());
    }
    result = dd_distance(x, y, params, b);
  } else if (o.method == "sw" || o.method == "maxsw") {
    result.method = o.method;
    result.params = params;
    result.value = sliced_wasserstein(x, y, params.p, params.directions, params.seed,
                                      o.method == "sw" ? SlicedMode::mean : SlicedMode::max);
  } else {
    if (x.cols() != 1 || y.cols() != 1) throw DimensionMismatch("w1d needs one-dimensional samples");
    result.method = "w1d";
    result.params = params;
    result.value = wasserstein_1d({x.data(), static_cast<std::size_t>(x.rows())},
                                  {y.data(), static_cast<std::size_t>(y.rows())}, params.p);
  }
  if (o.format == "csv")
    out << result_to_csv(result);
  else
    out << result_to_json(result, o.levels) << '\n';
  return kOk;
}

int run_gen(const GenOptions& o, std::ostream& out) {
  GeneratorSpec spec;
  ContaminationSpec contam;
  try {
    spec.family = family_from_string(o.family);
    spec.d = o.d;
    spec.n = o.n;
    spec.shift = parse_list(o.shift);
    spec.dof = parse_real(o.dof);
    spec.noise = o.noise;
    spec.factor = o.factor;
    spec.seed = o.seed;
    if (spec.d < 1 || spec.n < 1) throw ParameterError("--d and --n must be >= 1");
    if (!(spec.dof >= 1.0)) throw ParameterError("--dof must be >= 1 or inf");
    if (!(spec.noise >= 0.0)) throw ParameterError("--noise must be >= 0");
    if (!(spec.factor > 0.0 && spec.factor < 1.0)) throw ParameterError("--factor must lie in (0, 1)");
    if (!(o.contam_fraction >= 0.0 && o.contam_fraction <= 1.0))
      throw ParameterError("--contam-fraction must lie in [0, 1]");
    contam.fraction = o.contam_fraction;
    contam.scheme = o.contam_scheme == "unit_ball" ? ContaminationScheme::unit_ball : ContaminationScheme::uniform_box;
    contam.box_lower = parse_list(o.contam_lower);
    contam.box_upper = parse_list(o.contam_upper);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  CloudPair pair = generate(spec);
  if (contam.fraction > 0.0) {
    contam.seed = derive_seed(o.seed, 100);
    pair.first = contaminate(pair.first, contam);
    if (o.contam_target == "both") {
      contam.seed = derive_seed(o.seed, 101);
      pair.second = contaminate(pair.second, contam);
    }
  }
  auto save = [&](const PointCloud& cloud, const std::string& path) {
    CloudFile file;
    file.path = path;
    file.format = o.format.empty() ? format_for_path(path)
                                   : (o.format == "bin" ? CloudFormat::binary_f64 : CloudFormat::csv);
    save_cloud(cloud, file);
  };
  save(pair.first, o.out_x);
  save(pair.second, o.out_y);
  out << "wrote " << pair.first.rows() << "x" << pair.first.cols() << " to " << o.out_x << " and "
      << pair.second.rows() << "x" << pair.second.cols() << " to " << o.out_y << '\n';
  return kOk;
}

int run_bench(const BenchOptions& o, std::ostream& out) {
  ExperimentConfig config;
  try {
    if (!o.config.empty()) {
      config = load_config(o.config);
      if (!o.experiment.empty() && experiment_from_string(o.experiment) != config.experiment)
        throw ParameterError("experiment '" + o.experiment + "' does not match the config file");
    } else {
      if (o.experiment.empty()) throw ParameterError("bench needs an experiment name or --config");
      config = default_config(experiment_from_string(o.experiment));
    }
    if (o.reps > 0) config.repetitions = o.reps;
    if (o.seed_given) config.base_seed = o.seed;
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto rows = run_experiment(config);
  if (o.format == "json")
    write_rows_json(out, rows, o.timing);
  else
    write_rows_csv(out, rows, o.timing);
  return kOk;
}

int run_selftest_command(std::uint64_t seed, std::ostream& out) {
  const auto results = run_selftest(seed);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << '\n';
    ok = ok && r.passed;
  }
  return ok ? kOk : kComputationError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-based distances between empirical distributions", "depthdist"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: hardware concurrency)")
      ->check(CLI::PositiveNumber);

  DistOptions dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distance between two cloud files");
  dist_cmd->add_option("x", dist.x_path, "First cloud (CSV or DRWC binary)")->required();
  dist_cmd->add_option("y", dist.y_path, "Second cloud")->required();
  dist_cmd->add_option("--method", dist.method)->check(CLI::IsMember({"dr", "dd", "sw", "maxsw", "w1d"}));
  dist_cmd->add_option("--depth", dist.depth)->check(CLI::IsMember({"halfspace", "projection"}));
  dist_cmd->add_option("--p", dist.p, "Power p >= 1");
  dist_cmd->add_option("--eps", dist.eps, "Trimming level in [0, 1)");
  dist_cmd->add_option("--ndirs", dist.ndirs, "Number of random directions K");
  dist_cmd->add_option("--nalpha", dist.nalpha, "Number of depth levels");
  dist_cmd->add_option("--seed", dist.seed)->envname("DEPTHDIST_SEED");
  dist_cmd->add_option("--box", dist.box, "DD integration box LOWER:UPPER (comma lists or scalars)");
  dist_cmd->add_option("--mc-points", dist.mc_points, "DD Monte Carlo points");
  dist_cmd->add_option("--schedule", dist.schedule, "Depth levels: mc (random) or grid")
      ->check(CLI::IsMember({"mc", "grid"}));
  dist_cmd->add_flag("--trim-upper", dist.trim_upper, "Integrate levels up to alpha* - eps");
  dist_cmd->add_flag("--levels", dist.levels, "Include per-level Hausdorff samples in JSON output");
  dist_cmd->add_option("--format", dist.format)->check(CLI::IsMember({"json", "csv"}));

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic pair of clouds");
  gen_cmd->add_option("--family", gen.family)
      ->check(CLI::IsMember({"gaussian", "fragmented", "circles", "student"}));
  gen_cmd->add_option("--d", gen.d);
  gen_cmd->add_option("--n", gen.n);
  gen_cmd->add_option("--shift", gen.shift, "Scalar or comma-separated vector");
  gen_cmd->add_option("--dof", gen.dof, "Student degrees of freedom or 'inf'");
  gen_cmd->add_option("--noise", gen.noise);
  gen_cmd->add_option("--factor", gen.factor);
  gen_cmd->add_option("--seed", gen.seed)->envname("DEPTHDIST_SEED");
  gen_cmd->add_option("--out-x", gen.out_x)->required();
  gen_cmd->add_option("--out-y", gen.out_y)->required();
  gen_cmd->add_option("--format", gen.format, "csv or bin (default: from extension)")
      ->check(CLI::IsMember({"csv", "bin"}));
  gen_cmd->add_option("--contam-fraction", gen.contam_fraction);
  gen_cmd->add_option("--contam-scheme", gen.contam_scheme)->check(CLI::IsMember({"uniform_box", "unit_ball"}));
  gen_cmd->add_option("--contam-lower", gen.contam_lower);
  gen_cmd->add_option("--contam-upper", gen.contam_upper);
  gen_cmd->add_option("--contam-target", gen.contam_target)->check(CLI::IsMember({"both", "first"}));

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment and print a result table");
  bench_cmd->add_option("experiment", bench.experiment, "approx | outliers | tails")
      ->check(CLI::IsMember({"approx", "outliers", "tails", "approx_quality", "robustness_outliers", "heavy_tails"}));
  bench_cmd->add_option("--config", bench.config, "JSON experiment config");
  bench_cmd->add_option("--reps", bench.reps, "Override the number of repetitions");
  auto* bench_seed = bench_cmd->add_option("--seed", bench.seed, "Override the base seed")->envname("DEPTHDIST_SEED");
  bench_cmd->add_option("--format", bench.format)->check(CLI::IsMember({"csv", "json"}));
  bench_cmd->add_flag("--timing", bench.timing, "Add wall-clock seconds per evaluation");

  std::uint64_t selftest_seed = 0;
  auto* selftest_cmd = app.add_subcommand("selftest", "Run the invariant checks");
  selftest_cmd->add_option("--seed", selftest_seed)->envname("DEPTHDIST_SEED");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }
  bench.seed_given = bench_seed->count() > 0 || std::getenv("DEPTHDIST_SEED") != nullptr;
  set_thread_count(threads);

  try {
    if (dist_cmd->parsed()) return run_dist(dist, out);
    if (gen_cmd->parsed()) return run_gen(gen, out);
    if (bench_cmd->parsed()) return run_bench(bench, out);
    if (selftest_cmd->parsed()) return run_selftest_command(selftest_seed, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputationError;
  }
  return kUsageError;
}

}  // namespace depthdist

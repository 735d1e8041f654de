#include "depthdist/bench.hpp"

#include "depthdist/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace depthdist {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

MethodSpec dr_method(double epsilon, Index directions = 1000, Index n_alpha = 20) {
  MethodSpec m;
  m.kind = MethodKind::dr;
  m.params.p = 2.0;
  m.params.epsilon = epsilon;
  m.params.directions = directions;
  m.params.n_alpha = n_alpha;
  std::ostringstream id;
  id << "dr_eps" << epsilon;
  m.id = id.str();
  return m;
}

MethodSpec sliced_method(MethodKind kind, Index directions = 1000) {
  MethodSpec m;
  m.kind = kind;
  m.params.p = 2.0;
  m.params.directions = directions;
  m.id = kind == MethodKind::maxsw ? "maxsw" : (kind == MethodKind::w1d ? "w1d" : "sw");
  return m;
}

std::string_view kind_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::dr: return "dr";
    case MethodKind::sw: return "sw";
    case MethodKind::maxsw: return "maxsw";
    case MethodKind::w1d: return "w1d";
  }
  return "?";
}

MethodKind kind_from_string(std::string_view s) {
  if (s == "dr") return MethodKind::dr;
  if (s == "sw") return MethodKind::sw;
  if (s == "maxsw") return MethodKind::maxsw;
  if (s == "w1d") return MethodKind::w1d;
  throw ParameterError("unknown method kind '" + std::string(s) + "'");
}

struct Outcome {
  double value = 0.0;
  double seconds = 0.0;
  bool ok = false;
};

/// Evaluates every method on one pair. DR methods share one direction set and
/// one depth computation per depth notion.
std::vector<Outcome> evaluate_methods(const CloudPair& pair, const std::vector<MethodSpec>& methods,
                                      Index directions, std::uint64_t seed) {
  std::vector<Outcome> out(methods.size());
  std::map<DepthNotion, std::pair<std::optional<std::pair<DepthRegions, DepthRegions>>, double>> regions;
  std::optional<DirectionSet<double>> dirs;
  const Index d = pair.first.cols();

  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    MetricParams params = m.params;
    if (directions > 0) params.directions = directions;
    params.seed = seed;
    const auto start = Clock::now();
    try {
      switch (m.kind) {
        case MethodKind::dr: {
          if (!dirs) dirs = sample_directions<double>(d, params.directions, derive_seed(seed, 1));
          auto& cached = regions[params.depth];
          if (!cached.first) {
            const auto build = Clock::now();
            cached.first.emplace(DepthRegions(pair.first, *dirs, params.depth),
                                 DepthRegions(pair.second, *dirs, params.depth));
            cached.second = seconds_since(build);
          }
          const auto eval = Clock::now();
          out[i].value = dr_distance(cached.first->first, cached.first->second, params).value;
          out[i].seconds = cached.second + seconds_since(eval);
          break;
        }
        case MethodKind::sw:
        case MethodKind::maxsw:
          out[i].value = sliced_wasserstein(pair.first, pair.second, params.p, params.directions,
                                            derive_seed(seed, 3),
                                            m.kind == MethodKind::maxsw ? SlicedMode::max : SlicedMode::mean);
          out[i].seconds = seconds_since(start);
          break;
        case MethodKind::w1d: {
          if (d != 1) throw ParameterError("w1d needs one-dimensional samples");
          const std::span<const double> x(pair.first.data(), static_cast<std::size_t>(pair.first.rows()));
          const std::span<const double> y(pair.second.data(), static_cast<std::size_t>(pair.second.rows()));
          out[i].value = wasserstein_1d(x, y, params.p);
          out[i].seconds = seconds_since(start);
          break;
        }
      }
      out[i].ok = std::isfinite(out[i].value);
    } catch (const Error&) {
      out[i].ok = false;
    }
  }
  return out;
}

struct Cell {
  BenchRow row;
  std::vector<double> errors;
  std::vector<double> seconds;

  void record(double error, double secs) {
    errors.push_back(error);
    seconds.push_back(secs);
  }

  BenchRow finish() {
    BenchRow r = row;
    r.runs = static_cast<Index>(errors.size());
    if (errors.empty()) {
      r.mean_rel_error = r.std_rel_error = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double e : errors) sum += e;
      r.mean_rel_error = sum / static_cast<double>(errors.size());
      double ss = 0.0;
      for (double e : errors) ss += (e - r.mean_rel_error) * (e - r.mean_rel_error);
      r.std_rel_error = errors.size() > 1 ? std::sqrt(ss / static_cast<double>(errors.size() - 1)) : 0.0;
      std::vector<double> s = seconds;
      std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
      r.seconds_per_eval = s[s.size() / 2];
    }
    return r;
  }
};

/// Records a relative error, or a failure when the evaluation or the
/// baseline is unusable.
void record(Cell& cell, const Outcome& value, const Outcome& baseline) {
  if (!value.ok || !baseline.ok) {
    ++cell.row.failures;
    return;
  }
  try {
    cell.record(relative_error(value.value, baseline.value), value.seconds);
  } catch (const DegenerateBaseline&) {
    ++cell.row.failures;
  }
}

std::vector<BenchRow> finish_all(std::vector<Cell>& cells) {
  std::vector<BenchRow> rows;
  rows.reserve(cells.size());
  for (auto& c : cells) rows.push_back(c.finish());
  return rows;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::approx_quality: return "approx_quality";
    case Experiment::robustness_outliers: return "robustness_outliers";
    case Experiment::heavy_tails: return "heavy_tails";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  if (name == "approx_quality" || name == "approx") return Experiment::approx_quality;
  if (name == "robustness_outliers" || name == "outliers") return Experiment::robustness_outliers;
  if (name == "heavy_tails" || name == "tails") return Experiment::heavy_tails;
  throw ParameterError("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw ParameterError("repetitions must be >= 1");
  if (methods.empty()) throw ParameterError("experiment has no methods");
  for (const auto& m : methods) m.params.validate();
  switch (experiment) {
    case Experiment::approx_quality:
      if (dims.empty() || direction_counts.empty() || level_counts.empty())
        throw ParameterError("approx_quality needs dims, directions and n_alpha grids");
      for (Index d : dims)
        if (d < 1) throw ParameterError("dimension must be >= 1");
      break;
    case Experiment::robustness_outliers:
      if (fractions.empty()) throw ParameterError("robustness_outliers needs a fraction grid");
      for (double f : fractions)
        if (!(f >= 0.0 && f <= 1.0)) throw ParameterError("contamination fractions must lie in [0, 1]");
      break;
    case Experiment::heavy_tails:
      if (dofs.empty() || direction_counts.empty())
        throw ParameterError("heavy_tails needs dof and direction grids");
      for (double v : dofs)
        if (!(v >= 1.0)) throw ParameterError("degrees of freedom must be >= 1 (or inf)");
      break;
  }
  for (Index k : direction_counts)
    if (k < 1) throw ParameterError("direction counts must be >= 1");
  for (Index l : level_counts)
    if (l < 1) throw ParameterError("level counts must be >= 1");
}

ExperimentConfig default_config(Experiment experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.repetitions = 100;
  c.base_seed = 1;
  switch (experiment) {
    case Experiment::approx_quality:
      c.generator.family = Family::gaussian_pair;
      c.generator.n = 1000;
      c.generator.shift = Eigen::VectorXd::Constant(1, 7.0);
      c.dims = {5};
      c.direction_counts = {10, 100, 1000, 5000, 10000};
      c.level_counts = {20};
      c.methods = {dr_method(0.0), sliced_method(MethodKind::maxsw)};
      c.methods[0].id = "dr";
      break;
    case Experiment::robustness_outliers:
      c.generator.family = Family::gaussian_pair;
      c.generator.d = 2;
      c.generator.n = 1000;
      c.generator.shift = Eigen::VectorXd::Constant(1, 10.0);
      c.fractions = {0.0, 0.025, 0.05, 0.1, 0.15, 0.2};
      c.methods = {dr_method(0.1), dr_method(0.2), dr_method(0.3), sliced_method(MethodKind::sw)};
      break;
    case Experiment::heavy_tails:
      c.generator.family = Family::student_pair;
      c.generator.d = 10;
      c.generator.n = 1000;
      c.generator.shift = Eigen::VectorXd::Constant(1, 7.0);
      c.dofs = {1.0, 2.0, 3.0, 5.0, std::numeric_limits<double>::infinity()};
      c.direction_counts = {10, 100, 1000};
      c.methods = {dr_method(0.1), dr_method(0.2), dr_method(0.3), sliced_method(MethodKind::sw)};
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid experiment config: ") + e.what());
  }
  try {
    const auto experiment = experiment_from_string(j.at("experiment").get<std::string>());
    ExperimentConfig c = default_config(experiment);
    auto real = [](const json& v) {
      if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
        throw ParameterError("expected a number, got '" + s + "'");
      }
      return v.get<double>();
    };
    auto vec = [&](const json& v) {
      if (!v.is_array()) return Eigen::VectorXd::Constant(1, real(v)).eval();
      Eigen::VectorXd out(static_cast<Index>(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = real(v[i]);
      return out;
    };

    if (j.contains("repetitions")) c.repetitions = j["repetitions"].get<Index>();
    if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
    if (j.contains("generator")) {
      const auto& g = j["generator"];
      if (g.contains("family")) c.generator.family = family_from_string(g["family"].get<std::string>());
      if (g.contains("d")) c.generator.d = g["d"].get<Index>();
      if (g.contains("n")) c.generator.n = g["n"].get<Index>();
      if (g.contains("shift")) c.generator.shift = vec(g["shift"]);
      if (g.contains("dof")) c.generator.dof = real(g["dof"]);
      if (g.contains("noise")) c.generator.noise = real(g["noise"]);
      if (g.contains("factor")) c.generator.factor = real(g["factor"]);
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) {
        MethodSpec spec;
        spec.kind = kind_from_string(m.at("kind").get<std::string>());
        spec.id = m.value("id", std::string(kind_name(spec.kind)));
        spec.params.p = m.contains("p") ? real(m["p"]) : 2.0;
        spec.params.epsilon = m.contains("epsilon") ? real(m["epsilon"]) : 0.0;
        spec.params.n_alpha = m.value("n_alpha", Index{20});
        spec.params.directions = m.value("K", Index{1000});
        if (m.contains("depth"))
          spec.params.depth = m["depth"].get<std::string>() == "projection" ? DepthNotion::projection
                                                                              : DepthNotion::halfspace;
        if (m.contains("schedule"))
          spec.params.schedule =
              m["schedule"].get<std::string>() == "grid" ? LevelSchedule::grid : LevelSchedule::monte_carlo;
        c.methods.push_back(std::move(spec));
      }
    }
    auto index_list = [](const json& v) { return v.get<std::vector<Index>>(); };
    if (j.contains("dims")) c.dims = index_list(j["dims"]);
    if (j.contains("directions")) c.direction_counts = index_list(j["directions"]);
    if (j.contains("n_alpha")) c.level_counts = index_list(j["n_alpha"]);
    if (j.contains("fractions")) c.fractions = j["fractions"].get<std::vector<double>>();
    if (j.contains("dofs")) {
      c.dofs.clear();
      for (const auto& v : j["dofs"]) c.dofs.push_back(real(v));
    }
    if (j.contains("contamination")) {
      const auto& ct = j["contamination"];
      if (ct.contains("scheme"))
        c.scheme = ct["scheme"].get<std::string>() == "unit_ball" ? ContaminationScheme::unit_ball
                                                                   : ContaminationScheme::uniform_box;
      if (ct.contains("lower")) c.box_lower = vec(ct["lower"]);
      if (ct.contains("upper")) c.box_upper = vec(ct["upper"]);
      if (ct.contains("both")) c.contaminate_both = ct["both"].get<bool>();
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid experiment config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json(buffer.str());
}

double translation_distance(MethodKind kind, double p, const Eigen::VectorXd& shift) {
  const double norm = shift.norm();
  switch (kind) {
    case MethodKind::dr:
    case MethodKind::maxsw: return norm;
    case MethodKind::w1d:
      if (shift.size() != 1) throw DimensionMismatch("w1d needs a one-dimensional shift");
      return norm;
    case MethodKind::sw: {
      // E|u_1|^p for u uniform on S^{d-1}.
      const double d = static_cast<double>(shift.size());
      const double log_moment = std::lgamma((p + 1) / 2) + std::lgamma(d / 2) - 0.5 * std::log(std::numbers::pi) -
                                std::lgamma((d + p) / 2);
      return norm * std::exp(log_moment / p);
    }
  }
  throw ParameterError("unknown method kind");
}

double relative_error(double contaminated_value, double clean_value) {
  if (!(clean_value > 0.0)) throw DegenerateBaseline("clean distance must be positive");
  return std::abs(contaminated_value - clean_value) / clean_value;
}

std::vector<BenchRow> run_approx_quality(const ExperimentConfig& config) {
  config.validate();
  const std::string experiment(to_string(Experiment::approx_quality));
  std::vector<BenchRow> rows;
  for (Index d : config.dims) {
    GeneratorSpec gen = config.generator;
    gen.d = d;
    const Eigen::VectorXd shift = gen.shift_vector();

    // Cell layout: method-major, then K, then n_alpha (DR only).
    std::vector<Cell> cells;
    std::vector<std::vector<std::size_t>> index(config.methods.size());
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      const auto& method = config.methods[m];
      const bool dr = method.kind == MethodKind::dr;
      for (Index k : config.direction_counts) {
        for (Index l : dr ? config.level_counts : std::vector<Index>{0}) {
          Cell cell;
          cell.row = {experiment, method.id, d, k, l, dr ? method.params.epsilon : 0.0, 0.0, 0.0, "truth"};
          index[m].push_back(cells.size());
          cells.push_back(std::move(cell));
        }
      }
    }

    for (Index rep = 0; rep < config.repetitions; ++rep) {
      const auto rep_seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(rep));
      const auto pair = gen_gaussian_pair(d, gen.n, shift, derive_seed(rep_seed, 0));
      for (std::size_t ki = 0; ki < config.direction_counts.size(); ++ki) {
        const Index k = config.direction_counts[ki];
        const auto dirs = sample_directions<double>(d, k, derive_seed(rep_seed, 1));
        std::map<DepthNotion, std::pair<DepthRegions, DepthRegions>> regions;
        std::map<DepthNotion, double> build_seconds;
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
          const auto& method = config.methods[m];
          if (method.kind == MethodKind::dr) {
            const auto notion = method.params.depth;
            if (!regions.contains(notion)) {
              const auto start = Clock::now();
              regions.emplace(notion, std::pair{DepthRegions(pair.first, dirs, notion),
                                                DepthRegions(pair.second, dirs, notion)});
              build_seconds[notion] = seconds_since(start);
            }
            const auto& [rx, ry] = regions.at(notion);
            for (std::size_t li = 0; li < config.level_counts.size(); ++li) {
              MetricParams params = method.params;
              params.directions = k;
              params.n_alpha = config.level_counts[li];
              params.seed = derive_seed(rep_seed, 2);
              Outcome o;
              const auto start = Clock::now();
              try {
                o.value = dr_distance(rx, ry, params).value;
                o.ok = true;
              } catch (const Error&) {
              }
              o.seconds = build_seconds[notion] + seconds_since(start);
              record(cells[index[m][ki * config.level_counts.size() + li]], o,
                     {translation_distance(method.kind, method.params.p, shift), 0.0, true});
            }
          } else {
            std::vector<MethodSpec> one{method};
            const auto o = evaluate_methods(pair, one, k, derive_seed(rep_seed, 3));
            record(cells[index[m][ki]], o.front(), {translation_distance(method.kind, method.params.p, shift), 0.0, true});
          }
        }
      }
    }
    auto finished = finish_all(cells);
    rows.insert(rows.end(), finished.begin(), finished.end());
  }
  return rows;
}

std::vector<BenchRow> run_robustness_outliers(const ExperimentConfig& config) {
  config.validate();
  const std::string experiment(to_string(Experiment::robustness_outliers));
  const auto& methods = config.methods;
  const Index d = config.generator.family == Family::fragmented_hypercube ||
                          config.generator.family == Family::circles
                      ? 2
                      : config.generator.d;

  std::vector<Cell> cells;
  for (const auto& m : methods)
    for (double f : config.fractions) {
      Cell cell;
      cell.row = {experiment, m.id, d, m.params.directions, m.kind == MethodKind::dr ? m.params.n_alpha : 0,
                  m.kind == MethodKind::dr ? m.params.epsilon : 0.0, f, 0.0, "clean"};
      cells.push_back(std::move(cell));
    }
  const std::size_t nf = config.fractions.size();

  for (Index rep = 0; rep < config.repetitions; ++rep) {
    const auto rep_seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(rep));
    GeneratorSpec gen = config.generator;
    gen.seed = derive_seed(rep_seed, 0);
    const auto pair = generate(gen);
    const auto method_seed = derive_seed(rep_seed, 1);
    const auto clean = evaluate_methods(pair, methods, 0, method_seed);

    for (std::size_t fi = 0; fi < nf; ++fi) {
      ContaminationSpec spec;
      spec.scheme = config.scheme;
      spec.fraction = config.fractions[fi];
      spec.box_lower = config.box_lower;
      spec.box_upper = config.box_upper;
      spec.seed = derive_seed(rep_seed, 100 + 2 * fi);
      CloudPair dirty{contaminate(pair.first, spec), pair.second};
      if (config.contaminate_both) {
        spec.seed = derive_seed(rep_seed, 101 + 2 * fi);
        dirty.second = contaminate(pair.second, spec);
      }
      const auto values = evaluate_methods(dirty, methods, 0, method_seed);
      for (std::size_t m = 0; m < methods.size(); ++m) record(cells[m * nf + fi], values[m], clean[m]);
    }
  }
  return finish_all(cells);
}

std::vector<BenchRow> run_heavy_tails(const ExperimentConfig& config) {
  config.validate();
  const std::string experiment(to_string(Experiment::heavy_tails));
  const auto& methods = config.methods;
  const auto& gen = config.generator;
  if (gen.shift.size() != 1) throw ParameterError("heavy_tails takes a scalar shift");
  const double shift = gen.shift[0];
  const std::size_t nk = config.direction_counts.size(), nd = config.dofs.size();

  // Cell layout: method, dof, K.
  std::vector<Cell> cells;
  for (const auto& m : methods)
    for (double dof : config.dofs)
      for (Index k : config.direction_counts) {
        Cell cell;
        cell.row = {experiment, m.id, gen.d, k, m.kind == MethodKind::dr ? m.params.n_alpha : 0,
                    m.kind == MethodKind::dr ? m.params.epsilon : 0.0, 0.0, dof, "gaussian_population"};
        cells.push_back(std::move(cell));
      }

  // Clean reference: the population distance between two Gaussians translated
  // by the same shift, which every method targets.
  const Eigen::VectorXd shift_vec = Eigen::VectorXd::Constant(gen.d, shift);
  std::vector<Outcome> clean;
  for (const auto& m : methods) clean.push_back({translation_distance(m.kind, m.params.p, shift_vec), 0.0, true});

  for (Index rep = 0; rep < config.repetitions; ++rep) {
    const auto rep_seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(rep));
    std::vector<CloudPair> pairs;
    for (double dof : config.dofs) pairs.push_back(gen_student_pair(gen.d, gen.n, dof, shift, derive_seed(rep_seed, 0)));
    const auto method_seed = derive_seed(rep_seed, 1);
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const Index k = config.direction_counts[ki];
      for (std::size_t di = 0; di < nd; ++di) {
        const auto values = evaluate_methods(pairs[di], methods, k, method_seed);
        for (std::size_t m = 0; m < methods.size(); ++m)
          record(cells[(m * nd + di) * nk + ki], values[m], clean[m]);
      }
    }
  }
  return finish_all(cells);
}

std::vector<BenchRow> run_experiment(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::approx_quality: return run_approx_quality(config);
    case Experiment::robustness_outliers: return run_robustness_outliers(config);
    case Experiment::heavy_tails: return run_heavy_tails(config);
  }
  throw ParameterError("unknown experiment");
}

void write_rows_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool timing) {
  out << "experiment,method,d,K,n_alpha,epsilon,fraction,dof,baseline,mean_rel_error,std_rel_error,runs,failures";
  if (timing) out << ",seconds_per_eval";
  out << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.method << ',' << r.d << ',' << r.directions << ',' << r.n_alpha << ','
        << format_double(r.epsilon) << ',' << format_double(r.fraction) << ',' << format_double(r.dof) << ','
        << r.baseline << ',' << format_double(r.mean_rel_error) << ',' << format_double(r.std_rel_error) << ','
        << r.runs << ',' << r.failures;
    if (timing) out << ',' << format_double(r.seconds_per_eval);
    out << '\n';
  }
}

void write_rows_json(std::ostream& out, const std::vector<BenchRow>& rows, bool timing) {
  using nlohmann::ordered_json;
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["experiment"] = r.experiment;
    j["method"] = r.method;
    j["d"] = r.d;
    j["K"] = r.directions;
    j["n_alpha"] = r.n_alpha;
    j["epsilon"] = r.epsilon;
    j["fraction"] = r.fraction;
    j["dof"] = std::isinf(r.dof) ? ordered_json("inf") : ordered_json(r.dof);
    j["baseline"] = r.baseline;
    j["mean_rel_error"] = r.mean_rel_error;
    j["std_rel_error"] = r.std_rel_error;
    j["runs"] = r.runs;
    j["failures"] = r.failures;
    if (timing) j["seconds_per_eval"] = r.seconds_per_eval;
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

}  // namespace depthdist

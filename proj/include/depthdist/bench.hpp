#pragma once

// Experiment harness: approximation quality against a known Gaussian target,
// robustness to outliers, and robustness to heavy tails.

#include "depthdist/metrics.hpp"
#include "depthdist/synthdata.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace depthdist {

enum class Experiment { approx_quality, robustness_outliers, heavy_tails };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

enum class MethodKind { dr, sw, maxsw, w1d };

struct MethodSpec {
  std::string id;
  MethodKind kind = MethodKind::dr;
  MetricParams params;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::approx_quality;
  std::vector<MethodSpec> methods;
  GeneratorSpec generator;
  Index repetitions = 100;
  std::uint64_t base_seed = 0;

  // approx_quality grid (cross product); heavy_tails sweeps `direction_counts`.
  std::vector<Index> dims;
  std::vector<Index> direction_counts;
  std::vector<Index> level_counts;

  // robustness_outliers
  std::vector<double> fractions;
  ContaminationScheme scheme = ContaminationScheme::uniform_box;
  Eigen::VectorXd box_lower = Eigen::VectorXd::Constant(1, -10.0);
  Eigen::VectorXd box_upper = Eigen::VectorXd::Constant(1, 20.0);
  bool contaminate_both = true;

  // heavy_tails
  std::vector<double> dofs;

  void validate() const;
};

/// Defaults reproducing the published desk-scale settings of each experiment.
ExperimentConfig default_config(Experiment experiment);

/// Reads a JSON config; absent keys keep default_config(experiment) values.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct BenchRow {
  std::string experiment;
  std::string method;
  Index d = 0;
  Index directions = 0;
  Index n_alpha = 0;
  double epsilon = 0.0;
  double fraction = 0.0;
  double dof = 0.0;
  /// Reference each relative error is measured against.
  std::string baseline;
  double mean_rel_error = 0.0;
  double std_rel_error = 0.0;
  double seconds_per_eval = 0.0;
  Index runs = 0;
  Index failures = 0;
};

/// Population value of a method between two copies of one symmetric law
/// translated by `shift`: ||shift|| for DR and max-SW, the sphere average
/// (E|<u, shift>|^p)^{1/p} for SW, |shift| for the 1D Wasserstein distance.
double translation_distance(MethodKind kind, double p, const Eigen::VectorXd& shift);

/// |contaminated - clean| / clean; throws DegenerateBaseline when clean <= 0.
double relative_error(double contaminated_value, double clean_value);

std::vector<BenchRow> run_approx_quality(const ExperimentConfig& config);
std::vector<BenchRow> run_robustness_outliers(const ExperimentConfig& config);
std::vector<BenchRow> run_heavy_tails(const ExperimentConfig& config);
std::vector<BenchRow> run_experiment(const ExperimentConfig& config);

/// Long-format tables. Timing is wall-clock and therefore omitted unless asked for.
void write_rows_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool timing = false);
void write_rows_json(std::ostream& out, const std::vector<BenchRow>& rows, bool timing = false);

}  // namespace depthdist

#pragma once

// Depth-based distances between empirical distributions (depth-region
// Hausdorff average DR and depth-field L^p distance DD), their one-dimensional
// closed forms, and sliced Wasserstein baselines.

#include "depthdist/depth.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depthdist {

/// How the depth levels alpha_1..alpha_n are chosen on [epsilon, upper].
enum class LevelSchedule {
  monte_carlo,  ///< i.i.d. uniform draws (default)
  grid,         ///< midpoints of n_alpha equal cells
};

struct MetricParams {
  double p = 2.0;
  double epsilon = 0.2;
  Index n_alpha = 20;
  Index directions = 1000;
  std::uint64_t seed = 0;
  DepthNotion depth = DepthNotion::halfspace;
  LevelSchedule schedule = LevelSchedule::monte_carlo;
  /// Integrate up to alpha* - epsilon instead of alpha*.
  bool trim_upper = false;

  /// Throws ParameterError unless p >= 1, 0 <= epsilon < 1, n_alpha >= 1, directions >= 1.
  void validate() const;
};

struct LevelSample {
  double alpha;
  double hausdorff;
};

struct DistanceResult {
  std::string method;
  double value = 0.0;
  /// min of the two samples' maximal depths; set for DR only.
  std::optional<double> alpha_star;
  std::vector<LevelSample> levels;
  MetricParams params;
};

/// Axis-aligned integration domain for DD.
struct IntegrationBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Index mc_points = 100000;

  double volume() const;
  void validate(Index d) const;

  /// Bounding box of X and Y, widened by `inflate` times its extent on each side.
  static IntegrationBox bounding(const PointCloud& x, const PointCloud& y, double inflate = 0.1,
                                 Index mc_points = 100000);
};

/// Depth-sorted view of one sample on a fixed direction set: the depth of every
/// point and the sample reordered by decreasing depth, so that every upper
/// level set {i : D_i > alpha} is a prefix.
class DepthRegions {
 public:
  DepthRegions(const PointCloud& points, DirectionSet<double> dirs, DepthNotion notion);

  const DepthProfile& depths() const { return depths_; }
  const DirectionSet<double>& directions() const { return dirs_; }
  double max_depth() const { return depths_.max(); }

  /// #{i : D_i > level}; if that is empty, the number of points of maximal depth.
  Index region_size(double level) const;

  /// Support values of each level region on every direction: row l holds
  /// h_{D^{levels[l]}}(u_k), k = 0..K-1.
  RowMatrix<double> support_matrix(std::span<const double> levels) const;

 private:
  DirectionSet<double> dirs_;
  DepthProfile depths_;
  PointCloud by_depth_;
  std::vector<double> sorted_depths_;  // decreasing
};

/// Per-level Hausdorff distances max_k |hx(l,k) - hy(l,k)|.
std::vector<double> level_hausdorff(const RowMatrix<double>& hx, const RowMatrix<double>& hy);

/// alpha levels on [lower, upper] following `schedule`; reproducible from seed.
std::vector<double> draw_levels(LevelSchedule schedule, double lower, double upper, Index count,
                                std::uint64_t seed);

/// DR_{p,eps} on explicit levels: (mean_l H_l^p)^{1/p}.
DistanceResult dr_at_levels(const DepthRegions& x, const DepthRegions& y,
                            std::span<const double> levels, double p);

/// Monte Carlo depth-region distance. Both samples share one direction set;
/// levels are drawn on [eps, alpha*] with alpha* = min(max D^X, max D^Y).
/// Throws LevelRangeError when eps >= alpha* (or >= alpha* - eps with trim_upper).
DistanceResult dr_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params);
DistanceResult dr_distance(const PointCloud& x, const PointCloud& y, const DirectionSet<double>& dirs,
                           const MetricParams& params);
DistanceResult dr_distance(const DepthRegions& x, const DepthRegions& y, const MetricParams& params);

/// Monte Carlo L^p distance between the two halfspace-depth fields over `box`:
/// (Vol * mean |D_X(z) - D_Y(z)|^p)^{1/p}.
DistanceResult dd_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params,
                           const IntegrationBox& box);
DistanceResult dd_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params);

/// Exact 1D depth-region distance with halfspace depth and alpha* = 1/2:
/// ( (1/(1/2 - eps)) * int_eps^{1/2} max(|qX(1-a) - qY(1-a)|, |qX(a) - qY(a)|)^p da )^{1/p}.
/// The integrand is piecewise constant, so the integral is evaluated exactly.
double dr_1d_closed_form(std::span<const double> x, std::span<const double> y, double p, double epsilon);

/// Exact 1D depth-field distance (int |HD_X(t) - HD_Y(t)|^p dt)^{1/p} over R with
/// HD(t) = min(F(t), 1 - F(t-)).
double dd_1d_closed_form(std::span<const double> x, std::span<const double> y, double p);

/// Quantile-coupling p-Wasserstein distance between two 1D samples.
double wasserstein_1d(std::span<const double> x, std::span<const double> y, double p);

/// Same as wasserstein_1d for inputs already sorted ascending.
double wasserstein_1d_sorted(std::span<const double> x, std::span<const double> y, double p);

enum class SlicedMode { mean, max };

double sliced_wasserstein(const PointCloud& x, const PointCloud& y, double p, Index directions,
                          std::uint64_t seed, SlicedMode mode);
double sliced_wasserstein(const PointCloud& x, const PointCloud& y, double p,
                          const DirectionSet<double>& dirs, SlicedMode mode);

}  // namespace depthdist

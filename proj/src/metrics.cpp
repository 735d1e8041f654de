#include "depthdist/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace depthdist {

namespace {

// Stream indices for seeds derived from MetricParams::seed. Directions use the
// seed itself so that sample_directions(d, K, seed) reproduces them.
constexpr std::uint64_t kLevelStream = 1;
constexpr std::uint64_t kBoxStream = 2;

void check_same_dim(const PointCloud& x, const PointCloud& y) {
  if (x.cols() != y.cols())
    throw DimensionMismatch("samples have dimensions " + std::to_string(x.cols()) + " and " +
                            std::to_string(y.cols()));
  if (x.rows() < 1 || y.rows() < 1) throw ParameterError("samples must be non-empty");
}

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError("p must be a finite real >= 1");
}

double power(double v, double p) { return p == 1.0 ? v : (p == 2.0 ? v * v : std::pow(v, p)); }

double root(double v, double p) { return p == 1.0 ? v : (p == 2.0 ? std::sqrt(v) : std::pow(v, 1.0 / p)); }

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void MetricParams::validate() const {
  check_p(p);
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in [0, 1)");
  if (n_alpha < 1) throw ParameterError("n_alpha must be >= 1");
  if (directions < 1) throw ParameterError("number of directions must be >= 1");
}

// ---------------------------------------------------------------------------
// Integration box

double IntegrationBox::volume() const { return (upper - lower).prod(); }

void IntegrationBox::validate(Index d) const {
  if (lower.size() != d || upper.size() != d)
    throw DimensionMismatch("integration box has dimension " + std::to_string(lower.size()) +
                            ", samples have dimension " + std::to_string(d));
  if (mc_points < 1) throw ParameterError("mc_points must be >= 1");
  for (Index j = 0; j < d; ++j)
    if (!(lower[j] < upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw ParameterError("degenerate integration box in coordinate " + std::to_string(j));
}

IntegrationBox IntegrationBox::bounding(const PointCloud& x, const PointCloud& y, double inflate,
                                        Index mc_points) {
  check_same_dim(x, y);
  IntegrationBox box;
  box.mc_points = mc_points;
  box.lower = x.colwise().minCoeff().cwiseMin(y.colwise().minCoeff()).transpose();
  box.upper = x.colwise().maxCoeff().cwiseMax(y.colwise().maxCoeff()).transpose();
  for (Index j = 0; j < box.lower.size(); ++j) {
    const double extent = box.upper[j] - box.lower[j];
    // Zero extent: fall back to a unit-width box around the common value.
    const double pad = extent > 0 ? inflate * extent : 0.5;
    box.lower[j] -= pad;
    box.upper[j] += pad;
  }
  return box;
}

// ---------------------------------------------------------------------------
// Depth regions

DepthRegions::DepthRegions(const PointCloud& points, DirectionSet<double> dirs, DepthNotion notion)
    : dirs_(std::move(dirs)) {
  if (points.rows() < 1) throw ParameterError("depth regions of an empty sample");
  depths_ = depth_profile(points, dirs_, notion);

  const Index n = points.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto& d = depths_.values;
  std::stable_sort(order.begin(), order.end(), [&d](Index a, Index b) { return d[a] > d[b]; });

  by_depth_.resize(n, points.cols());
  sorted_depths_.resize(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    by_depth_.row(r) = points.row(order[r]);
    sorted_depths_[r] = d[order[r]];
  }
}

Index DepthRegions::region_size(double level) const {
  auto above = std::partition_point(sorted_depths_.begin(), sorted_depths_.end(),
                                    [level](double v) { return v > level; });
  if (above != sorted_depths_.begin()) return above - sorted_depths_.begin();
  const double top = sorted_depths_.front();
  return std::partition_point(sorted_depths_.begin(), sorted_depths_.end(),
                              [top](double v) { return v >= top; }) -
         sorted_depths_.begin();
}

RowMatrix<double> DepthRegions::support_matrix(std::span<const double> levels) const {
  const auto count = static_cast<Index>(levels.size());
  std::vector<Index> sizes(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) sizes[l] = region_size(levels[l]);

  std::vector<Index> by_size(levels.size());
  std::iota(by_size.begin(), by_size.end(), Index{0});
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&sizes](Index a, Index b) { return sizes[a] < sizes[b]; });
  const Index largest = count ? sizes[by_size.back()] : 0;

  RowMatrix<double> out(count, dirs_.count());
  if (count == 0) return out;
  const auto head = by_depth_.topRows(largest);
  const Index block = detail::kDirectionBlock;
  parallel_for(0, dirs_.count(), block, [&](Index lo, Index hi, unsigned) {
    RowMatrix<double> tile;
    for (Index k = lo; k < hi; k += block) {
      const Index rows = std::min(block, hi - k);
      detail::project_block(head, dirs_, k, rows, tile);
      for (Index r = 0; r < rows; ++r) {
        const double* row = tile.row(r).data();
        double running = -std::numeric_limits<double>::infinity();
        Index seen = 0;
        for (Index l : by_size) {
          for (; seen < sizes[l]; ++seen) running = std::max(running, row[seen]);
          out(l, k + r) = running;
        }
      }
    }
  });
  return out;
}

std::vector<double> level_hausdorff(const RowMatrix<double>& hx, const RowMatrix<double>& hy) {
  if (hx.rows() != hy.rows() || hx.cols() != hy.cols())
    throw DimensionMismatch("support matrices have different shapes");
  std::vector<double> out(static_cast<std::size_t>(hx.rows()));
  for (Index l = 0; l < hx.rows(); ++l) out[l] = (hx.row(l) - hy.row(l)).cwiseAbs().maxCoeff();
  return out;
}

std::vector<double> draw_levels(LevelSchedule schedule, double lower, double upper, Index count,
                                std::uint64_t seed) {
  if (count < 1) throw ParameterError("level count must be >= 1");
  std::vector<double> levels(static_cast<std::size_t>(count));
  if (schedule == LevelSchedule::grid) {
    const double step = (upper - lower) / static_cast<double>(count);
    for (Index l = 0; l < count; ++l) levels[l] = lower + (static_cast<double>(l) + 0.5) * step;
  } else {
    Rng rng(seed);
    for (auto& a : levels) a = uniform(rng, lower, upper);
  }
  return levels;
}

// ---------------------------------------------------------------------------
// DR

DistanceResult dr_at_levels(const DepthRegions& x, const DepthRegions& y,
                            std::span<const double> levels, double p) {
  check_p(p);
  if (levels.empty()) throw ParameterError("at least one depth level is required");
  if (x.directions().fingerprint() != y.directions().fingerprint())
    throw ParameterError("depth regions were built on different direction sets");
  const auto haus = level_hausdorff(x.support_matrix(levels), y.support_matrix(levels));

  DistanceResult result;
  result.method = "dr";
  result.levels.reserve(levels.size());
  double total = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    total += power(haus[l], p);
    result.levels.push_back({levels[l], haus[l]});
  }
  result.value = root(total / static_cast<double>(levels.size()), p);
  result.params.p = p;
  result.params.n_alpha = static_cast<Index>(levels.size());
  result.params.directions = x.directions().count();
  result.params.depth = x.depths().notion;
  return result;
}

DistanceResult dr_distance(const DepthRegions& x, const DepthRegions& y, const MetricParams& params) {
  params.validate();
  const double alpha_star = std::min(x.max_depth(), y.max_depth());
  const double upper = params.trim_upper ? alpha_star - params.epsilon : alpha_star;
  if (!(params.epsilon < upper)) {
    std::ostringstream msg;
    msg << "epsilon = " << params.epsilon << " is not below the upper depth level " << upper
        << " (alpha* = " << alpha_star << "); the samples are too shallow for this trimming";
    throw LevelRangeError(msg.str());
  }
  const auto levels = draw_levels(params.schedule, params.epsilon, upper, params.n_alpha,
                                  derive_seed(params.seed, kLevelStream));
  DistanceResult result = dr_at_levels(x, y, levels, params.p);
  result.alpha_star = alpha_star;
  result.params = params;
  result.params.directions = x.directions().count();
  result.params.depth = x.depths().notion;
  return result;
}

DistanceResult dr_distance(const PointCloud& x, const PointCloud& y, const DirectionSet<double>& dirs,
                           const MetricParams& params) {
  params.validate();
  check_same_dim(x, y);
  if (x.cols() != dirs.dim())
    throw DimensionMismatch("directions have dimension " + std::to_string(dirs.dim()) +
                            ", samples have dimension " + std::to_string(x.cols()));
  const DepthRegions rx(x, dirs, params.depth);
  const DepthRegions ry(y, dirs, params.depth);
  return dr_distance(rx, ry, params);
}

DistanceResult dr_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params) {
  params.validate();
  check_same_dim(x, y);
  return dr_distance(x, y, sample_directions<double>(x.cols(), params.directions, params.seed), params);
}

// ---------------------------------------------------------------------------
// DD

namespace {

RowMatrix<double> sorted_projections(const PointCloud& points, const DirectionSet<double>& dirs) {
  RowMatrix<double> m = project(points, dirs).values;
  parallel_for(0, m.rows(), 16, [&](Index lo, Index hi, unsigned) {
    for (Index k = lo; k < hi; ++k) std::sort(m.row(k).data(), m.row(k).data() + m.cols());
  });
  return m;
}

double depth_in_sorted(const double* z, const RowMatrix<double>& sorted) {
  const Index n = sorted.cols();
  Index best = n;
  for (Index k = 0; k < sorted.rows() && best > 0; ++k) {
    const double* row = sorted.row(k).data();
    const Index le = std::upper_bound(row, row + n, z[k]) - row;
    const Index ge = n - (std::lower_bound(row, row + n, z[k]) - row);
    best = std::min({best, le, ge});
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace

DistanceResult dd_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params,
                           const IntegrationBox& box) {
  params.validate();
  if (params.depth != DepthNotion::halfspace)
    throw ParameterError("dd_distance supports halfspace depth only");
  check_same_dim(x, y);
  const Index d = x.cols();
  box.validate(d);

  const auto dirs = sample_directions<double>(d, params.directions, params.seed);
  const auto sx = sorted_projections(x, dirs);
  const auto sy = sorted_projections(y, dirs);

  Rng rng(derive_seed(params.seed, kBoxStream));
  constexpr Index chunk = 4096;
  PointCloud z;
  Eigen::MatrixXd zp;
  std::vector<double> terms;
  double total = 0.0;
  for (Index start = 0; start < box.mc_points; start += chunk) {
    const Index count = std::min(chunk, box.mc_points - start);
    z.resize(count, d);
    for (Index i = 0; i < count; ++i)
      for (Index j = 0; j < d; ++j) z(i, j) = uniform(rng, box.lower[j], box.upper[j]);
    zp.noalias() = dirs.directions * z.transpose();
    terms.assign(static_cast<std::size_t>(count), 0.0);
    parallel_for(0, count, 256, [&](Index lo, Index hi, unsigned) {
      for (Index i = lo; i < hi; ++i) {
        const double* col = zp.col(i).data();
        terms[i] = power(std::abs(depth_in_sorted(col, sx) - depth_in_sorted(col, sy)), params.p);
      }
    });
    for (double t : terms) total += t;
  }

  DistanceResult result;
  result.method = "dd";
  result.value = root(box.volume() * total / static_cast<double>(box.mc_points), params.p);
  result.params = params;
  return result;
}

DistanceResult dd_distance(const PointCloud& x, const PointCloud& y, const MetricParams& params) {
  return dd_distance(x, y, params, IntegrationBox::bounding(x, y));
}

// ---------------------------------------------------------------------------
// One-dimensional closed forms

double dr_1d_closed_form(std::span<const double> x, std::span<const double> y, double p, double epsilon) {
  check_p(p);
  if (x.empty() || y.empty()) throw ParameterError("closed form needs non-empty samples");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ParameterError("epsilon must lie in [0, 1/2)");
  const auto xs = sorted_copy(x), ys = sorted_copy(y);
  const auto n = static_cast<Index>(xs.size()), m = static_cast<Index>(ys.size());

  std::vector<double> cuts{epsilon, 0.5};
  for (Index size : {n, m})
    for (Index j = 1; 2 * j < size; ++j) {
      const double a = static_cast<double>(j) / static_cast<double>(size);
      if (a > epsilon) cuts.push_back(a);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto quantile = [](const std::vector<double>& s, double q) {
    const auto size = static_cast<Index>(s.size());
    const Index idx = std::clamp<Index>(static_cast<Index>(std::ceil(q * static_cast<double>(size))) - 1,
                                        0, size - 1);
    return s[idx];
  };

  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double a = cuts[j], b = cuts[j + 1];
    const double mid = 0.5 * (a + b);
    const double low = std::abs(quantile(xs, mid) - quantile(ys, mid));
    const double high = std::abs(quantile(xs, 1.0 - mid) - quantile(ys, 1.0 - mid));
    total += power(std::max(low, high), p) * (b - a);
  }
  return root(total / (0.5 - epsilon), p);
}

double dd_1d_closed_form(std::span<const double> x, std::span<const double> y, double p) {
  check_p(p);
  if (x.empty() || y.empty()) throw ParameterError("closed form needs non-empty samples");
  const auto xs = sorted_copy(x), ys = sorted_copy(y);
  std::vector<double> cuts(xs);
  cuts.insert(cuts.end(), ys.begin(), ys.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  auto depth = [](double below, double size) { return std::min(below, size - below) / size; };
  double total = 0.0;
  std::size_t ix = 0, iy = 0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    // Open interval (cuts[j], cuts[j+1]) holds no sample value.
    while (ix < xs.size() && xs[ix] <= cuts[j]) ++ix;
    while (iy < ys.size() && ys[iy] <= cuts[j]) ++iy;
    const double gap = std::abs(depth(static_cast<double>(ix), nx) - depth(static_cast<double>(iy), ny));
    total += power(gap, p) * (cuts[j + 1] - cuts[j]);
  }
  return root(total, p);
}

double wasserstein_1d_sorted(std::span<const double> x, std::span<const double> y, double p) {
  check_p(p);
  if (x.empty() || y.empty()) throw ParameterError("wasserstein_1d needs non-empty samples");
  const std::size_t n = x.size(), m = y.size();
  double total = 0.0;
  if (n == m) {
    for (std::size_t i = 0; i < n; ++i) total += power(std::abs(x[i] - y[i]), p);
    return root(total / static_cast<double>(n), p);
  }
  // Quantile functions are constant on ((i)/n, (i+1)/n] and ((j)/m, (j+1)/m];
  // positions are tracked in units of 1/(n*m) to keep the cell boundaries exact.
  const auto scale = static_cast<double>(n) * static_cast<double>(m);
  std::size_t i = 0, j = 0;
  std::uint64_t previous = 0;
  while (i < n && j < m) {
    const std::uint64_t end_x = (i + 1) * m, end_y = (j + 1) * n;
    const std::uint64_t next = std::min(end_x, end_y);
    total += power(std::abs(x[i] - y[j]), p) * static_cast<double>(next - previous) / scale;
    previous = next;
    if (end_x == next) ++i;
    if (end_y == next) ++j;
  }
  return root(total, p);
}

double wasserstein_1d(std::span<const double> x, std::span<const double> y, double p) {
  const auto xs = sorted_copy(x), ys = sorted_copy(y);
  return wasserstein_1d_sorted(xs, ys, p);
}

// ---------------------------------------------------------------------------
// Sliced Wasserstein

double sliced_wasserstein(const PointCloud& x, const PointCloud& y, double p,
                          const DirectionSet<double>& dirs, SlicedMode mode) {
  check_p(p);
  check_same_dim(x, y);
  if (x.cols() != dirs.dim())
    throw DimensionMismatch("directions have dimension " + std::to_string(dirs.dim()) +
                            ", samples have dimension " + std::to_string(x.cols()));
  std::vector<double> per_direction(static_cast<std::size_t>(dirs.count()));
  const Index block = detail::kDirectionBlock;
  parallel_for(0, dirs.count(), block, [&](Index lo, Index hi, unsigned) {
    RowMatrix<double> tx, ty;
    for (Index k = lo; k < hi; k += block) {
      const Index rows = std::min(block, hi - k);
      detail::project_block(x, dirs, k, rows, tx);
      detail::project_block(y, dirs, k, rows, ty);
      for (Index r = 0; r < rows; ++r) {
        double* px = tx.row(r).data();
        double* py = ty.row(r).data();
        std::sort(px, px + tx.cols());
        std::sort(py, py + ty.cols());
        per_direction[k + r] = wasserstein_1d_sorted({px, static_cast<std::size_t>(tx.cols())},
                                                     {py, static_cast<std::size_t>(ty.cols())}, p);
      }
    }
  });
  if (mode == SlicedMode::max) return *std::max_element(per_direction.begin(), per_direction.end());
  double total = 0.0;
  for (double w : per_direction) total += power(w, p);
  return root(total / static_cast<double>(per_direction.size()), p);
}

double sliced_wasserstein(const PointCloud& x, const PointCloud& y, double p, Index directions,
                          std::uint64_t seed, SlicedMode mode) {
  check_same_dim(x, y);
  if (directions < 1) throw ParameterError("number of directions must be >= 1");
  return sliced_wasserstein(x, y, p, sample_directions<double>(x.cols(), directions, seed), mode);
}

}  // namespace depthdist

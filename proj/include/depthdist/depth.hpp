#pragma once

// Random-projection approximations of halfspace (Tukey) depth and projection
// depth, plus an exact planar halfspace depth used as a reference.

#include "depthdist/geometry.hpp"

#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

namespace depthdist {

/// Per-point depth of a sample w.r.t. its own empirical distribution.
struct DepthProfile {
  Eigen::VectorXd values;
  DepthNotion notion = DepthNotion::halfspace;
  Index directions = 0;
  Index points() const { return values.size(); }
  double max() const { return values.size() ? values.maxCoeff() : 0.0; }
};

struct DepthParams {
  DepthNotion notion = DepthNotion::halfspace;
  Index directions = 1000;
  std::uint64_t seed = 0;
};

namespace detail {

/// Folds one projected row into the running minimum of two-sided counts
/// min(#{j : v_j <= v_i}, #{j : v_j >= v_i}). Tied values share both counts.
template <typename Scalar>
void fold_halfspace_row(const Scalar* row, Index n, std::vector<std::pair<Scalar, Index>>& scratch,
                        Index* min_count) {
  scratch.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) scratch[i] = {row[i], i};
  std::sort(scratch.begin(), scratch.end());
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && scratch[stop].first == scratch[start].first) ++stop;
    const Index count = std::min(stop, n - start);
    for (Index j = start; j < stop; ++j) {
      Index& slot = min_count[scratch[j].second];
      slot = std::min(slot, count);
    }
    start = stop;
  }
}

/// Median with the even-length convention (midpoint of the central pair).
/// Reorders `values`.
template <typename Scalar>
Scalar median_inplace(std::span<Scalar> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const Scalar upper = values[mid];
  if (n % 2 == 1) return upper;
  const Scalar lower = *std::max_element(values.begin(), values.begin() + mid);
  return std::midpoint(lower, upper);
}

/// Folds one projected row into the running maximum of the standardized
/// outlyingness |v_i - med| / MAD. A zero MAD maps zero deviations to 0 and
/// any other deviation to +inf.
template <typename Scalar>
void fold_projection_row(const Scalar* row, Index n, std::vector<Scalar>& scratch,
                         double* max_outlyingness) {
  scratch.assign(row, row + n);
  const Scalar med = median_inplace(std::span<Scalar>(scratch));
  for (Index i = 0; i < n; ++i) scratch[i] = std::abs(row[i] - med);
  const Scalar mad = median_inplace(std::span<Scalar>(scratch));
  for (Index i = 0; i < n; ++i) {
    const double dev = static_cast<double>(std::abs(row[i] - med));
    double v;
    if (mad > 0)
      v = dev / static_cast<double>(mad);
    else
      v = dev == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    max_outlyingness[i] = std::max(max_outlyingness[i], v);
  }
}

/// Runs `fold(row_ptr, worker)` over every row produced by `rows(lo, hi, tile)`
/// and returns per-worker state merged with `merge`.
template <typename State, typename Produce, typename Fold, typename Merge>
State reduce_rows(Index row_count, State init, Produce&& produce, Fold&& fold, Merge&& merge) {
  const Index block = kDirectionBlock;
  const unsigned workers = worker_count(row_count, block);
  std::vector<State> partial(workers, init);
  parallel_for(0, row_count, block, [&](Index lo, Index hi, unsigned worker) {
    produce(lo, hi, [&](const auto* row, Index n) { fold(row, n, partial[worker], worker); });
  });
  State out = std::move(partial.front());
  for (std::size_t w = 1; w < partial.size(); ++w) merge(out, partial[w]);
  return out;
}

inline void merge_min(std::vector<Index>& a, const std::vector<Index>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min(a[i], b[i]);
}

inline void merge_max(std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::max(a[i], b[i]);
}

inline Eigen::VectorXd counts_to_depths(const std::vector<Index>& counts) {
  const auto n = static_cast<double>(counts.size());
  Eigen::VectorXd d(static_cast<Index>(counts.size()));
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / n;
  return d;
}

inline Eigen::VectorXd outlyingness_to_depths(const std::vector<double>& v) {
  Eigen::VectorXd d(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = 1.0 / (1.0 + v[i]);
  return d;
}

template <typename Scalar, typename Produce>
DepthProfile depth_from_rows(Index row_count, Index n, DepthNotion notion, Produce&& produce) {
  if (n < 1) throw ParameterError("depth of an empty sample");
  DepthProfile profile;
  profile.notion = notion;
  profile.directions = row_count;
  const unsigned workers = worker_count(row_count, kDirectionBlock);
  if (notion == DepthNotion::halfspace) {
    std::vector<std::vector<std::pair<Scalar, Index>>> scratch(workers);
    auto counts = reduce_rows(
        row_count, std::vector<Index>(static_cast<std::size_t>(n), n), produce,
        [&](const Scalar* row, Index len, std::vector<Index>& state, unsigned w) {
          fold_halfspace_row(row, len, scratch[w], state.data());
        },
        merge_min);
    profile.values = counts_to_depths(counts);
  } else {
    std::vector<std::vector<Scalar>> scratch(workers);
    auto outlying = reduce_rows(
        row_count, std::vector<double>(static_cast<std::size_t>(n), 0.0), produce,
        [&](const Scalar* row, Index len, std::vector<double>& state, unsigned w) {
          fold_projection_row(row, len, scratch[w], state.data());
        },
        merge_max);
    profile.values = outlyingness_to_depths(outlying);
  }
  return profile;
}

template <typename Scalar>
DepthProfile depth_of_matrix(const ProjectionMatrix<Scalar>& m, DepthNotion notion) {
  return depth_from_rows<Scalar>(
      m.directions(), m.points(), notion, [&](Index lo, Index hi, auto&& visit) {
        for (Index k = lo; k < hi; ++k) visit(m.values.row(k).data(), m.points());
      });
}

}  // namespace detail

/// Halfspace depth of every sample point: min over directions of the two-sided
/// rank min(#{<=}, #{>=}) divided by n. Values are multiples of 1/n in [1/n, 1].
template <typename Scalar>
DepthProfile halfspace_depths(const ProjectionMatrix<Scalar>& m) {
  return detail::depth_of_matrix(m, DepthNotion::halfspace);
}

/// Projection depth of every sample point: min over directions of
/// 1 / (1 + |M[k][i] - med_k| / MAD_k).
template <typename Scalar>
DepthProfile projection_depths(const ProjectionMatrix<Scalar>& m) {
  return detail::depth_of_matrix(m, DepthNotion::projection);
}

/// Same result as {halfspace,projection}_depths(project(points, dirs)) without
/// materializing the K x n projection matrix.
template <typename Derived, typename Scalar>
DepthProfile depth_profile(const Eigen::MatrixBase<Derived>& points, const DirectionSet<Scalar>& dirs,
                           DepthNotion notion) {
  if (points.cols() != dirs.dim())
    throw DimensionMismatch("points have dimension " + std::to_string(points.cols()) +
                            ", directions have dimension " + std::to_string(dirs.dim()));
  const Index n = points.rows();
  return detail::depth_from_rows<Scalar>(
      dirs.count(), n, notion, [&](Index lo, Index hi, auto&& visit) {
        RowMatrix<Scalar> tile;
        for (Index k = lo; k < hi; k += detail::kDirectionBlock) {
          const Index rows = std::min(detail::kDirectionBlock, hi - k);
          detail::project_block(points, dirs, k, rows, tile);
          for (Index r = 0; r < rows; ++r) visit(tile.row(r).data(), n);
        }
      });
}

/// Halfspace depth of an out-of-sample point given its projections z_k = <u_k, z>:
/// min over k of min(#{i : M[k][i] <= z_k}, #{i : M[k][i] >= z_k}) / n.
/// Zero when z lies outside the projected range on some direction.
template <typename Scalar>
double halfspace_depth_at(std::span<const Scalar> z_projections, const ProjectionMatrix<Scalar>& m) {
  if (static_cast<Index>(z_projections.size()) != m.directions())
    throw DimensionMismatch("query has " + std::to_string(z_projections.size()) +
                            " projections, matrix has " + std::to_string(m.directions()) +
                            " directions");
  const Index n = m.points();
  if (n < 1) throw ParameterError("depth w.r.t. an empty sample");
  Index best = n;
  for (Index k = 0; k < m.directions() && best > 0; ++k) {
    const Scalar z = z_projections[static_cast<std::size_t>(k)];
    const Scalar* row = m.values.row(k).data();
    Index le = 0, ge = 0;
    for (Index i = 0; i < n; ++i) {
      le += row[i] <= z;
      ge += row[i] >= z;
    }
    best = std::min({best, le, ge});
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

/// Exact empirical Tukey depth of a point in the plane. The closed-halfplane
/// count through `point` only changes at normals to (x_i - point), so the
/// minimum is found by evaluating one direction inside every arc between
/// consecutive critical angles (plus the coordinate axes). O(n log n) per query.
template <typename Derived>
double exact_halfspace_depth_2d(const Eigen::Vector2d& point, const Eigen::MatrixBase<Derived>& sample) {
  if (sample.cols() != 2)
    throw DimensionMismatch("exact planar depth needs d = 2, got d = " + std::to_string(sample.cols()));
  const Index n = sample.rows();
  if (n < 1) throw ParameterError("depth w.r.t. an empty sample");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> critical;
  critical.reserve(2 * static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double dx = static_cast<double>(sample(i, 0)) - point.x();
    const double dy = static_cast<double>(sample(i, 1)) - point.y();
    if (dx == 0.0 && dy == 0.0) continue;
    const double theta = std::atan2(dy, dx);
    for (double c : {theta + std::numbers::pi / 2, theta - std::numbers::pi / 2}) {
      c = std::fmod(c, two_pi);
      if (c < 0) c += two_pi;
      critical.push_back(c);
    }
  }

  auto count_at = [&](double angle) {
    const double ux = std::cos(angle), uy = std::sin(angle);
    Index count = 0;
    for (Index i = 0; i < n; ++i) {
      const double dx = static_cast<double>(sample(i, 0)) - point.x();
      const double dy = static_cast<double>(sample(i, 1)) - point.y();
      count += dx * ux + dy * uy >= 0.0;
    }
    return count;
  };

  Index best = n;
  if (critical.empty()) return 1.0;
  std::sort(critical.begin(), critical.end());
  constexpr double min_arc = 1e-12;
  for (std::size_t j = 0; j < critical.size(); ++j) {
    const double a = critical[j];
    const double b = j + 1 < critical.size() ? critical[j + 1] : critical.front() + two_pi;
    if (b - a < min_arc) continue;
    best = std::min(best, count_at(0.5 * (a + b)));
  }
  for (double axis : {0.0, 0.5, 1.0, 1.5}) best = std::min(best, count_at(axis * std::numbers::pi));
  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace depthdist

#pragma once

// Directions on the unit sphere, projections of point clouds onto them, and
// support-function approximations of convex regions spanned by sample points.

#include "depthdist/errors.hpp"
#include "depthdist/parallel.hpp"
#include "depthdist/rng.hpp"
#include "depthdist/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace depthdist {

/// K unit vectors in R^d, stored one per row.
template <typename Scalar = double>
struct DirectionSet {
  RowMatrix<Scalar> directions;
  std::uint64_t seed = 0;

  Index dim() const { return directions.cols(); }
  Index count() const { return directions.rows(); }

  /// FNV-1a over the raw coefficients. Projections and support vectors carry it
  /// so that values computed on different direction sets are never mixed.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t bytes) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
      }
    };
    const Index rows = count(), cols = dim();
    mix(&rows, sizeof rows);
    mix(&cols, sizeof cols);
    mix(directions.data(), sizeof(Scalar) * static_cast<std::size_t>(directions.size()));
    return h;
  }
};

/// K directions uniform on S^{d-1}: normalized standard Gaussian vectors.
/// Direction k depends only on (d, seed, k), so the first K1 directions of a
/// larger set with the same seed form the smaller set.
template <typename Scalar = double>
DirectionSet<Scalar> sample_directions(Index d, Index K, std::uint64_t seed) {
  if (d < 1) throw ParameterError("direction dimension must be >= 1");
  if (K < 1) throw ParameterError("direction count must be >= 1");
  DirectionSet<Scalar> set;
  set.seed = seed;
  set.directions.resize(K, d);
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Vector<double> draw(d);
  for (Index k = 0; k < K; ++k) {
    double norm = 0.0;
    do {
      for (Index j = 0; j < d; ++j) draw[j] = normal(rng);
      norm = draw.norm();
    } while (!(norm > 0.0) || !std::isfinite(norm));
    set.directions.row(k) = (draw / norm).template cast<Scalar>().transpose();
  }
  return set;
}

/// Wraps explicit directions (e.g. a rotated set). Rows must be unit vectors.
template <typename Scalar, typename Derived>
DirectionSet<Scalar> make_direction_set(const Eigen::MatrixBase<Derived>& directions,
                                        std::uint64_t seed = 0) {
  if (directions.rows() < 1 || directions.cols() < 1)
    throw ParameterError("direction set must be non-empty");
  DirectionSet<Scalar> set;
  set.seed = seed;
  set.directions = directions.template cast<Scalar>();
  for (Index k = 0; k < set.count(); ++k) {
    const double norm = static_cast<double>(set.directions.row(k).norm());
    if (std::abs(norm - 1.0) > 1e-9)
      throw ParameterError("direction " + std::to_string(k) + " is not a unit vector");
  }
  return set;
}

/// M[k][i] = <u_k, X_i>, direction-major so that per-direction scans are contiguous.
template <typename Scalar = double>
struct ProjectionMatrix {
  RowMatrix<Scalar> values;
  std::uint64_t direction_set_id = 0;

  Index directions() const { return values.rows(); }
  Index points() const { return values.cols(); }
};

/// Approximate support function h_D(u_k) of a region D at depth level `level`.
template <typename Scalar = double>
struct SupportVector {
  Vector<Scalar> h;
  double level = 0.0;
  std::uint64_t direction_set_id = 0;
};

namespace detail {

/// Direction block size for streamed projections. project() and the streamed
/// depth passes use the same blocks so their values agree bit for bit.
inline constexpr Index kDirectionBlock = 64;

template <typename Scalar, typename Derived>
void project_block(const Eigen::MatrixBase<Derived>& points, const DirectionSet<Scalar>& dirs,
                   Index first, Index rows, RowMatrix<Scalar>& out) {
  out.noalias() = dirs.directions.middleRows(first, rows) * points.transpose();
}

}  // namespace detail

template <typename Derived, typename Scalar = typename Derived::Scalar>
ProjectionMatrix<Scalar> project(const Eigen::MatrixBase<Derived>& points,
                                 const DirectionSet<Scalar>& dirs) {
  if (points.cols() != dirs.dim())
    throw DimensionMismatch("points have dimension " + std::to_string(points.cols()) +
                            ", directions have dimension " + std::to_string(dirs.dim()));
  ProjectionMatrix<Scalar> m;
  m.direction_set_id = dirs.fingerprint();
  m.values.resize(dirs.count(), points.rows());
  const Index block = detail::kDirectionBlock;
  parallel_for(0, dirs.count(), block, [&](Index lo, Index hi, unsigned) {
    RowMatrix<Scalar> tile;
    for (Index k = lo; k < hi; k += block) {
      const Index rows = std::min(block, hi - k);
      detail::project_block(points, dirs, k, rows, tile);
      m.values.middleRows(k, rows) = tile;
    }
  });
  return m;
}

/// h[k] = max over i in `region` of M[k][i].
template <typename Scalar>
SupportVector<Scalar> support_values(const ProjectionMatrix<Scalar>& m,
                                     std::span<const Index> region, double level = 0.0) {
  if (region.empty()) throw EmptyRegion("support function of an empty index set");
  for (Index i : region)
    if (i < 0 || i >= m.points())
      throw ParameterError("region index " + std::to_string(i) + " out of range");
  SupportVector<Scalar> out;
  out.level = level;
  out.direction_set_id = m.direction_set_id;
  out.h.resize(m.directions());
  for (Index k = 0; k < m.directions(); ++k) {
    const Scalar* row = m.values.row(k).data();
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Index i : region) best = std::max(best, row[i]);
    out.h[k] = best;
  }
  return out;
}

/// Hausdorff distance between two convex regions given their support values on
/// a shared direction set: max_k |hA[k] - hB[k]|.
template <typename Scalar>
Scalar hausdorff_approx(const SupportVector<Scalar>& a, const SupportVector<Scalar>& b) {
  if (a.h.size() != b.h.size())
    throw DimensionMismatch("support vectors have lengths " + std::to_string(a.h.size()) +
                            " and " + std::to_string(b.h.size()));
  if (a.direction_set_id != b.direction_set_id)
    throw ParameterError("support vectors were computed on different direction sets");
  Scalar worst = 0;
  for (Index k = 0; k < a.h.size(); ++k) worst = std::max(worst, std::abs(a.h[k] - b.h[k]));
  return worst;
}

}  // namespace depthdist

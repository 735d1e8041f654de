#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace depthdist {

using Index = Eigen::Index;

/// Row-major dense matrix. Point clouds are n x d (one sample per row);
/// projection matrices are K x n (one direction per row).
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Cloud = RowMatrix<Scalar>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// An empirical distribution: n samples in R^d.
using PointCloud = Cloud<double>;

enum class DepthNotion { halfspace, projection };

constexpr std::string_view to_string(DepthNotion notion) {
  return notion == DepthNotion::halfspace ? "halfspace" : "projection";
}

}  // namespace depthdist

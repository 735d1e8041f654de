#pragma once

// Seeded generators for the synthetic distribution pairs used in the
// robustness and approximation experiments, plus outlier contamination.

#include "depthdist/errors.hpp"
#include "depthdist/types.hpp"

#include <limits>
#include <string_view>

namespace depthdist {

struct CloudPair {
  PointCloud first;
  PointCloud second;
};

enum class Family { gaussian_pair, fragmented_hypercube, circles, student_pair };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

struct GeneratorSpec {
  Family family = Family::gaussian_pair;
  Index d = 2;
  Index n = 1000;
  /// Either one value (broadcast to shift * 1_d) or a full d-vector.
  Eigen::VectorXd shift = Eigen::VectorXd::Constant(1, 10.0);
  /// Student degrees of freedom; +inf means Gaussian.
  double dof = std::numeric_limits<double>::infinity();
  double noise = 0.2;
  double factor = 0.8;
  std::uint64_t seed = 0;

  Eigen::VectorXd shift_vector() const;
};

/// X ~ N(0, I_d)^n, Y ~ N(shift, I_d)^n.
CloudPair gen_gaussian_pair(Index d, Index n, const Eigen::VectorXd& shift, std::uint64_t seed);
CloudPair gen_gaussian_pair(Index d, Index n, double shift, std::uint64_t seed);

/// x + 2 sign(x), element-wise, with sign(0) = 0.
PointCloud fragment_map(const PointCloud& points);

/// X uniform on [-1, 1]^2; Y = fragment_map(X') for an independent uniform X'.
CloudPair gen_fragmented_hypercube(Index n, std::uint64_t seed);

/// First: n points on the unit circle, second: n points on the circle of radius
/// `factor`; both at evenly spaced angles, plus isotropic N(0, noise^2) noise.
CloudPair gen_circles(Index n, double noise, double factor, std::uint64_t seed);

/// Coordinate-wise i.i.d. Student-t(dof) draws; second cloud shifted by shift * 1_d.
/// dof = +inf gives standard Gaussian coordinates.
CloudPair gen_student_pair(Index d, Index n, double dof, double shift, std::uint64_t seed);

CloudPair generate(const GeneratorSpec& spec);

enum class ContaminationScheme { uniform_box, unit_ball };

struct ContaminationSpec {
  ContaminationScheme scheme = ContaminationScheme::uniform_box;
  double fraction = 0.0;
  /// Box bounds; a single value is broadcast to every coordinate.
  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;
  std::uint64_t seed = 0;
};

/// Replaces floor(fraction * n) uniformly chosen rows by outliers; the other
/// rows are returned bit-exactly.
PointCloud contaminate(const PointCloud& points, const ContaminationSpec& spec);

}  // namespace depthdist

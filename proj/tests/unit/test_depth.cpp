#include <doctest.h>

#include "../support/oracles.hpp"

#include <depthdist/depth.hpp>

using namespace depthdist;

namespace {

PointCloud column(std::initializer_list<double> values) {
  PointCloud x(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

PointCloud gaussian_cloud(Index n, Index d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  PointCloud x(n, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

}  // namespace

TEST_CASE("halfspace depth of a 1D sample") {
  const auto x = column({1, 2, 3});
  const auto depth = halfspace_depths(project(x, sample_directions<double>(1, 10, 1)));
  CHECK(depth.values[0] == doctest::Approx(1.0 / 3));
  CHECK(depth.values[1] == doctest::Approx(2.0 / 3));
  CHECK(depth.values[2] == doctest::Approx(1.0 / 3));
  CHECK(depth.notion == DepthNotion::halfspace);
  CHECK(depth.directions == 10);
}

TEST_CASE("a single point has depth one") {
  const auto x = column({4});
  CHECK(halfspace_depths(project(x, sample_directions<double>(1, 3, 1))).values[0] == 1.0);
  CHECK(projection_depths(project(x, sample_directions<double>(1, 3, 1))).values[0] == 1.0);
}

TEST_CASE("square corners have depth one quarter") {
  PointCloud x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto depth = depth_profile(x, sample_directions<double>(2, 10000, 3), DepthNotion::halfspace);
  for (Index i = 0; i < 4; ++i) CHECK(depth.values[i] == doctest::Approx(0.25));
}

TEST_CASE("tied values share their two-sided count") {
  const auto x = column({0, 1, 1, 2});
  const auto depth = halfspace_depths(project(x, sample_directions<double>(1, 4, 1)));
  CHECK(depth.values[0] == doctest::Approx(0.25));
  CHECK(depth.values[1] == doctest::Approx(0.75));
  CHECK(depth.values[2] == doctest::Approx(0.75));
  CHECK(depth.values[3] == doctest::Approx(0.25));
}

TEST_CASE("projection depth of a 1D sample") {
  const auto x = column({0, 1, 2});
  const auto depth = projection_depths(project(x, sample_directions<double>(1, 6, 2)));
  CHECK(depth.values[0] == doctest::Approx(0.5));
  CHECK(depth.values[1] == doctest::Approx(1.0));
  CHECK(depth.values[2] == doctest::Approx(0.5));
}

TEST_CASE("projection depth uses the midpoint median for even n") {
  const auto x = column({0, 1, 3, 4});
  // median 2, absolute deviations {2, 1, 1, 2}, MAD 1.5
  const auto depth = projection_depths(project(x, sample_directions<double>(1, 6, 2)));
  CHECK(depth.values[0] == doctest::Approx(1.0 / (1.0 + 2.0 / 1.5)));
  CHECK(depth.values[1] == doctest::Approx(1.0 / (1.0 + 1.0 / 1.5)));
}

TEST_CASE("identical points have projection depth one") {
  PointCloud x = PointCloud::Constant(5, 3, 2.5);
  const auto depth = depth_profile(x, sample_directions<double>(3, 50, 2), DepthNotion::projection);
  for (Index i = 0; i < 5; ++i) CHECK(depth.values[i] == 1.0);
}

TEST_CASE("zero MAD sends off-median points to depth zero") {
  const auto x = column({1, 1, 1, 5});
  const auto depth = projection_depths(project(x, sample_directions<double>(1, 2, 2)));
  CHECK(depth.values[0] == 1.0);
  CHECK(depth.values[3] == 0.0);
}

TEST_CASE("halfspace depths are quantized two-sided ranks with an attained maximum") {
  for (Index n : {1, 2, 7, 50, 51}) {
    const auto x = gaussian_cloud(n, 3, static_cast<std::uint64_t>(n));
    const auto depth = depth_profile(x, sample_directions<double>(3, 200, 5), DepthNotion::halfspace);
    CHECK(depth.points() == n);
    for (Index i = 0; i < n; ++i) {
      const double j = depth.values[i] * static_cast<double>(n);
      CHECK(j == doctest::Approx(std::round(j)));
      CHECK(std::round(j) >= 1);
      CHECK(std::round(j) <= static_cast<double>((n + 1) / 2));
    }
    CHECK((depth.values.array() == depth.max()).count() >= 1);
  }
}

TEST_CASE("projection depths lie in (0, 1] for continuous samples") {
  const auto x = gaussian_cloud(300, 4, 8);
  const auto depth = depth_profile(x, sample_directions<double>(4, 300, 5), DepthNotion::projection);
  CHECK(depth.values.minCoeff() > 0.0);
  CHECK(depth.values.maxCoeff() <= 1.0);
}

TEST_CASE("streamed depth equals depth of the stored projection matrix") {
  const auto x = gaussian_cloud(120, 5, 21);
  const auto dirs = sample_directions<double>(5, 4 * detail::kDirectionBlock + 3, 4);
  const auto m = project(x, dirs);
  CHECK(depth_profile(x, dirs, DepthNotion::halfspace).values == halfspace_depths(m).values);
  CHECK(depth_profile(x, dirs, DepthNotion::projection).values == projection_depths(m).values);
}

TEST_CASE("depth is affine invariant when directions move with the data") {
  const auto x = gaussian_cloud(80, 2, 5);
  const auto dirs = sample_directions<double>(2, 500, 6);
  const double t = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  const PointCloud moved = (x * r.transpose()).rowwise() + Eigen::RowVector2d(3, -4);
  const auto rdirs = make_direction_set<double>(dirs.directions * r.transpose());
  CHECK(depth_profile(x, dirs, DepthNotion::halfspace).values ==
        depth_profile(moved, rdirs, DepthNotion::halfspace).values);
}

TEST_CASE("depth of an external point") {
  const auto x = gaussian_cloud(10, 2, 31);
  const auto dirs = sample_directions<double>(2, 10000, 32);
  const auto m = project(x, dirs);
  const auto in_sample = halfspace_depths(m);

  SUBCASE("a sample point matches its in-sample depth") {
    const auto z = project(PointCloud(x.row(3)), dirs);
    CHECK(halfspace_depth_at<double>({z.values.data(), static_cast<std::size_t>(z.values.size())}, m) ==
          doctest::Approx(in_sample.values[3]));
  }
  SUBCASE("a far point has depth zero") {
    PointCloud far(1, 2);
    far << 100, 100;
    const auto z = project(far, dirs);
    CHECK(halfspace_depth_at<double>({z.values.data(), static_cast<std::size_t>(z.values.size())}, m) == 0.0);
  }
  SUBCASE("random points are within 1/n of the exact depth") {
    Rng rng(33);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
      PointCloud zc(1, 2);
      zc << normal(rng), normal(rng);
      const auto z = project(zc, dirs);
      const double est = halfspace_depth_at<double>({z.values.data(), static_cast<std::size_t>(z.values.size())}, m);
      const double exact = oracle::tukey_depth_2d(zc.row(0).transpose(), x);
      CHECK(est >= exact);
      CHECK(est - exact <= 1.0 / 10 + 1e-12);
    }
  }
}

TEST_CASE("exact planar halfspace depth") {
  PointCloud tri(3, 2);
  tri << 0, 0, 4, 0, 0, 3;
  SUBCASE("centroid of a triangle") {
    CHECK(exact_halfspace_depth_2d(Eigen::Vector2d(4.0 / 3, 1.0), tri) == doctest::Approx(1.0 / 3));
  }
  SUBCASE("outside the hull") { CHECK(exact_halfspace_depth_2d(Eigen::Vector2d(5, 5), tri) == 0.0); }
  SUBCASE("all points at z") {
    PointCloud same = PointCloud::Zero(4, 2);
    CHECK(exact_halfspace_depth_2d(Eigen::Vector2d(0, 0), same) == 1.0);
  }
  SUBCASE("wrong dimension") {
    PointCloud x3 = PointCloud::Zero(4, 3);
    CHECK_THROWS_AS(exact_halfspace_depth_2d(Eigen::Vector2d(0, 0), x3), DimensionMismatch);
  }
  SUBCASE("agrees with the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto x = gaussian_cloud(3 + static_cast<Index>(seed % 15), 2, 100 + seed);
      for (Index i = 0; i < x.rows(); ++i)
        CHECK(exact_halfspace_depth_2d(x.row(i).transpose(), x) ==
              doctest::Approx(oracle::tukey_depth_2d(x.row(i).transpose(), x)));
    }
  }
}

TEST_CASE("hull points have depth between 1/n and ceil(n/2)/n; dense scan agrees") {
  const Index n = 9;
  const auto x = gaussian_cloud(n, 2, 77);
  // Leftmost point is on the convex hull.
  Index left = 0;
  x.col(0).minCoeff(&left);
  const double exact = exact_halfspace_depth_2d(x.row(left).transpose(), x);
  CHECK(exact >= 1.0 / n);
  CHECK(exact <= 5.0 / n);
  const auto dense = depth_profile(x, sample_directions<double>(2, 1000000, 78), DepthNotion::halfspace);
  CHECK(dense.values[left] == doctest::Approx(exact));
}

TEST_CASE("random-direction depth never falls below the exact depth") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto x = gaussian_cloud(12, 2, 500 + seed);
    const auto depth = depth_profile(x, sample_directions<double>(2, 300, seed), DepthNotion::halfspace);
    for (Index i = 0; i < x.rows(); ++i) CHECK(depth.values[i] >= oracle::tukey_depth_2d(x.row(i).transpose(), x));
  }
}

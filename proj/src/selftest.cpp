#include "depthdist/selftest.hpp"

#include "depthdist/io.hpp"
#include "depthdist/metrics.hpp"
#include "depthdist/synthdata.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace depthdist {

namespace {

Eigen::MatrixXd random_rotation(Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(d, d);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ();
}

// int |F_X - F_Y| dt over the merged support.
double cdf_area(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<double> cuts(x);
  cuts.insert(cuts.end(), y.begin(), y.end());
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const auto fx = static_cast<double>(std::upper_bound(x.begin(), x.end(), cuts[j]) - x.begin()) /
                    static_cast<double>(x.size());
    const auto fy = static_cast<double>(std::upper_bound(y.begin(), y.end(), cuts[j]) - y.begin()) /
                    static_cast<double>(y.size());
    total += std::abs(fx - fy) * (cuts[j + 1] - cuts[j]);
  }
  return total;
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  std::vector<CheckResult> results;
  auto check = [&results](const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{name, false, {}};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  };
  Rng rng(derive_seed(seed, 0xfeed));
  std::normal_distribution<double> normal;

  check("directions are unit and reproducible", [&] {
    const auto a = sample_directions<double>(4, 500, seed);
    const auto b = sample_directions<double>(4, 500, seed);
    const double worst = (a.directions.rowwise().norm().array() - 1.0).abs().maxCoeff();
    if (worst > 1e-12) return "norm deviation " + std::to_string(worst);
    if (a.directions != b.directions) return std::string("regeneration differs");
    return std::string();
  });

  check("projection equals explicit dot products", [&] {
    const auto pair = gen_gaussian_pair(3, 50, 1.0, seed);
    const auto dirs = sample_directions<double>(3, 70, seed + 1);
    const auto m = project(pair.first, dirs);
    for (Index k = 0; k < dirs.count(); ++k)
      for (Index i = 0; i < pair.first.rows(); ++i) {
        double dot = 0.0;
        for (Index j = 0; j < 3; ++j) dot += dirs.directions(k, j) * pair.first(i, j);
        if (std::abs(dot - m.values(k, i)) > 1e-12) return std::string("mismatch");
      }
    return std::string();
  });

  check("hausdorff approximation is a pseudo-metric", [&] {
    for (int trial = 0; trial < 100; ++trial) {
      SupportVector<double> a, b, c;
      for (auto* s : {&a, &b, &c}) s->h = Eigen::VectorXd::NullaryExpr(8, [&] { return normal(rng); });
      const double ab = hausdorff_approx(a, b), ba = hausdorff_approx(b, a);
      if (ab != ba) return std::string("asymmetric");
      if (hausdorff_approx(a, a) != 0.0) return std::string("non-zero self distance");
      const double slack = 4 * std::numeric_limits<double>::epsilon() * (ab + hausdorff_approx(b, c));
      if (hausdorff_approx(a, c) > ab + hausdorff_approx(b, c) + slack) return std::string("triangle");
    }
    return std::string();
  });

  check("projection-based halfspace depth over-approximates exact depth", [&] {
    for (int trial = 0; trial < 20; ++trial) {
      PointCloud x(12, 2);
      for (Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
      const auto dirs = sample_directions<double>(2, 2000, derive_seed(seed, trial));
      const auto depths = halfspace_depths(project(x, dirs));
      for (Index i = 0; i < x.rows(); ++i) {
        const double exact = exact_halfspace_depth_2d(x.row(i).transpose(), x);
        if (depths.values[i] < exact) return "estimate below exact depth at trial " + std::to_string(trial);
      }
    }
    return std::string();
  });

  check("streamed depth equals depth of the full projection matrix", [&] {
    const auto pair = gen_gaussian_pair(3, 200, 0.0, seed);
    const auto dirs = sample_directions<double>(3, 300, seed);
    const auto m = project(pair.first, dirs);
    if (depth_profile(pair.first, dirs, DepthNotion::halfspace).values != halfspace_depths(m).values)
      return std::string("halfspace mismatch");
    if (depth_profile(pair.first, dirs, DepthNotion::projection).values != projection_depths(m).values)
      return std::string("projection mismatch");
    return std::string();
  });

  check("dr_distance is symmetric", [&] {
    const auto pair = gen_gaussian_pair(2, 300, 2.0, seed);
    MetricParams params;
    params.directions = 200;
    params.seed = seed;
    const double xy = dr_distance(pair.first, pair.second, params).value;
    const double yx = dr_distance(pair.second, pair.first, params).value;
    return xy == yx ? std::string() : std::string("asymmetric");
  });

  check("dr_distance is invariant under isometries", [&] {
    const Index d = 3;
    const auto pair = gen_gaussian_pair(d, 300, 1.5, seed);
    const auto dirs = sample_directions<double>(d, 300, seed);
    const Eigen::MatrixXd r = random_rotation(d, rng);
    const Eigen::RowVectorXd b = Eigen::RowVectorXd::NullaryExpr(d, [&] { return 5.0 * normal(rng); });
    const PointCloud rx = (pair.first * r.transpose()).rowwise() + b;
    const PointCloud ry = (pair.second * r.transpose()).rowwise() + b;
    const auto rdirs = make_direction_set<double>(dirs.directions * r.transpose());
    MetricParams params;
    params.seed = seed;
    const double base = dr_distance(pair.first, pair.second, dirs, params).value;
    const double moved = dr_distance(rx, ry, rdirs, params).value;
    return std::abs(base - moved) <= 1e-9 ? std::string() : "difference " + std::to_string(base - moved);
  });

  check("1D ordering DD_1 <= W_1 <= DR_{1,0}", [&] {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(5 + trial), y(7 + 2 * trial);
      for (auto& v : x) v = normal(rng);
      for (auto& v : y) v = 0.5 * normal(rng) + 0.3;
      const double dd = dd_1d_closed_form(x, y, 1.0);
      const double w = wasserstein_1d(x, y, 1.0);
      const double dr = dr_1d_closed_form(x, y, 1.0, 0.0);
      if (dd > w + 1e-9 || w > dr + 1e-9) return "ordering violated at trial " + std::to_string(trial);
      if (std::abs(w - cdf_area(x, y)) > 1e-9) return "W_1 differs from cdf area at trial " + std::to_string(trial);
    }
    return std::string();
  });

  check("binary cloud round trip is bit-exact", [&] {
    const auto pair = gen_student_pair(4, 64, 1.0, 3.0, seed);
    std::stringstream buffer;
    write_binary_cloud(buffer, pair.first);
    return parse_binary_cloud(buffer) == pair.first ? std::string() : std::string("mismatch");
  });

  return results;
}

}  // namespace depthdist

#include "depthdist/synthdata.hpp"

#include "depthdist/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

namespace depthdist {

namespace {

void check_size(Index d, Index n) {
  if (d < 1) throw ParameterError("dimension must be >= 1");
  if (n < 1) throw ParameterError("sample size must be >= 1");
}

PointCloud standard_normal(Index n, Index d, Rng& rng) {
  std::normal_distribution<double> normal;
  PointCloud out(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) out(i, j) = normal(rng);
  return out;
}

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, Index d, const char* what) {
  if (v.size() == 1) return Eigen::VectorXd::Constant(d, v[0]);
  if (v.size() != d)
    throw DimensionMismatch(std::string(what) + " has " + std::to_string(v.size()) +
                            " entries, expected 1 or " + std::to_string(d));
  return v;
}

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

}  // namespace

std::string_view to_string(Family family) {
  switch (family) {
    case Family::gaussian_pair: return "gaussian";
    case Family::fragmented_hypercube: return "fragmented";
    case Family::circles: return "circles";
    case Family::student_pair: return "student";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "gaussian" || name == "gaussian_pair") return Family::gaussian_pair;
  if (name == "fragmented" || name == "fragmented_hypercube") return Family::fragmented_hypercube;
  if (name == "circles") return Family::circles;
  if (name == "student" || name == "student_pair") return Family::student_pair;
  throw ParameterError("unknown generator family '" + std::string(name) + "'");
}

Eigen::VectorXd GeneratorSpec::shift_vector() const { return broadcast(shift, d, "shift"); }

CloudPair gen_gaussian_pair(Index d, Index n, const Eigen::VectorXd& shift, std::uint64_t seed) {
  check_size(d, n);
  const Eigen::VectorXd offset = broadcast(shift, d, "shift");
  Rng rx(derive_seed(seed, 0)), ry(derive_seed(seed, 1));
  CloudPair pair{standard_normal(n, d, rx), standard_normal(n, d, ry)};
  pair.second.rowwise() += offset.transpose();
  return pair;
}

CloudPair gen_gaussian_pair(Index d, Index n, double shift, std::uint64_t seed) {
  return gen_gaussian_pair(d, n, Eigen::VectorXd::Constant(1, shift), seed);
}

PointCloud fragment_map(const PointCloud& points) {
  return points.unaryExpr([](double v) { return v + 2.0 * sign(v); });
}

CloudPair gen_fragmented_hypercube(Index n, std::uint64_t seed) {
  check_size(2, n);
  auto cube = [n](std::uint64_t s) {
    Rng rng(s);
    PointCloud out(n, 2);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < 2; ++j) out(i, j) = uniform(rng, -1.0, 1.0);
    return out;
  };
  return {cube(derive_seed(seed, 0)), fragment_map(cube(derive_seed(seed, 1)))};
}

CloudPair gen_circles(Index n, double noise, double factor, std::uint64_t seed) {
  check_size(2, n);
  if (!(noise >= 0.0)) throw ParameterError("noise must be >= 0");
  if (!(factor > 0.0 && factor < 1.0)) throw ParameterError("circle factor must lie in (0, 1)");
  auto circle = [n, noise](double radius, std::uint64_t s) {
    Rng rng(s);
    std::normal_distribution<double> normal(0.0, 1.0);
    PointCloud out(n, 2);
    for (Index i = 0; i < n; ++i) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      out(i, 0) = radius * std::cos(angle);
      out(i, 1) = radius * std::sin(angle);
      if (noise > 0.0) {
        out(i, 0) += noise * normal(rng);
        out(i, 1) += noise * normal(rng);
      }
    }
    return out;
  };
  return {circle(1.0, derive_seed(seed, 0)), circle(factor, derive_seed(seed, 1))};
}

CloudPair gen_student_pair(Index d, Index n, double dof, double shift, std::uint64_t seed) {
  check_size(d, n);
  if (!(dof >= 1.0)) throw ParameterError("degrees of freedom must be >= 1 (or inf)");
  if (std::isinf(dof)) return gen_gaussian_pair(d, n, shift, seed);
  auto draw = [&](std::uint64_t s) {
    Rng rng(s);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi2(dof);
    PointCloud out(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < d; ++j) {
        const double z = normal(rng);
        out(i, j) = z / std::sqrt(chi2(rng) / dof);
      }
    return out;
  };
  CloudPair pair{draw(derive_seed(seed, 0)), draw(derive_seed(seed, 1))};
  pair.second.array() += shift;
  return pair;
}

CloudPair generate(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::gaussian_pair: return gen_gaussian_pair(spec.d, spec.n, spec.shift_vector(), spec.seed);
    case Family::fragmented_hypercube: return gen_fragmented_hypercube(spec.n, spec.seed);
    case Family::circles: return gen_circles(spec.n, spec.noise, spec.factor, spec.seed);
    case Family::student_pair: {
      if (spec.shift.size() != 1) throw ParameterError("student pair takes a scalar shift");
      return gen_student_pair(spec.d, spec.n, spec.dof, spec.shift[0], spec.seed);
    }
  }
  throw ParameterError("unknown generator family");
}

PointCloud contaminate(const PointCloud& points, const ContaminationSpec& spec) {
  if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0))
    throw ParameterError("contamination fraction must lie in [0, 1]");
  const Index n = points.rows(), d = points.cols();
  const auto replaced = static_cast<Index>(std::floor(spec.fraction * static_cast<double>(n)));
  Eigen::VectorXd lower, upper;
  if (spec.scheme == ContaminationScheme::uniform_box) {
    if (spec.box_lower.size() == 0 || spec.box_upper.size() == 0)
      throw ParameterError("uniform_box contamination needs box bounds");
    lower = broadcast(spec.box_lower, d, "box lower bound");
    upper = broadcast(spec.box_upper, d, "box upper bound");
    if (!(lower.array() < upper.array()).all()) throw ParameterError("contamination box is degenerate");
  }
  PointCloud out = points;
  if (replaced == 0) return out;

  Rng rng(spec.seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: the first `replaced` slots are a uniform subset.
  for (Index i = 0; i < replaced; ++i) {
    const auto j = i + static_cast<Index>(uniform01(rng) * static_cast<double>(n - i));
    std::swap(idx[i], idx[std::min(j, n - 1)]);
  }
  std::normal_distribution<double> normal;
  for (Index r = 0; r < replaced; ++r) {
    const Index i = idx[r];
    if (spec.scheme == ContaminationScheme::uniform_box) {
      for (Index j = 0; j < d; ++j) out(i, j) = uniform(rng, lower[j], upper[j]);
    } else {
      Eigen::VectorXd g(d);
      double norm = 0.0;
      do {
        for (Index j = 0; j < d; ++j) g[j] = normal(rng);
        norm = g.norm();
      } while (!(norm > 0.0));
      const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
      out.row(i) = (radius / norm) * g.transpose();
    }
  }
  return out;
}

}  // namespace depthdist

#include <doctest.h>

#include <depthdist/bench.hpp>

#include <json.hpp>

#include <numeric>
#include <sstream>

using namespace depthdist;

namespace {

// Spearman rank correlation for samples without ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < order.size(); ++k) r[order[k]] = static_cast<double>(k);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

std::string csv(const std::vector<BenchRow>& rows, bool timing = false) {
  std::ostringstream out;
  write_rows_csv(out, rows, timing);
  return out.str();
}

}  // namespace

TEST_CASE("relative error") {
  CHECK(relative_error(12, 10) == doctest::Approx(0.2));
  CHECK(relative_error(10, 10) == 0.0);
  CHECK(relative_error(8, 10) == doctest::Approx(0.2));
  CHECK_THROWS_AS(relative_error(1, 0), DegenerateBaseline);
  CHECK_THROWS_AS(relative_error(1, -2), DegenerateBaseline);
}

TEST_CASE("population distance between translates") {
  const Eigen::Vector3d c(1, 2, 2);
  CHECK(translation_distance(MethodKind::dr, 2.0, c) == doctest::Approx(3.0));
  CHECK(translation_distance(MethodKind::maxsw, 1.0, c) == doctest::Approx(3.0));
  CHECK(translation_distance(MethodKind::sw, 2.0, c) == doctest::Approx(3.0 / std::sqrt(3.0)));
  // E|u_1| on S^2 is 1/2.
  CHECK(translation_distance(MethodKind::sw, 1.0, c) == doctest::Approx(1.5));
  CHECK(translation_distance(MethodKind::w1d, 2.0, Eigen::VectorXd::Constant(1, -4.0)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(translation_distance(MethodKind::w1d, 2.0, c), DimensionMismatch);
}

TEST_CASE("default configurations are valid") {
  for (auto e : {Experiment::approx_quality, Experiment::robustness_outliers, Experiment::heavy_tails}) {
    const auto config = default_config(e);
    CHECK(config.experiment == e);
    CHECK_NOTHROW(config.validate());
    CHECK(config.repetitions == 100);
    CHECK(experiment_from_string(to_string(e)) == e);
  }
  CHECK(experiment_from_string("approx") == Experiment::approx_quality);
  CHECK(experiment_from_string("outliers") == Experiment::robustness_outliers);
  CHECK(experiment_from_string("tails") == Experiment::heavy_tails);
  CHECK_THROWS_AS(experiment_from_string("nope"), ParameterError);

  auto bad = default_config(Experiment::approx_quality);
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("json configuration") {
  const auto config = config_from_json(R"({
    "experiment": "outliers", "repetitions": 3, "base_seed": 9,
    "generator": {"family": "fragmented", "n": 200},
    "fractions": [0, 0.1],
    "contamination": {"scheme": "unit_ball"},
    "methods": [{"kind": "dr", "id": "a", "epsilon": 0.1, "K": 100}, {"kind": "sw", "K": 50, "p": 1}]
  })");
  CHECK(config.experiment == Experiment::robustness_outliers);
  CHECK(config.repetitions == 3);
  CHECK(config.base_seed == 9);
  CHECK(config.generator.family == Family::fragmented_hypercube);
  CHECK(config.generator.n == 200);
  CHECK(config.fractions == std::vector<double>{0, 0.1});
  CHECK(config.scheme == ContaminationScheme::unit_ball);
  REQUIRE(config.methods.size() == 2);
  CHECK(config.methods[0].id == "a");
  CHECK(config.methods[0].params.directions == 100);
  CHECK(config.methods[1].kind == MethodKind::sw);
  CHECK(config.methods[1].params.p == 1.0);

  CHECK_THROWS_AS(config_from_json("{"), ParseError);
  CHECK_THROWS_AS(config_from_json(R"({"repetitions": 3})"), ParseError);
  CHECK_THROWS_AS(config_from_json(R"({"experiment": "approx", "repetitions": 0})"), ParameterError);
}

TEST_CASE("approximation quality rows") {
  auto config = default_config(Experiment::approx_quality);
  config.repetitions = 2;
  config.direction_counts = {10, 200};
  config.level_counts = {5, 10};
  config.generator.n = 200;
  const auto rows = run_approx_quality(config);
  // DR: 2 K x 2 n_alpha; max-SW: 2 K.
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.runs == 2);
    CHECK(r.failures == 0);
    CHECK(r.mean_rel_error >= 0.0);
    CHECK(r.baseline == "truth");
  }
  CHECK(rows[0].directions == 10);
  CHECK(rows[0].n_alpha == 5);
  CHECK(csv(rows) == csv(run_approx_quality(config)));
}

TEST_CASE("outlier rows: zero fraction is exact and DR beats SW") {
  auto config = default_config(Experiment::robustness_outliers);
  config.repetitions = 3;
  config.generator.n = 300;
  config.fractions = {0.0, 0.2};
  const auto rows = run_robustness_outliers(config);
  REQUIRE(rows.size() == 8);
  for (const auto& r : rows)
    if (r.fraction == 0.0) CHECK(r.mean_rel_error == 0.0);
  const double sw = rows[7].mean_rel_error;
  for (int m = 0; m < 3; ++m) CHECK(rows[2 * m + 1].mean_rel_error < sw);
}

TEST_CASE("fragmented hypercube: DR curves stay below SW at 20% outliers in one cloud") {
  auto config = default_config(Experiment::robustness_outliers);
  config.generator.family = Family::fragmented_hypercube;
  config.generator.n = 1000;
  config.repetitions = 5;
  config.fractions = {0.2};
  config.contaminate_both = false;
  const auto rows = run_robustness_outliers(config);
  REQUIRE(rows.size() == 4);
  // Four separated clusters never reach depth 0.3, so eps = 0.3 has no valid levels.
  CHECK(rows[2].runs == 0);
  CHECK(std::isnan(rows[2].mean_rel_error));
  for (int m = 0; m < 2; ++m) {
    CHECK(rows[m].runs == 5);
    CHECK(rows[m].mean_rel_error < rows[3].mean_rel_error);
  }
}

TEST_CASE("heavy tails: trimming reduces sensitivity and DR beats SW on Cauchy data") {
  auto config = default_config(Experiment::heavy_tails);
  config.repetitions = 20;
  config.dofs = {1.0};
  config.direction_counts = {500};
  auto dr0 = config.methods[0];
  dr0.id = "dr_eps0";
  dr0.params.epsilon = 0.0;
  config.methods.insert(config.methods.begin(), dr0);
  const auto rows = run_heavy_tails(config);
  REQUIRE(rows.size() == 5);
  std::vector<double> eps, err;
  for (int m = 0; m < 4; ++m) {
    if (rows[m].runs == 0) continue;
    eps.push_back(rows[m].epsilon);
    err.push_back(rows[m].mean_rel_error);
    CHECK(rows[m].baseline == "gaussian_population");
  }
  REQUIRE(eps.size() >= 3);
  CHECK(spearman(eps, err) <= 0.0);
  CHECK(rows[2].mean_rel_error < rows[4].mean_rel_error);  // eps = 0.2 vs SW
}

TEST_CASE("heavy tails on Gaussian data: DR and SW are both small") {
  auto config = default_config(Experiment::heavy_tails);
  config.repetitions = 3;
  config.dofs = {std::numeric_limits<double>::infinity()};
  config.direction_counts = {1000};
  config.methods = {config.methods[0], config.methods[3]};
  const auto rows = run_heavy_tails(config);
  CHECK(rows[0].mean_rel_error < 0.2);
  CHECK(rows[1].mean_rel_error < 0.2);
  CHECK(csv(rows) == csv(run_heavy_tails(config)));
}

TEST_CASE("row writers") {
  BenchRow r{"approx_quality", "dr", 5, 100, 20, 0.0, 0.0, 0.0, "truth", 0.25, 0.5, 1.5, 10, 1};
  const auto text = csv({r});
  CHECK(text ==
        "experiment,method,d,K,n_alpha,epsilon,fraction,dof,baseline,mean_rel_error,std_rel_error,runs,failures\n"
        "approx_quality,dr,5,100,20,0,0,0,truth,0.25,0.5,10,1\n");
  CHECK(csv({r}, true).find(",seconds_per_eval\n") != std::string::npos);
  std::ostringstream out;
  write_rows_json(out, {r}, false);
  const auto j = nlohmann::json::parse(out.str());
  REQUIRE(j.size() == 1);
  CHECK(j[0]["mean_rel_error"] == 0.25);
  CHECK_FALSE(j[0].contains("seconds_per_eval"));
}

#include <doctest.h>

#include <depthdist/cli.hpp>
#include <depthdist/io.hpp>
#include <depthdist/synthdata.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace depthdist;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct Workspace {
  std::filesystem::path dir;
  std::string x, y, shallow_x, shallow_y;

  Workspace() {
    dir = std::filesystem::temp_directory_path() / ("depthdist_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    x = (dir / "x.csv").string();
    y = (dir / "y.bin").string();
    const auto pair = gen_gaussian_pair(2, 200, 2.0, 1);
    save_cloud(pair.first, {x, CloudFormat::csv, {}});
    save_cloud(pair.second, {y, CloudFormat::binary_f64, {}});
    shallow_x = (dir / "sx.csv").string();
    shallow_y = (dir / "sy.csv").string();
    const auto wide = gen_gaussian_pair(8, 100, 1.0, 2);
    save_cloud(wide.first, {shallow_x, CloudFormat::csv, {}});
    save_cloud(wide.second, {shallow_y, CloudFormat::csv, {}});
  }
  ~Workspace() { std::filesystem::remove_all(dir); }
};

}  // namespace

TEST_CASE("dist of a file with itself is zero") {
  Workspace ws;
  const auto r = cli({"dist", ws.x, ws.x, "--method", "dr", "--seed", "1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["value"] == 0.0);
  CHECK(j["method"] == "dr");
  CHECK(j["seed"] == 1);
}

TEST_CASE("dist methods and formats") {
  Workspace ws;
  for (const char* method : {"dr", "dd", "sw", "maxsw"}) {
    const auto r = cli({"dist", ws.x, ws.y, "--method", method, "--ndirs", "50", "--mc-points", "500"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() > 0.0);
  }
  const auto c = cli({"dist", ws.x, ws.y, "--format", "csv", "--depth", "projection", "--schedule", "grid"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("method,value,", 0) == 0);
  CHECK(c.out.find("projection") != std::string::npos);
  const auto l = cli({"dist", ws.x, ws.y, "--levels", "--nalpha", "7"});
  CHECK(nlohmann::json::parse(l.out)["levels"].size() == 7);
  const auto b = cli({"dist", ws.x, ws.y, "--method", "dd", "--box", "-5:8", "--mc-points", "500"});
  CHECK(b.code == 0);
  const auto w = cli({"dist", ws.x, ws.y, "--method", "w1d"});
  CHECK(w.code == 1);
}

TEST_CASE("excessive trimming is a computation error") {
  Workspace ws;
  const auto r = cli({"dist", ws.shallow_x, ws.shallow_y, "--method", "dr", "--eps", "0.9"});
  CHECK(r.code == 1);
  CHECK(r.err.find("LevelRangeError") != std::string::npos);
}

TEST_CASE("usage errors exit with status 2") {
  Workspace ws;
  auto unknown = cli({"dist", ws.x, ws.y, "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(cli({}).code == 2);
  CHECK(cli({"dist", ws.x}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--p", "0.5"}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--eps", "1"}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--ndirs", "0"}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--method", "nope"}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--method", "dd", "--box", "1,2"}).code == 2);
  CHECK(cli({"dist", ws.x, ws.y, "--method", "dd", "--depth", "projection"}).code == 2);
  CHECK(cli({"gen", "--out-x", "a", "--out-y", "b", "--n", "0"}).code == 2);
  CHECK(cli({"bench", "nope"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("missing and malformed input files are computation errors") {
  Workspace ws;
  CHECK(cli({"dist", ws.x, (ws.dir / "missing.csv").string()}).code == 1);
  const auto bad = (ws.dir / "bad.csv").string();
  std::ofstream(bad) << "1,2\n3\n";
  const auto r = cli({"dist", ws.x, bad});
  CHECK(r.code == 1);
  CHECK(r.err.find("ragged") != std::string::npos);
}

TEST_CASE("gen writes both clouds") {
  Workspace ws;
  const auto a = (ws.dir / "a.csv").string(), b = (ws.dir / "b.bin").string();
  const auto r = cli({"gen", "--family", "student", "--d", "3", "--n", "40", "--dof", "2", "--seed", "4",
                      "--contam-fraction", "0.25", "--out-x", a, "--out-y", b});
  REQUIRE(r.code == 0);
  const auto x = load_cloud(a), y = load_cloud(b);
  CHECK(x.rows() == 40);
  CHECK(x.cols() == 3);
  CHECK(y.rows() == 40);
  const auto clean = gen_student_pair(3, 40, 2.0, 10.0, 4);
  Index changed_x = 0, changed_y = 0;
  for (Index i = 0; i < 40; ++i) {
    changed_x += x.row(i) != clean.first.row(i);
    changed_y += y.row(i) != clean.second.row(i);
  }
  CHECK(changed_x == 10);
  CHECK(changed_y == 10);
}

TEST_CASE("bench from a config file") {
  Workspace ws;
  const auto config = (ws.dir / "c.json").string();
  std::ofstream(config) << R"({"experiment": "approx", "repetitions": 1, "directions": [10], "n_alpha": [5],
                              "generator": {"n": 100}})";
  const auto r = cli({"bench", "--config", config, "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("experiment,method,", 0) == 0);
  const auto again = cli({"bench", "approx", "--config", config, "--format", "json", "--timing"});
  CHECK(again.code == 0);
  CHECK(nlohmann::json::parse(again.out)[0].contains("seconds_per_eval"));
  CHECK(cli({"bench", "tails", "--config", config}).code == 2);
  CHECK(cli({"bench", "--config", (ws.dir / "none.json").string()}).code == 2);
}

TEST_CASE("identical invocations give identical output") {
  Workspace ws;
  const std::vector<std::string> args{"dist", ws.x, ws.y, "--seed", "42", "--levels"};
  CHECK(cli(args).out == cli(args).out);
  auto threaded = args;
  threaded.insert(threaded.begin(), {"--threads", "3"});
  CHECK(cli(threaded).out == cli(args).out);
}

TEST_CASE("seed from the environment, overridden by the flag") {
  Workspace ws;
  ::setenv("DEPTHDIST_SEED", "9", 1);
  const auto from_env = cli({"dist", ws.x, ws.y});
  const auto from_flag = cli({"dist", ws.x, ws.y, "--seed", "3"});
  ::unsetenv("DEPTHDIST_SEED");
  CHECK(nlohmann::json::parse(from_env.out)["seed"] == 9);
  CHECK(nlohmann::json::parse(from_flag.out)["seed"] == 3);
}

TEST_CASE("selftest passes") {
  const auto r = cli({"selftest"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}

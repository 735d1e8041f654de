#include <doctest.h>

#include <depthdist/io.hpp>
#include <depthdist/synthdata.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace depthdist;

namespace {

PointCloud parse(const std::string& text, std::vector<std::string>* header = nullptr) {
  std::istringstream in(text);
  return parse_csv_cloud(in, header);
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("depthdist_io_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("csv without header") {
  const auto x = parse("0,1\n2,3");
  PointCloud expected(2, 2);
  expected << 0, 1, 2, 3;
  CHECK(x == expected);
}

TEST_CASE("csv with header, blank lines and CRLF") {
  std::vector<std::string> header;
  const auto x = parse("x,y\r\n1.5,-2e3\r\n\r\n 4 , 5 \n", &header);
  CHECK(header == std::vector<std::string>{"x", "y"});
  REQUIRE(x.rows() == 2);
  CHECK(x(0, 1) == -2000.0);
  CHECK(x(1, 0) == 4.0);
}

TEST_CASE("csv errors") {
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(parse("a,b\n"), ParseError);
  try {
    parse("1,2\n3,4\n5\n");
    FAIL("expected RaggedRowError");
  } catch (const RaggedRowError& e) {
    CHECK(e.line() == 3);
  }
  try {
    parse("1,2\n3,nan\n");
    FAIL("expected NonFiniteValue");
  } catch (const NonFiniteValue& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(parse("1,2\n3,inf\n"), NonFiniteValue);
  CHECK_THROWS_AS(parse("1,2\n3,x\n"), ParseError);
}

TEST_CASE("binary round trip is bit exact") {
  const auto x = gen_student_pair(3, 40, 1.0, 2.0, 5).first;
  std::stringstream buffer;
  write_binary_cloud(buffer, x);
  CHECK(buffer.str().substr(0, 4) == "DRWC");
  CHECK(parse_binary_cloud(buffer) == x);

  std::stringstream truncated(buffer.str().substr(0, 30));
  CHECK_THROWS_AS(parse_binary_cloud(truncated), ParseError);
}

TEST_CASE("files: format detection and round trips") {
  TempDir dir;
  const auto x = gen_gaussian_pair(2, 25, 1.0, 8).first;
  const auto bin = dir.path / "x.bin";
  const auto csv = dir.path / "x.csv";
  CHECK(format_for_path(bin) == CloudFormat::binary_f64);
  CHECK(format_for_path(csv) == CloudFormat::csv);
  save_cloud(x, {bin, CloudFormat::binary_f64, {}});
  save_cloud(x, {csv, CloudFormat::csv, {"a", "b"}});
  CHECK(load_cloud(bin) == x);
  CHECK(load_cloud(csv) == x);  // shortest round-trip formatting is exact
  CHECK_THROWS_AS(load_cloud(dir.path / "missing.csv"), ParseError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-1.5e-300) == "-1.5e-300");
  for (double v : {1.0 / 3, 15.652475842498529, 1e100, 123456789.125})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("result serialization") {
  DistanceResult r;
  r.method = "dr";
  r.value = 1.25;
  r.alpha_star = 0.5;
  r.levels = {{0.1, 1.0}, {0.3, 1.5}};
  r.params.directions = 100;
  r.params.seed = 7;
  const auto j = nlohmann::json::parse(result_to_json(r, true));
  CHECK(j["value"] == 1.25);
  CHECK(j["alpha_star"] == 0.5);
  CHECK(j["K"] == 100);
  CHECK(j["seed"] == 7);
  CHECK(j["depth_notion"] == "halfspace");
  CHECK(j["levels"].size() == 2);
  CHECK(j["levels"][1]["alpha"] == 0.3);

  r.alpha_star.reset();
  const auto k = nlohmann::json::parse(result_to_json(r));
  CHECK(k["alpha_star"].is_null());
  CHECK_FALSE(k.contains("levels"));

  const auto csv = result_to_csv(r);
  CHECK(csv.substr(0, csv.find('\n')) == "method,value,alpha_star,p,epsilon,K,n_alpha,seed,depth_notion");
  CHECK(csv.find("dr,1.25,,2,0.2,100,20,7,halfspace") != std::string::npos);
}

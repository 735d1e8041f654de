#include "depthdist/io.hpp"

#include <json.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace depthdist {

namespace {

constexpr std::array<char, 4> kMagic{'D', 'R', 'W', 'C'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T byteswap_if_big(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &v, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&v, bytes.data(), sizeof(T));
  }
  return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
  v = byteswap_if_big(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const char* what) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw ParseError(std::string("truncated binary cloud while reading ") + what);
  return byteswap_if_big(v);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view field, double& value) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

CloudFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".drwc") ? CloudFormat::binary_f64 : CloudFormat::csv;
}

PointCloud parse_csv_cloud(std::istream& in, std::vector<std::string>* header) {
  std::vector<double> values;
  std::size_t d = 0, rows = 0, line_no = 0;
  std::string line;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty()) continue;
    const auto fields = split(content);
    if (first_content) {
      first_content = false;
      double probe;
      const bool numeric = parse_number(fields.front(), probe) || fields.front() == "nan" ||
                           fields.front() == "inf" || fields.front() == "-inf";
      if (!numeric) {
        if (header) header->assign(fields.begin(), fields.end());
        d = fields.size();
        continue;
      }
    }
    if (d == 0) d = fields.size();
    if (fields.size() != d) throw RaggedRowError(line_no, d, fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!parse_number(fields[c], v)) {
        if (fields[c] == "nan" || fields[c] == "inf" || fields[c] == "-inf" || fields[c] == "NaN")
          throw NonFiniteValue(line_no, c + 1);
        throw ParseError("cannot parse '" + std::string(fields[c]) + "' as a real number", line_no, c + 1);
      }
      if (!std::isfinite(v)) throw NonFiniteValue(line_no, c + 1);
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw ParseError("cloud file contains no data rows");
  PointCloud cloud(static_cast<Index>(rows), static_cast<Index>(d));
  std::copy(values.begin(), values.end(), cloud.data());
  return cloud;
}

PointCloud parse_binary_cloud(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw ParseError("missing DRWC magic bytes");
  const auto n = read_le<std::uint64_t>(in, "n");
  const auto d = read_le<std::uint64_t>(in, "d");
  if (n == 0 || d == 0) throw ParseError("binary cloud with zero rows or columns");
  PointCloud cloud(static_cast<Index>(n), static_cast<Index>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint64_t j = 0; j < d; ++j) {
      const auto bits = read_le<std::uint64_t>(in, "values");
      const double v = std::bit_cast<double>(bits);
      if (!std::isfinite(v)) throw NonFiniteValue(i + 1, j + 1);
      cloud(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  return cloud;
}

PointCloud load_cloud(const CloudFile& file) {
  std::ifstream in(file.path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + file.path.string() + "'");
  return file.format == CloudFormat::csv ? parse_csv_cloud(in) : parse_binary_cloud(in);
}

PointCloud load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  const bool binary = in.gcount() == 4 && magic == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? parse_binary_cloud(in) : parse_csv_cloud(in);
}

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

void write_csv_cloud(std::ostream& out, const PointCloud& cloud, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Index i = 0; i < cloud.rows(); ++i) {
    for (Index j = 0; j < cloud.cols(); ++j) out << (j ? "," : "") << format_double(cloud(i, j));
    out << '\n';
  }
}

void write_binary_cloud(std::ostream& out, const PointCloud& cloud) {
  out.write(kMagic.data(), kMagic.size());
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(cloud.rows()));
  write_le<std::uint64_t>(out, static_cast<std::uint64_t>(cloud.cols()));
  for (Index i = 0; i < cloud.rows(); ++i)
    for (Index j = 0; j < cloud.cols(); ++j) write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(cloud(i, j)));
}

void save_cloud(const PointCloud& cloud, const CloudFile& file) {
  std::ofstream out(file.path, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.path.string() + "'");
  if (file.format == CloudFormat::csv)
    write_csv_cloud(out, cloud, file.header);
  else
    write_binary_cloud(out, cloud);
  if (!out) throw Error("write to '" + file.path.string() + "' failed");
}

std::string result_to_json(const DistanceResult& result, bool include_levels) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["method"] = result.method;
  j["value"] = result.value;
  j["alpha_star"] = result.alpha_star ? ordered_json(*result.alpha_star) : ordered_json(nullptr);
  j["p"] = result.params.p;
  j["epsilon"] = result.params.epsilon;
  j["K"] = result.params.directions;
  j["n_alpha"] = result.params.n_alpha;
  j["seed"] = result.params.seed;
  j["depth_notion"] = std::string(to_string(result.params.depth));
  if (include_levels) {
    ordered_json levels = ordered_json::array();
    for (const auto& l : result.levels) levels.push_back({{"alpha", l.alpha}, {"hausdorff", l.hausdorff}});
    j["levels"] = std::move(levels);
  }
  return j.dump(2);
}

std::string result_to_csv(const DistanceResult& result) {
  std::ostringstream out;
  out << "method,value,alpha_star,p,epsilon,K,n_alpha,seed,depth_notion\n";
  out << result.method << ',' << format_double(result.value) << ','
      << (result.alpha_star ? format_double(*result.alpha_star) : std::string()) << ','
      << format_double(result.params.p) << ',' << format_double(result.params.epsilon) << ','
      << result.params.directions << ',' << result.params.n_alpha << ',' << result.params.seed << ','
      << to_string(result.params.depth) << '\n';
  return out.str();
}

}  // namespace depthdist

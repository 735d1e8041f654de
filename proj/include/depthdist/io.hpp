#pragma once

// Point-cloud files (CSV and a little-endian binary format) and
// serialization of distance results.

#include "depthdist/metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace depthdist {

enum class CloudFormat { csv, binary_f64 };

/// CSV: optional one-line header, comma-separated, one point per row.
/// Binary: "DRWC", u64 n, u64 d, then n*d f64 row-major, all little-endian.
struct CloudFile {
  std::filesystem::path path;
  CloudFormat format = CloudFormat::csv;
  std::vector<std::string> header;
};

/// ".bin" / ".drwc" select the binary format, anything else CSV.
CloudFormat format_for_path(const std::filesystem::path& path);

PointCloud load_cloud(const CloudFile& file);
/// Detects the format from the magic bytes.
PointCloud load_cloud(const std::filesystem::path& path);

PointCloud parse_csv_cloud(std::istream& in, std::vector<std::string>* header = nullptr);
PointCloud parse_binary_cloud(std::istream& in);

void save_cloud(const PointCloud& cloud, const CloudFile& file);
void write_csv_cloud(std::ostream& out, const PointCloud& cloud,
                     const std::vector<std::string>& header = {});
void write_binary_cloud(std::ostream& out, const PointCloud& cloud);

/// Shortest decimal form that round-trips (at most 17 significant digits).
std::string format_double(double v);

/// JSON object with value, alpha_star, p, epsilon, K, n_alpha, seed,
/// depth_notion and, optionally, the per-level samples.
std::string result_to_json(const DistanceResult& result, bool include_levels = false);
/// Header line plus one data row.
std::string result_to_csv(const DistanceResult& result);

}  // namespace depthdist

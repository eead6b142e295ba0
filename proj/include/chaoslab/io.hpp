#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chaoslab {

/// Shortest text that round-trips a double ("%.17g"); non-finite values print
/// as inf, -inf and nan.
std::string format_double(double v);

/// Minimal CSV emitter: comma separated, header first, LF line endings.
class CsvWriter {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

/// Pairwise (cascade) summation. The result depends only on the order of the
/// input, never on threading.
double pairwise_sum(std::span<const double> values);

/// git-style content hash, "blob <size>\0<bytes>", using SHA-256; lowercase hex.
std::string git_blob_sha256(const std::string& bytes);
std::string git_blob_sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes bytes exactly (binary mode, so LF stays LF).
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace chaoslab

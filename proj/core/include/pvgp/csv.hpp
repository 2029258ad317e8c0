#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace pvgp {

/// Minimal comma-separated reader: no quoting, fields trimmed, blank lines
/// skipped. Tracks 1-based line numbers for diagnostics.
class CsvReader {
 public:
  /// Throws DataError naming the path if it cannot be opened.
  explicit CsvReader(const std::filesystem::path& path);

  /// Reads the first line and throws DataError unless it equals `expected`.
  void expect_header(const std::vector<std::string>& expected);

  bool next(std::vector<std::string>& fields);
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::ifstream in_;
  std::string source_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_csv_line(std::string_view line);

/// Strict numeric parsing; false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);
bool parse_int64(std::string_view text, long long& out);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace pvgp

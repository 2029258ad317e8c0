#include "pvgp/csv.hpp"

#include <charconv>

#include "pvgp/error.hpp"

namespace pvgp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  while (true) {
    const auto comma = line.find(',');
    out.emplace_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

CsvReader::CsvReader(const std::filesystem::path& path)
    : in_(path), source_(path.string()) {
  if (!in_) throw DataError("cannot open " + source_);
}

void CsvReader::expect_header(const std::vector<std::string>& expected) {
  std::vector<std::string> fields;
  if (!next(fields)) throw DataError(source_ + ": empty file, expected header");
  if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
    fields[0] = fields[0].substr(3);
  if (fields != expected) {
    std::string want;
    for (const auto& f : expected) want += (want.empty() ? "" : ",") + f;
    throw DataError(source_ + ":" + std::to_string(line_) +
                    ": bad header, expected '" + want + "'");
  }
}

bool CsvReader::next(std::vector<std::string>& fields) {
  std::string raw;
  while (std::getline(in_, raw)) {
    ++line_;
    if (trim(raw).empty()) continue;
    fields = split_csv_line(raw);
    return true;
  }
  return false;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_int64(std::string_view text, long long& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace pvgp

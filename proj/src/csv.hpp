#pragma once

// Minimal CSV reading for numeric tables: comma separated, '#' comments,
// surrounding whitespace ignored. No quoting.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace biphoton::csv {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline bool skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

struct Line {
  std::size_t number;
  std::string text;
};

/// Reads non-blank, non-comment lines with their 1-based line numbers.
inline std::vector<Line> read_lines(std::istream& is) {
  std::vector<Line> out;
  std::string text;
  std::size_t n = 0;
  while (std::getline(is, text)) {
    ++n;
    if (!skippable(text)) out.push_back({n, text});
  }
  return out;
}

}  // namespace biphoton::csv

/*
 Copyright 2026 The conic-h2 Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#pragma once

// Minimal CSV emission with shortest round-trip number formatting, so equal
// inputs always give byte-identical files.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace conic_h2::csv {

/// Shortest decimal that parses back to the same double; "inf", "-inf" and
/// "nan" for non-finite values.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string number(long long v) { return std::to_string(v); }
inline std::string number(int v) { return std::to_string(v); }

/// Quotes a field when it holds a comma, quote or line break.
inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class Writer {
 public:
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ',';
      text_ += field(cells[i]);
    }
    text_ += '\n';
  }

  /// Comment line, used to embed the resolved configuration.
  void comment(std::string_view line) {
    text_ += "# ";
    text_ += line;
    text_ += '\n';
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

}  // namespace conic_h2::csv

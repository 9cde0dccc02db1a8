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

// JSON (de)serialization of plants, controllers and state-space systems, plus
// atomic file output. Matrices are row-major nested arrays; an empty matrix is
// written as [] and a matrix with rows but no columns as [[], ...].

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>

#include "json.hpp"

#include "conic_h2/lti.hpp"

namespace conic_h2::io {

using Json = nlohmann::ordered_json;

/// Unreadable file, malformed JSON or missing field.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline Json to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) throw IoError(name + ": expected an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  if (r == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw IoError(name + ": expected an array of rows");
  const auto c = static_cast<Eigen::Index>(j[0].size());
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
      throw IoError(name + ": row " + std::to_string(i) + " has the wrong length");
    for (Eigen::Index k = 0; k < c; ++k) {
      const auto& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw IoError(name + ": entry (" + std::to_string(i) + ", " + std::to_string(k) + ") is not a number");
      M(i, k) = v.get<double>();
    }
  }
  return M;
}

inline Matrix field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw IoError(std::string("missing field \"") + key + "\"");
  return matrix_from_json(j.at(key), key);
}

inline Json to_json(const Plant& g) {
  return Json{{"A", to_json(g.A)},     {"B1", to_json(g.B1)},   {"B2", to_json(g.B2)}, {"C1", to_json(g.C1)},
              {"C2", to_json(g.C2)},   {"D12", to_json(g.D12)}, {"D21", to_json(g.D21)}};
}

inline Plant plant_from_json(const Json& j) {
  Plant g{field(j, "A"), field(j, "B1"), field(j, "B2"), field(j, "C1"), field(j, "C2"), field(j, "D12"), field(j, "D21")};
  // Zero-width blocks lose their row count in nested-array form.
  const auto n = g.A.rows();
  if (g.B1.size() == 0) g.B1 = Matrix::Zero(n, g.D21.cols());
  if (g.C1.size() == 0) g.C1 = Matrix::Zero(g.D12.rows(), n);
  g.validate();
  return g;
}

inline Json to_json(const Controller& c) {
  return Json{{"Ahat", to_json(c.Ahat)}, {"Bhat", to_json(c.Bhat)}, {"Chat", to_json(c.Chat)}};
}

inline Controller controller_from_json(const Json& j) {
  Controller c{field(j, "Ahat"), field(j, "Bhat"), field(j, "Chat")};
  c.validate();
  return c;
}

inline Json to_json(const StateSpace& s) {
  return Json{{"A", to_json(s.A)}, {"B", to_json(s.B)}, {"C", to_json(s.C)}, {"D", to_json(s.D)}};
}

/// Accepts {A, B, C[, D]}; a missing D is zero.
inline StateSpace state_space_from_json(const Json& j) {
  const Matrix A = field(j, "A"), B = field(j, "B"), C = field(j, "C");
  const Matrix D = j.contains("D") ? field(j, "D") : Matrix::Zero(C.rows(), B.cols());
  return StateSpace(A, B, C, D);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json load_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

/// Writes through a sibling temporary and renames it over the target, so
/// readers see either the old file or the complete new one.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tag = std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000) + "." +
                   std::to_string(counter++);
  const std::filesystem::path tmp = path.string() + ".tmp" + tag;
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_atomic(path, j.dump(2) + "\n"); }

}  // namespace conic_h2::io

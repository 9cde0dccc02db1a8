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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "conic_h2/csv.hpp"
#include "conic_h2/io.hpp"
#include "test_util.hpp"

using namespace conic_h2;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("conic_h2_io_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> e(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::pow(10.0, e(rng)) * (i % 2 ? -1.0 : 1.0);
    EXPECT_EQ(std::stod(csv::number(v)), v);
  }
  EXPECT_EQ(csv::number(0.0), "0");
  EXPECT_EQ(csv::number(-0.0), "0");
  EXPECT_EQ(csv::number(0.1), "0.1");
  EXPECT_EQ(csv::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(csv::number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(csv::number(std::nan("")), "nan");
  EXPECT_EQ(csv::number(12LL), "12");
}

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::field("plain"), "plain");
  EXPECT_EQ(csv::field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::field("say \"hi\""), "\"say \"\"hi\"\"\"");
  csv::Writer w;
  w.comment("note");
  w.row({"x", "y,z"});
  EXPECT_EQ(w.str(), "# note\nx,\"y,z\"\n");
}

TEST(Json, MatrixRoundTrip) {
  std::mt19937 rng(1);
  const Matrix M = conic_h2::testing::random_matrix(rng, 3, 4);
  const auto back = io::matrix_from_json(io::Json::parse(io::to_json(M).dump()), "M");
  EXPECT_EQ(back, M);
  EXPECT_EQ(io::matrix_from_json(io::Json::array(), "E").size(), 0);
}

TEST(Json, MalformedMatricesAreRejected) {
  EXPECT_THROW(io::matrix_from_json(io::Json::parse("[[1, 2], [3]]"), "M"), io::IoError);
  EXPECT_THROW(io::matrix_from_json(io::Json::parse("[[1, \"x\"]]"), "M"), io::IoError);
  EXPECT_THROW(io::matrix_from_json(io::Json::parse("{\"a\": 1}"), "M"), io::IoError);
  EXPECT_THROW(io::field(io::Json::object(), "A"), io::IoError);
}

TEST(Json, PlantAndControllerRoundTrip) {
  std::mt19937 rng(2);
  const auto g = conic_h2::testing::random_plant(rng, 3, 2);
  const auto g2 = io::plant_from_json(io::Json::parse(io::to_json(g).dump()));
  EXPECT_EQ(g2.A, g.A);
  EXPECT_EQ(g2.B1, g.B1);
  EXPECT_EQ(g2.D21, g.D21);
  const auto c = conic_h2::testing::random_controller(rng, 2, 2);
  const auto c2 = io::controller_from_json(io::Json::parse(io::to_json(c).dump()));
  EXPECT_EQ(c2.Ahat, c.Ahat);
  EXPECT_EQ(c2.Chat, c.Chat);
}

TEST(Json, PlantWithMismatchedBlocksIsRejected) {
  std::mt19937 rng(3);
  auto j = io::to_json(conic_h2::testing::random_plant(rng, 3, 1));
  j["B2"] = io::to_json(Matrix::Ones(2, 1));
  EXPECT_THROW(io::plant_from_json(j), DimensionError);
}

TEST(Json, StateSpaceDefaultsToZeroFeedthrough) {
  const auto s = io::state_space_from_json(io::Json::parse(R"({"A": [[-1]], "B": [[1]], "C": [[2]]})"));
  EXPECT_EQ(s.D, Matrix::Zero(1, 1));
}

TEST(Files, AtomicWriteCreatesDirectoriesAndLeavesNoTemporaries) {
  const auto d = scratch("atomic");
  const auto f = d / "nested" / "out.txt";
  io::write_atomic(f, "first\n");
  io::write_atomic(f, "second\n");
  EXPECT_EQ(io::read_text(f), "second\n");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(f.parent_path())) ++files;
  EXPECT_EQ(files, 1);
  fs::remove_all(d);
}

TEST(Files, MissingOrBrokenFilesRaiseIoError) {
  const auto d = scratch("broken");
  EXPECT_THROW(io::load_json(d / "absent.json"), io::IoError);
  io::write_atomic(d / "bad.json", "{not json");
  EXPECT_THROW(io::load_json(d / "bad.json"), io::IoError);
  fs::remove_all(d);
}

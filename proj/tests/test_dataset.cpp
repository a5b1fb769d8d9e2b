#include "usdr/dataset.hpp"
#include "usdr/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace usdr;

namespace {

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("usdr_test_" + name);
  std::ofstream(p) << text;
  return p;
}

Errc load_error(const fs::path& p, std::string* message = nullptr) {
  try {
    load_csv(p);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "expected load_csv to throw";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(LoadCsv, TwoFeatureColumns) {
  const auto d = load_csv(write_temp("plain.csv", "a,b\n1,2\n3,4\n5,6\n"));
  EXPECT_EQ(d.size(), 3);
  EXPECT_EQ(d.input_dim(), 2);
  EXPECT_FALSE(d.labels);
  EXPECT_FALSE(d.health);
  EXPECT_DOUBLE_EQ(d.inputs(2, 1), 6.0);
}

TEST(LoadCsv, LabelColumn) {
  const auto d = load_csv(write_temp("labels.csv", "x,label\n0.5,0\n0.25,0\n1e3,1\n"));
  ASSERT_TRUE(d.labels);
  EXPECT_EQ(*d.labels, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(d.input_dim(), 1);
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
  std::string msg;
  EXPECT_EQ(load_error(write_temp("bad.csv", "a,b\n1,2\n3,abc\n"), &msg), Errc::Parse);
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
}

TEST(LoadCsv, Errors) {
  EXPECT_EQ(load_error("/nonexistent/usdr.csv"), Errc::Io);
  EXPECT_EQ(load_error(write_temp("ragged.csv", "a,b\n1,2\n3\n")), Errc::RaggedRow);
  EXPECT_EQ(load_error(write_temp("lab2.csv", "a,label\n1,2\n")), Errc::InvalidLabel);
  EXPECT_EQ(load_error(write_temp("h.csv", "a,health\n1,1.5\n")), Errc::InvalidHealth);
  EXPECT_EQ(load_error(write_temp("nan.csv", "a\nnan\n")), Errc::Parse);
}

TEST(LoadCsv, SchemaSelectsFeatures) {
  const auto p = write_temp("schema.csv", "t,a,b,c,health\n0,1,2,3,1\n1,4,5,6,0.5\n");
  ColumnSchema by_name;
  by_name.features = {"c", "a"};
  const auto d = load_csv(p, by_name);
  EXPECT_EQ(d.input_dim(), 2);
  EXPECT_DOUBLE_EQ(d.inputs(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(d.inputs(1, 1), 4.0);
  ASSERT_TRUE(d.health);
  EXPECT_DOUBLE_EQ((*d.health)[1], 0.5);

  ColumnSchema by_range;
  by_range.feature_range = std::make_pair(1, 3);
  const auto r = load_csv(p, by_range);
  EXPECT_EQ(r.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(LoadCsv, CrlfAndBom) {
  const auto d = load_csv(write_temp("crlf.csv", "\xEF\xBB\xBF" "a,b\r\n1,2\r\n"));
  EXPECT_EQ(d.feature_names.front(), "a");
  EXPECT_DOUBLE_EQ(d.inputs(0, 1), 2.0);
}

TEST(SaveCsv, RoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1e3);
  Dataset d;
  d.inputs.resize(17, 4);
  for (Eigen::Index i = 0; i < d.inputs.size(); ++i) d.inputs.data()[i] = g(rng) / 7.0;
  d.inputs(0, 0) = 1e-300;
  d.inputs(1, 1) = -0.0;
  d.targets = d.inputs;
  d.labels = std::vector<int>(17, 0);
  (*d.labels)[5] = 1;
  d.health = std::vector<double>(17, 1.0 / 3.0);
  d.feature_names = {"f0", "f1", "f2", "f3"};

  const auto p = fs::temp_directory_path() / "usdr_test_roundtrip.csv";
  save_csv(d, p);
  const auto back = load_csv(p);
  EXPECT_TRUE(back.inputs == d.inputs);
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.health, d.health);
  EXPECT_EQ(back.feature_names, d.feature_names);
}

TEST(AsReconstruction, ReplacesTargets) {
  Dataset d;
  d.inputs = Matrix::Random(4, 3);
  d.targets = Matrix::Random(4, 2);
  const auto r = as_reconstruction(d);
  EXPECT_TRUE(r.targets == d.inputs);
  EXPECT_TRUE(is_reconstruction(r));
}

TEST(AsReconstruction, IdempotentAndMinimal) {
  Dataset d;
  d.inputs = Matrix::Random(1, 3);
  d.targets = d.inputs;
  const auto once = as_reconstruction(d);
  const auto twice = as_reconstruction(once);
  EXPECT_TRUE(once.targets == d.inputs);
  EXPECT_TRUE(twice.targets == once.targets);
  EXPECT_NO_THROW(validate(twice));
}

TEST(Validate, RejectsNonFiniteAndShapeErrors) {
  Dataset d;
  d.inputs = Matrix::Ones(3, 2);
  d.targets = d.inputs;
  d.inputs(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate(d), Error);
  d.inputs(1, 1) = 1.0;
  d.labels = std::vector<int>{0, 1};
  EXPECT_THROW(validate(d), Error);
  Dataset empty;
  EXPECT_THROW(validate(empty), Error);
}

// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nohis/descriptors.hpp"
#include "nohis/tree.hpp"

namespace nohis::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nohis_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, kUsageError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kUsageError);
  EXPECT_EQ(invoke({"build", "--input", "x"}).code, kUsageError);
  EXPECT_EQ(invoke({"query", "--index", "x"}).code, kUsageError);
  EXPECT_EQ(invoke({"--help"}).code, kSuccess);
}

TEST_F(CliTest, MissingFilesAreDataErrors) {
  EXPECT_EQ(invoke({"build", "--input", path("none.nohv"), "--output", path("i")}).code, kDataError);
  EXPECT_EQ(invoke({"extract", "--images", path("missing"), "--output", path("d")}).code, kDataError);
  std::ofstream(path("garbage.nohv")) << "not a descriptor file";
  const auto r = invoke({"build", "--input", path("garbage.nohv"), "--output", path("i")});
  EXPECT_EQ(r.code, kDataError);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST_F(CliTest, ExtractEmptyDirectoryWritesEmptyFile) {
  fs::create_directories(path("empty"));
  const auto r = invoke({"extract", "--images", path("empty"), "--output", path("d.nohv")});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(load_descriptors(path("d.nohv")).size(), 0u);
}

TEST_F(CliTest, ExtractSkipsCorruptImages) {
  ASSERT_EQ(invoke({"gen", "images", "--dir", path("imgs"), "--count", "3", "--size", "96"}).code, kSuccess);
  std::ofstream(path("imgs/broken.pgm")) << "P5\n40 40\n255\nshort";
  const auto r = invoke({"extract", "--images", path("imgs"), "--output", path("d.nohv")});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_NE(r.err.find("broken.pgm"), std::string::npos);
  const auto d = load_descriptors(path("d.nohv"));
  EXPECT_GT(d.size(), 0u);
  EXPECT_EQ(d.dim(), kDescriptorDim);
}

TEST_F(CliTest, ExtractAndBuildAreDeterministic) {
  ASSERT_EQ(invoke({"gen", "images", "--dir", path("imgs"), "--count", "4", "--size", "96"}).code, kSuccess);
  ASSERT_EQ(invoke({"extract", "--images", path("imgs"), "--output", path("a.nohv")}).code, kSuccess);
  ASSERT_EQ(invoke({"extract", "--images", path("imgs"), "--output", path("b.nohv"), "--jobs", "2"}).code, kSuccess);
  EXPECT_EQ(slurp(path("a.nohv")), slurp(path("b.nohv")));
  ASSERT_EQ(invoke({"build", "--input", path("a.nohv"), "--output", path("a.nohi"), "--min-leaf", "4"}).code,
            kSuccess);
  ASSERT_EQ(invoke({"build", "--input", path("a.nohv"), "--output", path("b.nohi"), "--min-leaf", "4"}).code,
            kSuccess);
  EXPECT_EQ(slurp(path("a.nohi")), slurp(path("b.nohi")));
}

TEST_F(CliTest, BuildReportsAndHonoursCmax) {
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("v.nohv"), "--count", "5000", "--clusters", "10"}).code,
            kSuccess);
  auto r = invoke({"build", "--input", path("v.nohv"), "--output", path("one.nohi"), "--cmax", "1"});
  ASSERT_EQ(r.code, kSuccess);
  EXPECT_NE(r.out.find("leaves\t1\n"), std::string::npos);
  EXPECT_EQ(load_index(path("one.nohi")).leaf_count(), 1u);

  r = invoke({"build", "--input", path("v.nohv"), "--output", path("many.nohi"), "--cmax", "40", "--min-leaf", "8"});
  ASSERT_EQ(r.code, kSuccess);
  const auto tree = load_index(path("many.nohi"));
  EXPECT_LE(tree.leaf_count(), 40u);
  EXPECT_NE(r.out.find("leaves\t" + std::to_string(tree.leaf_count()) + "\n"), std::string::npos);
  EXPECT_NE(r.out.find("build_seconds\t"), std::string::npos);

  r = invoke({"build", "--input", path("v.nohv"), "--output", path("b.nohi"), "--baseline", "pddp"});
  ASSERT_EQ(r.code, kSuccess);
  EXPECT_TRUE(load_index(path("b.nohi")).axis_aligned());
  EXPECT_EQ(invoke({"build", "--input", path("v.nohv"), "--output", path("x"), "--baseline", "kd"}).code,
            kUsageError);
}

TEST_F(CliTest, BuildIdenticalDescriptorsWarnsSingleLeaf) {
  Dataset d;
  d.vectors = VectorSet(3);
  for (std::uint64_t i = 0; i < 100; ++i) {
    d.vectors.push_back(DenseVector{1, 2, 3});
    d.global_indices.push_back(i);
    d.image_ids.push_back(0);
  }
  save_descriptors(d, path("same.nohv"));
  const auto r = invoke({"build", "--input", path("same.nohv"), "--output", path("i.nohi"), "--cmax", "8",
                         "--min-leaf", "1"});
  EXPECT_EQ(r.code, kSuccess);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("leaves\t1\n"), std::string::npos);
}

TEST_F(CliTest, VectorQueryStoredDescriptorAndStats) {
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("v.nohv"), "--count", "3000", "--clusters", "8"}).code,
            kSuccess);
  ASSERT_EQ(invoke({"build", "--input", path("v.nohv"), "--output", path("i.nohi"), "--min-leaf", "8",
                    "--cmax", "30"})
                .code,
            kSuccess);
  auto data = load_descriptors(path("v.nohv"));
  Dataset one;
  one.vectors = VectorSet(data.dim());
  one.vectors.push_back(data.vectors[123]);
  one.global_indices.push_back(0);
  one.image_ids.push_back(0);
  save_descriptors(one, path("q.nohv"));

  const auto r = invoke({"query", "--index", path("i.nohi"), "--vector", path("q.nohv"), "-k", "5", "--stats"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0].rfind("1\t123\t0.000000\t", 0), 0u) << lines[0];
  EXPECT_NE(lines[5].find("\"schema\":\"nohis.search_stats/1\""), std::string::npos);
  const auto pos = lines[5].find("\"leaves_visited\":");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LE(std::stoul(lines[5].substr(pos + 17)), 30u);

  const auto ranged = invoke({"query", "--index", path("i.nohi"), "--vector", path("q.nohv"), "--range", "0"});
  ASSERT_EQ(ranged.code, kSuccess);
  EXPECT_EQ(lines_of(ranged.out).size(), 1u);

  Dataset wrong;
  wrong.vectors = VectorSet(3);
  wrong.vectors.push_back(DenseVector{1, 2, 3});
  wrong.global_indices.push_back(0);
  wrong.image_ids.push_back(0);
  save_descriptors(wrong, path("w.nohv"));
  EXPECT_EQ(invoke({"query", "--index", path("i.nohi"), "--vector", path("w.nohv")}).code, kDataError);
}

TEST_F(CliTest, MultipleVectorQueriesAreSectioned) {
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("v.nohv"), "--count", "500", "--dim", "4"}).code, kSuccess);
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("q.nohv"), "--count", "3", "--dim", "4", "--sample-seed",
                    "9"})
                .code,
            kSuccess);
  ASSERT_EQ(invoke({"build", "--input", path("v.nohv"), "--output", path("i.nohi"), "--min-leaf", "4"}).code,
            kSuccess);
  const auto r = invoke({"query", "--index", path("i.nohi"), "--vector", path("q.nohv"), "-k", "2"});
  ASSERT_EQ(r.code, kSuccess);
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 9u);
  EXPECT_EQ(lines[0], "# query 0");
  EXPECT_EQ(lines[3], "# query 1");
  EXPECT_EQ(lines[6], "# query 2");
}

TEST_F(CliTest, ImageQueryRanksSourceImageFirst) {
  ASSERT_EQ(invoke({"gen", "images", "--dir", path("imgs"), "--count", "5", "--size", "96"}).code, kSuccess);
  ASSERT_EQ(invoke({"extract", "--images", path("imgs"), "--output", path("d.nohv")}).code, kSuccess);
  ASSERT_EQ(invoke({"build", "--input", path("d.nohv"), "--output", path("i.nohi"), "--min-leaf", "4"}).code,
            kSuccess);
  const auto r = invoke({"query", "--index", path("i.nohi"), "--image", path("imgs/img_0003.pgm"), "--top", "3"});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_FALSE(lines.empty());
  EXPECT_LE(lines.size(), 3u);
  EXPECT_EQ(lines[0].rfind("1\t3\t", 0), 0u) << lines[0];

  save_pgm(GrayImage(64, 64, 0.5), path("flat.pgm"));
  const auto flat = invoke({"query", "--index", path("i.nohi"), "--image", path("flat.pgm")});
  EXPECT_EQ(flat.code, kDataError);
  EXPECT_NE(flat.err.find("featureless query"), std::string::npos);
  EXPECT_EQ(invoke({"query", "--index", path("i.nohi"), "--image", path("flat.pgm"), "--kernel", "x"}).code,
            kUsageError);
}

TEST_F(CliTest, BenchReportsAllModes) {
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("v.nohv"), "--count", "4000", "--clusters", "10"}).code,
            kSuccess);
  ASSERT_EQ(invoke({"gen", "vectors", "--output", path("q.nohv"), "--count", "20", "--clusters", "10",
                    "--sample-seed", "5"})
                .code,
            kSuccess);
  const auto r = invoke({"bench", "--input", path("v.nohv"), "--queries", path("q.nohv"), "-k", "10", "--repeat", "1",
                         "--cmax", "40", "--min-leaf", "8", "--json", path("report.json")});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind("nohis\t4000\t", 0), 0u);
  EXPECT_EQ(lines[2].rfind("pddp\t4000\t", 0), 0u);
  EXPECT_EQ(lines[3].rfind("scan\t4000\t-\t10\t20\t", 0), 0u);
  EXPECT_EQ(lines[3].substr(lines[3].size() - 2), "\t-");
  const auto report = slurp(path("report.json"));
  EXPECT_NE(report.find("\"schema\": \"nohis.bench_report/1\""), std::string::npos);
  EXPECT_EQ(invoke({"bench", "--input", path("v.nohv"), "--queries", path("q.nohv"), "--modes", "nohis,kd"}).code,
            kUsageError);
}

}  // namespace
}  // namespace nohis::cli

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "phenoid/common/error.h"
#include "phenoid/common/io.h"
#include "phenoid/common/rng.h"
#include "testing.h"

namespace phenoid {
namespace {

TEST(RngTest, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformStaysInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RngTest, IndexIsRoughlyUniform) {
  Rng rng(2);
  std::map<uint64_t, int> counts;
  for (int i = 0; i < 60000; ++i) ++counts[rng.Index(6)];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [v, c] : counts) EXPECT_NEAR(c, 10000, 500) << v;
}

TEST(RngTest, NormalMoments) {
  Rng rng(3);
  double sum = 0.0, sq = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.Normal(2.0, 3.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 2.0, 0.05);
  EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 3.0, 0.05);
}

TEST(RngTest, SampleWithoutReplacementIsDistinct) {
  Rng rng(4);
  const auto s = rng.SampleWithoutReplacement(50, 20);
  EXPECT_EQ(s.size(), 20u);
  EXPECT_EQ(std::set<size_t>(s.begin(), s.end()).size(), 20u);
  for (size_t v : s) EXPECT_LT(v, 50u);
}

TEST(DeriveSeedTest, TagsGiveDistinctStreams) {
  EXPECT_NE(DeriveSeed(1, "a"), DeriveSeed(1, "b"));
  EXPECT_NE(DeriveSeed(1, uint64_t{0}), DeriveSeed(2, uint64_t{0}));
  EXPECT_EQ(DeriveSeed(9, "cv"), DeriveSeed(9, "cv"));
}

TEST(IoTest, AtomicWriteThenRead) {
  const auto dir = testing::TempDir("io");
  WriteFileAtomic(dir / "f.txt", "hello");
  WriteFileAtomic(dir / "f.txt", "world");
  EXPECT_EQ(ReadFile(dir / "f.txt"), "world");
  AppendLine(dir / "g.txt", "a");
  AppendLine(dir / "g.txt", "b");
  EXPECT_EQ(ReadFile(dir / "g.txt"), "a\nb\n");
}

TEST(IoTest, MissingFileIsIoError) {
  try {
    ReadFile("/nonexistent/phenoid/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_FALSE(IsValidationError(e.code()));
  }
}

TEST(IoTest, StringHelpers) {
  EXPECT_EQ(Trim("  x y \t"), "x y");
  const auto parts = Split("a,,b", ',');
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[1], "");
  EXPECT_EQ(ToLower("HTN Noted"), "htn noted");
}

TEST(IoTest, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
}

TEST(ErrorTest, ValidationClassification) {
  EXPECT_TRUE(IsValidationError(ErrorCode::kParse));
  EXPECT_TRUE(IsValidationError(ErrorCode::kBudget));
  EXPECT_FALSE(IsValidationError(ErrorCode::kDegenerate));
  EXPECT_FALSE(ErrorCodeName(ErrorCode::kConflict).empty());
}

}  // namespace
}  // namespace phenoid

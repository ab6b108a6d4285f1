//
// Copyright 2026 The deepcand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "deepcand/sampling.h"

#include <cmath>
#include <numeric>
#include <set>

#include "deepcand/rng.h"
#include "deepcand/simd/kernels.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace deepcand {
namespace {

TEST(SeededRngTest, StreamsAreReproducibleAndDistinct) {
  SeededRng a(42, "x"), b(42, "x"), c(42, "y"), d(43, "x");
  const uint64_t first = a.NextU64();
  EXPECT_EQ(first, b.NextU64());
  EXPECT_NE(first, c.NextU64());
  EXPECT_NE(first, d.NextU64());
}

TEST(SeededRngTest, FirstOutputMatchesSplitMixDefinition) {
  // Recomputed here from the published SplitMix64 constants.
  auto mix = [](uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  uint64_t fnv = 0xcbf29ce484222325ULL;
  for (char ch : std::string("abc")) {
    fnv ^= static_cast<unsigned char>(ch);
    fnv *= 0x100000001b3ULL;
  }
  const uint64_t key = mix(mix(9) ^ fnv);
  SeededRng rng(9, "abc");
  EXPECT_EQ(rng.key(), key);
  EXPECT_EQ(rng.NextU64(), mix(key + 0x9E3779B97F4A7C15ULL));
  EXPECT_EQ(rng.NextU64(), mix(key + 2 * 0x9E3779B97F4A7C15ULL));
}

TEST(SeededRngTest, ChildIgnoresParentPosition) {
  SeededRng a(5, "root");
  SeededRng b(5, "root");
  b.NextU64();
  b.NextU64();
  EXPECT_EQ(a.Child("k").NextU64(), b.Child("k").NextU64());
}

TEST(SeededRngTest, UniformRanges) {
  SeededRng rng(1, "u");
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double o = rng.UniformOpen();
    EXPECT_GT(o, 0.0);
    EXPECT_LT(o, 1.0);
    EXPECT_LT(rng.UniformIndex(7), 7u);
  }
}

TEST(SeededRngTest, GaussianMoments) {
  SeededRng rng(3, "g");
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.Gaussian();
    sum += g;
    sq += g * g;
  }
  EXPECT_NEAR(sum / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(UnitSphereTest, RowsAreUnitAndCentered) {
  SeededRng rng(11, "sphere");
  const size_t n = 100000;
  ASSERT_OK_AND_ASSIGN(ProjectionSet set, SampleUnitSphere(rng, 3, n));
  ASSERT_EQ(set.size(), n);
  double mean[3] = {0, 0, 0};
  for (size_t j = 0; j < n; ++j) {
    EXPECT_NEAR(simd::Dot(set.direction(j), set.direction(j)), 1.0, 1e-12);
    for (int c = 0; c < 3; ++c) mean[c] += set.direction(j)[c] / n;
  }
  // A uniform coordinate on S^2 has variance 1/3.
  const double tol = 3.0 / std::sqrt(3.0 * n);
  for (int c = 0; c < 3; ++c) EXPECT_LT(std::fabs(mean[c]), tol);
}

TEST(UnitSphereTest, RejectsDegenerateShapes) {
  SeededRng rng(1, "s");
  EXPECT_FALSE(SampleUnitSphere(rng, 0, 3).ok());
  EXPECT_FALSE(SampleUnitSphere(rng, 3, 0).ok());
}

TEST(UnitSphereTest, PrefixKeepsLeadingRows) {
  SeededRng rng(1, "s");
  ASSERT_OK_AND_ASSIGN(ProjectionSet set, SampleUnitSphere(rng, 4, 10));
  const ProjectionSet prefix = set.Prefix(3);
  ASSERT_EQ(prefix.size(), 3u);
  for (size_t j = 0; j < 3; ++j) {
    EXPECT_TRUE(std::equal(prefix.direction(j).begin(),
                           prefix.direction(j).end(),
                           set.direction(j).begin()));
  }
}

TEST(LaplaceTest, InverseCdfAtQuarter) {
  EXPECT_NEAR(LaplaceFromUniform(0.25, 1.0), 0.693147, 1e-6);
  EXPECT_NEAR(LaplaceFromUniform(-0.25, 2.0), -2 * 0.693147, 1e-6);
  EXPECT_EQ(LaplaceFromUniform(0.0, 1.0), 0.0);
}

TEST(LaplaceTest, StandardDeviation) {
  SeededRng rng(21, "laplace");
  const double b = 1.5;
  const int n = 1000000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    ASSERT_OK_AND_ASSIGN(double x, SampleLaplace(rng, b));
    ASSERT_TRUE(std::isfinite(x));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd / (b * std::sqrt(2.0)), 1.0, 0.01);
}

TEST(CategoricalTest, Frequencies) {
  SeededRng rng(5, "cat");
  const std::vector<double> w = {1.0, 1.0};
  const int n = 1000000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    ASSERT_OK_AND_ASSIGN(size_t k, SampleCategorical(rng, w));
    zeros += k == 0;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / n, 0.5, 0.002);
}

TEST(CategoricalTest, NeverPicksZeroWeight) {
  SeededRng rng(5, "cat");
  const std::vector<double> w = {0.0, 3.0, 0.0};
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(*SampleCategorical(rng, w), 1u);
  }
  EXPECT_FALSE(SampleCategorical(rng, std::vector<double>{}).ok());
  EXPECT_FALSE(SampleCategorical(rng, std::vector<double>{0.0, 0.0}).ok());
  EXPECT_FALSE(SampleCategorical(rng, std::vector<double>{1.0, -1.0}).ok());
}

TEST(LogSumExpTest, NormalizeExample) {
  ASSERT_OK_AND_ASSIGN(std::vector<double> p,
                       LogSumExpNormalize(std::vector<double>{0.0, -2.0}));
  EXPECT_NEAR(p[0], 0.880797, 1e-6);
  EXPECT_NEAR(p[1], 0.119203, 1e-6);
}

TEST(LogSumExpTest, LargeValuesDoNotOverflow) {
  ASSERT_OK_AND_ASSIGN(std::vector<double> p,
                       LogSumExpNormalize(std::vector<double>{1000.0, 1000.0}));
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_NEAR(LogSumExp(std::vector<double>{1000.0, 1000.0}),
              1000.0 + std::log(2.0), 1e-9);
}

TEST(LogSumExpTest, NegativeInfinityIsZeroWeight) {
  const double ninf = -std::numeric_limits<double>::infinity();
  ASSERT_OK_AND_ASSIGN(std::vector<double> p,
                       LogSumExpNormalize(std::vector<double>{ninf, 0.0}));
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 1.0);
  EXPECT_FALSE(LogSumExpNormalize(std::vector<double>{ninf, ninf}).ok());
  EXPECT_FALSE(LogSumExpNormalize(std::vector<double>{NAN}).ok());
}

TEST(GammaTest, MeanMatchesShapeTimesScale) {
  SeededRng rng(8, "gamma");
  for (double shape : {0.5, 1.0, 4.0, 32.0}) {
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      ASSERT_OK_AND_ASSIGN(double g, SampleGamma(rng, shape, 2.0));
      ASSERT_GT(g, 0.0);
      sum += g;
    }
    EXPECT_NEAR(sum / n / (2.0 * shape), 1.0, 0.02) << shape;
  }
  EXPECT_FALSE(SampleGamma(rng, 0.0, 1.0).ok());
}

TEST(WithoutReplacementTest, DistinctSortedInRange) {
  SeededRng rng(2, "wor");
  ASSERT_OK_AND_ASSIGN(std::vector<size_t> idx,
                       SampleWithoutReplacement(rng, 100, 30));
  ASSERT_EQ(idx.size(), 30u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::set<size_t>(idx.begin(), idx.end()).size(), 30u);
  EXPECT_LT(idx.back(), 100u);
  EXPECT_FALSE(SampleWithoutReplacement(rng, 3, 4).ok());
}

}  // namespace
}  // namespace deepcand

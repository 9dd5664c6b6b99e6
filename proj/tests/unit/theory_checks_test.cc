// Copyright 2026 The detmc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "detmc/theory_checks.h"

#include <cmath>

#include <gtest/gtest.h>

#include "detmc/experiments.h"
#include "json.hpp"

namespace detmc {
namespace {

GroundTruth FlatRankOne(int n) {
  return GroundTruth::FromMatrix(DenseMatrix::Constant(n, n, 1.0 / n), 1);
}

BiregularGraph TwoDisjointK22() {
  std::vector<Edge> edges;
  for (int b = 0; b < 2; ++b) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) edges.push_back({2 * b + i, 2 * b + j});
    }
  }
  return BiregularGraph::FromEdges(4, 4, edges);
}

const BiregularGraph& Lps() {
  static const BiregularGraph g = GenerateLpsBipartite(5, 13);
  return g;
}

TEST(DeltaTildeTest, Formula) {
  EXPECT_DOUBLE_EQ(DeltaTilde(0.0, 0.0, 1.0, 1, 4, 4), 0.0);
  // sqrt(2 (0.25 + 4 * 1 * 4 / 16)) = sqrt(2.5)
  EXPECT_DOUBLE_EQ(DeltaTilde(0.5, 2.0, 1.0, 2, 16, 20), std::sqrt(2.5));
}

TEST(RipOnTTest, CompleteGraphHasNoDeviation) {
  const GroundTruth gt = GenSyntheticLowRank(12, 12, 2, 2.0, 1);
  const TheoryCheckReport rep = CheckRipOnT(gt, CompleteBipartite(12, 12), 20, 1);
  ASSERT_TRUE(rep.delta_tilde.has_value());
  EXPECT_NEAR(*rep.delta_tilde, 0.0, 1e-12);
  EXPECT_LE(std::abs(rep.worst_margin), 1e-12 * rep.scale);
  EXPECT_TRUE(rep.passed());
  EXPECT_EQ(rep.instances_tested, 20);
}

TEST(RipOnTTest, LpsFlatRankOne) {
  const TheoryCheckReport rep = CheckRipOnT(FlatRankOne(1092), Lps(), 20, 2);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_GT(rep.worst_margin, 0.0);
}

TEST(BilinearTest, CompleteK22AndLps) {
  const TheoryCheckReport small = CheckBilinearBound(CompleteBipartite(2, 2), 50, 3);
  EXPECT_TRUE(small.passed()) << ToJson(small);
  const TheoryCheckReport rep = CheckBilinearBound(Lps(), 30, 3);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_EQ(rep.instances_tested, 30);
}

TEST(GraphDeviationTest, CompleteGraphIsExact) {
  const TheoryCheckReport rep = CheckGraphDeviation(CompleteBipartite(5, 7));
  EXPECT_NEAR(rep.params.at("deviation"), 0.0, 1e-12);
  EXPECT_TRUE(rep.passed());
}

TEST(GraphDeviationTest, LpsWithinRamanujanConstant) {
  const TheoryCheckReport rep = CheckGraphDeviation(Lps());
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  // C0 = 2 is implied by the Ramanujan certificate.
  EXPECT_LE(rep.params.at("deviation"), 2.0 * 1092.0 / std::sqrt(6.0));
  EXPECT_LE(rep.params.at("c0"), 2.0);
}

TEST(GraphDeviationTest, DisconnectedControlUsesMeasuredC0) {
  const TheoryCheckReport rep = CheckGraphDeviation(TwoDisjointK22());
  // (1/p) G - E has norm 4, and sigma2 = 2 gives C0 = sqrt 2, so the bound
  // C0 sqrt(16) / sqrt 2 = 4 is attained.
  EXPECT_NEAR(rep.params.at("deviation"), 4.0, 1e-10);
  EXPECT_NEAR(rep.params.at("c0"), std::sqrt(2.0), 1e-12);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(std::abs(rep.worst_margin), 1e-9 * rep.scale);
}

TEST(GraphDeviationTest, GroundTruthComponent) {
  const GroundTruth gt = GenGaussianProduct(1092, 1092, 2, 4);
  const TheoryCheckReport rep = CheckGraphDeviation(Lps(), &gt);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_EQ(rep.component_margins.count("ground_truth"), 1u);
}

TEST(HadamardTest, CompleteGraphAndLps) {
  const GroundTruth small = GenSyntheticLowRank(20, 20, 2, 2.0, 5);
  EXPECT_TRUE(CheckHadamardQuartic(small, CompleteBipartite(20, 20), 30, 5).passed());
  const TheoryCheckReport rep = CheckHadamardQuartic(FlatRankOne(1092), Lps(), 20, 5);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
}

TEST(RowBoundTest, CompleteAndRandomGraphs) {
  EXPECT_TRUE(CheckRowBound(CompleteBipartite(2, 2), 50, 6, 1).passed());
  const TheoryCheckReport rep =
      CheckRowBound(GenerateRandomBiregular(64, 64, 8, 6), 100, 6);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_EQ(rep.instances_tested, 100);
}

TEST(CurvatureTest, PgdFullObservation) {
  const GroundTruth gt = GenSyntheticLowRank(64, 64, 2, 2.0, 7);
  const TheoryCheckReport rep =
      CheckCurvatureSmoothnessPgd(gt, CompleteBipartite(64, 64), 20, 7);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_GT(rep.instances_tested, 0);
  EXPECT_EQ(rep.instances_tested + rep.instances_skipped, 20);
}

TEST(CurvatureTest, ScaledFullObservation) {
  const GroundTruth gt = GenSyntheticLowRank(64, 64, 2, 5.0, 8);
  const TheoryCheckReport rep =
      CheckCurvatureSmoothnessScaled(gt, CompleteBipartite(64, 64), 20, 8);
  EXPECT_TRUE(rep.passed()) << ToJson(rep);
  EXPECT_GT(rep.instances_tested, 0);
}

TEST(CurvatureTest, RegimeFlagOnSparseGraph) {
  const GroundTruth gt = GenSyntheticLowRank(128, 128, 2, 2.0, 9);
  const TheoryCheckReport rep =
      CheckCurvatureSmoothnessPgd(gt, GenerateRandomBiregular(128, 128, 16, 9), 5, 9);
  // Far below the sample size the statement needs.
  EXPECT_FALSE(rep.in_regime);
}

TEST(ReportTest, JsonFields) {
  const TheoryCheckReport rep = CheckRowBound(CompleteBipartite(3, 3), 5, 10);
  const nlohmann::json j = nlohmann::json::parse(ToJson(rep));
  EXPECT_EQ(j["check_name"], "row_bound");
  EXPECT_EQ(j["instances_tested"], 5);
  EXPECT_EQ(j["passed"], true);
  EXPECT_DOUBLE_EQ(j["params"]["n1"].get<double>(), 3.0);
}

}  // namespace
}  // namespace detmc

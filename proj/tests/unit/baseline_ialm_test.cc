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

#include "detmc/baseline_ialm.h"

#include <random>

#include <gtest/gtest.h>

#include "detmc/experiments.h"
#include "detmc/metrics_alignment.h"
#include "oracles.h"

namespace detmc {
namespace {

TEST(SvtTest, Examples) {
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a.diagonal() << 3, 1;
  DenseMatrix expected = DenseMatrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  EXPECT_LT((Svt(a, 2.0) - expected).norm(), 1e-14);
  std::mt19937_64 rng(1);
  const DenseMatrix b = testing::RandomGaussian(5, 4, rng);
  EXPECT_LT((Svt(b, 0.0) - b).norm(), 1e-12);
}

TEST(SvtTest, MatchesProximalOracle) {
  std::mt19937_64 rng(2);
  const DenseMatrix a = testing::RandomGaussian(8, 6, rng);
  const auto svd = testing::OneSidedJacobi(a);
  const double tau = svd.S(1);
  Vector shrunk = (svd.S.array() - tau).max(0.0);
  const DenseMatrix oracle = svd.U * shrunk.asDiagonal() * svd.V.transpose();
  const DenseMatrix out = Svt(a, tau);
  EXPECT_LT((out - oracle).norm(), 1e-10);
  EXPECT_LE(testing::OneSidedJacobi(out).S(1), 1e-10);

  // The proximal objective does not improve along random directions.
  auto objective = [&](const DenseMatrix& x) {
    return 0.5 * (x - a).squaredNorm() + tau * testing::OneSidedJacobi(x).S.sum();
  };
  const double best = objective(out);
  for (int k = 0; k < 20; ++k) {
    const DenseMatrix dir = 1e-3 * testing::RandomGaussian(8, 6, rng);
    EXPECT_GE(objective(out + dir), best - 1e-12);
  }
}

TEST(SvtTest, NonExpansive) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const DenseMatrix a = testing::RandomGaussian(7, 5, rng);
    const DenseMatrix b = testing::RandomGaussian(7, 5, rng);
    EXPECT_LE((Svt(a, 1.0) - Svt(b, 1.0)).norm(), (a - b).norm() + 1e-10);
  }
}

TEST(RunIalmTest, FullObservation) {
  const GroundTruth gt = GenSyntheticLowRank(30, 30, 2, 3.0, 4);
  const ObservedMatrix obs = ApplyPOmega(gt.M, CompleteBipartite(30, 30));
  IalmConfig cfg;
  const IalmResult res = RunIalm(obs, cfg, &gt);
  EXPECT_LT(RelativeError(res.M, gt), cfg.tol);
  EXPECT_LE(res.trace.iterations(), 5);
}

TEST(RunIalmTest, DeskInstance) {
  const GroundTruth gt = GenSyntheticLowRank(512, 512, 3, 1.0, 5);
  const BiregularGraph g = GenerateRandomBiregular(512, 512, 60, 5);
  const ObservedMatrix obs = ApplyPOmega(gt.M, g);
  IalmConfig cfg;
  const IalmResult res = RunIalm(obs, cfg, &gt);
  EXPECT_EQ(res.trace.stop, StopReason::kTolerance);
  EXPECT_LT(RelativeError(res.M, gt), 1e-4);
  // Feasibility at termination.
  const ObservedMatrix fitted = ApplyPOmega(res.M, g);
  EXPECT_LE((fitted.values - obs.values).norm() / obs.values.norm(), 10 * cfg.tol);
  std::printf("IALM desk instance: %d iterations\n", res.trace.iterations());
}

TEST(RunIalmTest, FeasibilityStopWithoutTruth) {
  const GroundTruth gt = GenSyntheticLowRank(60, 60, 2, 1.0, 6);
  const BiregularGraph g = GenerateRandomBiregular(60, 60, 20, 6);
  const ObservedMatrix obs = ApplyPOmega(gt.M, g);
  IalmConfig cfg;
  const IalmResult res = RunIalm(obs, cfg);
  EXPECT_EQ(res.trace.stop, StopReason::kTolerance);
  const ObservedMatrix fitted = ApplyPOmega(res.M, g);
  EXPECT_LE((fitted.values - obs.values).norm() / obs.values.norm(), 10 * cfg.tol);
}

}  // namespace
}  // namespace detmc

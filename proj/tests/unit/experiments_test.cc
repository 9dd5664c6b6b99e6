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

#include "detmc/experiments.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "detmc/errors.h"
#include "json.hpp"

namespace detmc {
namespace {

TEST(GenSyntheticTest, SingularValues) {
  const GroundTruth one = GenSyntheticLowRank(10, 8, 1, 1.0, 1);
  EXPECT_NEAR(one.sigma1(), 1.0, 1e-12);
  const GroundTruth gt = GenSyntheticLowRank(40, 30, 3, 10.0, 2);
  EXPECT_NEAR(gt.svd.S(0), 10.0, 1e-10);
  EXPECT_NEAR(gt.svd.S(1), std::sqrt(10.0), 1e-10);
  EXPECT_NEAR(gt.svd.S(2), 1.0, 1e-10);
  EXPECT_NEAR(gt.kappa, 10.0, 1e-10);
  EXPECT_THROW(GenSyntheticLowRank(10, 10, 1, 2.0, 1), ParameterError);
}

TEST(GenSyntheticTest, IncoherenceAtPhaseSize) {
  const GroundTruth gt = GenSyntheticLowRank(1092, 1092, 3, 1.0, 3);
  EXPECT_NEAR(gt.mu, IncoherenceMu(gt), 1e-12);
  std::printf("n = 1092, r = 3, seed 3: mu = %.4f\n", gt.mu);
}

TEST(GenGaussianProductTest, RankAndDeterminism) {
  const GroundTruth a = GenGaussianProduct(50, 40, 3, 4);
  const GroundTruth b = GenGaussianProduct(50, 40, 3, 4);
  EXPECT_EQ(a.M, b.M);
  EXPECT_EQ(a.r, 3);
  EXPECT_LT((a.svd.Reconstruct() - a.M).norm(), 1e-10 * a.M.norm());
}

TEST(NamesTest, RoundTrip) {
  for (Sampler s : {Sampler::kLps, Sampler::kRandomBiregular, Sampler::kBernoulli}) {
    EXPECT_EQ(ParseSampler(ToString(s)), s);
  }
  for (SolverKind s : {SolverKind::kPgd, SolverKind::kScaledPgd, SolverKind::kIalm}) {
    EXPECT_EQ(ParseSolverKind(ToString(s)), s);
  }
  EXPECT_EQ(ToString(Sampler::kBernoulli), "bernoulli-random");
  EXPECT_THROW(ParseSampler("uniform"), ParameterError);
  EXPECT_THROW(ParseSolverKind("sgd"), ParameterError);
}

TEST(IterationsToTest, FirstCrossing) {
  IterationTrace trace;
  for (int k = 0; k < 5; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.rel_error = std::pow(0.1, k);
    trace.records.push_back(rec);
  }
  EXPECT_EQ(IterationsTo(trace, 0.5), 1);
  EXPECT_EQ(IterationsTo(trace, 1e-3 * 0.999), 4);
  EXPECT_EQ(IterationsTo(trace, 1e-9), -1);
}

TEST(RunTrialTest, DivergenceIsRecorded) {
  const GroundTruth gt = GenSyntheticLowRank(30, 30, 2, 2.0, 5);
  const ObservedMatrix obs = ApplyPOmega(gt.M, GenerateRandomBiregular(30, 30, 6, 5));
  SolverSettings settings;
  settings.pgd.eta = 50.0;
  settings.pgd.max_iter = 500;
  settings.oracle_mu = false;
  settings.pgd.mu = 1e12;
  const TrialRecord rec = RunTrial(SolverKind::kPgd, obs, gt, settings, 1e-6);
  EXPECT_FALSE(rec.success);
  EXPECT_EQ(rec.stop, StopReason::kDiverged);
}

TEST(RunTrialTest, AllSolversOnFullObservation) {
  const GroundTruth gt = GenSyntheticLowRank(30, 30, 2, 2.0, 6);
  const ObservedMatrix obs = ApplyPOmega(gt.M, CompleteBipartite(30, 30));
  for (SolverKind s : {SolverKind::kPgd, SolverKind::kScaledPgd, SolverKind::kIalm}) {
    const TrialRecord rec = RunTrial(s, obs, gt, SolverSettings{}, 1e-4);
    EXPECT_TRUE(rec.success) << ToString(s);
    EXPECT_EQ(rec.solver, s);
  }
}

TEST(CertifiedGraphTest, CertifiesAndFailsLoudly) {
  const BiregularGraph g = CertifiedRandomBiregular(64, 64, 8, 1);
  EXPECT_TRUE(VerifyAssumptions(g).is_ramanujan);
  // Degree 1 graphs are perfect matchings: sigma2 = 1 > 0 = bound.
  EXPECT_THROW(CertifiedRandomBiregular(8, 8, 1, 1, 3), GenerationError);
}

TEST(PhaseTransitionTest, CompleteGraphPointAndDeterminism) {
  PhaseTransitionConfig cfg = DefaultPhaseTransitionConfig();
  cfg.n = 40;
  cfg.r = 2;
  cfg.degrees = {20, 40};
  cfg.samplers = {Sampler::kRandomBiregular, Sampler::kBernoulli, Sampler::kLps};
  cfg.trials = 1;
  const std::vector<PhasePoint> points = RunPhaseTransition(cfg);
  std::ostringstream first;
  WritePhaseCsv(points, first);
  EXPECT_EQ(first.str().substr(0, first.str().find('\n')),
            "sampler,p,degree,trials,success_ratio,mean_iters,note");
  bool saw_complete = false, saw_lps_note = false;
  for (const PhasePoint& pt : points) {
    if (pt.degree == 40 && pt.sampler == Sampler::kRandomBiregular) {
      saw_complete = true;
      EXPECT_DOUBLE_EQ(pt.p, 1.0);
      EXPECT_DOUBLE_EQ(pt.success_ratio, 1.0);
    }
    if (pt.sampler == Sampler::kLps) saw_lps_note = !pt.note.empty();
  }
  EXPECT_TRUE(saw_complete);
  EXPECT_TRUE(saw_lps_note);
  std::ostringstream second;
  WritePhaseCsv(RunPhaseTransition(cfg), second);
  EXPECT_EQ(first.str(), second.str());
}

TEST(PhaseTransitionTest, RejectsUnsortedDegrees) {
  PhaseTransitionConfig cfg;
  cfg.degrees = {16, 12};
  EXPECT_THROW(RunPhaseTransition(cfg), ParameterError);
}

TEST(ConvergenceTest, SmallRunAndCsv) {
  ConvergenceConfig cfg;
  cfg.n = 120;
  cfg.degree = 30;
  cfg.kappas = {1.0};
  cfg.tol = 1e-8;
  const std::vector<ConvergenceSeries> series = RunConvergence(cfg);
  ASSERT_EQ(series.size(), 2u);
  for (const ConvergenceSeries& s : series) {
    EXPECT_FALSE(s.diverged);
    EXPECT_LT(s.rel_errors.back(), 1e-8);
    EXPECT_LT(s.rate, 1.0);
  }
  // At kappa = 1 the two methods converge at comparable rates.
  EXPECT_NEAR(series[0].rate, series[1].rate, 0.25 * series[0].rate);
  std::ostringstream csv, rates;
  WriteConvergenceCsv(series, csv);
  WriteRatesCsv(series, rates);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "solver,kappa,r,iter,rel_error");
  EXPECT_EQ(rates.str().substr(0, rates.str().find('\n')),
            "solver,kappa,r,iterations,rate,diverged");
}

TEST(CompareTest, DefaultsUseTunedScaledStep) {
  const CompareConfig cfg;
  EXPECT_EQ(cfg.settings.scaled.eta, kCompareScaledEta);
  EXPECT_TRUE(cfg.settings.scaled.allow_large_eta);
  EXPECT_EQ(cfg.settings.pgd.eta, PgdConfig().eta);
  // The library default stays at the theoretical cap.
  EXPECT_EQ(ScaledConfig().eta, kMaxScaledEta);
}

TEST(CompareTest, SmallRunCsvAndJson) {
  CompareConfig cfg;
  cfg.n = 80;
  cfg.degree = 20;
  cfg.ranks = {2};
  cfg.kappa = 2.0;
  cfg.trials = 2;
  const std::vector<CompareRow> rows = RunSolverComparison(cfg);
  ASSERT_EQ(rows.size(), 3u);
  for (const CompareRow& row : rows) {
    EXPECT_EQ(row.trials, 2);
    EXPECT_EQ(row.successes, 2) << ToString(row.solver);
  }
  std::ostringstream csv;
  WriteCompareCsv(rows, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "solver,r,degree,kappa,trials,successes,mean_iters,sd_iters,"
            "mean_wall_s,sd_wall_s,mean_rel_error");
  const nlohmann::json j = nlohmann::json::parse(CompareJson(rows));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), 3u);
}

}  // namespace
}  // namespace detmc

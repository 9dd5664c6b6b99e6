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

#include <benchmark/benchmark.h>

#include "detmc/baseline_ialm.h"
#include "detmc/experiments.h"
#include "detmc/solver_pgd.h"
#include "detmc/solver_scaled_pgd.h"

namespace detmc {
namespace {

struct Problem {
  GroundTruth gt;
  ObservedMatrix obs;
};

Problem MakeProblem(int n, int r, double kappa) {
  GroundTruth gt = GenSyntheticLowRank(n, n, r, kappa, 3);
  ObservedMatrix obs = ApplyPOmega(gt.M, GenerateRandomBiregular(n, n, 60, 3));
  return {std::move(gt), std::move(obs)};
}

// Full solves to relative error 1e-4, as in the comparison tables.
void BM_Pgd(benchmark::State& state) {
  const Problem pr = MakeProblem(512, static_cast<int>(state.range(0)), 10.0);
  PgdConfig cfg;
  cfg.tol = 1e-4;
  cfg.mu = pr.gt.mu;
  cfg.max_iter = 5000;
  int iters = 0;
  for (auto _ : state) iters = RunPgd(pr.obs, pr.gt.r, cfg, &pr.gt).trace.iterations();
  state.counters["iterations"] = iters;
}
BENCHMARK(BM_Pgd)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ScaledPgd(benchmark::State& state) {
  const Problem pr = MakeProblem(512, static_cast<int>(state.range(0)), 10.0);
  ScaledConfig cfg;
  cfg.tol = 1e-4;
  cfg.mu = pr.gt.mu;
  int iters = 0;
  for (auto _ : state) {
    iters = RunScaledPgd(pr.obs, pr.gt.r, cfg, &pr.gt).trace.iterations();
  }
  state.counters["iterations"] = iters;
}
BENCHMARK(BM_ScaledPgd)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_Ialm(benchmark::State& state) {
  const Problem pr = MakeProblem(256, 3, 10.0);
  IalmConfig cfg;
  int iters = 0;
  for (auto _ : state) iters = RunIalm(pr.obs, cfg, &pr.gt).trace.iterations();
  state.counters["iterations"] = iters;
}
BENCHMARK(BM_Ialm)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_ScaledStep(benchmark::State& state) {
  const Problem pr = MakeProblem(static_cast<int>(state.range(0)), 3, 10.0);
  const FactorPair z{pr.gt.x_star * 1.01, pr.gt.y_star};
  for (auto _ : state) benchmark::DoNotOptimize(ScaledGradientStep(z, pr.obs, 0.1, 1e-12));
}
BENCHMARK(BM_ScaledStep)->Arg(512)->Arg(2048);

}  // namespace
}  // namespace detmc

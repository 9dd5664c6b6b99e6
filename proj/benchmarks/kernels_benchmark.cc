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

#include "detmc/expander_graphs.h"
#include "detmc/experiments.h"
#include "detmc/sampling_model.h"

namespace detmc {
namespace {

void BM_ResidualAndGradientProducts(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = 60, r = 3;
  const GroundTruth gt = GenSyntheticLowRank(n, n, r, 1.0, 1);
  const ObservedMatrix obs = ApplyPOmega(gt.M, GenerateRandomBiregular(n, n, d, 1));
  const DenseMatrix x = gt.x_star * 1.01, y = gt.y_star * 0.99;
  for (auto _ : state) {
    const SparseResidual k = ResidualOnOmega(x, y, obs);
    benchmark::DoNotOptimize(KTimesY(k, y));
    benchmark::DoNotOptimize(KtTimesX(k, x));
  }
  state.SetItemsProcessed(state.iterations() * obs.size());
}
BENCHMARK(BM_ResidualAndGradientProducts)->Arg(512)->Arg(2048);

void BM_RandomBiregular(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GenerateRandomBiregular(n, n, 20, ++seed));
  }
}
BENCHMARK(BM_RandomBiregular)->Arg(1092)->Unit(benchmark::kMillisecond);

void BM_LpsConstruction(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(GenerateLpsBipartite(5, 13));
}
BENCHMARK(BM_LpsConstruction)->Unit(benchmark::kMillisecond);

void BM_SpectralCertificate(benchmark::State& state) {
  const BiregularGraph g = GenerateLpsBipartite(5, 13);
  for (auto _ : state) benchmark::DoNotOptimize(VerifyAssumptions(g));
}
BENCHMARK(BM_SpectralCertificate)->Unit(benchmark::kMillisecond);

void BM_TopRSvdLanczos(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GroundTruth gt = GenSyntheticLowRank(n, n, 3, 5.0, 2);
  const ObservedMatrix obs = ApplyPOmega(gt.M, GenerateRandomBiregular(n, n, 40, 2));
  const LinearOperator op = RescaledOperator(obs);
  for (auto _ : state) benchmark::DoNotOptimize(TopRSvdLanczos(op, 3));
}
BENCHMARK(BM_TopRSvdLanczos)->Arg(1092)->Arg(4096)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace detmc

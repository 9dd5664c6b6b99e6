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

// Helpers shared by the solver implementations. Not installed.

#ifndef DETMC_SRC_SOLVER_INTERNAL_H_
#define DETMC_SRC_SOLVER_INTERNAL_H_

#include <chrono>
#include <cmath>
#include <string>

#include "detmc/dense_kernels.h"
#include "detmc/factors.h"
#include "detmc/trace.h"

namespace detmc {

// Problems up to this size take their spectral initialization from a dense
// SVD; larger ones use Lanczos on the sparse observation.
inline constexpr int kSmallDenseLimit = 400;

// X = U Sigma^{1/2}, Y = V Sigma^{1/2}.
inline FactorPair BalancedFactors(const TruncatedSvd& svd) {
  const Vector root = svd.S.cwiseSqrt();
  return {svd.U * root.asDiagonal(), svd.V * root.asDiagonal()};
}

namespace internal {

inline double SecondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

inline void ShiftWallClock(IterationTrace& trace, double seconds) {
  for (auto& rec : trace.records) rec.wall_seconds += seconds;
}

// Applies the shared stopping and divergence rules to each new record.
class TraceMonitor {
 public:
  TraceMonitor(double tol, double loss_rel_tol, int divergence_window,
               bool has_ground_truth)
      : tol_(tol),
        loss_rel_tol_(loss_rel_tol),
        window_(divergence_window),
        has_gt_(has_ground_truth) {}

  static constexpr double kBlowUpFactor = 1e12;

  // Appends rec; returns true when the run should stop. Throws
  // DivergenceError on a non-finite loss, a loss 1e12 times the starting
  // loss, or a long run of loss increases.
  bool Record(const IterationRecord& rec, IterationTrace& trace,
              bool last_allowed) {
    trace.records.push_back(rec);
    if (!std::isfinite(rec.loss)) {
      trace.stop = StopReason::kDiverged;
      throw DivergenceError(
          "non-finite loss at iteration " + std::to_string(rec.k), trace);
    }
    const bool has_prev = trace.records.size() > 1;
    const double prev =
        has_prev ? trace.records[trace.records.size() - 2].loss : 0.0;
    increases_ = (has_prev && rec.loss > prev) ? increases_ + 1 : 0;
    const double start = trace.records.front().loss;
    if (start > 0.0 && rec.loss > kBlowUpFactor * start) {
      // A clipped iterate can saturate at a huge loss without ever
      // producing a long run of increases.
      trace.stop = StopReason::kDiverged;
      throw DivergenceError("loss grew by more than 1e12 at iteration " +
                                std::to_string(rec.k),
                            trace);
    }
    if (increases_ >= window_) {
      trace.stop = StopReason::kDiverged;
      throw DivergenceError("loss increased for " + std::to_string(window_) +
                                " consecutive iterations",
                            trace);
    }
    if (has_gt_ && rec.rel_error < tol_) {
      trace.stop = StopReason::kTolerance;
      return true;
    }
    if (rec.loss == 0.0 ||
        (!has_gt_ && has_prev && std::abs(rec.loss - prev) <= loss_rel_tol_ * prev)) {
      trace.stop = StopReason::kStagnation;
      return true;
    }
    if (last_allowed) {
      trace.stop = StopReason::kMaxIterations;
      return true;
    }
    return false;
  }

 private:
  double tol_;
  double loss_rel_tol_;
  int window_;
  bool has_gt_;
  int increases_ = 0;
};

}  // namespace internal
}  // namespace detmc

#endif  // DETMC_SRC_SOLVER_INTERNAL_H_

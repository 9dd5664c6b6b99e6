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

// Per-iteration logs shared by all solvers.

#ifndef DETMC_TRACE_H_
#define DETMC_TRACE_H_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace detmc {

inline constexpr double kNotRecorded = std::numeric_limits<double>::quiet_NaN();

struct IterationRecord {
  int k = 0;
  double loss = kNotRecorded;
  double rel_error = kNotRecorded;  // only with a ground truth
  double dist = kNotRecorded;       // only when requested
  double wall_seconds = 0.0;        // since the solver started
};

enum class StopReason { kTolerance, kStagnation, kMaxIterations, kDiverged };

std::string ToString(StopReason reason);

struct IterationTrace {
  std::vector<IterationRecord> records;  // records[k].k == k
  StopReason stop = StopReason::kMaxIterations;

  // Number of updates performed (the record for k = 0 is the start point).
  int iterations() const {
    return records.empty() ? 0 : records.back().k;
  }
  const IterationRecord& last() const { return records.back(); }
  std::vector<double> RelErrors() const;
  std::vector<double> Distances() const;
};

// Thrown when the loss grows for too many consecutive iterations, exceeds
// 1e12 times its starting value, or becomes non-finite. Carries everything logged up to that point.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, IterationTrace trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const IterationTrace& trace() const { return trace_; }

 private:
  IterationTrace trace_;
};

}  // namespace detmc

#endif  // DETMC_TRACE_H_

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

// Error metrics: the rotation-aligned distance used for PGD, the
// GL(r)-aligned distance used for Scaled PGD, relative error and rate
// fitting.

#ifndef DETMC_METRICS_ALIGNMENT_H_
#define DETMC_METRICS_ALIGNMENT_H_

#include <vector>

#include "detmc/dense_kernels.h"
#include "detmc/factors.h"
#include "detmc/sampling_model.h"
#include "detmc/trace.h"

namespace detmc {

enum class AlignmentKind { kOrthogonal, kGeneralLinear };

struct AlignmentResult {
  AlignmentKind kind = AlignmentKind::kOrthogonal;
  DenseMatrix Q;            // R (orthogonal) or the optimal alignment Qbar
  double distance = 0.0;
  double residual_x = 0.0;  // ||(X Q - X*) Sigma*^{1/2}||_F
  double residual_y = 0.0;  // ||(Y Q^{-T} - Y*) Sigma*^{1/2}||_F
  DenseMatrix H;            // Z - Z* R, orthogonal kind only
  int iterations = 0;
  // Set by DistStarOrProcrustes when the GL(r) solver failed and the
  // distance is the (upper-bound) value at the Procrustes rotation.
  bool fallback = false;
};

// min over orthogonal R of ||Z - Z* R||_F.
AlignmentResult DistOrthogonal(const FactorPair& z, const GroundTruth& gt);

// inf over invertible Q of
//   ||(X Q - X*) Sigma*^{1/2}||_F^2 + ||(Y Q^{-T} - Y*) Sigma*^{1/2}||_F^2,
// minimized by damped Newton on the r x r Gram expansion, started at the
// Procrustes rotation. Throws AlignmentError after 10000 iterations without
// reaching a gradient norm of 1e-10 * sigma1* (||X||^2 + ||Y||^2).
AlignmentResult DistStar(const FactorPair& z, const GroundTruth& gt);
AlignmentResult DistStarOrProcrustes(const FactorPair& z,
                                     const GroundTruth& gt);

// The squared objective above and its gradient in Q; exposed for tests.
double DistStarObjective(const FactorPair& z, const GroundTruth& gt,
                         const DenseMatrix& q);
DenseMatrix DistStarGradient(const FactorPair& z, const GroundTruth& gt,
                             const DenseMatrix& q);

// ||X Y^T - M*||_F / ||M*||_F in O((n1 + n2) r^2) via thin QR of [X, -X*]
// and [Y, Y*]; X Y^T is never formed.
double RelativeError(const DenseMatrix& x, const DenseMatrix& y,
                     const GroundTruth& gt);
double RelativeError(const DenseMatrix& m_hat, const GroundTruth& gt);

// Per-iteration factor exp(slope) of a least-squares fit of log(error)
// against k, clamped to at most 1. Needs at least 5 points; every point
// must be positive.
double FitLinearRate(const std::vector<double>& errors);

// Fits on the contiguous stretch of the trace whose errors lie in
// [lo, hi], which excludes the initial transient and the round-off floor.
double FitLinearRate(const IterationTrace& trace, double lo = 1e-10,
                     double hi = 1e-2);

}  // namespace detmc

#endif  // DETMC_METRICS_ALIGNMENT_H_

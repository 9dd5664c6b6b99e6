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

// Nuclear-norm minimization baseline: the inexact augmented Lagrangian
// method for
//
//   min ||A||_*  s.t.  A + E = P_Omega(M*),  P_Omega(E) = 0.

#ifndef DETMC_BASELINE_IALM_H_
#define DETMC_BASELINE_IALM_H_

#include <optional>

#include "detmc/dense_kernels.h"
#include "detmc/sampling_model.h"
#include "detmc/trace.h"

namespace detmc {

struct IalmConfig {
  std::optional<double> mu0;  // default 1 / ||P_Omega(M*)||
  double rho = 1.1;  // larger growth stalls at wrong feasible points
  int max_iter = 500;
  // Relative error against the ground truth if given, else the relative
  // feasibility ||P_Omega(A - M*)||_F / ||P_Omega(M*)||_F.
  double tol = 1e-4;
  int divergence_window = 50;
};

// U diag(max(S - tau, 0)) V^T from the full SVD of a.
DenseMatrix Svt(const DenseMatrix& a, double tau);

struct IalmResult {
  DenseMatrix M;
  IterationTrace trace;  // loss = relative feasibility residual
};

IalmResult RunIalm(const ObservedMatrix& obs, const IalmConfig& cfg,
                   const GroundTruth* gt = nullptr);

}  // namespace detmc

#endif  // DETMC_BASELINE_IALM_H_

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

// Projected gradient descent on the balanced loss
//
//   L1(X, Y) = (1/p) ||P_Omega(X Y^T - M*)||_F^2 + (lambda/4) ||X^T X - Y^T Y||_F^2
//
// with spectral initialization and row clipping onto
//   C1 = { Z : ||Z||_{2,inf} <= sqrt(2 mu r / (n1 ^ n2)) ||Z0|| }.

#ifndef DETMC_SOLVER_PGD_H_
#define DETMC_SOLVER_PGD_H_

#include "detmc/factors.h"
#include "detmc/sampling_model.h"
#include "detmc/trace.h"

namespace detmc {

struct PgdConfig {
  double eta = 0.5;     // step numerator; the step is eta / ||Z0||^2
  double lambda = 0.5;  // balancing weight
  int max_iter = 2000;
  double tol = 1e-6;    // relative-error stop (needs a ground truth)
  double mu = 2.0;      // incoherence used in the clip bound
  // Without a ground truth: stop once |L_k - L_{k-1}| <= loss_rel_tol L_{k-1}.
  double loss_rel_tol = 1e-12;
  bool log_dist = false;       // log dist(Z^k, Z*) (needs a ground truth)
  int divergence_window = 50;  // consecutive loss increases tolerated
};

struct SpectralInit {
  FactorPair z0;             // balanced factors of the top-r SVD of M0
  FactorPair z1;             // P_C1(z0)
  double sigma1_m0 = 0.0;    // sigma_1((1/p) P_Omega(M*))
  double z0_norm = 0.0;      // ||Z0|| (operator norm of the stack)
  double clip_bound = 0.0;
};

// Top-r SVD of M0 = (1/p) P_Omega(M*): dense for small problems, Lanczos on
// the sparse operator otherwise.
TruncatedSvd RescaledTopRSvd(const ObservedMatrix& obs, int r);

SpectralInit PgdSpectralInit(const ObservedMatrix& obs, int r, double mu);

double LossL1(const FactorPair& z, const ObservedMatrix& obs, double lambda);

// Exact gradient of LossL1 with the balancing part in factored form:
//   grad_X = (2/p) K Y + lambda X (X^T X - Y^T Y)
//   grad_Y = (2/p) K^T X + lambda Y (Y^T Y - X^T X)
FactorPair GradL1(const FactorPair& z, const ObservedMatrix& obs,
                  double lambda);

// Rescales every row of the stacked factor whose norm exceeds clip_bound
// onto the sphere of that radius.
FactorPair ProjectC1(const FactorPair& z, double clip_bound);

struct SolverResult {
  FactorPair z;
  IterationTrace trace;
};

// Full Algorithm: spectral initialization, then projected gradient steps.
SolverResult RunPgd(const ObservedMatrix& obs, int r, const PgdConfig& cfg,
                    const GroundTruth* gt = nullptr);

// Iterates from a given start; the step is cfg.eta / step_denominator.
SolverResult RunPgdFrom(const ObservedMatrix& obs, const FactorPair& start,
                        double clip_bound, double step_denominator,
                        const PgdConfig& cfg, const GroundTruth* gt = nullptr);

}  // namespace detmc

#endif  // DETMC_SOLVER_PGD_H_

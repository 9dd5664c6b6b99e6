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

// Scaled projected gradient descent on the unregularized loss
//
//   L2(X, Y) = (1/2p) ||P_Omega(X Y^T - M*)||_F^2,
//
// preconditioning the two gradient blocks by (Y^T Y)^{-1} and (X^T X)^{-1}
// and projecting onto
//   C2 = { sqrt(n1) ||X Y^T||_{2,inf} <= B, sqrt(n2) ||Y X^T||_{2,inf} <= B }.

#ifndef DETMC_SOLVER_SCALED_PGD_H_
#define DETMC_SOLVER_SCALED_PGD_H_

#include <optional>

#include "detmc/factors.h"
#include "detmc/sampling_model.h"
#include "detmc/solver_pgd.h"
#include "detmc/trace.h"

namespace detmc {

inline constexpr double kMaxScaledEta = 0.145;

struct ScaledConfig {
  double eta = kMaxScaledEta;
  double alpha = 0.1;  // B = (1 + alpha) sqrt(mu r) sigma_1
  double mu = 2.0;
  // sigma_1(M*) if known; otherwise sigma_1 of the rescaled observation.
  std::optional<double> sigma1;
  // Overrides B entirely (+infinity disables the projection).
  std::optional<double> budget;
  int max_iter = 2000;
  double tol = 1e-6;
  double loss_rel_tol = 1e-12;
  // Gram eigenvalues at or below this fraction of the largest are dropped
  // by the generalized inverse.
  double pinv_threshold = 1e-12;
  bool allow_large_eta = false;  // permit eta > 0.145
  bool log_dist = false;         // log dist_*(Z^k, Z*)
  int divergence_window = 50;
};

// Closed-form projection onto C2. Each row of X is shrunk by
// min(1, B / (sqrt(n1) ||Xbar_i Ybar^T||)) against the input Ybar, and
// symmetrically for Y.
FactorPair ProjectC2(const FactorPair& z, double budget);

struct ScaledInit {
  FactorPair unprojected;  // balanced factors of the top-r SVD of M0
  FactorPair z0;           // P_C2(unprojected)
  double sigma1_m0 = 0.0;
  double budget = 0.0;
};

ScaledInit ScaledSpectralInit(const ObservedMatrix& obs, int r,
                              const ScaledConfig& cfg);

double LossL2(const FactorPair& z, const ObservedMatrix& obs);

// X+ = X - (eta/p) K Y (Y^T Y)^+,  Y+ = Y - (eta/p) K^T X (X^T X)^+,
// both evaluated at the same (X, Y).
FactorPair ScaledGradientStep(const FactorPair& z, const ObservedMatrix& obs,
                              double eta, double pinv_threshold);

SolverResult RunScaledPgd(const ObservedMatrix& obs, int r,
                          const ScaledConfig& cfg,
                          const GroundTruth* gt = nullptr);

SolverResult RunScaledPgdFrom(const ObservedMatrix& obs,
                              const FactorPair& start, double budget,
                              const ScaledConfig& cfg,
                              const GroundTruth* gt = nullptr);

}  // namespace detmc

#endif  // DETMC_SOLVER_SCALED_PGD_H_

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

// Numerical spot checks of the inequalities behind the convergence theory.
// Every check evaluates both sides on concrete random instances and reports
// the worst margin (right-hand side minus left-hand side).

#ifndef DETMC_THEORY_CHECKS_H_
#define DETMC_THEORY_CHECKS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "detmc/expander_graphs.h"
#include "detmc/sampling_model.h"

namespace detmc {

struct TheoryCheckReport {
  std::string check_name;
  int instances_tested = 0;
  int instances_skipped = 0;  // precondition not met
  double worst_margin = 0.0;  // RHS - LHS; negative means violated
  double scale = 0.0;         // largest |LHS|, |RHS| or operand norm seen
  // False when the hypotheses of the underlying statement are not met by
  // the instance (sample size, delta_d); violations are then informational.
  bool in_regime = true;
  std::optional<double> delta_tilde;
  // Echoed parameters: delta_d, c0, mu, r, kappa, n1, n2, d1, d2, ...
  std::map<std::string, double> params;
  // Worst margin of each inequality when a check bundles several.
  std::map<std::string, double> component_margins;

  bool passed() const { return worst_margin >= -1e-9 * scale; }
};

std::string ToJson(const TheoryCheckReport& report);

// sqrt(2 (delta_d^2 + C0^2 mu^2 r^2 / (d1 ^ d2))).
double DeltaTilde(double delta_d, double c0, double mu, int r, int d1, int d2);

// (1 - dt) ||Z||^2 <= (1/p) ||P_Omega(Z)||^2 <= (1 + dt) ||Z||^2 for random
// Z = U* A^T + B V*^T in the tangent space T, with dt from the
// neighbourhood delta_d estimate and the certificate's C0.
TheoryCheckReport CheckRipOnT(const GroundTruth& gt, const BiregularGraph& g,
                              int trials, uint64_t seed);

// (1/p) sum_Omega x_i y_j <= ||x||_1 ||y||_1
//                            + (C0/2) (sqrt n1 + sqrt n2) / sqrt p ||x|| ||y||
// for random nonnegative x, y.
TheoryCheckReport CheckBilinearBound(const BiregularGraph& g, int trials,
                                     uint64_t seed);

// ||(1/p) G - E|| <= C0 sqrt(n1 n2) / sqrt(d1 ^ d2), and with a ground
// truth also ||(1/p) P_Omega(M*) - M*|| <= C0 mu r / sqrt(d1 ^ d2) ||M*||.
TheoryCheckReport CheckGraphDeviation(const BiregularGraph& g,
                                      const GroundTruth* gt = nullptr);

// (2/p) ||P_Omega(H_U H_V^T)||^2
//   <= 2 ||H||^4 + 16 C0 mu r kappa (sqrt n1 + sqrt n2)
//                  / (sqrt p (n1 ^ n2)) sigma_r* ||H||^2
// for random H with ||H||_{2,inf} <= 4 sqrt(mu r sigma_1* / (n1 ^ n2)).
TheoryCheckReport CheckHadamardQuartic(const GroundTruth& gt,
                                       const BiregularGraph& g, int trials,
                                       uint64_t seed);

// Lifted (1/p) ||P_Omega(A B^T)||^2
//   <= (n1 v n2) min(||A||^2 ||B||_{2,inf}^2, ||B||^2 ||A||_{2,inf}^2)
// for random (n1 + n2) x r factors A, B.
TheoryCheckReport CheckRowBound(const BiregularGraph& g, int trials,
                                uint64_t seed, int r = 3);

// Local curvature, smoothness and the combined regularity condition of L1
// (lambda = 1/2) at random points of C1 within dist <= sqrt(sigma_r*)/4.
TheoryCheckReport CheckCurvatureSmoothnessPgd(const GroundTruth& gt,
                                              const BiregularGraph& g,
                                              int trials, uint64_t seed);

// The preconditioned curvature (0.833, 0.023) and smoothness (5.5) bounds of
// L2 at random points of C2 within dist_* <= sigma_r*/10.
TheoryCheckReport CheckCurvatureSmoothnessScaled(const GroundTruth& gt,
                                                 const BiregularGraph& g,
                                                 int trials, uint64_t seed);

}  // namespace detmc

#endif  // DETMC_THEORY_CHECKS_H_

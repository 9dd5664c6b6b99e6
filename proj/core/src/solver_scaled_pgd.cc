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

#include "detmc/solver_scaled_pgd.h"

#include <chrono>
#include <cmath>
#include <limits>

#include "detmc/errors.h"
#include "detmc/metrics_alignment.h"
#include "solver_internal.h"

namespace detmc {
namespace {

void ValidateConfig(const ScaledConfig& cfg) {
  if (!(cfg.eta > 0.0)) throw ParameterError("Scaled PGD: eta must be positive");
  if (cfg.eta > kMaxScaledEta && !cfg.allow_large_eta) {
    throw ParameterError(
        "Scaled PGD: eta above 0.145 requires allow_large_eta");
  }
  if (!(cfg.alpha >= 0.0) || !(cfg.mu > 0.0) || cfg.max_iter < 0 ||
      !(cfg.pinv_threshold >= 0.0)) {
    throw ParameterError("Scaled PGD: invalid configuration");
  }
  if (cfg.budget && !(*cfg.budget > 0.0)) {
    throw ParameterError("Scaled PGD: budget must be positive");
  }
}

// Scales row i of `rows` so that sqrt(n) ||row_i Other^T|| <= budget, where
// ||row_i Other^T||^2 = row_i (Other^T Other) row_i^T.
void ShrinkRows(DenseMatrix& rows, const DenseMatrix& other_gram,
                double budget) {
  const double root_n = std::sqrt(static_cast<double>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm2 = rows.row(i) * other_gram * rows.row(i).transpose();
    const double norm = root_n * std::sqrt(std::max(norm2, 0.0));
    if (norm > budget) rows.row(i) *= budget / norm;
  }
}

}  // namespace

FactorPair ProjectC2(const FactorPair& z, double budget) {
  if (!(budget > 0.0)) throw ParameterError("ProjectC2: budget must be positive");
  if (std::isinf(budget)) return z;
  const DenseMatrix gram_x = z.X.transpose() * z.X;
  const DenseMatrix gram_y = z.Y.transpose() * z.Y;
  FactorPair out = z;
  ShrinkRows(out.X, gram_y, budget);
  ShrinkRows(out.Y, gram_x, budget);
  return out;
}

ScaledInit ScaledSpectralInit(const ObservedMatrix& obs, int r,
                              const ScaledConfig& cfg) {
  ValidateConfig(cfg);
  const TruncatedSvd svd = RescaledTopRSvd(obs, r);
  ScaledInit init;
  init.unprojected = BalancedFactors(svd);
  init.sigma1_m0 = svd.S(0);
  if (cfg.budget) {
    init.budget = *cfg.budget;
  } else {
    const double sigma1 = cfg.sigma1.value_or(svd.S(0));
    init.budget = (1.0 + cfg.alpha) * std::sqrt(cfg.mu * r) * sigma1;
  }
  init.z0 = ProjectC2(init.unprojected, init.budget);
  return init;
}

double LossL2(const FactorPair& z, const ObservedMatrix& obs) {
  return 0.5 * ResidualOnOmega(z.X, z.Y, obs).values.squaredNorm() / obs.p;
}

namespace {

FactorPair StepWithResidual(const FactorPair& z, const SparseResidual& k,
                            double p, double eta, double pinv_threshold) {
  const DenseMatrix gram_x = z.X.transpose() * z.X;
  const DenseMatrix gram_y = z.Y.transpose() * z.Y;
  const double c = eta / p;
  FactorPair out;
  out.X = z.X - c * KTimesY(k, z.Y) *
                    SymmetricPseudoInverse(gram_y, pinv_threshold);
  out.Y = z.Y - c * KtTimesX(k, z.X) *
                    SymmetricPseudoInverse(gram_x, pinv_threshold);
  return out;
}

}  // namespace

FactorPair ScaledGradientStep(const FactorPair& z, const ObservedMatrix& obs,
                              double eta, double pinv_threshold) {
  const SparseResidual k = ResidualOnOmega(z.X, z.Y, obs);
  return StepWithResidual(z, k, obs.p, eta, pinv_threshold);
}

SolverResult RunScaledPgdFrom(const ObservedMatrix& obs,
                              const FactorPair& start, double budget,
                              const ScaledConfig& cfg, const GroundTruth* gt) {
  ValidateConfig(cfg);
  if (!(budget > 0.0)) throw ParameterError("Scaled PGD: budget must be positive");
  if (cfg.log_dist && gt == nullptr) {
    throw ParameterError("Scaled PGD: distance logging needs a ground truth");
  }
  const auto t0 = std::chrono::steady_clock::now();
  double excluded = 0.0;

  SolverResult res;
  res.z = start;
  internal::TraceMonitor monitor(cfg.tol, cfg.loss_rel_tol,
                                 cfg.divergence_window, gt != nullptr);
  for (int k = 0;; ++k) {
    const SparseResidual resid = ResidualOnOmega(res.z.X, res.z.Y, obs);
    IterationRecord rec;
    rec.k = k;
    rec.loss = 0.5 * resid.values.squaredNorm() / obs.p;
    if (gt != nullptr) rec.rel_error = RelativeError(res.z.X, res.z.Y, *gt);
    if (cfg.log_dist) {
      const auto d0 = std::chrono::steady_clock::now();
      rec.dist = DistStarOrProcrustes(res.z, *gt).distance;
      excluded += internal::SecondsSince(d0);
    }
    rec.wall_seconds = internal::SecondsSince(t0) - excluded;
    if (monitor.Record(rec, res.trace, k == cfg.max_iter)) break;

    res.z = ProjectC2(
        StepWithResidual(res.z, resid, obs.p, cfg.eta, cfg.pinv_threshold),
        budget);
  }
  return res;
}

SolverResult RunScaledPgd(const ObservedMatrix& obs, int r,
                          const ScaledConfig& cfg, const GroundTruth* gt) {
  const auto t0 = std::chrono::steady_clock::now();
  const ScaledInit init = ScaledSpectralInit(obs, r, cfg);
  const double init_seconds = internal::SecondsSince(t0);
  SolverResult res = RunScaledPgdFrom(obs, init.z0, init.budget, cfg, gt);
  internal::ShiftWallClock(res.trace, init_seconds);
  return res;
}

}  // namespace detmc

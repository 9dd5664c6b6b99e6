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

#include "detmc/solver_pgd.h"

#include <chrono>
#include <cmath>
#include <string>

#include "detmc/errors.h"
#include "detmc/metrics_alignment.h"
#include "solver_internal.h"

namespace detmc {

TruncatedSvd RescaledTopRSvd(const ObservedMatrix& obs, int r) {
  const int k_max = std::min(obs.n1(), obs.n2());
  if (r < 1 || r > k_max) {
    throw ParameterError("rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(k_max) + "]");
  }
  if (std::max(obs.n1(), obs.n2()) <= kSmallDenseLimit) {
    return TopRSvd(RescaledDense(obs), r);
  }
  return TopRSvdLanczos(RescaledOperator(obs), r);
}

SpectralInit PgdSpectralInit(const ObservedMatrix& obs, int r, double mu) {
  if (!(mu > 0.0)) throw ParameterError("mu must be positive");
  const TruncatedSvd svd = RescaledTopRSvd(obs, r);
  SpectralInit init;
  init.z0 = BalancedFactors(svd);
  init.sigma1_m0 = svd.S(0);
  // Z0^T Z0 = 2 Sigma0, so ||Z0||^2 = 2 sigma_1(M0).
  init.z0_norm = std::sqrt(2.0 * svd.S(0));
  init.clip_bound = std::sqrt(2.0 * mu * r / std::min(obs.n1(), obs.n2())) *
                    init.z0_norm;
  init.z1 = ProjectC1(init.z0, init.clip_bound);
  return init;
}

double LossL1(const FactorPair& z, const ObservedMatrix& obs, double lambda) {
  const SparseResidual k = ResidualOnOmega(z.X, z.Y, obs);
  const DenseMatrix gap = z.X.transpose() * z.X - z.Y.transpose() * z.Y;
  return k.values.squaredNorm() / obs.p + 0.25 * lambda * gap.squaredNorm();
}

FactorPair GradL1(const FactorPair& z, const ObservedMatrix& obs,
                  double lambda) {
  const SparseResidual k = ResidualOnOmega(z.X, z.Y, obs);
  const DenseMatrix gap = z.X.transpose() * z.X - z.Y.transpose() * z.Y;
  FactorPair g;
  g.X = (2.0 / obs.p) * KTimesY(k, z.Y) + lambda * z.X * gap;
  g.Y = (2.0 / obs.p) * KtTimesX(k, z.X) - lambda * z.Y * gap;
  return g;
}

FactorPair ProjectC1(const FactorPair& z, double clip_bound) {
  if (!(clip_bound > 0.0)) throw ParameterError("clip bound must be positive");
  FactorPair out = z;
  auto clip = [clip_bound](DenseMatrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).norm();
      if (norm > clip_bound) m.row(i) *= clip_bound / norm;
    }
  };
  clip(out.X);
  clip(out.Y);
  return out;
}

SolverResult RunPgdFrom(const ObservedMatrix& obs, const FactorPair& start,
                        double clip_bound, double step_denominator,
                        const PgdConfig& cfg, const GroundTruth* gt) {
  if (!(cfg.eta > 0.0) || !(cfg.lambda >= 0.0) || cfg.max_iter < 0 ||
      !(step_denominator > 0.0) || !(clip_bound > 0.0)) {
    throw ParameterError("PGD: invalid configuration");
  }
  if (cfg.log_dist && gt == nullptr) {
    throw ParameterError("PGD: distance logging needs a ground truth");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const double step = cfg.eta / step_denominator;
  double excluded = 0.0;

  SolverResult res;
  res.z = start;
  internal::TraceMonitor monitor(cfg.tol, cfg.loss_rel_tol,
                                 cfg.divergence_window, gt != nullptr);
  for (int k = 0;; ++k) {
    FactorPair& z = res.z;
    const SparseResidual resid = ResidualOnOmega(z.X, z.Y, obs);
    const DenseMatrix gap = z.X.transpose() * z.X - z.Y.transpose() * z.Y;

    IterationRecord rec;
    rec.k = k;
    rec.loss = resid.values.squaredNorm() / obs.p +
               0.25 * cfg.lambda * gap.squaredNorm();
    if (gt != nullptr) rec.rel_error = RelativeError(z.X, z.Y, *gt);
    if (cfg.log_dist) {
      // Distance logging is diagnostics only and kept off the clock.
      const auto d0 = std::chrono::steady_clock::now();
      rec.dist = DistOrthogonal(z, *gt).distance;
      excluded += internal::SecondsSince(d0);
    }
    rec.wall_seconds = internal::SecondsSince(t0) - excluded;
    if (monitor.Record(rec, res.trace, k == cfg.max_iter)) break;

    DenseMatrix gx = (2.0 / obs.p) * KTimesY(resid, z.Y);
    gx.noalias() += cfg.lambda * z.X * gap;
    DenseMatrix gy = (2.0 / obs.p) * KtTimesX(resid, z.X);
    gy.noalias() -= cfg.lambda * z.Y * gap;
    z.X -= step * gx;
    z.Y -= step * gy;
    z = ProjectC1(z, clip_bound);
  }
  return res;
}

SolverResult RunPgd(const ObservedMatrix& obs, int r, const PgdConfig& cfg,
                    const GroundTruth* gt) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpectralInit init = PgdSpectralInit(obs, r, cfg.mu);
  const double init_seconds = internal::SecondsSince(t0);
  SolverResult res = RunPgdFrom(obs, init.z1, init.clip_bound,
                                init.z0_norm * init.z0_norm, cfg, gt);
  internal::ShiftWallClock(res.trace, init_seconds);
  return res;
}

}  // namespace detmc

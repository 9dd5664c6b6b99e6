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

#include "detmc/baseline_ialm.h"

#include <chrono>
#include <cmath>
#include <string>

#include "detmc/errors.h"
#include "detmc/metrics_alignment.h"
#include "solver_internal.h"

namespace detmc {

DenseMatrix Svt(const DenseMatrix& a, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("Svt: tau must be nonnegative");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector shrunk = (svd.singularValues().array() - tau).max(0.0).matrix();
  Eigen::Index keep = 0;
  while (keep < shrunk.size() && shrunk(keep) > 0.0) ++keep;
  return svd.matrixU().leftCols(keep) * shrunk.head(keep).asDiagonal() *
         svd.matrixV().leftCols(keep).transpose();
}

IalmResult RunIalm(const ObservedMatrix& obs, const IalmConfig& cfg,
                   const GroundTruth* gt) {
  if (!(cfg.rho > 1.0) || cfg.max_iter < 0 || !(cfg.tol > 0.0) ||
      (cfg.mu0 && !(*cfg.mu0 > 0.0))) {
    throw ParameterError("IALM: invalid configuration");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const DenseMatrix d = ObservedDense(obs);
  const double d_norm = obs.values.norm();
  if (!(d_norm > 0.0)) throw ParameterError("IALM: observation is zero");
  const DenseMatrix mask = obs.pattern->Indicator();

  double mu = cfg.mu0.value_or(1.0 / OperatorNorm(d));
  DenseMatrix y = DenseMatrix::Zero(d.rows(), d.cols());
  DenseMatrix e = DenseMatrix::Zero(d.rows(), d.cols());
  IalmResult res;
  res.M = DenseMatrix::Zero(d.rows(), d.cols());
  int increases = 0;
  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.loss = (mask.cwiseProduct(res.M) - d).norm() / d_norm;
    if (gt != nullptr) rec.rel_error = RelativeError(res.M, *gt);
    rec.wall_seconds = internal::SecondsSince(t0);
    const double prev = k > 0 ? res.trace.records.back().loss : rec.loss;
    res.trace.records.push_back(rec);
    if (!std::isfinite(rec.loss)) {
      res.trace.stop = StopReason::kDiverged;
      throw DivergenceError("IALM: non-finite iterate", res.trace);
    }
    increases = (k > 0 && rec.loss > prev) ? increases + 1 : 0;
    if (increases >= cfg.divergence_window) {
      res.trace.stop = StopReason::kDiverged;
      throw DivergenceError("IALM: feasibility residual keeps growing",
                            res.trace);
    }
    if (k > 0) {
      const double measure = gt != nullptr ? rec.rel_error : rec.loss;
      if (measure < cfg.tol) {
        res.trace.stop = StopReason::kTolerance;
        break;
      }
    }
    if (k == cfg.max_iter) {
      res.trace.stop = StopReason::kMaxIterations;
      break;
    }

    res.M = Svt(d - e + y / mu, 1.0 / mu);
    // E lives off Omega: it absorbs whatever the unobserved entries need.
    e = (d - res.M + y / mu).cwiseProduct(
        (1.0 - mask.array()).matrix());
    y += mu * (d - res.M - e);
    mu *= cfg.rho;
  }
  return res;
}

}  // namespace detmc

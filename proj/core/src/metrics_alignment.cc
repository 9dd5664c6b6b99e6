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

#include "detmc/metrics_alignment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detmc/errors.h"

namespace detmc {
namespace {

void RequireCompatible(const FactorPair& z, const GroundTruth& gt) {
  if (z.X.rows() != gt.n1() || z.Y.rows() != gt.n2() || z.X.cols() != gt.r ||
      z.Y.cols() != gt.r) {
    throw ParameterError("factor shapes do not match the ground truth");
  }
}

// Gram-matrix form of the GL(r) alignment problem. All quantities are r x r,
// so objective and gradient cost O(r^3).
class GlAlignmentProblem {
 public:
  GlAlignmentProblem(const FactorPair& z, const GroundTruth& gt)
      : s_(gt.svd.S),
        xx_(z.X.transpose() * z.X),
        xs_(z.X.transpose() * gt.x_star),
        yy_(z.Y.transpose() * z.Y),
        ys_(z.Y.transpose() * gt.y_star),
        const_(gt.x_star.cwiseAbs2().colwise().sum().dot(s_) +
               gt.y_star.cwiseAbs2().colwise().sum().dot(s_)) {}

  // Returns +inf for (numerically) singular Q.
  double Objective(const Eigen::MatrixXd& q) const {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(q);
    if (!lu.isInvertible()) return std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd p = lu.inverse().transpose();
    const auto sd = s_.asDiagonal();
    return (q.transpose() * xx_ * q * sd).trace() -
           2.0 * (q.transpose() * xs_ * sd).trace() +
           (p.transpose() * yy_ * p * sd).trace() -
           2.0 * (p.transpose() * ys_ * sd).trace() + const_;
  }

  Eigen::MatrixXd Gradient(const Eigen::MatrixXd& q) const {
    const Eigen::MatrixXd qinv = q.inverse();
    const Eigen::MatrixXd p = qinv.transpose();
    const auto sd = s_.asDiagonal();
    const Eigen::MatrixXd g1 = 2.0 * (xx_ * q - xs_) * sd;
    const Eigen::MatrixXd g2 = 2.0 * (yy_ * p - ys_) * sd;
    return g1 - p * g2.transpose() * p;
  }

 private:
  Vector s_;
  Eigen::MatrixXd xx_, xs_, yy_, ys_;
  double const_;
};

Eigen::VectorXd Vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd Unvec(const Eigen::VectorXd& v, int r) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), r, r);
}

// Fills the weighted residual parts of an alignment result for a given Q.
void EvaluateGl(const FactorPair& z, const GroundTruth& gt,
                const Eigen::MatrixXd& q, AlignmentResult& out) {
  const Vector root = gt.svd.S.cwiseSqrt();
  const Eigen::MatrixXd p = q.inverse().transpose();
  out.residual_x = ((z.X * q - gt.x_star) * root.asDiagonal()).norm();
  out.residual_y = ((z.Y * p - gt.y_star) * root.asDiagonal()).norm();
  out.distance = std::hypot(out.residual_x, out.residual_y);
  out.Q = q;
}

AlignmentResult SolveGl(const FactorPair& z, const GroundTruth& gt,
                        bool throw_on_failure) {
  RequireCompatible(z, gt);
  const int r = gt.r;
  const GlAlignmentProblem problem(z, gt);
  const double scale =
      gt.sigma1() * (z.X.squaredNorm() + z.Y.squaredNorm());
  const double grad_tol = 1e-10 * scale;
  constexpr int kMaxIter = 10000;

  const DenseMatrix r0 = OrthogonalProcrustes(z.Stacked(), gt.z_star()).R;
  // Z ~ Z* R0 means Z R0^T ~ Z*, so Q starts at R0^T.
  Eigen::MatrixXd q = r0.transpose();
  double f = problem.Objective(q);
  Eigen::MatrixXd g = problem.Gradient(q);

  AlignmentResult result;
  result.kind = AlignmentKind::kGeneralLinear;
  bool converged = false;
  // Newton is quadratic here, so a few steps past the tolerance bring the
  // distance of an exact gauge orbit point down to round-off.
  constexpr int kPolishSteps = 3;
  int polish = 0;
  Eigen::MatrixXd best_q;
  double best_gnorm = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < kMaxIter; ++it) {
    const double gnorm = g.norm();
    if (gnorm <= grad_tol) {
      converged = true;
      if (gnorm < best_gnorm) {
        best_gnorm = gnorm;
        best_q = q;
      }
      if (polish++ == kPolishSteps || gnorm == 0.0) break;
    }
    // Hessian by central differences of the analytic gradient.
    const int n = r * r;
    Eigen::MatrixXd hess(n, n);
    const double h = 1e-6 * std::max(1.0, q.norm());
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(k) = h;
      hess.col(k) = (Vec(problem.Gradient(q + Unvec(e, r))) -
                     Vec(problem.Gradient(q - Unvec(e, r)))) /
                    (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Eigen::VectorXd gv = Vec(g);
    Eigen::VectorXd dir;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    bool newton_ok = ldlt.info() == Eigen::Success && ldlt.isPositive();
    if (newton_ok) {
      dir = -ldlt.solve(gv);
      newton_ok = dir.allFinite() && dir.dot(gv) < 0.0;
    }
    if (!newton_ok) {
      // Levenberg shift until positive definite.
      const double lambda_min =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess,
                                                         Eigen::EigenvaluesOnly)
              .eigenvalues()(0);
      const double shift = std::abs(lambda_min) + 1e-8 * scale + 1e-300;
      dir = -(hess + shift * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(gv);
    }

    // Backtracking. Near the optimum the objective difference drowns in
    // round-off, so a step that shrinks the gradient is accepted as well.
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Eigen::MatrixXd q_new = q + t * Unvec(dir, r);
      const double f_new = problem.Objective(q_new);
      if (!std::isfinite(f_new)) continue;
      const double round_off = 1e-13 * scale;
      if (f_new <= f + 1e-4 * t * gv.dot(dir)) {
        accepted = true;
      } else if (f_new <= f + round_off) {
        accepted = problem.Gradient(q_new).norm() < gnorm;
      }
      if (accepted) {
        q = q_new;
        f = f_new;
        g = problem.Gradient(q);
        break;
      }
    }
    if (!accepted) break;
  }
  result.iterations = it;
  if (!converged && throw_on_failure) {
    throw AlignmentError("GL(r) alignment did not converge (gradient norm " +
                         std::to_string(g.norm()) + ", tolerance " +
                         std::to_string(grad_tol) + ")");
  }
  if (!converged) {
    EvaluateGl(z, gt, r0.transpose(), result);
    result.fallback = true;
    return result;
  }
  EvaluateGl(z, gt, best_q, result);
  return result;
}

}  // namespace

AlignmentResult DistOrthogonal(const FactorPair& z, const GroundTruth& gt) {
  RequireCompatible(z, gt);
  const DenseMatrix zs = gt.z_star();
  ProcrustesResult pr = OrthogonalProcrustes(z.Stacked(), zs);
  AlignmentResult out;
  out.kind = AlignmentKind::kOrthogonal;
  out.H = z.Stacked() - zs * pr.R;
  out.distance = out.H.norm();
  out.Q = std::move(pr.R);
  return out;
}

AlignmentResult DistStar(const FactorPair& z, const GroundTruth& gt) {
  return SolveGl(z, gt, /*throw_on_failure=*/true);
}

AlignmentResult DistStarOrProcrustes(const FactorPair& z,
                                     const GroundTruth& gt) {
  return SolveGl(z, gt, /*throw_on_failure=*/false);
}

double DistStarObjective(const FactorPair& z, const GroundTruth& gt,
                         const DenseMatrix& q) {
  RequireCompatible(z, gt);
  return GlAlignmentProblem(z, gt).Objective(q);
}

DenseMatrix DistStarGradient(const FactorPair& z, const GroundTruth& gt,
                             const DenseMatrix& q) {
  RequireCompatible(z, gt);
  return GlAlignmentProblem(z, gt).Gradient(q);
}

double RelativeError(const DenseMatrix& x, const DenseMatrix& y,
                     const GroundTruth& gt) {
  if (x.rows() != gt.n1() || y.rows() != gt.n2() || x.cols() != y.cols()) {
    throw ParameterError("RelativeError: factor shapes do not match");
  }
  const double denom = gt.svd.S.norm();
  if (!(denom > 0.0)) throw ParameterError("RelativeError: M* is zero");
  const Eigen::Index k = x.cols() + gt.r;
  Eigen::MatrixXd a(x.rows(), k), b(y.rows(), k);
  a << x, -gt.x_star;
  b << y, gt.y_star;
  auto upper = [](const Eigen::MatrixXd& m) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::Index rows = std::min(m.rows(), m.cols());
    return Eigen::MatrixXd(qr.matrixQR()
                               .topRows(rows)
                               .triangularView<Eigen::Upper>());
  };
  return (upper(a) * upper(b).transpose()).norm() / denom;
}

double RelativeError(const DenseMatrix& m_hat, const GroundTruth& gt) {
  if (m_hat.rows() != gt.n1() || m_hat.cols() != gt.n2()) {
    throw ParameterError("RelativeError: shape mismatch");
  }
  const double denom = gt.M.norm();
  if (!(denom > 0.0)) throw ParameterError("RelativeError: M* is zero");
  return (m_hat - gt.M).norm() / denom;
}

double FitLinearRate(const std::vector<double>& errors) {
  const int n = static_cast<int>(errors.size());
  if (n < 5) throw ParameterError("FitLinearRate: need at least 5 points");
  double sk = 0, sl = 0, skk = 0, skl = 0;
  for (int k = 0; k < n; ++k) {
    if (!(errors[k] > 0.0) || !std::isfinite(errors[k])) {
      throw ParameterError("FitLinearRate: errors must be positive");
    }
    const double l = std::log(errors[k]);
    sk += k;
    sl += l;
    skk += static_cast<double>(k) * k;
    skl += k * l;
  }
  const double slope = (n * skl - sk * sl) / (n * skk - sk * sk);
  return std::min(1.0, std::exp(slope));
}

double FitLinearRate(const IterationTrace& trace, double lo, double hi) {
  const std::vector<double> e = trace.RelErrors();
  size_t first = 0;
  while (first < e.size() && !(e[first] <= hi)) ++first;
  size_t last = first;
  while (last < e.size() && e[last] >= lo) ++last;
  return FitLinearRate(std::vector<double>(e.begin() + first, e.begin() + last));
}

std::string ToString(StopReason reason) {
  switch (reason) {
    case StopReason::kTolerance:
      return "tolerance";
    case StopReason::kStagnation:
      return "stagnation";
    case StopReason::kMaxIterations:
      return "max-iterations";
    case StopReason::kDiverged:
      return "diverged";
  }
  return "unknown";
}

std::vector<double> IterationTrace::RelErrors() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(rec.rel_error);
  return out;
}

std::vector<double> IterationTrace::Distances() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(rec.dist);
  return out;
}

}  // namespace detmc

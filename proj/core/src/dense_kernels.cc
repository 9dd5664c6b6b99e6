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

#include "detmc/dense_kernels.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "detmc/errors.h"

namespace detmc {

DenseMatrix TruncatedSvd::Reconstruct() const {
  return U * S.asDiagonal() * V.transpose();
}

void RequireFinite(const DenseMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InputError(std::string(what) + ": matrix has non-finite entries");
  }
}

void CanonicalizeSigns(TruncatedSvd& svd) {
  for (int c = 0; c < svd.U.cols(); ++c) {
    for (int i = 0; i < svd.U.rows(); ++i) {
      const double u = svd.U(i, c);
      if (std::abs(u) > 1e-12) {
        if (u < 0) {
          svd.U.col(c) *= -1.0;
          svd.V.col(c) *= -1.0;
        }
        break;
      }
    }
  }
}

TruncatedSvd TopRSvd(const DenseMatrix& a, int r) {
  RequireFinite(a, "TopRSvd");
  const int k = static_cast<int>(std::min(a.rows(), a.cols()));
  if (r < 1 || r > k) {
    throw ParameterError("TopRSvd: rank " + std::to_string(r) +
                         " outside [1, " + std::to_string(k) + "]");
  }
  if (std::max(a.rows(), a.cols()) > kDenseSvdLimit) {
    return TopRSvdLanczos(DenseOperator(a), r);
  }
  const Eigen::MatrixXd col_major = a;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(col_major,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.U = svd.matrixU().leftCols(r);
  out.V = svd.matrixV().leftCols(r);
  out.S = svd.singularValues().head(r);
  CanonicalizeSigns(out);
  return out;
}

LinearOperator DenseOperator(const DenseMatrix& a) {
  LinearOperator op;
  op.rows = static_cast<int>(a.rows());
  op.cols = static_cast<int>(a.cols());
  op.apply = [&a](const Vector& x, Vector& y) { y.noalias() = a * x; };
  op.apply_transpose = [&a](const Vector& x, Vector& y) {
    y.noalias() = a.transpose() * x;
  };
  return op;
}

namespace {

// Power iteration on A^T A from `x` (unit norm). Returns the Rayleigh
// quotient ||A x||^2 at convergence and leaves the iterate in x.
double PowerIterate(const DenseMatrix& a, Vector& x) {
  constexpr int kMaxIter = 10000;
  constexpr double kRelTol = 1e-12;
  double lambda = 0.0;
  Vector y(a.rows());
  for (int it = 0; it < kMaxIter; ++it) {
    y.noalias() = a * x;
    const double next = y.squaredNorm();
    Vector z = a.transpose() * y;
    const double zn = z.norm();
    if (zn == 0.0) return next;
    x = z / zn;
    if (it > 0 && std::abs(next - lambda) <= kRelTol * next) {
      return std::max(next, (a * x).squaredNorm());
    }
    lambda = next;
  }
  return std::max(lambda, (a * x).squaredNorm());
}

}  // namespace

double OperatorNorm(const DenseMatrix& a) {
  if (a.size() == 0) throw ParameterError("OperatorNorm: empty matrix");
  RequireFinite(a, "OperatorNorm");
  Vector first = Vector::Ones(a.cols()) / std::sqrt(double(a.cols()));
  double best = PowerIterate(a, first);

  // Second start, orthogonalized once against the first estimate. Catches an
  // all-ones start that is (numerically) orthogonal to the top singular
  // vector.
  if (a.cols() > 1) {
    std::mt19937_64 rng(0x5eed5eedULL);
    std::normal_distribution<double> normal;
    Vector second(a.cols());
    for (auto& v : second) v = normal(rng);
    second -= first.dot(second) * first;
    const double n = second.norm();
    if (n > 0.0) {
      second /= n;
      best = std::max(best, PowerIterate(a, second));
    }
  }
  return std::sqrt(best);
}

double TwoInfNorm(const DenseMatrix& a) {
  if (a.size() == 0) throw ParameterError("TwoInfNorm: empty matrix");
  return a.rowwise().norm().maxCoeff();
}

ProcrustesResult OrthogonalProcrustes(const DenseMatrix& z,
                                      const DenseMatrix& z_star) {
  if (z.rows() != z_star.rows() || z.cols() != z_star.cols()) {
    throw ParameterError("OrthogonalProcrustes: shape mismatch");
  }
  const Eigen::MatrixXd cross = z_star.transpose() * z;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult out;
  out.R = svd.matrixU() * svd.matrixV().transpose();
  out.residual = (z - z_star * out.R).norm();
  return out;
}

DenseMatrix SymmetricPseudoInverse(const DenseMatrix& gram,
                                   double rel_threshold) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      Eigen::MatrixXd(gram), Eigen::ComputeEigenvectors);
  const Vector& w = eig.eigenvalues();
  const double cutoff = rel_threshold * std::max(0.0, w.maxCoeff());
  Vector inv(w.size());
  for (int i = 0; i < w.size(); ++i) {
    inv(i) = w(i) > cutoff ? 1.0 / w(i) : 0.0;
  }
  const Eigen::MatrixXd& q = eig.eigenvectors();
  return q * inv.asDiagonal() * q.transpose();
}

DenseMatrix OrthonormalColumns(const DenseMatrix& a) {
  const Eigen::MatrixXd col_major = a;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(col_major);
  Eigen::MatrixXd thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  return thin;
}

}  // namespace detmc

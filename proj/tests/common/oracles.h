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

// Reference implementations used as test oracles. Each one is deliberately
// written independently of the library routine it checks.

#ifndef DETMC_TESTS_ORACLES_H_
#define DETMC_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "detmc/dense_kernels.h"
#include "detmc/expander_graphs.h"
#include "detmc/factors.h"

namespace detmc::testing {

inline DenseMatrix RandomGaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline DenseMatrix RandomOrthonormal(int rows, int cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<DenseMatrix> qr(RandomGaussian(rows, cols, rng));
  return qr.householderQ() * DenseMatrix::Identity(rows, cols);
}

struct JacobiSvd {
  DenseMatrix U;
  Vector S;
  DenseMatrix V;
};

// One-sided (Hestenes) Jacobi SVD: rotate column pairs of A until they are
// mutually orthogonal. Singular values sorted nonincreasing.
inline JacobiSvd OneSidedJacobi(const DenseMatrix& a_in) {
  const bool wide = a_in.cols() > a_in.rows();
  DenseMatrix a = wide ? DenseMatrix(a_in.transpose()) : a_in;
  const int n = static_cast<int>(a.cols());
  DenseMatrix v = DenseMatrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n - 1; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double alpha = a.col(i).squaredNorm();
        const double beta = a.col(j).squaredNorm();
        const double gamma = a.col(i).dot(a.col(j));
        if (std::abs(gamma) <= 1e-300) continue;
        off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int k = 0; k < a.rows(); ++k) {
          const double x = a(k, i), y = a(k, j);
          a(k, i) = c * x - s * y;
          a(k, j) = s * x + c * y;
        }
        for (int k = 0; k < n; ++k) {
          const double x = v(k, i), y = v(k, j);
          v(k, i) = c * x - s * y;
          v(k, j) = s * x + c * y;
        }
      }
    }
    if (off < 1e-15) break;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(n);
  for (int k = 0; k < n; ++k) norms[k] = a.col(k).norm();
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return norms[x] > norms[y]; });
  JacobiSvd out;
  out.S.resize(n);
  out.U.resize(a.rows(), n);
  out.V.resize(n, n);
  for (int k = 0; k < n; ++k) {
    const int c = order[k];
    out.S(k) = norms[c];
    out.U.col(k) = norms[c] > 0 ? DenseMatrix(a.col(c) / norms[c]) : DenseMatrix(a.col(c));
    out.V.col(k) = v.col(c);
  }
  if (wide) std::swap(out.U, out.V);
  return out;
}

// Builds the lifted (n1 + n2)^2 objects explicitly and evaluates
//   (1/2p) ||P_lifted(Z Z^T - N*)||_F^2 + (lambda/4) ||Z^T D Z||_F^2.
inline double DenseLiftedLoss(const FactorPair& z, const DenseMatrix& m,
                              const BiregularGraph& g, double lambda) {
  const int n1 = g.n1(), n2 = g.n2(), n = n1 + n2;
  const DenseMatrix zs = z.Stacked();
  DenseMatrix n_star = DenseMatrix::Zero(n, n);
  n_star.topRightCorner(n1, n2) = m;
  n_star.bottomLeftCorner(n2, n1) = m.transpose();
  DenseMatrix mask = DenseMatrix::Zero(n, n);
  for (const Edge& e : g.edges()) {
    mask(e.row, n1 + e.col) = 1.0;
    mask(n1 + e.col, e.row) = 1.0;
  }
  const DenseMatrix diff = mask.cwiseProduct(zs * zs.transpose() - n_star);
  Vector d = Vector::Ones(n);
  d.tail(n2).setConstant(-1.0);
  const DenseMatrix ztdz = zs.transpose() * d.asDiagonal() * zs;
  return diff.squaredNorm() / (2.0 * g.sampling_rate()) +
         lambda / 4.0 * ztdz.squaredNorm();
}

// Central differences of f at every entry of the stacked factor.
inline FactorPair FiniteDifferenceGradient(
    const std::function<double(const FactorPair&)>& f, const FactorPair& z,
    double h) {
  FactorPair g{DenseMatrix::Zero(z.X.rows(), z.X.cols()),
               DenseMatrix::Zero(z.Y.rows(), z.Y.cols())};
  auto probe = [&](DenseMatrix FactorPair::*block, DenseMatrix& out) {
    const DenseMatrix& ref = z.*block;
    for (Eigen::Index i = 0; i < ref.rows(); ++i) {
      for (Eigen::Index j = 0; j < ref.cols(); ++j) {
        FactorPair plus = z, minus = z;
        (plus.*block)(i, j) += h;
        (minus.*block)(i, j) -= h;
        out(i, j) = (f(plus) - f(minus)) / (2.0 * h);
      }
    }
  };
  probe(&FactorPair::X, g.X);
  probe(&FactorPair::Y, g.Y);
  return g;
}

// Golden-section minimizer of a unimodal function on [lo, hi].
inline double GoldenSection(const std::function<double(double)>& f, double lo,
                            double hi, double tol = 1e-14) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// min_x (x - xbar)^T A (x - xbar) subject to x^T A x <= c^2 for symmetric
// positive definite A, solved through the KKT system
// (A + nu A) x = A xbar with bisection on the multiplier nu.
inline Vector TrustRegionRow(const DenseMatrix& a, const Vector& xbar, double c) {
  auto solve = [&](double nu) -> Vector {
    const DenseMatrix lhs = (1.0 + nu) * a;
    return lhs.ldlt().solve(a * xbar);
  };
  auto weighted = [&](const Vector& x) { return std::sqrt(x.dot(a * x)); };
  Vector x = solve(0.0);
  if (weighted(x) <= c) return x;
  double lo = 0.0, hi = 1.0;
  while (weighted(solve(hi)) > c) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (weighted(solve(mid)) > c ? lo : hi) = mid;
  }
  return solve(hi);
}

}  // namespace detmc::testing

#endif  // DETMC_TESTS_ORACLES_H_

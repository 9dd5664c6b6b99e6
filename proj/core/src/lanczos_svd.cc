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

// Golub-Kahan-Lanczos bidiagonalization with full reorthogonalization.
//
//   A V_k = U_k B_k,   A^T U_k = V_k B_k^T + beta_k v_{k+1} e_k^T
//
// with B_k upper bidiagonal (alpha on the diagonal, beta above it). The Ritz
// triplets of B_k satisfy A v = sigma u exactly, and the A^T residual is
// beta_k * |last entry of the left singular vector of B_k|.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "detmc/dense_kernels.h"
#include "detmc/errors.h"

namespace detmc {
namespace {

class GrowingBasis {
 public:
  GrowingBasis(int dim, int initial_capacity)
      : vectors_(dim, std::max(1, initial_capacity)) {}

  int size() const { return size_; }
  auto active() const { return vectors_.leftCols(size_); }

  void Append(const Vector& v) {
    if (size_ == vectors_.cols()) {
      vectors_.conservativeResize(Eigen::NoChange, 2 * vectors_.cols());
    }
    vectors_.col(size_++) = v;
  }

  // Two passes of classical Gram-Schmidt against the stored basis.
  void Orthogonalize(Vector& v) const {
    if (size_ == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      const Vector coeffs = active().transpose() * v;
      v.noalias() -= active() * coeffs;
    }
  }

 private:
  Eigen::MatrixXd vectors_;
  int size_ = 0;
};

Vector RandomOrthogonalUnit(const GrowingBasis& basis, int dim,
                            std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Vector v(dim);
    for (auto& x : v) x = normal(rng);
    basis.Orthogonalize(v);
    const double n = v.norm();
    if (n > 1e-8) return v / n;
  }
  throw GenerationError("Lanczos: could not extend orthonormal basis");
}

}  // namespace

TruncatedSvd TopRSvdLanczos(const LinearOperator& op, int r, double rel_tol) {
  const int m = op.rows;
  const int n = op.cols;
  const int k_max = std::min(m, n);
  if (r < 1 || r > k_max) {
    throw ParameterError("TopRSvdLanczos: rank " + std::to_string(r) +
                         " outside [1, " + std::to_string(k_max) + "]");
  }

  std::mt19937_64 rng(0x1a2c05e7ULL);
  const int capacity = std::min(k_max + 1, 2 * r + 40);
  GrowingBasis left(m, capacity);
  GrowingBasis right(n, capacity);
  std::vector<double> alpha;
  std::vector<double> beta;

  Vector v = RandomOrthogonalUnit(right, n, rng);
  right.Append(v);
  Vector u_prev;
  Vector u(m);
  Vector w(n);
  double scale = 0.0;

  for (int k = 1;; ++k) {
    // u_k alpha_k = A v_k - beta_{k-1} u_{k-1}
    op.apply(right.active().col(k - 1), u);
    if (k > 1) u.noalias() -= beta.back() * u_prev;
    left.Orthogonalize(u);
    double a = u.norm();
    scale = std::max(scale, a);
    if (a <= 1e-14 * scale || a == 0.0) {
      u = RandomOrthogonalUnit(left, m, rng);
      a = 0.0;
    } else {
      u /= a;
    }
    left.Append(u);
    alpha.push_back(a);

    // v_{k+1} beta_k = A^T u_k - alpha_k v_k
    op.apply_transpose(u, w);
    w.noalias() -= a * right.active().col(k - 1);
    right.Orthogonalize(w);
    const double b = w.norm();
    scale = std::max(scale, b);

    const bool exhausted = (k == k_max);
    const bool check = k >= r && (exhausted || k <= r + 2 || k % 4 == 0);
    if (check) {
      Eigen::MatrixXd bidiag = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i) bidiag(i, i) = alpha[i];
      for (int i = 0; i + 1 < k; ++i) bidiag(i, i + 1) = beta[i];
      Eigen::BDCSVD<Eigen::MatrixXd> small(
          bidiag, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vector& s = small.singularValues();
      // After a breakdown every Ritz residual vanishes, but the invariant
      // subspace holds only one copy of each repeated singular value, so
      // convergence is judged only on an unbroken recurrence.
      const bool breakdown = b <= 1e-14 * scale;
      bool converged = !breakdown;
      if (converged && !exhausted) {
        const double tol = rel_tol * std::max(s(0), 1e-300);
        for (int i = 0; i < r; ++i) {
          if (b * std::abs(small.matrixU()(k - 1, i)) > tol) {
            converged = false;
            break;
          }
        }
      }
      if (converged || exhausted) {
        TruncatedSvd out;
        out.S = s.head(r);
        out.U = left.active() * small.matrixU().leftCols(r);
        out.V = right.active().leftCols(k) * small.matrixV().leftCols(r);
        CanonicalizeSigns(out);
        return out;
      }
    }

    if (b <= 1e-14 * scale || b == 0.0) {
      w = RandomOrthogonalUnit(right, n, rng);
      beta.push_back(0.0);
    } else {
      w /= b;
      beta.push_back(b);
    }
    right.Append(w);
    u_prev = u;
  }
}

}  // namespace detmc

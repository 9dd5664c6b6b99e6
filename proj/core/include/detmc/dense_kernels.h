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

// Dense fp64 primitives shared by the rest of the library: truncated SVD,
// spectral norm, row norms and orthogonal Procrustes alignment.

#ifndef DETMC_DENSE_KERNELS_H_
#define DETMC_DENSE_KERNELS_H_

#include <functional>

#include <Eigen/Dense>

namespace detmc {

// Row-major so that factor rows (X_i, Y_j) are contiguous.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Leading singular triplets. U is rows x r, V is cols x r, S nonincreasing.
// The first nonzero entry of each column of U is nonnegative.
struct TruncatedSvd {
  DenseMatrix U;
  Vector S;
  DenseMatrix V;

  int rank() const { return static_cast<int>(S.size()); }
  DenseMatrix Reconstruct() const;
};

// Throws InputError if any entry is NaN or Inf.
void RequireFinite(const DenseMatrix& a, const char* what);

// Top-r SVD. Dense bidiagonalization (Eigen BDCSVD) when
// max(rows, cols) <= kDenseSvdLimit, Lanczos bidiagonalization otherwise.
inline constexpr int kDenseSvdLimit = 2048;
TruncatedSvd TopRSvd(const DenseMatrix& a, int r);

// Matrix-free operator y = A x and y = A^T x.
struct LinearOperator {
  int rows = 0;
  int cols = 0;
  std::function<void(const Vector& x, Vector& y)> apply;
  std::function<void(const Vector& x, Vector& y)> apply_transpose;
};

LinearOperator DenseOperator(const DenseMatrix& a);

// Top-r SVD of an operator by Golub-Kahan-Lanczos bidiagonalization with full
// reorthogonalization. Stops when every wanted Ritz triplet has residual
// below rel_tol * sigma_1 (or the Krylov space is exhausted).
TruncatedSvd TopRSvdLanczos(const LinearOperator& op, int r,
                            double rel_tol = 1e-13);

// sigma_1(A) by power iteration on A^T A (all-ones start, relative Rayleigh
// quotient change < 1e-12 or 10000 iterations).
double OperatorNorm(const DenseMatrix& a);

// Largest Euclidean row norm.
double TwoInfNorm(const DenseMatrix& a);

struct ProcrustesResult {
  DenseMatrix R;     // r x r orthogonal
  double residual;   // ||Z - Z_star R||_F
};

// argmin over orthogonal R of ||Z - Z_star R||_F.
ProcrustesResult OrthogonalProcrustes(const DenseMatrix& z,
                                      const DenseMatrix& z_star);

// Moore-Penrose inverse of a symmetric PSD matrix; eigenvalues at or below
// rel_threshold * lambda_max are dropped.
DenseMatrix SymmetricPseudoInverse(const DenseMatrix& gram,
                                   double rel_threshold);

// Thin Q factor (Householder) of a tall matrix.
DenseMatrix OrthonormalColumns(const DenseMatrix& a);

// Flip singular vector pairs so the first nonzero entry of each column of U
// is nonnegative.
void CanonicalizeSigns(TruncatedSvd& svd);

}  // namespace detmc

#endif  // DETMC_DENSE_KERNELS_H_

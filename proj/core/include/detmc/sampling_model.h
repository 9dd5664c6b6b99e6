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

// The sampling operator P_Omega, observed data, ground-truth bookkeeping and
// incoherence diagnostics. Nothing here materializes the lifted
// (n1 + n2) x (n1 + n2) objects; everything works blockwise on (X, Y).

#ifndef DETMC_SAMPLING_MODEL_H_
#define DETMC_SAMPLING_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "detmc/dense_kernels.h"
#include "detmc/expander_graphs.h"

namespace detmc {

// An observation set Omega in [n1] x [n2]: either the edge set of a
// biregular graph or an arbitrary mask (used by the Bernoulli comparator).
// Entries are sorted row-major; row_offsets() indexes them per row.
class SamplingPattern {
 public:
  static SamplingPattern FromGraph(const BiregularGraph& g);
  // Validates range and uniqueness; sorts.
  static SamplingPattern FromEdges(int n1, int n2, std::vector<Edge> edges);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int64_t size() const { return static_cast<int64_t>(rows_.size()); }
  const std::vector<int32_t>& rows() const { return rows_; }
  const std::vector<int32_t>& cols() const { return cols_; }
  const std::vector<int64_t>& row_offsets() const { return row_offsets_; }

  // Dense 0/1 indicator.
  DenseMatrix Indicator() const;

 private:
  int n1_ = 0;
  int n2_ = 0;
  std::vector<int32_t> rows_;
  std::vector<int32_t> cols_;
  std::vector<int64_t> row_offsets_;  // size n1 + 1
};

// Each entry kept independently with probability prob. The returned pattern
// is the comparator for a (d1, d2) graph when prob = d1 / n2.
SamplingPattern BernoulliPattern(int n1, int n2, double prob, uint64_t seed);

// P_Omega(M*) together with the rescale factor p used in (1/p) P_Omega.
struct ObservedMatrix {
  std::shared_ptr<const SamplingPattern> pattern;
  Vector values;  // aligned with pattern entries
  double p = 1.0;

  int n1() const { return pattern->n1(); }
  int n2() const { return pattern->n2(); }
  int64_t size() const { return pattern->size(); }
};

ObservedMatrix ApplyPOmega(const DenseMatrix& m, const BiregularGraph& g);
ObservedMatrix ApplyPOmega(const DenseMatrix& m,
                           std::shared_ptr<const SamplingPattern> pattern,
                           double p);

// Dense form of P_Omega(M) (p = 1) or (1/p) P_Omega(M).
DenseMatrix ObservedDense(const ObservedMatrix& obs);
DenseMatrix RescaledDense(const ObservedMatrix& obs);

// The operator (1/p) P_Omega(M*) as a matrix-free map for Lanczos.
LinearOperator RescaledOperator(const ObservedMatrix& obs);

// K = P_Omega(X Y^T - M*) stored on the pattern.
struct SparseResidual {
  std::shared_ptr<const SamplingPattern> pattern;
  Vector values;
};

// Cost O(|Omega| r).
SparseResidual ResidualOnOmega(const DenseMatrix& x, const DenseMatrix& y,
                               const ObservedMatrix& obs);
DenseMatrix KTimesY(const SparseResidual& k, const DenseMatrix& y);
DenseMatrix KtTimesX(const SparseResidual& k, const DenseMatrix& x);

// (1/p) <P_Omega(A), P_Omega(B)> evaluated on the pattern only.
double SampledInner(const SamplingPattern& pattern, double p,
                    const DenseMatrix& a, const DenseMatrix& b);

// The rank-r target with its SVD and balanced factors
// X* = U* (Sigma*)^{1/2}, Y* = V* (Sigma*)^{1/2}.
struct GroundTruth {
  DenseMatrix M;
  TruncatedSvd svd;
  int r = 0;
  double kappa = 1.0;
  double mu = 1.0;
  DenseMatrix x_star;
  DenseMatrix y_star;

  // Builds M = U diag(S) V^T. U, V must have orthonormal columns.
  static GroundTruth FromSvd(DenseMatrix u, Vector s, DenseMatrix v);
  // Takes the top-r SVD of m; throws ParameterError if m is not rank r
  // (sigma_{r+1} > 1e-10 sigma_1) or sigma_r = 0.
  static GroundTruth FromMatrix(const DenseMatrix& m, int r);

  int n1() const { return static_cast<int>(M.rows()); }
  int n2() const { return static_cast<int>(M.cols()); }
  double sigma1() const { return svd.S(0); }
  double sigmar() const { return svd.S(r - 1); }
  DenseMatrix z_star() const;  // [X*; Y*]
};

// Smallest mu with ||U*_i||^2 <= mu r / n1 and ||V*_j||^2 <= mu r / n2.
double IncoherenceMu(const GroundTruth& gt);

enum class DeltaMethod { kGraphNeighborhoods, kMonteCarlo, kExhaustive };
std::string ToString(DeltaMethod m);

struct IncoherenceReport {
  double mu = 0.0;
  double delta_d_estimate = 0.0;
  int64_t subsets_checked = 0;
  DeltaMethod method = DeltaMethod::kGraphNeighborhoods;
};

// Lower bound on delta_d: the maximum of
//   || (n1 / d2) sum_{k in S} U*_k U*_k^T - I ||  (|S| = d2)
// and the mirrored V* quantity (|S| = d1) over all graph neighbourhoods plus
// extra_subsets uniformly random subsets of each kind.
IncoherenceReport DeltaDEstimate(const GroundTruth& gt,
                                 const BiregularGraph& g, int extra_subsets,
                                 uint64_t seed);

// Same maximum over every subset; throws ParameterError when
// C(n1, d2) + C(n2, d1) > 1e6.
IncoherenceReport DeltaDExhaustive(const GroundTruth& gt,
                                   const BiregularGraph& g);

// MatrixMarket "coordinate real general" for observed entries (1-indexed).
void WriteObservedMatrixMarket(const ObservedMatrix& obs, std::ostream& out);
// Entries must coincide with the edges of g; p is taken from g.
ObservedMatrix ReadObservedMatrixMarket(std::istream& in,
                                        const BiregularGraph& g);

// Dense MatrixMarket "array real general" (column-major, as the format
// prescribes).
void WriteDenseMatrixMarket(const DenseMatrix& m, std::ostream& out);
DenseMatrix ReadDenseMatrixMarket(std::istream& in);

}  // namespace detmc

#endif  // DETMC_SAMPLING_MODEL_H_

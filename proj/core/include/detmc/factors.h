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

#ifndef DETMC_FACTORS_H_
#define DETMC_FACTORS_H_

#include "detmc/dense_kernels.h"

namespace detmc {

// Iterate Z = [X; Y] of the factored solvers; X is n1 x r, Y is n2 x r.
struct FactorPair {
  DenseMatrix X;
  DenseMatrix Y;

  int rank() const { return static_cast<int>(X.cols()); }

  DenseMatrix Stacked() const {
    DenseMatrix z(X.rows() + Y.rows(), X.cols());
    z << X, Y;
    return z;
  }

  static FactorPair FromStacked(const DenseMatrix& z, int n1) {
    return {z.topRows(n1), z.bottomRows(z.rows() - n1)};
  }
};

}  // namespace detmc

#endif  // DETMC_FACTORS_H_

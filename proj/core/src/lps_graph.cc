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

// Lubotzky-Phillips-Sarnak graphs X^{p,q} for (p|q) = -1. The Cayley graph
// of PGL(2, q) is bipartite in that case, with PSL(2, q) (square
// determinant) on one side and its coset on the other.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "detmc/errors.h"
#include "detmc/expander_graphs.h"

namespace detmc {
namespace {

using Mat2 = std::array<int64_t, 4>;  // row-major [a b; c d] mod q

int64_t Mod(int64_t a, int64_t q) {
  const int64_t r = a % q;
  return r < 0 ? r + q : r;
}

int64_t PowMod(int64_t base, int64_t exp, int64_t q) {
  int64_t result = 1;
  base = Mod(base, q);
  while (exp > 0) {
    if (exp & 1) result = result * base % q;
    base = base * base % q;
    exp >>= 1;
  }
  return result;
}

Mat2 Multiply(const Mat2& a, const Mat2& b, int64_t q) {
  return {Mod(a[0] * b[0] + a[1] * b[2], q), Mod(a[0] * b[1] + a[1] * b[3], q),
          Mod(a[2] * b[0] + a[3] * b[2], q), Mod(a[2] * b[1] + a[3] * b[3], q)};
}

// Scales so that the first nonzero entry is 1: one representative per
// projective class.
Mat2 Normalize(const Mat2& m, int64_t q) {
  for (int64_t v : m) {
    if (v != 0) {
      const int64_t inv = PowMod(v, q - 2, q);
      return {m[0] * inv % q, m[1] * inv % q, m[2] * inv % q, m[3] * inv % q};
    }
  }
  throw GenerationError("LPS: zero matrix");
}

int64_t Code(const Mat2& m, int64_t q) {
  return ((m[0] * q + m[1]) * q + m[2]) * q + m[3];
}

}  // namespace

bool IsPrime(int n) {
  if (n < 2) return false;
  for (int k = 2; static_cast<int64_t>(k) * k <= n; ++k) {
    if (n % k == 0) return false;
  }
  return true;
}

int LegendreSymbol(int a, int p) {
  if (!IsPrime(p) || p == 2) {
    throw ParameterError("LegendreSymbol needs an odd prime modulus");
  }
  const int64_t r = PowMod(a, (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

BiregularGraph GenerateLpsBipartite(int p, int q) {
  const std::string tag =
      "LPS(p=" + std::to_string(p) + ", q=" + std::to_string(q) + "): ";
  if (!IsPrime(p) || !IsPrime(q)) throw ParameterError(tag + "p, q must be prime");
  if (p == q) throw ParameterError(tag + "p and q must differ");
  if (p % 4 != 1 || q % 4 != 1) {
    throw ParameterError(tag + "p and q must be 1 mod 4");
  }
  if (LegendreSymbol(p, q) != -1) {
    throw ParameterError(tag + "p must be a non-residue mod q");
  }
  if (static_cast<int64_t>(q) * q <= 4 * static_cast<int64_t>(p)) {
    throw ParameterError(tag + "q must exceed 2 sqrt(p)");
  }
  if (static_cast<int64_t>(q) * q * q * q > (int64_t{1} << 31)) {
    throw ParameterError(tag + "q too large");
  }

  // i with i^2 = -1 mod q; exists since q = 1 mod 4.
  int64_t imag = -1;
  for (int64_t x = 1; x < q; ++x) {
    if (x * x % q == q - 1) {
      imag = x;
      break;
    }
  }

  // Quaternions a + bi + cj + dk of norm p with a > 0 odd and b, c, d even:
  // exactly p + 1 of them by Jacobi's four-square theorem.
  std::vector<Mat2> generators;
  const int bound = static_cast<int>(std::sqrt(static_cast<double>(p))) + 1;
  for (int a = 1; a <= bound; a += 2) {
    for (int b = -bound; b <= bound; ++b) {
      if (b % 2 != 0) continue;
      for (int c = -bound; c <= bound; ++c) {
        if (c % 2 != 0) continue;
        for (int d = -bound; d <= bound; ++d) {
          if (d % 2 != 0 || a * a + b * b + c * c + d * d != p) continue;
          generators.push_back({Mod(a + b * imag, q), Mod(c + d * imag, q),
                                Mod(-c + d * imag, q), Mod(a - b * imag, q)});
        }
      }
    }
  }
  if (static_cast<int>(generators.size()) != p + 1) {
    throw GenerationError(tag + "expected " + std::to_string(p + 1) +
                          " generators, found " +
                          std::to_string(generators.size()));
  }

  // Enumerate PGL(2, q) and split by the quadratic character of det.
  const int64_t qq = q;
  std::vector<int32_t> index(qq * qq * qq * qq, -1);
  std::vector<Mat2> left;
  int32_t right_count = 0;
  for (int64_t m0 = 0; m0 < qq; ++m0) {
    for (int64_t m1 = 0; m1 < qq; ++m1) {
      for (int64_t m2 = 0; m2 < qq; ++m2) {
        for (int64_t m3 = 0; m3 < qq; ++m3) {
          const Mat2 m = {m0, m1, m2, m3};
          const int64_t det = Mod(m0 * m3 - m1 * m2, qq);
          if (det == 0 || Normalize(m, qq) != m) continue;
          if (PowMod(det, (qq - 1) / 2, qq) == 1) {
            index[Code(m, qq)] = static_cast<int32_t>(left.size());
            left.push_back(m);
          } else {
            index[Code(m, qq)] = right_count++;
          }
        }
      }
    }
  }
  const int side = static_cast<int>(left.size());
  if (side != right_count || side != q * (qq * qq - 1) / 2) {
    throw GenerationError(tag + "unexpected PGL(2, q) partition");
  }

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(side) * generators.size());
  for (int32_t i = 0; i < side; ++i) {
    for (const Mat2& s : generators) {
      const Mat2 h = Normalize(Multiply(left[i], s, qq), qq);
      edges.push_back({i, index[Code(h, qq)]});
    }
  }
  try {
    return BiregularGraph::FromEdges(side, side, std::move(edges));
  } catch (const ParameterError& e) {
    throw GenerationError(tag + e.what());
  }
}

}  // namespace detmc

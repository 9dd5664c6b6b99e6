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

// (d1, d2)-biregular bipartite sampling graphs: construction, spectral
// certification and the edge-list file format.
//
// Edge-list format:
//   %%biregular n1 n2 d1 d2
//   i j            (one edge per line, 1-indexed, sorted)

#ifndef DETMC_EXPANDER_GRAPHS_H_
#define DETMC_EXPANDER_GRAPHS_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace detmc {

struct Edge {
  int32_t row = 0;
  int32_t col = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable bipartite graph on [n1] x [n2] in which every left vertex has
// degree d1 and every right vertex degree d2. Edges are sorted
// lexicographically, so the neighbours of row i occupy
// edges()[i * d1, (i + 1) * d1).
class BiregularGraph {
 public:
  // Validates ranges, duplicates and biregularity; sorts the edges.
  // Throws ParameterError on violation.
  static BiregularGraph FromEdges(int n1, int n2, std::vector<Edge> edges);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int d1() const { return d1_; }
  int d2() const { return d2_; }
  int64_t num_edges() const { return static_cast<int64_t>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  // p = d1 / n2 = d2 / n1.
  double sampling_rate() const { return static_cast<double>(d1_) / n2_; }

  friend bool operator==(const BiregularGraph&, const BiregularGraph&) =
      default;

 private:
  BiregularGraph() = default;

  int n1_ = 0;
  int n2_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  std::vector<Edge> edges_;
};

BiregularGraph CompleteBipartite(int n1, int n2);

// Configuration-model pairing followed by random 2-swaps that remove
// duplicate edges. Deterministic for a fixed seed.
BiregularGraph GenerateRandomBiregular(int n1, int n2, int d1, uint64_t seed);

// Bipartite LPS Ramanujan graph: the Cayley graph of PGL(2, q) with the p + 1
// generators coming from a^2 + b^2 + c^2 + d^2 = p. Requires p, q distinct
// primes, both 1 mod 4, (p|q) = -1 and q > 2 sqrt(p). The result is
// (p + 1)-regular with q (q^2 - 1) / 2 vertices on each side.
BiregularGraph GenerateLpsBipartite(int p, int q);

struct SpectralCertificate {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double ramanujan_bound = 0.0;  // sqrt(d1 - 1) + sqrt(d2 - 1)
  double c0 = 0.0;               // smallest C0 with sigma2 <= C0/2 (sqrt d1 + sqrt d2)
  double g1_residual = 0.0;      // || G 1/sqrt(n2) - sqrt(d1 d2) 1/sqrt(n1) ||
  bool is_ramanujan = false;
};

// Largest graph side for which singular values come from a dense SVD of G;
// larger graphs use power iteration deflated against the constant vector.
inline constexpr int kDenseSpectrumLimit = 2500;

SpectralCertificate VerifyAssumptions(const BiregularGraph& g);

void WriteEdges(const BiregularGraph& g, std::ostream& out);
BiregularGraph ReadEdges(std::istream& in);  // throws FormatError
void SaveEdges(const BiregularGraph& g, const std::filesystem::path& path);
BiregularGraph LoadEdges(const std::filesystem::path& path);

// MatrixMarket "coordinate pattern general" rendering of the same edges.
void WriteMatrixMarketPattern(const BiregularGraph& g, std::ostream& out);

// Helpers exposed for tests and for the LPS parameter search.
bool IsPrime(int n);
int LegendreSymbol(int a, int p);

}  // namespace detmc

#endif  // DETMC_EXPANDER_GRAPHS_H_

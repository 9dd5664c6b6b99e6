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

#include "detmc/expander_graphs.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "detmc/errors.h"

namespace detmc {
namespace {

int64_t EdgeKey(int32_t row, int32_t col) {
  return (static_cast<int64_t>(row) << 32) | static_cast<uint32_t>(col);
}

}  // namespace

BiregularGraph BiregularGraph::FromEdges(int n1, int n2,
                                         std::vector<Edge> edges) {
  if (n1 < 1 || n2 < 1) throw ParameterError("graph sides must be positive");
  if (edges.empty()) throw ParameterError("graph has no edges");
  const int64_t m = static_cast<int64_t>(edges.size());
  if (m % n1 != 0 || m % n2 != 0) {
    throw ParameterError("edge count " + std::to_string(m) +
                         " is not compatible with biregular degrees");
  }
  std::sort(edges.begin(), edges.end());
  std::vector<int> row_degree(n1, 0);
  std::vector<int> col_degree(n2, 0);
  for (size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.row < 0 || e.row >= n1 || e.col < 0 || e.col >= n2) {
      throw ParameterError("edge index out of range");
    }
    if (k > 0 && edges[k - 1] == e) {
      throw ParameterError("duplicate edge (" + std::to_string(e.row) + ", " +
                           std::to_string(e.col) + ")");
    }
    ++row_degree[e.row];
    ++col_degree[e.col];
  }
  BiregularGraph g;
  g.n1_ = n1;
  g.n2_ = n2;
  g.d1_ = static_cast<int>(m / n1);
  g.d2_ = static_cast<int>(m / n2);
  for (int i = 0; i < n1; ++i) {
    if (row_degree[i] != g.d1_) {
      throw ParameterError("row " + std::to_string(i) + " has degree " +
                           std::to_string(row_degree[i]) + ", expected " +
                           std::to_string(g.d1_));
    }
  }
  for (int j = 0; j < n2; ++j) {
    if (col_degree[j] != g.d2_) {
      throw ParameterError("column " + std::to_string(j) + " has degree " +
                           std::to_string(col_degree[j]) + ", expected " +
                           std::to_string(g.d2_));
    }
  }
  g.edges_ = std::move(edges);
  return g;
}

BiregularGraph CompleteBipartite(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw ParameterError("graph sides must be positive");
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) edges.push_back({i, j});
  }
  return BiregularGraph::FromEdges(n1, n2, std::move(edges));
}

BiregularGraph GenerateRandomBiregular(int n1, int n2, int d1, uint64_t seed) {
  if (n1 < 1 || n2 < 1 || d1 < 1) {
    throw ParameterError("random biregular: sizes and degree must be positive");
  }
  if (d1 > n2) throw ParameterError("random biregular: d1 exceeds n2");
  const int64_t m = static_cast<int64_t>(n1) * d1;
  if (m % n2 != 0) {
    throw ParameterError("random biregular: n1 * d1 not divisible by n2");
  }
  const int d2 = static_cast<int>(m / n2);
  if (d2 > n1) throw ParameterError("random biregular: d2 exceeds n1");
  if (d1 == n2) return CompleteBipartite(n1, n2);

  std::mt19937_64 rng(seed);
  std::vector<int32_t> right_stubs;
  right_stubs.reserve(m);
  for (int j = 0; j < n2; ++j) right_stubs.insert(right_stubs.end(), d2, j);
  std::shuffle(right_stubs.begin(), right_stubs.end(), rng);

  std::vector<Edge> edges(m);
  std::unordered_map<int64_t, int> count;
  count.reserve(2 * m);
  for (int64_t k = 0; k < m; ++k) {
    edges[k] = {static_cast<int32_t>(k / d1), right_stubs[k]};
    ++count[EdgeKey(edges[k].row, edges[k].col)];
  }

  // Every copy beyond the first of a repeated edge is a conflict. Entries
  // can go stale when another copy gets swapped away; they are dropped
  // lazily.
  std::vector<int64_t> conflicts;
  {
    std::unordered_map<int64_t, int> seen;
    for (int64_t k = 0; k < m; ++k) {
      if (++seen[EdgeKey(edges[k].row, edges[k].col)] > 1) {
        conflicts.push_back(k);
      }
    }
  }

  constexpr int64_t kMaxAttempts = 1000000;
  std::uniform_int_distribution<int64_t> pick_edge(0, m - 1);
  int64_t attempts = 0;
  while (!conflicts.empty()) {
    std::uniform_int_distribution<size_t> pick_conflict(0,
                                                        conflicts.size() - 1);
    const size_t slot = pick_conflict(rng);
    const int64_t a = conflicts[slot];
    const int64_t key_a = EdgeKey(edges[a].row, edges[a].col);
    if (count[key_a] <= 1) {
      conflicts[slot] = conflicts.back();
      conflicts.pop_back();
      continue;
    }
    if (++attempts > kMaxAttempts) {
      throw GenerationError("random biregular: duplicate repair exceeded " +
                            std::to_string(kMaxAttempts) + " attempts");
    }
    const int64_t b = pick_edge(rng);
    const Edge ea = edges[a];
    const Edge eb = edges[b];
    if (ea.row == eb.row || ea.col == eb.col) continue;
    const int64_t new_a = EdgeKey(ea.row, eb.col);
    const int64_t new_b = EdgeKey(eb.row, ea.col);
    if (count[new_a] != 0 || count[new_b] != 0) continue;
    --count[key_a];
    --count[EdgeKey(eb.row, eb.col)];
    ++count[new_a];
    ++count[new_b];
    edges[a].col = eb.col;
    edges[b].col = ea.col;
    conflicts[slot] = conflicts.back();
    conflicts.pop_back();
  }
  return BiregularGraph::FromEdges(n1, n2, std::move(edges));
}

namespace {

// y = G x (rows) and y = G^T x (cols) on the sorted edge list.
void GraphApply(const BiregularGraph& g, const Eigen::VectorXd& x,
                Eigen::VectorXd& y) {
  y.setZero(g.n1());
  for (const Edge& e : g.edges()) y(e.row) += x(e.col);
}

void GraphApplyTranspose(const BiregularGraph& g, const Eigen::VectorXd& x,
                         Eigen::VectorXd& y) {
  y.setZero(g.n2());
  for (const Edge& e : g.edges()) y(e.col) += x(e.row);
}

// Power iteration on G^T G, optionally restricted to the complement of the
// constant vector. Returns the largest singular value on that subspace.
double SparsePowerSigma(const BiregularGraph& g, bool deflate_constant) {
  constexpr int kMaxIter = 20000;
  constexpr double kRelTol = 1e-12;
  std::mt19937_64 rng(0xc0ffeeULL);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(g.n2());
  for (auto& v : x) v = normal(rng);
  auto project = [&](Eigen::VectorXd& v) {
    if (deflate_constant) v.array() -= v.mean();
  };
  project(x);
  x.normalize();
  Eigen::VectorXd gx;
  Eigen::VectorXd gtgx;
  double lambda = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    GraphApply(g, x, gx);
    const double next = gx.squaredNorm();
    GraphApplyTranspose(g, gx, gtgx);
    project(gtgx);
    const double n = gtgx.norm();
    if (n == 0.0) return std::sqrt(next);
    x = gtgx / n;
    if (it > 0 && std::abs(next - lambda) <= kRelTol * next) {
      return std::sqrt(next);
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

SpectralCertificate VerifyAssumptions(const BiregularGraph& g) {
  SpectralCertificate cert;
  const double d1 = g.d1();
  const double d2 = g.d2();
  if (std::max(g.n1(), g.n2()) <= kDenseSpectrumLimit) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(g.n1(), g.n2());
    for (const Edge& e : g.edges()) dense(e.row, e.col) = 1.0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
    const Eigen::VectorXd& s = svd.singularValues();
    cert.sigma1 = s(0);
    cert.sigma2 = s.size() > 1 ? s(1) : 0.0;
  } else {
    cert.sigma1 = SparsePowerSigma(g, /*deflate_constant=*/false);
    cert.sigma2 = std::min(cert.sigma1, SparsePowerSigma(g, true));
  }

  Eigen::VectorXd ones = Eigen::VectorXd::Constant(g.n2(), 1.0 / std::sqrt(double(g.n2())));
  Eigen::VectorXd image;
  GraphApply(g, ones, image);
  image.array() -= std::sqrt(d1 * d2) / std::sqrt(double(g.n1()));
  cert.g1_residual = image.norm();

  cert.ramanujan_bound = std::sqrt(d1 - 1.0) + std::sqrt(d2 - 1.0);
  cert.c0 = 2.0 * cert.sigma2 / (std::sqrt(d1) + std::sqrt(d2));
  const double tol = 1e-6 * cert.sigma1;
  // A repeated top singular value means the constant pair is not the unique
  // top pair (disconnected graph), so the graph is rejected even when the
  // numeric bound holds, e.g. for d = 2.
  cert.is_ramanujan = std::abs(cert.sigma1 - std::sqrt(d1 * d2)) <= tol &&
                      cert.sigma2 <= cert.ramanujan_bound + tol &&
                      cert.sigma2 < cert.sigma1 - tol;
  return cert;
}

void WriteEdges(const BiregularGraph& g, std::ostream& out) {
  out << "%%biregular " << g.n1() << ' ' << g.n2() << ' ' << g.d1() << ' '
      << g.d2() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.row + 1 << ' ' << e.col + 1 << '\n';
  }
}

void WriteMatrixMarketPattern(const BiregularGraph& g, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << "% (" << g.d1() << ", " << g.d2() << ")-biregular sampling graph\n";
  out << g.n1() << ' ' << g.n2() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.row + 1 << ' ' << e.col + 1 << '\n';
  }
}

BiregularGraph ReadEdges(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("edge list line " + std::to_string(line_no) + ": " +
                       what);
  };

  int n1 = 0, n2 = 0, d1 = 0, d2 = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "%%biregular") throw fail("missing %%biregular header");
    if (!(ls >> n1 >> n2 >> d1 >> d2) || n1 < 1 || n2 < 1 || d1 < 1 ||
        d2 < 1) {
      throw fail("malformed header");
    }
    if (static_cast<int64_t>(n1) * d1 != static_cast<int64_t>(n2) * d2) {
      throw fail("header violates n1 * d1 = n2 * d2");
    }
    have_header = true;
  }
  if (!have_header) throw FormatError("edge list: empty input");

  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(n1) * d1);
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    std::istringstream ls(line);
    int64_t i = 0, j = 0;
    if (!(ls >> i >> j)) throw fail("expected 'i j'");
    std::string rest;
    if (ls >> rest) throw fail("trailing content");
    if (i < 1 || i > n1 || j < 1 || j > n2) throw fail("index out of range");
    edges.push_back({static_cast<int32_t>(i - 1), static_cast<int32_t>(j - 1)});
  }

  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw FormatError("edge list: duplicate edge");
  }
  std::vector<int> row_degree(n1, 0);
  std::vector<int> col_degree(n2, 0);
  for (const Edge& e : edges) {
    ++row_degree[e.row];
    ++col_degree[e.col];
  }
  for (int i = 0; i < n1; ++i) {
    if (row_degree[i] != d1) {
      throw FormatError("edge list: row " + std::to_string(i + 1) +
                        " has degree " + std::to_string(row_degree[i]) +
                        ", header says " + std::to_string(d1));
    }
  }
  for (int j = 0; j < n2; ++j) {
    if (col_degree[j] != d2) {
      throw FormatError("edge list: column " + std::to_string(j + 1) +
                        " has degree " + std::to_string(col_degree[j]) +
                        ", header says " + std::to_string(d2));
    }
  }
  return BiregularGraph::FromEdges(n1, n2, std::move(edges));
}

void SaveEdges(const BiregularGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  WriteEdges(g, out);
  if (!out) throw FormatError("write failed: " + path.string());
}

BiregularGraph LoadEdges(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return ReadEdges(in);
}

}  // namespace detmc

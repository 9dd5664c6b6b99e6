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

#include "detmc/sampling_model.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <tuple>

#include "detmc/errors.h"

namespace detmc {
namespace {

void RequireShape(const DenseMatrix& m, int rows, int cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ParameterError(std::string(what) + ": expected " +
                         std::to_string(rows) + "x" + std::to_string(cols) +
                         ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

double SymmetricNorm(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// || (n / |S|) sum_{k in S} W_k W_k^T - I ||.
double SubsetDeviation(const DenseMatrix& w, const std::vector<int32_t>& subset,
                       double scale) {
  const int r = static_cast<int>(w.cols());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(r, r);
  for (int32_t k : subset) {
    acc.noalias() += w.row(k).transpose() * w.row(k);
  }
  acc *= scale;
  acc -= Eigen::MatrixXd::Identity(r, r);
  return SymmetricNorm(acc);
}

double Binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

// Reads the next line that is neither blank nor a comment.
bool NextDataLine(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

void ExpectBanner(std::istream& in, const std::string& kind) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("MatrixMarket: empty input");
  std::istringstream ls(Lower(line));
  std::string banner, object, format, field, symmetry;
  ls >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != kind ||
      field != "real" || symmetry != "general") {
    throw FormatError("MatrixMarket: expected 'matrix " + kind +
                      " real general', got '" + line + "'");
  }
}

}  // namespace

SamplingPattern SamplingPattern::FromEdges(int n1, int n2,
                                           std::vector<Edge> edges) {
  if (n1 < 1 || n2 < 1) throw ParameterError("pattern sides must be positive");
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw ParameterError("pattern has duplicate entries");
  }
  SamplingPattern p;
  p.n1_ = n1;
  p.n2_ = n2;
  p.rows_.reserve(edges.size());
  p.cols_.reserve(edges.size());
  p.row_offsets_.assign(n1 + 1, 0);
  for (const Edge& e : edges) {
    if (e.row < 0 || e.row >= n1 || e.col < 0 || e.col >= n2) {
      throw ParameterError("pattern entry out of range");
    }
    p.rows_.push_back(e.row);
    p.cols_.push_back(e.col);
    ++p.row_offsets_[e.row + 1];
  }
  std::partial_sum(p.row_offsets_.begin(), p.row_offsets_.end(),
                   p.row_offsets_.begin());
  return p;
}

SamplingPattern SamplingPattern::FromGraph(const BiregularGraph& g) {
  return FromEdges(g.n1(), g.n2(), g.edges());
}

DenseMatrix SamplingPattern::Indicator() const {
  DenseMatrix out = DenseMatrix::Zero(n1_, n2_);
  for (int64_t k = 0; k < size(); ++k) out(rows_[k], cols_[k]) = 1.0;
  return out;
}

SamplingPattern BernoulliPattern(int n1, int n2, double prob, uint64_t seed) {
  if (!(prob > 0.0 && prob <= 1.0)) {
    throw ParameterError("Bernoulli probability must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<size_t>(prob * n1 * n2 * 1.1) + 16);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      if (unif(rng) < prob) edges.push_back({i, j});
    }
  }
  return SamplingPattern::FromEdges(n1, n2, std::move(edges));
}

ObservedMatrix ApplyPOmega(const DenseMatrix& m,
                           std::shared_ptr<const SamplingPattern> pattern,
                           double p) {
  RequireShape(m, pattern->n1(), pattern->n2(), "ApplyPOmega");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  ObservedMatrix obs;
  obs.values.resize(pattern->size());
  const auto& rows = pattern->rows();
  const auto& cols = pattern->cols();
  for (int64_t k = 0; k < pattern->size(); ++k) {
    obs.values(k) = m(rows[k], cols[k]);
  }
  obs.pattern = std::move(pattern);
  obs.p = p;
  return obs;
}

ObservedMatrix ApplyPOmega(const DenseMatrix& m, const BiregularGraph& g) {
  return ApplyPOmega(
      m, std::make_shared<const SamplingPattern>(SamplingPattern::FromGraph(g)),
      g.sampling_rate());
}

DenseMatrix ObservedDense(const ObservedMatrix& obs) {
  DenseMatrix out = DenseMatrix::Zero(obs.n1(), obs.n2());
  const auto& rows = obs.pattern->rows();
  const auto& cols = obs.pattern->cols();
  for (int64_t k = 0; k < obs.size(); ++k) out(rows[k], cols[k]) = obs.values(k);
  return out;
}

DenseMatrix RescaledDense(const ObservedMatrix& obs) {
  return ObservedDense(obs) / obs.p;
}

LinearOperator RescaledOperator(const ObservedMatrix& obs) {
  LinearOperator op;
  op.rows = obs.n1();
  op.cols = obs.n2();
  // Captures by value: the pattern is shared and the values are copied once.
  auto pattern = obs.pattern;
  auto scaled = std::make_shared<const Vector>(obs.values / obs.p);
  op.apply = [pattern, scaled](const Vector& x, Vector& y) {
    y.setZero(pattern->n1());
    const auto& cols = pattern->cols();
    const auto& offsets = pattern->row_offsets();
    for (int i = 0; i < pattern->n1(); ++i) {
      double acc = 0.0;
      for (int64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        acc += (*scaled)(k) * x(cols[k]);
      }
      y(i) = acc;
    }
  };
  op.apply_transpose = [pattern, scaled](const Vector& x, Vector& y) {
    y.setZero(pattern->n2());
    const auto& rows = pattern->rows();
    const auto& cols = pattern->cols();
    for (int64_t k = 0; k < pattern->size(); ++k) {
      y(cols[k]) += (*scaled)(k) * x(rows[k]);
    }
  };
  return op;
}

SparseResidual ResidualOnOmega(const DenseMatrix& x, const DenseMatrix& y,
                               const ObservedMatrix& obs) {
  if (x.cols() != y.cols()) throw ParameterError("factor ranks differ");
  RequireShape(x, obs.n1(), static_cast<int>(x.cols()), "ResidualOnOmega X");
  RequireShape(y, obs.n2(), static_cast<int>(y.cols()), "ResidualOnOmega Y");
  const int r = static_cast<int>(x.cols());
  SparseResidual k;
  k.pattern = obs.pattern;
  k.values.resize(obs.size());
  const auto& rows = obs.pattern->rows();
  const auto& cols = obs.pattern->cols();
  const double* xd = x.data();
  const double* yd = y.data();
  for (int64_t e = 0; e < obs.size(); ++e) {
    const double* xi = xd + static_cast<int64_t>(rows[e]) * r;
    const double* yj = yd + static_cast<int64_t>(cols[e]) * r;
    double acc = 0.0;
    for (int c = 0; c < r; ++c) acc += xi[c] * yj[c];
    k.values(e) = acc - obs.values(e);
  }
  return k;
}

DenseMatrix KTimesY(const SparseResidual& k, const DenseMatrix& y) {
  const SamplingPattern& pat = *k.pattern;
  RequireShape(y, pat.n2(), static_cast<int>(y.cols()), "KTimesY");
  const int r = static_cast<int>(y.cols());
  DenseMatrix out = DenseMatrix::Zero(pat.n1(), r);
  const auto& rows = pat.rows();
  const auto& cols = pat.cols();
  const double* yd = y.data();
  double* od = out.data();
  for (int64_t e = 0; e < pat.size(); ++e) {
    const double v = k.values(e);
    const double* yj = yd + static_cast<int64_t>(cols[e]) * r;
    double* oi = od + static_cast<int64_t>(rows[e]) * r;
    for (int c = 0; c < r; ++c) oi[c] += v * yj[c];
  }
  return out;
}

DenseMatrix KtTimesX(const SparseResidual& k, const DenseMatrix& x) {
  const SamplingPattern& pat = *k.pattern;
  RequireShape(x, pat.n1(), static_cast<int>(x.cols()), "KtTimesX");
  const int r = static_cast<int>(x.cols());
  DenseMatrix out = DenseMatrix::Zero(pat.n2(), r);
  const auto& rows = pat.rows();
  const auto& cols = pat.cols();
  const double* xd = x.data();
  double* od = out.data();
  for (int64_t e = 0; e < pat.size(); ++e) {
    const double v = k.values(e);
    const double* xi = xd + static_cast<int64_t>(rows[e]) * r;
    double* oj = od + static_cast<int64_t>(cols[e]) * r;
    for (int c = 0; c < r; ++c) oj[c] += v * xi[c];
  }
  return out;
}

double SampledInner(const SamplingPattern& pattern, double p,
                    const DenseMatrix& a, const DenseMatrix& b) {
  RequireShape(a, pattern.n1(), pattern.n2(), "SampledInner A");
  RequireShape(b, pattern.n1(), pattern.n2(), "SampledInner B");
  double acc = 0.0;
  for (int64_t k = 0; k < pattern.size(); ++k) {
    const int i = pattern.rows()[k];
    const int j = pattern.cols()[k];
    acc += a(i, j) * b(i, j);
  }
  return acc / p;
}

GroundTruth GroundTruth::FromSvd(DenseMatrix u, Vector s, DenseMatrix v) {
  const int r = static_cast<int>(s.size());
  if (r < 1 || u.cols() != r || v.cols() != r) {
    throw ParameterError("GroundTruth: inconsistent SVD ranks");
  }
  if (u.rows() < r || v.rows() < r) {
    throw ParameterError("GroundTruth: rank exceeds dimensions");
  }
  for (int i = 0; i < r; ++i) {
    if (!(s(i) > 0.0) || (i > 0 && s(i) > s(i - 1))) {
      throw ParameterError(
          "GroundTruth: singular values must be positive and nonincreasing");
    }
  }
  GroundTruth gt;
  gt.r = r;
  gt.M = u * s.asDiagonal() * v.transpose();
  const Vector root = s.cwiseSqrt();
  gt.x_star = u * root.asDiagonal();
  gt.y_star = v * root.asDiagonal();
  gt.svd.U = std::move(u);
  gt.svd.S = std::move(s);
  gt.svd.V = std::move(v);
  gt.kappa = gt.svd.S(0) / gt.svd.S(r - 1);
  gt.mu = IncoherenceMu(gt);
  return gt;
}

GroundTruth GroundTruth::FromMatrix(const DenseMatrix& m, int r) {
  RequireFinite(m, "ground truth");
  const int max_rank = static_cast<int>(std::min(m.rows(), m.cols()));
  if (r < 1 || r > max_rank) throw ParameterError("GroundTruth: bad rank");
  TruncatedSvd svd = TopRSvd(m, std::min(r + 1, max_rank));
  if (svd.S(r - 1) <= 0.0 ||
      (svd.rank() > r && svd.S(r) > 1e-10 * svd.S(0))) {
    throw ParameterError("GroundTruth: matrix is not of rank " +
                         std::to_string(r));
  }
  GroundTruth gt = FromSvd(svd.U.leftCols(r), svd.S.head(r),
                           svd.V.leftCols(r));
  gt.M = m;
  return gt;
}

DenseMatrix GroundTruth::z_star() const {
  DenseMatrix z(x_star.rows() + y_star.rows(), r);
  z << x_star, y_star;
  return z;
}

double IncoherenceMu(const GroundTruth& gt) {
  const double r = gt.r;
  const double u = gt.svd.U.rowwise().squaredNorm().maxCoeff();
  const double v = gt.svd.V.rowwise().squaredNorm().maxCoeff();
  return std::max(gt.n1() / r * u, gt.n2() / r * v);
}

std::string ToString(DeltaMethod m) {
  switch (m) {
    case DeltaMethod::kGraphNeighborhoods:
      return "graph-neighborhoods";
    case DeltaMethod::kMonteCarlo:
      return "monte-carlo";
    case DeltaMethod::kExhaustive:
      return "exhaustive";
  }
  return "unknown";
}

IncoherenceReport DeltaDEstimate(const GroundTruth& gt,
                                 const BiregularGraph& g, int extra_subsets,
                                 uint64_t seed) {
  const int n1 = g.n1(), n2 = g.n2(), d1 = g.d1(), d2 = g.d2();
  if (gt.n1() != n1 || gt.n2() != n2) {
    throw ParameterError("DeltaDEstimate: graph and ground truth differ in shape");
  }
  if (d2 > n1 || d1 > n2) throw ParameterError("DeltaDEstimate: degree too large");
  if (extra_subsets < 0) throw ParameterError("extra_subsets must be >= 0");

  IncoherenceReport report;
  report.mu = gt.mu;
  const double u_scale = static_cast<double>(n1) / d2;
  const double v_scale = static_cast<double>(n2) / d1;

  // Neighbourhoods: the rows adjacent to column j, and the columns adjacent
  // to row i.
  std::vector<std::vector<int32_t>> col_nbrs(n2);
  for (auto& c : col_nbrs) c.reserve(d2);
  std::vector<int32_t> row_nbr;
  double best = 0.0;
  for (int64_t k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    col_nbrs[e.col].push_back(e.row);
    row_nbr.push_back(e.col);
    if (static_cast<int>(row_nbr.size()) == d1) {
      best = std::max(best, SubsetDeviation(gt.svd.V, row_nbr, v_scale));
      row_nbr.clear();
    }
  }
  for (const auto& s : col_nbrs) {
    best = std::max(best, SubsetDeviation(gt.svd.U, s, u_scale));
  }
  report.subsets_checked = n1 + n2;

  if (extra_subsets > 0) {
    std::mt19937_64 rng(seed);
    std::vector<int32_t> left(n1), right(n2);
    std::iota(left.begin(), left.end(), 0);
    std::iota(right.begin(), right.end(), 0);
    std::vector<int32_t> subset;
    for (int t = 0; t < extra_subsets; ++t) {
      // Partial Fisher-Yates for a uniform subset of each size.
      for (int k = 0; k < d2; ++k) {
        std::uniform_int_distribution<int> pick(k, n1 - 1);
        std::swap(left[k], left[pick(rng)]);
      }
      subset.assign(left.begin(), left.begin() + d2);
      best = std::max(best, SubsetDeviation(gt.svd.U, subset, u_scale));
      for (int k = 0; k < d1; ++k) {
        std::uniform_int_distribution<int> pick(k, n2 - 1);
        std::swap(right[k], right[pick(rng)]);
      }
      subset.assign(right.begin(), right.begin() + d1);
      best = std::max(best, SubsetDeviation(gt.svd.V, subset, v_scale));
    }
    report.subsets_checked += 2 * static_cast<int64_t>(extra_subsets);
    report.method = DeltaMethod::kMonteCarlo;
  }
  report.delta_d_estimate = best;
  return report;
}

IncoherenceReport DeltaDExhaustive(const GroundTruth& gt,
                                   const BiregularGraph& g) {
  const int n1 = g.n1(), n2 = g.n2(), d1 = g.d1(), d2 = g.d2();
  if (gt.n1() != n1 || gt.n2() != n2) {
    throw ParameterError("DeltaDExhaustive: graph and ground truth differ in shape");
  }
  if (Binomial(n1, d2) + Binomial(n2, d1) > 1e6) {
    throw ParameterError("DeltaDExhaustive: more than 1e6 subsets");
  }
  IncoherenceReport report;
  report.mu = gt.mu;
  report.method = DeltaMethod::kExhaustive;
  double best = 0.0;
  auto sweep = [&](const DenseMatrix& w, int n, int size, double scale) {
    std::vector<int32_t> subset(size);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      best = std::max(best, SubsetDeviation(w, subset, scale));
      ++report.subsets_checked;
      int k = size - 1;
      while (k >= 0 && subset[k] == n - size + k) --k;
      if (k < 0) break;
      ++subset[k];
      for (int t = k + 1; t < size; ++t) subset[t] = subset[t - 1] + 1;
    }
  };
  sweep(gt.svd.U, n1, d2, static_cast<double>(n1) / d2);
  sweep(gt.svd.V, n2, d1, static_cast<double>(n2) / d1);
  report.delta_d_estimate = best;
  return report;
}

void WriteObservedMatrixMarket(const ObservedMatrix& obs, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << obs.n1() << ' ' << obs.n2() << ' ' << obs.size() << '\n';
  out << std::setprecision(17);
  const auto& rows = obs.pattern->rows();
  const auto& cols = obs.pattern->cols();
  for (int64_t k = 0; k < obs.size(); ++k) {
    out << rows[k] + 1 << ' ' << cols[k] + 1 << ' ' << obs.values(k) << '\n';
  }
}

ObservedMatrix ReadObservedMatrixMarket(std::istream& in,
                                        const BiregularGraph& g) {
  ExpectBanner(in, "coordinate");
  std::string line;
  if (!NextDataLine(in, line)) throw FormatError("MatrixMarket: missing size line");
  int64_t n1 = 0, n2 = 0, nnz = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> n1 >> n2 >> nnz)) throw FormatError("MatrixMarket: bad size line");
  }
  if (n1 != g.n1() || n2 != g.n2() || nnz != g.num_edges()) {
    throw FormatError("MatrixMarket: size does not match the sampling graph");
  }
  std::vector<std::tuple<int32_t, int32_t, double>> entries;
  entries.reserve(nnz);
  for (int64_t k = 0; k < nnz; ++k) {
    if (!NextDataLine(in, line)) throw FormatError("MatrixMarket: truncated entries");
    std::istringstream ls(line);
    int64_t i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v)) throw FormatError("MatrixMarket: bad entry '" + line + "'");
    if (i < 1 || i > n1 || j < 1 || j > n2) {
      throw FormatError("MatrixMarket: index out of range");
    }
    if (!std::isfinite(v)) throw FormatError("MatrixMarket: non-finite value");
    entries.emplace_back(static_cast<int32_t>(i - 1),
                         static_cast<int32_t>(j - 1), v);
  }
  if (NextDataLine(in, line)) throw FormatError("MatrixMarket: trailing entries");
  std::sort(entries.begin(), entries.end());
  ObservedMatrix obs;
  obs.values.resize(nnz);
  for (int64_t k = 0; k < nnz; ++k) {
    const auto& [i, j, v] = entries[k];
    const Edge& e = g.edges()[k];
    if (e.row != i || e.col != j) {
      throw FormatError("MatrixMarket: entry (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) +
                        ") is not an edge of the sampling graph");
    }
    obs.values(k) = v;
  }
  obs.pattern =
      std::make_shared<const SamplingPattern>(SamplingPattern::FromGraph(g));
  obs.p = g.sampling_rate();
  return obs;
}

void WriteDenseMatrixMarket(const DenseMatrix& m, std::ostream& out) {
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out << m(i, j) << '\n';
  }
}

DenseMatrix ReadDenseMatrixMarket(std::istream& in) {
  ExpectBanner(in, "array");
  std::string line;
  if (!NextDataLine(in, line)) throw FormatError("MatrixMarket: missing size line");
  int64_t rows = 0, cols = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> rows >> cols) || rows < 1 || cols < 1) {
      throw FormatError("MatrixMarket: bad size line");
    }
  }
  DenseMatrix m(rows, cols);
  for (int64_t j = 0; j < cols; ++j) {
    for (int64_t i = 0; i < rows; ++i) {
      if (!NextDataLine(in, line)) throw FormatError("MatrixMarket: truncated array");
      std::istringstream ls(line);
      if (!(ls >> m(i, j))) throw FormatError("MatrixMarket: bad value '" + line + "'");
    }
  }
  return m;
}

}  // namespace detmc

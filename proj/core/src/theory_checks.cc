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

#include "detmc/theory_checks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/QR>
#include "json.hpp"

#include "detmc/dense_kernels.h"
#include "detmc/errors.h"
#include "detmc/factors.h"
#include "detmc/metrics_alignment.h"
#include "detmc/solver_pgd.h"
#include "detmc/solver_scaled_pgd.h"

namespace detmc {
namespace {

std::mt19937_64 TrialRng(uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(trial)};
  return std::mt19937_64(seq);
}

DenseMatrix Gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

DenseMatrix RandomOrthogonal(int r, std::mt19937_64& rng) {
  Eigen::HouseholderQR<DenseMatrix> qr(Gaussian(r, r, rng));
  return qr.householderQ() * DenseMatrix::Identity(r, r);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Running worst margin and scale of one inequality.
struct Tally {
  double worst = std::numeric_limits<double>::infinity();
  double scale = 0.0;

  void Add(double lhs, double rhs) {
    worst = std::min(worst, rhs - lhs);
    scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
  }
  // For LHS values that are norms of differences, roundoff is relative to
  // the operands, not to the (possibly vanishing) difference.
  void AddOperandScale(double magnitude) { scale = std::max(scale, magnitude); }
};

void Merge(TheoryCheckReport& rep, const std::string& name, const Tally& t) {
  if (t.scale == 0.0 && std::isinf(t.worst)) return;
  rep.component_margins[name] = t.worst;
  rep.worst_margin = std::min(rep.worst_margin, t.worst);
  rep.scale = std::max(rep.scale, t.scale);
}

TheoryCheckReport NewReport(const std::string& name, const BiregularGraph& g) {
  TheoryCheckReport rep;
  rep.check_name = name;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.params["n1"] = g.n1();
  rep.params["n2"] = g.n2();
  rep.params["d1"] = g.d1();
  rep.params["d2"] = g.d2();
  rep.params["p"] = g.sampling_rate();
  return rep;
}

void Finish(TheoryCheckReport& rep) {
  if (std::isinf(rep.worst_margin)) rep.worst_margin = 0.0;
}

void EchoTruth(TheoryCheckReport& rep, const GroundTruth& gt) {
  rep.params["mu"] = gt.mu;
  rep.params["r"] = gt.r;
  rep.params["kappa"] = gt.kappa;
  rep.params["sigma1"] = gt.sigma1();
  rep.params["sigmar"] = gt.sigmar();
}

void CheckShapes(const GroundTruth& gt, const BiregularGraph& g) {
  if (gt.n1() != g.n1() || gt.n2() != g.n2()) {
    throw ParameterError("ground truth and graph dimensions differ");
  }
}

double DeltaD(const GroundTruth& gt, const BiregularGraph& g, uint64_t seed) {
  return DeltaDEstimate(gt, g, /*extra_subsets=*/100, seed).delta_d_estimate;
}

// sum over Omega of (a_i . b_j)^2, a is n1 x r and b is n2 x r.
double SampledSquares(const BiregularGraph& g, const DenseMatrix& a,
                      const DenseMatrix& b) {
  double acc = 0.0;
  for (const Edge& e : g.edges()) {
    const double v = a.row(e.row).dot(b.row(e.col));
    acc += v * v;
  }
  return acc;
}

}  // namespace

std::string ToJson(const TheoryCheckReport& report) {
  nlohmann::json j;
  j["check_name"] = report.check_name;
  j["instances_tested"] = report.instances_tested;
  j["instances_skipped"] = report.instances_skipped;
  j["worst_margin"] = report.worst_margin;
  j["scale"] = report.scale;
  j["passed"] = report.passed();
  j["in_regime"] = report.in_regime;
  if (report.delta_tilde) j["delta_tilde"] = *report.delta_tilde;
  j["params"] = report.params;
  if (!report.component_margins.empty()) {
    j["component_margins"] = report.component_margins;
  }
  return j.dump(2);
}

double DeltaTilde(double delta_d, double c0, double mu, int r, int d1,
                  int d2) {
  const double dmin = std::min(d1, d2);
  return std::sqrt(2.0 * (delta_d * delta_d + c0 * c0 * mu * mu * r * r / dmin));
}

TheoryCheckReport CheckRipOnT(const GroundTruth& gt, const BiregularGraph& g,
                              int trials, uint64_t seed) {
  CheckShapes(gt, g);
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double delta_d = DeltaD(gt, g, seed);
  const double dt =
      DeltaTilde(delta_d, cert.c0, gt.mu, gt.r, g.d1(), g.d2());
  const double p = g.sampling_rate();
  const DenseMatrix& u = gt.svd.U;
  const DenseMatrix& v = gt.svd.V;

  TheoryCheckReport rep = NewReport("rip_on_T", g);
  EchoTruth(rep, gt);
  rep.params["delta_d"] = delta_d;
  rep.params["c0"] = cert.c0;
  rep.delta_tilde = dt;

  Tally lower, upper;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    // Z = U* A^T + B V*^T; mix the relative weight of the two parts.
    const DenseMatrix a = Gaussian(g.n2(), gt.r, rng) * Uniform(rng, 0.0, 1.0);
    const DenseMatrix b = Gaussian(g.n1(), gt.r, rng) * Uniform(rng, 0.0, 1.0);
    const double norm2 =
        a.squaredNorm() + b.squaredNorm() +
        2.0 * ((u.transpose() * b) * (v.transpose() * a)).trace();
    double sampled = 0.0;
    for (const Edge& e : g.edges()) {
      const double z = u.row(e.row).dot(a.row(e.col)) +
                       b.row(e.row).dot(v.row(e.col));
      sampled += z * z;
    }
    sampled /= p;
    lower.Add((1.0 - dt) * norm2, sampled);
    upper.Add(sampled, (1.0 + dt) * norm2);
    ++rep.instances_tested;
  }
  Merge(rep, "lower", lower);
  Merge(rep, "upper", upper);
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckBilinearBound(const BiregularGraph& g, int trials,
                                     uint64_t seed) {
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double p = g.sampling_rate();
  const double coef =
      0.5 * cert.c0 * (std::sqrt(g.n1()) + std::sqrt(g.n2())) / std::sqrt(p);
  TheoryCheckReport rep = NewReport("bilinear_bound", g);
  rep.params["c0"] = cert.c0;

  // Left neighbourhoods, used to build adversarial (x, y) pairs.
  std::vector<std::vector<int>> nbr(g.n1());
  for (const Edge& e : g.edges()) nbr[e.row].push_back(e.col);

  Tally tally;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    Vector x = Vector::Zero(g.n1());
    Vector y = Vector::Zero(g.n2());
    switch (t % 3) {
      case 0:  // dense uniform
        for (int i = 0; i < g.n1(); ++i) x(i) = Uniform(rng, 0.0, 1.0);
        for (int j = 0; j < g.n2(); ++j) y(j) = Uniform(rng, 0.0, 1.0);
        break;
      case 1: {  // sparse supports
        const double keep = Uniform(rng, 0.01, 0.2);
        for (int i = 0; i < g.n1(); ++i) {
          if (Uniform(rng, 0.0, 1.0) < keep) x(i) = Uniform(rng, 0.0, 1.0);
        }
        for (int j = 0; j < g.n2(); ++j) {
          if (Uniform(rng, 0.0, 1.0) < keep) y(j) = Uniform(rng, 0.0, 1.0);
        }
        break;
      }
      default: {  // indicator of a random set S and of its neighbourhood
        const double keep = Uniform(rng, 0.001, 0.05);
        std::uniform_int_distribution<int> first(0, g.n1() - 1);
        const int i0 = first(rng);
        for (int i = 0; i < g.n1(); ++i) {
          if (i == i0 || Uniform(rng, 0.0, 1.0) < keep) {
            x(i) = 1.0;
            for (int j : nbr[i]) y(j) = 1.0;
          }
        }
        break;
      }
    }
    double lhs = 0.0;
    for (const Edge& e : g.edges()) lhs += x(e.row) * y(e.col);
    lhs /= p;
    const double rhs = x.lpNorm<1>() * y.lpNorm<1>() + coef * x.norm() * y.norm();
    tally.Add(lhs, rhs);
    ++rep.instances_tested;
  }
  Merge(rep, "bilinear", tally);
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckGraphDeviation(const BiregularGraph& g,
                                      const GroundTruth* gt) {
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double p = g.sampling_rate();
  const int n1 = g.n1(), n2 = g.n2();
  const double dmin = std::min(g.d1(), g.d2());
  TheoryCheckReport rep = NewReport("graph_deviation", g);
  rep.params["c0"] = cert.c0;
  rep.params["sigma2"] = cert.sigma2;

  // ||(1/p) G - E|| by Lanczos on the sparse operator, independent of the
  // certificate. The top singular values are clustered, which rules out
  // plain power iteration.
  LinearOperator dev;
  dev.rows = n1;
  dev.cols = n2;
  dev.apply = [&g, p, n1](const Vector& x, Vector& y) {
    y = Vector::Constant(n1, -x.sum());
    for (const Edge& e : g.edges()) y(e.row) += x(e.col) / p;
  };
  dev.apply_transpose = [&g, p, n2](const Vector& x, Vector& y) {
    y = Vector::Constant(n2, -x.sum());
    for (const Edge& e : g.edges()) y(e.col) += x(e.row) / p;
  };
  const double deviation = TopRSvdLanczos(dev, 1).S(0);
  rep.params["deviation"] = deviation;
  Tally spectral;
  spectral.Add(deviation, cert.c0 * std::sqrt(double(n1) * n2) / std::sqrt(dmin));
  spectral.AddOperandScale(std::sqrt(double(n1) * n2));  // ||E||
  ++rep.instances_tested;
  Merge(rep, "spectral", spectral);

  if (gt != nullptr) {
    CheckShapes(*gt, g);
    EchoTruth(rep, *gt);
    const ObservedMatrix obs = ApplyPOmega(gt->M, g);
    const LinearOperator sampled = RescaledOperator(obs);
    const TruncatedSvd& s = gt->svd;
    LinearOperator op;
    op.rows = n1;
    op.cols = n2;
    op.apply = [&sampled, &s](const Vector& x, Vector& y) {
      sampled.apply(x, y);
      y -= s.U * (s.S.asDiagonal() * (s.V.transpose() * x));
    };
    op.apply_transpose = [&sampled, &s](const Vector& x, Vector& y) {
      sampled.apply_transpose(x, y);
      y -= s.V * (s.S.asDiagonal() * (s.U.transpose() * x));
    };
    const double lhs = TopRSvdLanczos(op, 1).S(0);
    Tally truth;
    truth.Add(lhs, cert.c0 * gt->mu * gt->r / std::sqrt(dmin) * gt->sigma1());
    truth.AddOperandScale(gt->sigma1());
    ++rep.instances_tested;
    Merge(rep, "ground_truth", truth);
  }
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckHadamardQuartic(const GroundTruth& gt,
                                       const BiregularGraph& g, int trials,
                                       uint64_t seed) {
  CheckShapes(gt, g);
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double p = g.sampling_rate();
  const int n1 = g.n1(), n2 = g.n2(), r = gt.r;
  const double nmin = std::min(n1, n2);
  const double row_cap = 4.0 * std::sqrt(gt.mu * r * gt.sigma1() / nmin);
  const double coef = 16.0 * cert.c0 * gt.mu * r * gt.kappa *
                      (std::sqrt(n1) + std::sqrt(n2)) / (std::sqrt(p) * nmin) *
                      gt.sigmar();
  TheoryCheckReport rep = NewReport("hadamard_quartic", g);
  EchoTruth(rep, gt);
  rep.params["c0"] = cert.c0;
  rep.params["row_cap"] = row_cap;

  Tally tally;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    DenseMatrix h;
    if (t % 2 == 0) {
      h = Gaussian(n1 + n2, r, rng);
    } else {
      // Rank-one rows: every sampled inner product is as large as allowed.
      const Vector w = Gaussian(r, 1, rng).col(0).normalized();
      h = Gaussian(n1 + n2, 1, rng) * w.transpose();
    }
    // Typical row norm between 1% and 200% of the cap, then clip.
    const double target = row_cap * std::exp(Uniform(rng, std::log(0.01), std::log(2.0)));
    h *= target / std::sqrt(h.squaredNorm() / h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const double norm = h.row(i).norm();
      if (norm > row_cap) h.row(i) *= row_cap / norm;
    }
    if (TwoInfNorm(h) > row_cap * (1.0 + 1e-12)) {
      ++rep.instances_skipped;
      continue;
    }
    const DenseMatrix hu = h.topRows(n1);
    const DenseMatrix hv = h.bottomRows(n2);
    const double lhs = 2.0 / p * SampledSquares(g, hu, hv);
    const double hn2 = h.squaredNorm();
    tally.Add(lhs, 2.0 * hn2 * hn2 + coef * hn2);
    ++rep.instances_tested;
  }
  Merge(rep, "hadamard", tally);
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckRowBound(const BiregularGraph& g, int trials,
                                uint64_t seed, int r) {
  if (r < 1) throw ParameterError("rank must be positive");
  const double p = g.sampling_rate();
  const int n1 = g.n1(), n2 = g.n2();
  const double nmax = std::max(n1, n2);
  TheoryCheckReport rep = NewReport("row_bound", g);
  rep.params["r"] = r;

  Tally tally;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    DenseMatrix a = Gaussian(n1 + n2, r, rng);
    DenseMatrix b = Gaussian(n1 + n2, r, rng);
    if (t % 3 == 1) {
      // A few heavy rows make the 2,inf norms dominate.
      std::uniform_int_distribution<int> pick(0, n1 + n2 - 1);
      for (int k = 0; k < 3; ++k) {
        a.row(pick(rng)) *= Uniform(rng, 10.0, 100.0);
        b.row(pick(rng)) *= Uniform(rng, 10.0, 100.0);
      }
    } else if (t % 3 == 2) {
      // Flat rows of equal norm: the regime where the bound is tightest.
      const Vector w = Gaussian(r, 1, rng).col(0).normalized();
      a = DenseMatrix::Ones(n1 + n2, 1) * w.transpose();
      b = DenseMatrix::Ones(n1 + n2, 1) * w.transpose();
    }
    const double lhs = (SampledSquares(g, a.topRows(n1), b.bottomRows(n2)) +
                        SampledSquares(g, b.topRows(n1), a.bottomRows(n2))) /
                       p;
    const double ta = TwoInfNorm(a), tb = TwoInfNorm(b);
    const double rhs = nmax * std::min(a.squaredNorm() * tb * tb,
                                       b.squaredNorm() * ta * ta);
    tally.Add(lhs, rhs);
    ++rep.instances_tested;
  }
  Merge(rep, "row_bound", tally);
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckCurvatureSmoothnessPgd(const GroundTruth& gt,
                                              const BiregularGraph& g,
                                              int trials, uint64_t seed) {
  CheckShapes(gt, g);
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double delta_d = DeltaD(gt, g, seed);
  const double p = g.sampling_rate();
  const int n1 = g.n1(), n2 = g.n2(), r = gt.r;
  const double nmin = std::min(n1, n2);
  const double s1 = gt.sigma1(), sr = gt.sigmar();
  const double mu = gt.mu, kappa = gt.kappa;
  const double lambda = 0.5;
  const double radius = 0.25 * std::sqrt(sr);
  // C1 with ||Z0|| replaced by ||Z*|| = sqrt(2 sigma1*).
  const double clip = std::sqrt(2.0 * mu * r / nmin) * std::sqrt(2.0 * s1);
  const double p_needed = 262144.0 * cert.c0 * cert.c0 * mu * mu * r * r *
                          kappa * kappa / nmin;

  TheoryCheckReport rep = NewReport("curvature_smoothness_pgd", g);
  EchoTruth(rep, gt);
  rep.params["c0"] = cert.c0;
  rep.params["delta_d"] = delta_d;
  rep.params["p_required"] = p_needed;
  rep.in_regime = p >= p_needed && delta_d <= 1.0 / 64.0;

  const ObservedMatrix obs = ApplyPOmega(gt.M, g);
  const DenseMatrix zs = gt.z_star();
  Tally curvature, smoothness, regularity;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    const DenseMatrix rot = RandomOrthogonal(r, rng);
    DenseMatrix dir = Gaussian(n1 + n2, r, rng);
    dir *= Uniform(rng, 0.0, 1.0) * radius / dir.norm();
    const FactorPair z =
        ProjectC1(FactorPair::FromStacked(zs * rot + dir, n1), clip);
    const AlignmentResult al = DistOrthogonal(z, gt);
    if (al.distance > radius) {
      ++rep.instances_skipped;
      continue;
    }
    const DenseMatrix& h = al.H;
    const DenseMatrix zbar = z.Stacked() - h;
    const DenseMatrix zdh = zbar.topRows(n1).transpose() * h.topRows(n1) -
                            zbar.bottomRows(n2).transpose() * h.bottomRows(n2);
    const DenseMatrix grad = GradL1(z, obs, lambda).Stacked();
    const double inner = (grad.array() * h.array()).sum();
    const double g2 = grad.squaredNorm();
    const double h2 = h.squaredNorm();
    const double zdh2 = zdh.squaredNorm();
    curvature.Add(0.375 * sr * h2 + 0.25 * zdh2, inner);
    smoothness.Add(g2, 1524.0 * mu * mu * r * r * s1 * s1 * h2 + 5.0 * s1 * zdh2);
    regularity.Add(0.125 * sr * h2 + g2 / (6096.0 * mu * mu * r * r * kappa * s1),
                   inner);
    ++rep.instances_tested;
  }
  Merge(rep, "curvature", curvature);
  Merge(rep, "smoothness", smoothness);
  Merge(rep, "regularity", regularity);
  Finish(rep);
  return rep;
}

TheoryCheckReport CheckCurvatureSmoothnessScaled(const GroundTruth& gt,
                                                 const BiregularGraph& g,
                                                 int trials, uint64_t seed) {
  CheckShapes(gt, g);
  const SpectralCertificate cert = VerifyAssumptions(g);
  const double delta_d = DeltaD(gt, g, seed);
  const int n1 = g.n1(), n2 = g.n2(), r = gt.r;
  const double s1 = gt.sigma1(), sr = gt.sigmar();
  const double mu = gt.mu, kappa = gt.kappa;
  const double budget = 1.1 * std::sqrt(mu * r) * s1;
  const double radius = sr / 10.0;
  const double d_needed = 1e4 * cert.c0 * cert.c0 * mu * mu * r * r *
                          std::pow(kappa, 4);

  TheoryCheckReport rep = NewReport("curvature_smoothness_scaled", g);
  EchoTruth(rep, gt);
  rep.params["c0"] = cert.c0;
  rep.params["delta_d"] = delta_d;
  rep.params["degree_required"] = d_needed;
  rep.in_regime =
      std::min(g.d1(), g.d2()) >= d_needed && delta_d <= 1.0 / 64.0;

  const ObservedMatrix obs = ApplyPOmega(gt.M, g);
  const Vector sqrt_s = gt.svd.S.cwiseSqrt();
  Tally curv_x, curv_y, smooth_x, smooth_y;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = TrialRng(seed, t);
    // Z = ((X* + E_X) Q0^{-1}, (Y* + E_Y) Q0^T) has dist_* <= ||E Sigma^{1/2}||.
    Vector sv(r);
    for (int k = 0; k < r; ++k) sv(k) = std::exp(Uniform(rng, std::log(0.5), std::log(2.0)));
    const DenseMatrix q0 =
        RandomOrthogonal(r, rng) * sv.asDiagonal() * RandomOrthogonal(r, rng);
    DenseMatrix ex = Gaussian(n1, r, rng);
    DenseMatrix ey = Gaussian(n2, r, rng);
    const double weighted = std::sqrt((ex * sqrt_s.asDiagonal()).squaredNorm() +
                                      (ey * sqrt_s.asDiagonal()).squaredNorm());
    const double scale = Uniform(rng, 0.0, 1.0) * radius / weighted;
    ex *= scale;
    ey *= scale;
    FactorPair z{(gt.x_star + ex) * q0.inverse(), (gt.y_star + ey) * q0.transpose()};
    z = ProjectC2(z, budget);

    const double row_x = std::sqrt(n1) * TwoInfNorm(z.X * z.Y.transpose());
    const double row_y = std::sqrt(n2) * TwoInfNorm(z.Y * z.X.transpose());
    AlignmentResult al;
    try {
      al = DistStar(z, gt);
    } catch (const AlignmentError&) {
      ++rep.instances_skipped;
      continue;
    }
    if (al.distance > radius || std::max(row_x, row_y) > budget * (1 + 1e-12)) {
      ++rep.instances_skipped;
      continue;
    }
    const DenseMatrix& q = al.Q;
    const DenseMatrix q_inv_t = q.inverse().transpose();
    const DenseMatrix dx = (z.X * q - gt.x_star) * sqrt_s.asDiagonal();
    const DenseMatrix dy = (z.Y * q_inv_t - gt.y_star) * sqrt_s.asDiagonal();
    const SparseResidual k = ResidualOnOmega(z.X, z.Y, obs);
    const DenseMatrix grad_x = KTimesY(k, z.Y) / obs.p;
    const DenseMatrix grad_y = KtTimesX(k, z.X) / obs.p;
    const DenseMatrix gx = grad_x * (z.Y.transpose() * z.Y).inverse() * q *
                           sqrt_s.asDiagonal();
    const DenseMatrix gy = grad_y * (z.X.transpose() * z.X).inverse() *
                           q_inv_t * sqrt_s.asDiagonal();
    const double a = dx.squaredNorm(), b = dy.squaredNorm();
    curv_x.Add(0.833 * a - 0.023 * b, (dx.array() * gx.array()).sum());
    curv_y.Add(0.833 * b - 0.023 * a, (dy.array() * gy.array()).sum());
    smooth_x.Add(gx.squaredNorm(), 5.5 * (a + b));
    smooth_y.Add(gy.squaredNorm(), 5.5 * (a + b));
    ++rep.instances_tested;
  }
  Merge(rep, "curvature_x", curv_x);
  Merge(rep, "curvature_y", curv_y);
  Merge(rep, "smoothness_x", smooth_x);
  Merge(rep, "smoothness_y", smooth_y);
  Finish(rep);
  return rep;
}

}  // namespace detmc

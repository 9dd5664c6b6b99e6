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

#include "detmc/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <thread>

#include <Eigen/QR>
#include <Eigen/SVD>
#include "json.hpp"

#include "detmc/errors.h"
#include "detmc/metrics_alignment.h"

namespace detmc {
namespace {

// Derives an independent 64-bit seed from a base seed and stream indices.
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> parts) {
  std::vector<uint32_t> words{static_cast<uint32_t>(base),
                              static_cast<uint32_t>(base >> 32)};
  for (uint64_t v : parts) {
    words.push_back(static_cast<uint32_t>(v));
    words.push_back(static_cast<uint32_t>(v >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<uint64_t>(out[0]) << 32) | out[1];
}

DenseMatrix GaussianMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

// Runs fn(0..count-1) on up to `threads` workers; fn must write only to
// its own output slot.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, std::max(count, 1));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

// LPS graphs exist only for n = q (q^2 - 1) / 2 and degree p + 1.
std::optional<BiregularGraph> LpsForSize(int n, int degree, std::string& why) {
  for (int q = 3; q * (q * q - 1) / 2 <= n; ++q) {
    if (q * (q * q - 1) / 2 != n) continue;
    try {
      return GenerateLpsBipartite(degree - 1, q);
    } catch (const std::exception& e) {
      why = e.what();
      return std::nullopt;
    }
  }
  why = "no LPS graph has this many vertices per side";
  return std::nullopt;
}

}  // namespace

GroundTruth GenSyntheticLowRank(int n1, int n2, int r, double kappa,
                                uint64_t seed) {
  if (r < 1 || r > std::min(n1, n2)) throw ParameterError("need 1 <= r <= min(n1, n2)");
  if (!(kappa >= 1.0)) throw ParameterError("kappa must be at least 1");
  if (r == 1 && kappa != 1.0) throw ParameterError("rank one requires kappa = 1");
  std::mt19937_64 rng(seed);
  Eigen::HouseholderQR<DenseMatrix> qu(GaussianMatrix(n1, r, rng));
  Eigen::HouseholderQR<DenseMatrix> qv(GaussianMatrix(n2, r, rng));
  DenseMatrix u = qu.householderQ() * DenseMatrix::Identity(n1, r);
  DenseMatrix v = qv.householderQ() * DenseMatrix::Identity(n2, r);
  Vector s(r);
  for (int k = 0; k < r; ++k) {
    s(k) = r == 1 ? 1.0 : std::pow(kappa, double(r - 1 - k) / (r - 1));
  }
  return GroundTruth::FromSvd(std::move(u), std::move(s), std::move(v));
}

GroundTruth GenGaussianProduct(int n1, int n2, int r, uint64_t seed) {
  if (r < 1 || r > std::min(n1, n2)) throw ParameterError("need 1 <= r <= min(n1, n2)");
  std::mt19937_64 rng(seed);
  const DenseMatrix a = GaussianMatrix(n1, r, rng);
  const DenseMatrix b = GaussianMatrix(n2, r, rng);
  // A B^T = Qa (Ra Rb^T) Qb^T; only an r x r SVD is needed.
  Eigen::HouseholderQR<DenseMatrix> qa(a), qb(b);
  const DenseMatrix ra = qa.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  const DenseMatrix rb = qb.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<DenseMatrix> core(ra * rb.transpose(),
                                     Eigen::ComputeFullU | Eigen::ComputeFullV);
  DenseMatrix u = qa.householderQ() * DenseMatrix::Identity(n1, r) * core.matrixU();
  DenseMatrix v = qb.householderQ() * DenseMatrix::Identity(n2, r) * core.matrixV();
  return GroundTruth::FromSvd(std::move(u), core.singularValues(), std::move(v));
}

std::string ToString(Sampler s) {
  switch (s) {
    case Sampler::kLps:
      return "lps";
    case Sampler::kRandomBiregular:
      return "random-biregular";
    case Sampler::kBernoulli:
      return "bernoulli-random";
  }
  return "unknown";
}

std::string ToString(SolverKind s) {
  switch (s) {
    case SolverKind::kPgd:
      return "pgd";
    case SolverKind::kScaledPgd:
      return "scaled-pgd";
    case SolverKind::kIalm:
      return "ialm";
  }
  return "unknown";
}

Sampler ParseSampler(const std::string& s) {
  for (Sampler v : {Sampler::kLps, Sampler::kRandomBiregular, Sampler::kBernoulli}) {
    if (ToString(v) == s) return v;
  }
  throw ParameterError("unknown sampler: " + s);
}

SolverKind ParseSolverKind(const std::string& s) {
  for (SolverKind v : {SolverKind::kPgd, SolverKind::kScaledPgd, SolverKind::kIalm}) {
    if (ToString(v) == s) return v;
  }
  throw ParameterError("unknown solver: " + s);
}

int IterationsTo(const IterationTrace& trace, double threshold) {
  for (const IterationRecord& rec : trace.records) {
    if (rec.rel_error < threshold) return rec.k;
  }
  return -1;
}

TrialRecord RunTrial(SolverKind solver, const ObservedMatrix& obs,
                     const GroundTruth& gt, const SolverSettings& settings,
                     double success_threshold) {
  TrialRecord rec;
  rec.solver = solver;
  try {
    switch (solver) {
      case SolverKind::kPgd: {
        PgdConfig cfg = settings.pgd;
        if (settings.oracle_mu) cfg.mu = gt.mu;
        rec.trace = RunPgd(obs, gt.r, cfg, &gt).trace;
        break;
      }
      case SolverKind::kScaledPgd: {
        ScaledConfig cfg = settings.scaled;
        if (settings.oracle_mu) cfg.mu = gt.mu;
        rec.trace = RunScaledPgd(obs, gt.r, cfg, &gt).trace;
        break;
      }
      case SolverKind::kIalm:
        rec.trace = RunIalm(obs, settings.ialm, &gt).trace;
        break;
    }
  } catch (const DivergenceError& e) {
    rec.trace = e.trace();
    rec.trace.stop = StopReason::kDiverged;
  }
  rec.stop = rec.trace.stop;
  if (!rec.trace.records.empty()) {
    const IterationRecord& last = rec.trace.last();
    rec.iterations = last.k;
    rec.wall_seconds = last.wall_seconds;
    rec.rel_error = last.rel_error;
  } else {
    rec.rel_error = kNotRecorded;
  }
  rec.success = rec.stop != StopReason::kDiverged &&
                rec.rel_error < success_threshold;
  try {
    rec.rate = FitLinearRate(rec.trace);
  } catch (const ParameterError&) {
    rec.rate = kNotRecorded;
  }
  return rec;
}

BiregularGraph CertifiedRandomBiregular(int n1, int n2, int d1, uint64_t seed,
                                        int attempts) {
  for (int a = 0; a < attempts; ++a) {
    BiregularGraph g = GenerateRandomBiregular(
        n1, n2, d1, a == 0 ? seed : DeriveSeed(seed, {uint64_t(a)}));
    if (VerifyAssumptions(g).is_ramanujan) return g;
  }
  throw GenerationError("no Ramanujan random biregular graph found for n1=" +
                        std::to_string(n1) + " d1=" + std::to_string(d1));
}

PhaseTransitionConfig DefaultPhaseTransitionConfig() {
  PhaseTransitionConfig cfg;
  cfg.settings.pgd.eta = 0.2;
  cfg.settings.pgd.max_iter = 5000;
  cfg.settings.scaled.max_iter = 5000;
  return cfg;
}

std::vector<PhasePoint> RunPhaseTransition(const PhaseTransitionConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trials must be at least 1");
  if (!(cfg.success_threshold > 0.0)) throw ParameterError("threshold must be positive");
  for (size_t i = 1; i < cfg.degrees.size(); ++i) {
    if (cfg.degrees[i] <= cfg.degrees[i - 1]) {
      throw ParameterError("degrees must be strictly increasing");
    }
  }
  SolverSettings settings = cfg.settings;
  settings.pgd.tol = cfg.success_threshold;
  settings.scaled.tol = cfg.success_threshold;
  settings.ialm.tol = cfg.success_threshold;

  // One instance per trial index, shared across sweep points and samplers.
  std::vector<GroundTruth> truths(cfg.trials);
  ParallelFor(cfg.trials, cfg.threads, [&](int t) {
    truths[t] = GenGaussianProduct(cfg.n, cfg.n, cfg.r,
                                   DeriveSeed(cfg.seed, {0, uint64_t(t)}));
  });

  std::vector<PhasePoint> points;
  for (int d : cfg.degrees) {
    for (Sampler sampler : cfg.samplers) {
      PhasePoint pt;
      pt.sampler = sampler;
      pt.degree = d;
      pt.p = double(d) / cfg.n;
      if (d < 1 || d > cfg.n) {
        pt.note = "infeasible degree";
        points.push_back(pt);
        continue;
      }
      std::optional<BiregularGraph> graph;
      if (sampler == Sampler::kRandomBiregular) {
        try {
          graph = CertifiedRandomBiregular(cfg.n, cfg.n, d,
                                           DeriveSeed(cfg.seed, {1, uint64_t(d)}));
        } catch (const std::exception& e) {
          pt.note = e.what();
        }
      } else if (sampler == Sampler::kLps) {
        std::string why;
        graph = LpsForSize(cfg.n, d, why);
        if (!graph) pt.note = why;
      }
      if (sampler != Sampler::kBernoulli && !graph) {
        points.push_back(pt);
        continue;
      }
      std::shared_ptr<const SamplingPattern> det_pattern;
      if (graph) {
        det_pattern = std::make_shared<const SamplingPattern>(
            SamplingPattern::FromGraph(*graph));
      }
      std::vector<TrialRecord> recs(cfg.trials);
      ParallelFor(cfg.trials, cfg.threads, [&](int t) {
        const GroundTruth& gt = truths[t];
        ObservedMatrix obs;
        if (det_pattern) {
          obs = ApplyPOmega(gt.M, det_pattern, pt.p);
        } else {
          auto pattern = std::make_shared<const SamplingPattern>(BernoulliPattern(
              cfg.n, cfg.n, pt.p, DeriveSeed(cfg.seed, {2, uint64_t(d), uint64_t(t)})));
          obs = ApplyPOmega(gt.M, pattern, pt.p);
        }
        recs[t] = RunTrial(cfg.solver, obs, gt, settings, cfg.success_threshold);
      });
      std::vector<double> iters;
      for (const TrialRecord& rec : recs) {
        pt.successes += rec.success ? 1 : 0;
        iters.push_back(rec.iterations);
      }
      pt.trials = cfg.trials;
      pt.success_ratio = double(pt.successes) / cfg.trials;
      pt.mean_iters = Mean(iters);
      points.push_back(pt);
    }
  }
  return points;
}

void WritePhaseCsv(const std::vector<PhasePoint>& points, std::ostream& out) {
  out << "sampler,p,degree,trials,success_ratio,mean_iters,note\n";
  out << std::setprecision(10);
  for (const PhasePoint& pt : points) {
    out << ToString(pt.sampler) << ',' << pt.p << ',' << pt.degree << ','
        << pt.trials << ',' << pt.success_ratio << ',' << pt.mean_iters << ','
        << pt.note << '\n';
  }
}

std::vector<ConvergenceSeries> RunConvergence(const ConvergenceConfig& cfg) {
  if (cfg.kappas.empty()) throw ParameterError("kappa list is empty");
  const BiregularGraph g = CertifiedRandomBiregular(cfg.n, cfg.n, cfg.degree, cfg.seed);
  const auto pattern =
      std::make_shared<const SamplingPattern>(SamplingPattern::FromGraph(g));
  SolverSettings settings = cfg.settings;
  settings.pgd.tol = settings.scaled.tol = settings.ialm.tol = cfg.tol;
  settings.pgd.max_iter = settings.scaled.max_iter = settings.ialm.max_iter =
      cfg.max_iter;

  struct Job {
    int r;
    double kappa;
    SolverKind solver;
  };
  std::vector<Job> jobs;
  for (int r : cfg.ranks) {
    for (double kappa : cfg.kappas) {
      for (SolverKind s : cfg.solvers) jobs.push_back({r, kappa, s});
    }
  }
  std::vector<ConvergenceSeries> out(jobs.size());
  ParallelFor(static_cast<int>(jobs.size()), cfg.threads, [&](int i) {
    const Job& job = jobs[i];
    // Same instance for every solver at a given (r, kappa).
    const GroundTruth gt = GenSyntheticLowRank(
        cfg.n, cfg.n, job.r, job.kappa,
        DeriveSeed(cfg.seed, {uint64_t(job.r), uint64_t(job.kappa * 1000)}));
    const ObservedMatrix obs = ApplyPOmega(gt.M, pattern, g.sampling_rate());
    const TrialRecord rec = RunTrial(job.solver, obs, gt, settings, cfg.tol);
    ConvergenceSeries& s = out[i];
    s.solver = job.solver;
    s.kappa = job.kappa;
    s.r = job.r;
    s.rel_errors = rec.trace.RelErrors();
    s.rate = rec.rate;
    s.diverged = rec.stop == StopReason::kDiverged;
  });
  return out;
}

void WriteConvergenceCsv(const std::vector<ConvergenceSeries>& series,
                         std::ostream& out) {
  out << "solver,kappa,r,iter,rel_error\n";
  out << std::setprecision(10);
  for (const ConvergenceSeries& s : series) {
    for (size_t k = 0; k < s.rel_errors.size(); ++k) {
      out << ToString(s.solver) << ',' << s.kappa << ',' << s.r << ',' << k
          << ',' << s.rel_errors[k] << '\n';
    }
  }
}

void WriteRatesCsv(const std::vector<ConvergenceSeries>& series,
                   std::ostream& out) {
  out << "solver,kappa,r,iterations,rate,diverged\n";
  out << std::setprecision(10);
  for (const ConvergenceSeries& s : series) {
    out << ToString(s.solver) << ',' << s.kappa << ',' << s.r << ','
        << (s.rel_errors.empty() ? 0 : s.rel_errors.size() - 1) << ','
        << s.rate << ',' << (s.diverged ? 1 : 0) << '\n';
  }
}

SolverSettings CompareSolverSettings() {
  SolverSettings s;
  s.scaled.eta = kCompareScaledEta;
  s.scaled.allow_large_eta = true;
  return s;
}

std::vector<CompareRow> RunSolverComparison(const CompareConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trials must be at least 1");
  const BiregularGraph g = CertifiedRandomBiregular(cfg.n, cfg.n, cfg.degree, cfg.seed);
  const auto pattern =
      std::make_shared<const SamplingPattern>(SamplingPattern::FromGraph(g));
  SolverSettings settings = cfg.settings;
  settings.pgd.tol = settings.scaled.tol = settings.ialm.tol = cfg.tol;

  std::vector<CompareRow> rows;
  for (int r : cfg.ranks) {
    std::vector<std::vector<TrialRecord>> recs(cfg.solvers.size());
    for (int t = 0; t < cfg.trials; ++t) {
      const GroundTruth gt = GenSyntheticLowRank(
          cfg.n, cfg.n, r, cfg.kappa, DeriveSeed(cfg.seed, {uint64_t(r), uint64_t(t)}));
      const ObservedMatrix obs = ApplyPOmega(gt.M, pattern, g.sampling_rate());
      for (size_t s = 0; s < cfg.solvers.size(); ++s) {
        recs[s].push_back(RunTrial(cfg.solvers[s], obs, gt, settings, cfg.tol));
      }
    }
    for (size_t s = 0; s < cfg.solvers.size(); ++s) {
      CompareRow row;
      row.solver = cfg.solvers[s];
      row.r = r;
      row.degree = cfg.degree;
      row.kappa = cfg.kappa;
      row.trials = cfg.trials;
      std::vector<double> iters, walls, errs;
      for (const TrialRecord& rec : recs[s]) {
        row.successes += rec.success ? 1 : 0;
        iters.push_back(rec.iterations);
        walls.push_back(rec.wall_seconds);
        errs.push_back(rec.rel_error);
      }
      row.mean_iters = Mean(iters);
      row.sd_iters = StdDev(iters);
      row.mean_wall = Mean(walls);
      row.sd_wall = StdDev(walls);
      row.mean_rel_error = Mean(errs);
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteCompareCsv(const std::vector<CompareRow>& rows, std::ostream& out) {
  out << "solver,r,degree,kappa,trials,successes,mean_iters,sd_iters,"
         "mean_wall_s,sd_wall_s,mean_rel_error\n";
  out << std::setprecision(10);
  for (const CompareRow& row : rows) {
    out << ToString(row.solver) << ',' << row.r << ',' << row.degree << ','
        << row.kappa << ',' << row.trials << ',' << row.successes << ','
        << row.mean_iters << ',' << row.sd_iters << ',' << row.mean_wall << ','
        << row.sd_wall << ',' << row.mean_rel_error << '\n';
  }
}

std::string CompareJson(const std::vector<CompareRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const CompareRow& row : rows) {
    j.push_back({{"solver", ToString(row.solver)},
                 {"r", row.r},
                 {"degree", row.degree},
                 {"kappa", row.kappa},
                 {"trials", row.trials},
                 {"successes", row.successes},
                 {"mean_iters", row.mean_iters},
                 {"sd_iters", row.sd_iters},
                 {"mean_wall_s", row.mean_wall},
                 {"sd_wall_s", row.sd_wall},
                 {"mean_rel_error", row.mean_rel_error}});
  }
  return j.dump(2);
}

}  // namespace detmc

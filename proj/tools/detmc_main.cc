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

// detmc: command line front end for graph generation, completion,
// benchmarks and theory checks.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "detmc/baseline_ialm.h"
#include "detmc/errors.h"
#include "detmc/experiments.h"
#include "detmc/expander_graphs.h"
#include "detmc/metrics_alignment.h"
#include "detmc/sampling_model.h"
#include "detmc/solver_pgd.h"
#include "detmc/solver_scaled_pgd.h"
#include "detmc/theory_checks.h"

namespace {

using namespace detmc;

struct GlobalOptions {
  uint64_t seed = 1;
  std::string out;
  int threads = 1;
  std::optional<double> tol;
  std::optional<double> eta;
  std::optional<double> lambda;
  std::optional<std::string> solver;  // per-command default when unset
};

// Writes to --out if given, else to stdout.
void Emit(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  fn(out);
}

std::string SiblingPath(const std::string& path, const std::string& suffix) {
  if (path.empty() || path == "-") return "";
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix;
}

void ApplySolverFlags(const GlobalOptions& g, SolverSettings& s) {
  if (g.eta) {
    s.pgd.eta = *g.eta;
    s.scaled.eta = *g.eta;
    s.scaled.allow_large_eta = *g.eta > kMaxScaledEta;
  }
  if (g.lambda) s.pgd.lambda = *g.lambda;
}

std::vector<SolverKind> ParseSolvers(const std::vector<std::string>& names) {
  std::vector<SolverKind> out;
  for (const auto& n : names) out.push_back(ParseSolverKind(n));
  return out;
}

nlohmann::json CertificateJson(const SpectralCertificate& c) {
  return {{"sigma1", c.sigma1},
          {"sigma2", c.sigma2},
          {"ramanujan_bound", c.ramanujan_bound},
          {"c0", c.c0},
          {"g1_residual", c.g1_residual},
          {"is_ramanujan", c.is_ramanujan}};
}

DenseMatrix LoadDense(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return ReadDenseMatrixMarket(in);
}

// ---------------------------------------------------------------- graph

void AddGraphCommands(CLI::App& app, GlobalOptions& g) {
  auto* graph = app.add_subcommand("graph", "Generate, certify or export sampling graphs");
  graph->require_subcommand(1);

  struct GenOpts {
    std::string kind = "random";
    int n1 = 512, n2 = 512, d1 = 60, p = 5, q = 13;
  };
  auto gen_opts = std::make_shared<GenOpts>();
  auto* gen = graph->add_subcommand("gen", "Write a biregular graph edge list");
  gen->add_option("--kind", gen_opts->kind, "random or lps")
      ->check(CLI::IsMember({"random", "lps"}));
  gen->add_option("--n1", gen_opts->n1, "Left vertices (rows)");
  gen->add_option("--n2", gen_opts->n2, "Right vertices (columns)");
  gen->add_option("--d1", gen_opts->d1, "Left degree");
  gen->add_option("--p", gen_opts->p, "LPS generator prime");
  gen->add_option("--q", gen_opts->q, "LPS field prime");
  gen->callback([gen_opts, &g] {
    const BiregularGraph graph =
        gen_opts->kind == "lps"
            ? GenerateLpsBipartite(gen_opts->p, gen_opts->q)
            : GenerateRandomBiregular(gen_opts->n1, gen_opts->n2, gen_opts->d1, g.seed);
    Emit(g.out, [&](std::ostream& os) { WriteEdges(graph, os); });
  });

  auto graph_path = std::make_shared<std::string>();
  auto* verify = graph->add_subcommand("verify", "Spectral certificate as JSON");
  verify->add_option("graph", *graph_path, "Edge list file")->required();
  verify->callback([graph_path, &g] {
    const BiregularGraph graph = LoadEdges(*graph_path);
    nlohmann::json j = CertificateJson(VerifyAssumptions(graph));
    j["n1"] = graph.n1();
    j["n2"] = graph.n2();
    j["d1"] = graph.d1();
    j["d2"] = graph.d2();
    Emit(g.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  });

  auto export_path = std::make_shared<std::string>();
  auto* exp = graph->add_subcommand("export", "Edge list as MatrixMarket pattern");
  exp->add_option("graph", *export_path, "Edge list file")->required();
  exp->callback([export_path, &g] {
    const BiregularGraph graph = LoadEdges(*export_path);
    Emit(g.out, [&](std::ostream& os) { WriteMatrixMarketPattern(graph, os); });
  });
}

// ---------------------------------------------------------------- synth

void AddSynthCommand(CLI::App& app, GlobalOptions& g) {
  struct Opts {
    int n1 = 512, n2 = 512, r = 3;
    double kappa = 1.0;
    std::string graph, observed;
  };
  auto o = std::make_shared<Opts>();
  auto* synth = app.add_subcommand(
      "synth", "Synthetic rank-r matrix (dense MatrixMarket), optionally sampled");
  synth->add_option("--n1", o->n1);
  synth->add_option("--n2", o->n2);
  synth->add_option("-r,--rank", o->r);
  synth->add_option("--kappa", o->kappa, "Condition number");
  synth->add_option("--graph", o->graph, "Also sample on this graph");
  synth->add_option("--observed", o->observed, "Where to write the samples")
      ->needs("--graph");
  synth->callback([o, &g] {
    const GroundTruth gt = GenSyntheticLowRank(o->n1, o->n2, o->r, o->kappa, g.seed);
    Emit(g.out, [&](std::ostream& os) { WriteDenseMatrixMarket(gt.M, os); });
    if (!o->graph.empty()) {
      const ObservedMatrix obs = ApplyPOmega(gt.M, LoadEdges(o->graph));
      Emit(o->observed, [&](std::ostream& os) { WriteObservedMatrixMarket(obs, os); });
    }
    std::cerr << "mu=" << gt.mu << " kappa=" << gt.kappa << '\n';
  });
}

// ---------------------------------------------------------------- complete

void AddCompleteCommand(CLI::App& app, GlobalOptions& g) {
  struct Opts {
    std::string graph, observed, truth;
    int r = 3;
    double mu = 2.0;
    int max_iter = 2000;
  };
  auto o = std::make_shared<Opts>();
  auto* complete = app.add_subcommand(
      "complete", "Complete an observed MatrixMarket file sampled on a graph");
  complete->add_option("--graph", o->graph, "Edge list file")->required();
  complete->add_option("--observed", o->observed, "Observed entries (coordinate)")
      ->required();
  complete->add_option("-r,--rank", o->r, "Target rank");
  complete->add_option("--mu", o->mu, "Incoherence estimate for the projections");
  complete->add_option("--max-iter", o->max_iter);
  complete->add_option("--truth", o->truth, "Dense ground truth for error reporting");
  complete->callback([o, &g] {
    const BiregularGraph graph = LoadEdges(o->graph);
    std::ifstream in(o->observed);
    if (!in) throw InputError("cannot open " + o->observed);
    const ObservedMatrix obs = ReadObservedMatrixMarket(in, graph);
    std::optional<GroundTruth> gt;
    if (!o->truth.empty()) gt = GroundTruth::FromMatrix(LoadDense(o->truth), o->r);
    const GroundTruth* gtp = gt ? &*gt : nullptr;

    SolverSettings s;
    ApplySolverFlags(g, s);
    DenseMatrix m_hat;
    IterationTrace trace;
    switch (ParseSolverKind(g.solver.value_or("scaled-pgd"))) {
      case SolverKind::kPgd: {
        PgdConfig cfg = s.pgd;
        cfg.mu = o->mu;
        cfg.max_iter = o->max_iter;
        if (g.tol) cfg.tol = *g.tol;
        SolverResult res = RunPgd(obs, o->r, cfg, gtp);
        m_hat = res.z.X * res.z.Y.transpose();
        trace = std::move(res.trace);
        break;
      }
      case SolverKind::kScaledPgd: {
        ScaledConfig cfg = s.scaled;
        cfg.mu = o->mu;
        cfg.max_iter = o->max_iter;
        if (g.tol) cfg.tol = *g.tol;
        SolverResult res = RunScaledPgd(obs, o->r, cfg, gtp);
        m_hat = res.z.X * res.z.Y.transpose();
        trace = std::move(res.trace);
        break;
      }
      case SolverKind::kIalm: {
        IalmConfig cfg = s.ialm;
        cfg.max_iter = o->max_iter;
        if (g.tol) cfg.tol = *g.tol;
        IalmResult res = RunIalm(obs, cfg, gtp);
        m_hat = std::move(res.M);
        trace = std::move(res.trace);
        break;
      }
    }
    Emit(g.out, [&](std::ostream& os) { WriteDenseMatrixMarket(m_hat, os); });
    std::cerr << "iterations=" << trace.iterations() << " stop=" << ToString(trace.stop)
              << " seconds=" << trace.last().wall_seconds;
    if (gtp) std::cerr << " rel_error=" << RelativeError(m_hat, *gtp);
    std::cerr << '\n';
  });
}

// ---------------------------------------------------------------- bench

void AddBenchCommands(CLI::App& app, GlobalOptions& g) {
  auto* bench = app.add_subcommand("bench", "Experiment sweeps (CSV output)");
  bench->require_subcommand(1);

  auto phase = std::make_shared<PhaseTransitionConfig>(DefaultPhaseTransitionConfig());
  auto samplers = std::make_shared<std::vector<std::string>>(
      std::vector<std::string>{"random-biregular", "bernoulli-random"});
  auto* ph = bench->add_subcommand("phase", "Success ratio against sampling rate");
  ph->add_option("--n", phase->n, "Matrix side");
  ph->add_option("-r,--rank", phase->r);
  ph->add_option("--degrees", phase->degrees, "Increasing degree grid")->delimiter(',');
  ph->add_option("--samplers", *samplers, "lps, random-biregular, bernoulli-random")
      ->delimiter(',');
  ph->add_option("--trials", phase->trials);
  ph->add_option("--max-iter", phase->settings.pgd.max_iter);
  ph->callback([phase, samplers, &g] {
    PhaseTransitionConfig cfg = *phase;
    cfg.samplers.clear();
    for (const auto& s : *samplers) cfg.samplers.push_back(ParseSampler(s));
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    if (g.solver) cfg.solver = ParseSolverKind(*g.solver);
    cfg.settings.scaled.max_iter = cfg.settings.ialm.max_iter = cfg.settings.pgd.max_iter;
    if (g.tol) cfg.success_threshold = *g.tol;
    ApplySolverFlags(g, cfg.settings);
    const auto points = RunPhaseTransition(cfg);
    Emit(g.out, [&](std::ostream& os) { WritePhaseCsv(points, os); });
  });

  auto conv = std::make_shared<ConvergenceConfig>();
  auto conv_solvers = std::make_shared<std::vector<std::string>>(
      std::vector<std::string>{"pgd", "scaled-pgd"});
  auto* cv = bench->add_subcommand("convergence", "Error traces across condition numbers");
  cv->add_option("--n", conv->n);
  cv->add_option("--degree", conv->degree);
  cv->add_option("--ranks", conv->ranks)->delimiter(',');
  cv->add_option("--kappas", conv->kappas)->delimiter(',');
  cv->add_option("--solvers", *conv_solvers)->delimiter(',');
  cv->add_option("--max-iter", conv->max_iter);
  cv->callback([conv, conv_solvers, &g] {
    ConvergenceConfig cfg = *conv;
    cfg.solvers = ParseSolvers(*conv_solvers);
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    if (g.tol) cfg.tol = *g.tol;
    ApplySolverFlags(g, cfg.settings);
    const auto series = RunConvergence(cfg);
    Emit(g.out, [&](std::ostream& os) { WriteConvergenceCsv(series, os); });
    const std::string rates = SiblingPath(g.out, "_rates.csv");
    Emit(rates, [&](std::ostream& os) { WriteRatesCsv(series, os); });
  });

  auto cmp = std::make_shared<CompareConfig>();
  auto cmp_solvers = std::make_shared<std::vector<std::string>>(
      std::vector<std::string>{"scaled-pgd", "pgd", "ialm"});
  auto* cp = bench->add_subcommand("compare", "Iterations and wall time per solver");
  cp->add_option("--n", cmp->n);
  cp->add_option("--degree", cmp->degree);
  cp->add_option("--ranks", cmp->ranks)->delimiter(',');
  cp->add_option("--kappa", cmp->kappa);
  cp->add_option("--trials", cmp->trials);
  cp->add_option("--solvers", *cmp_solvers)->delimiter(',');
  cp->callback([cmp, cmp_solvers, &g] {
    CompareConfig cfg = *cmp;
    cfg.solvers = ParseSolvers(*cmp_solvers);
    cfg.seed = g.seed;
    if (g.tol) cfg.tol = *g.tol;
    ApplySolverFlags(g, cfg.settings);
    const auto rows = RunSolverComparison(cfg);
    Emit(g.out, [&](std::ostream& os) { WriteCompareCsv(rows, os); });
    const std::string json = SiblingPath(g.out, ".json");
    Emit(json, [&](std::ostream& os) { os << CompareJson(rows) << '\n'; });
  });
}

// ---------------------------------------------------------------- theory

void AddTheoryCommands(CLI::App& app, GlobalOptions& g) {
  struct Opts {
    std::string graph;
    std::vector<int> lps;
    std::string truth = "synthetic";
    int r = 3;
    double kappa = 1.0;
    int trials = 200;
    std::vector<std::string> checks = {"rip", "bilinear", "deviation", "hadamard",
                                       "row", "pgd", "scaled"};
  };
  auto o = std::make_shared<Opts>();
  auto* theory = app.add_subcommand("theory", "Numerical checks of the analysis");
  theory->require_subcommand(1);
  auto* run = theory->add_subcommand("run", "Run inequality checks; JSON reports");
  run->add_option("--graph", o->graph, "Edge list file (default: LPS 5,13)");
  run->add_option("--lps", o->lps, "LPS primes p,q")->delimiter(',')->expected(2);
  run->add_option("--truth", o->truth, "synthetic, gaussian-product or flat")
      ->check(CLI::IsMember({"synthetic", "gaussian-product", "flat"}));
  run->add_option("-r,--rank", o->r);
  run->add_option("--kappa", o->kappa);
  run->add_option("--trials", o->trials);
  run->add_option("--checks", o->checks, "Subset of rip,bilinear,deviation,hadamard,row,pgd,scaled")
      ->delimiter(',');
  run->callback([o, &g] {
    const BiregularGraph graph =
        !o->graph.empty() ? LoadEdges(o->graph)
        : !o->lps.empty() ? GenerateLpsBipartite(o->lps[0], o->lps[1])
                          : GenerateLpsBipartite(5, 13);
    GroundTruth gt;
    if (o->truth == "flat") {
      const DenseMatrix u = DenseMatrix::Constant(graph.n1(), 1, 1.0 / std::sqrt(graph.n1()));
      const DenseMatrix v = DenseMatrix::Constant(graph.n2(), 1, 1.0 / std::sqrt(graph.n2()));
      gt = GroundTruth::FromSvd(u, Vector::Ones(1), v);
    } else if (o->truth == "gaussian-product") {
      gt = GenGaussianProduct(graph.n1(), graph.n2(), o->r, g.seed);
    } else {
      gt = GenSyntheticLowRank(graph.n1(), graph.n2(), o->r, o->kappa, g.seed);
    }
    nlohmann::json all = nlohmann::json::array();
    for (const std::string& c : o->checks) {
      TheoryCheckReport rep;
      if (c == "rip") {
        rep = CheckRipOnT(gt, graph, o->trials, g.seed);
      } else if (c == "bilinear") {
        rep = CheckBilinearBound(graph, o->trials, g.seed);
      } else if (c == "deviation") {
        rep = CheckGraphDeviation(graph, &gt);
      } else if (c == "hadamard") {
        rep = CheckHadamardQuartic(gt, graph, o->trials, g.seed);
      } else if (c == "row") {
        rep = CheckRowBound(graph, o->trials, g.seed, gt.r);
      } else if (c == "pgd") {
        rep = CheckCurvatureSmoothnessPgd(gt, graph, o->trials, g.seed);
      } else if (c == "scaled") {
        rep = CheckCurvatureSmoothnessScaled(gt, graph, o->trials, g.seed);
      } else {
        throw ParameterError("unknown check: " + c);
      }
      all.push_back(nlohmann::json::parse(ToJson(rep)));
      std::cerr << rep.check_name << ": " << (rep.passed() ? "pass" : "FAIL")
                << (rep.in_regime ? "" : " (out of regime)")
                << " worst_margin=" << rep.worst_margin << '\n';
    }
    Emit(g.out, [&](std::ostream& os) { os << all.dump(2) << '\n'; });
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic low-rank matrix completion on expander sampling graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Flat key=value file mirroring the flags");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--threads", g.threads, "Worker threads for trial sweeps")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", g.tol, "Relative-error tolerance");
  app.add_option("--eta", g.eta, "Step size");
  app.add_option("--lambda", g.lambda, "PGD balancing weight");
  app.add_option("--solver", g.solver, "pgd, scaled-pgd or ialm")
      ->check(CLI::IsMember({"pgd", "scaled-pgd", "ialm"}));

  AddGraphCommands(app, g);
  AddSynthCommand(app, g);
  AddCompleteCommand(app, g);
  AddBenchCommands(app, g);
  AddTheoryCommands(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << " after " << e.trace().iterations()
              << " iterations; an underestimated --mu or too large --eta are "
                 "the usual causes\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

// Copyright 2026 The cmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cmdp command line: synthetic data, priors, mechanism builds, audits, the
// epsilon sweep and the descriptive statistics.
//
// Exit status: 0 ok, 1 audit failure, 2 I/O or configuration error,
// 3 solver did not reach an optimal basis.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cmdp/audit.h"
#include "cmdp/blanket.h"
#include "cmdp/csv.h"
#include "cmdp/geo.h"
#include "cmdp/lp.h"
#include "cmdp/mechanisms.h"
#include "cmdp/priors.h"
#include "cmdp/roadnet.h"
#include "cmdp/stats.h"
#include "cmdp/sweep.h"
#include "cmdp/synth.h"
#include "cmdp/utility.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAudit = 1;
constexpr int kExitIo = 2;
constexpr int kExitSolver = 3;

// Non-optimal solve; mapped to kExitSolver.
class SolverFailure : public cmdp::Error {
 public:
  using cmdp::Error::Error;
};

struct Inputs {
  std::string nodes = "nodes.csv";
  std::string edges = "edges.csv";
  std::string trajectories = "trajectories.csv";
};

void AddInputs(CLI::App* app, Inputs& in) {
  app->add_option("--nodes", in.nodes, "node file (id,lat,lon)");
  app->add_option("--edges", in.edges, "edge file (from,to,length_km)");
  app->add_option("--trajectories", in.trajectories,
                  "trajectory file (vehicle_id,trajectory_id,timestamp,lat,lon)");
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw cmdp::IoError("cannot create output directory " + dir);
  }
}

std::string Join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

cmdp::LagSet ParseLags(const std::string& text) {
  cmdp::LagSet lags;
  for (const std::string& f : cmdp::SplitFields(text, ',')) {
    if (f.empty()) continue;
    lags.push_back(static_cast<int>(cmdp::ParseInt(f)));
  }
  if (lags.empty() || !std::is_sorted(lags.begin(), lags.end()) ||
      std::adjacent_find(lags.begin(), lags.end()) != lags.end() ||
      lags.front() < 1) {
    throw cmdp::InvalidArgument("lags must be increasing and >= 1: " + text);
  }
  return lags;
}

cmdp::ContextWeights Weights(const std::vector<double>& given, int gamma) {
  if (given.empty()) return cmdp::ContextWeights::Decay(gamma);
  if (static_cast<int>(given.size()) < gamma) {
    throw cmdp::InvalidArgument("need " + std::to_string(gamma) + " weights");
  }
  return cmdp::ContextWeights(given);
}

// Priors file written by `priors`: kind,key,prob.
cmdp::KeyDistribution LoadKeyPrior(const std::string& path,
                                   const std::string& kind) {
  const auto table = cmdp::CsvTable::Read(path, {"kind", "key", "prob"});
  cmdp::KeyDistribution prior;
  for (const auto& row : table.rows()) {
    if (row.fields[0] != kind) continue;
    prior[cmdp::ParseKey(row.fields[1])] = cmdp::ParseDouble(row.fields[2]);
  }
  return prior;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  cmdp::SynthOptions opt;
  std::string out = ".";
};

int RunSynth(const SynthArgs& a) {
  EnsureDir(a.out);
  const cmdp::SynthData data = cmdp::Synthesize(a.opt);
  cmdp::WriteTextFile(Join(a.out, "nodes.csv"),
                      cmdp::FormatLocations(data.nodes));
  cmdp::WriteTextFile(Join(a.out, "edges.csv"), cmdp::FormatEdges(data.edges));
  cmdp::WriteTextFile(Join(a.out, "trajectories.csv"),
                      cmdp::FormatTrajectories(data.log));
  std::cout << "wrote " << data.nodes.size() << " nodes, "
            << data.log.trajectories.size() << " trajectories to " << a.out
            << "\n";
  return kExitOk;
}

// --- priors --------------------------------------------------------------

struct PriorArgs {
  Inputs in;
  int gamma = 2;
  bool no_smoothing = false;
  std::string task_prior = "uniform";
  std::string out = "priors.csv";
};

cmdp::PriorModel LoadModel(const Inputs& in, const cmdp::RoadGraph& graph,
                           int gamma, bool smoothing,
                           const std::string& task_prior) {
  cmdp::PriorOptions opt;
  opt.smoothing = smoothing;
  opt.task_mode = cmdp::ParseTaskPriorMode(task_prior);
  return cmdp::EstimatePriors(cmdp::LoadTrajectories(in.trajectories), graph,
                              gamma, opt);
}

int RunPriors(const PriorArgs& a) {
  const auto graph = cmdp::LoadGraph(a.in.nodes, a.in.edges);
  const auto model =
      LoadModel(a.in, graph, a.gamma, !a.no_smoothing, a.task_prior);
  cmdp::WriteTextFile(a.out, cmdp::FormatPriors(model));
  return kExitOk;
}

// --- mech ----------------------------------------------------------------

struct MechArgs {
  Inputs in;
  std::string builder = "mdp";
  int gamma = 2;
  double epsilon = 0.3;
  double eta = 5.0;
  std::vector<double> weights;
  std::string lags = "1";
  std::string qstar;
  std::string task_prior = "uniform";
  std::size_t task_count = 0;
  std::uint64_t seed = 1;
  std::string out = "matrix.csv";
  std::string lp_out;
  std::string cost_out;
};

int RunMech(const MechArgs& a) {
  const auto graph = cmdp::LoadGraph(a.in.nodes, a.in.edges);
  const int gamma = a.builder == "mdp" || a.builder == "expmech"
                        ? std::max(a.gamma, 0)
                        : a.gamma;
  cmdp::PriorModel model =
      LoadModel(a.in, graph, gamma, true, a.task_prior);
  if (a.task_count > 0) {
    model.set_task_prior(
        cmdp::SampleTasks(model.p_task(), a.task_count, a.seed));
  }
  std::vector<cmdp::Location> secrets;
  for (const auto& l : graph.nodes()) {
    if (model.p_x().count(l.id) > 0) secrets.push_back(l);
  }
  const cmdp::LocationDomain domain(secrets, graph.nodes());

  std::vector<cmdp::SecretKey> plain;
  cmdp::KeyDistribution plain_prior;
  for (const auto& [x, p] : model.p_x()) {
    plain.emplace_back(x);
    plain_prior[cmdp::SecretKey(x)] = p;
  }

  if (a.builder == "expmech") {
    const auto q = cmdp::ExpMechanism(plain, domain, a.epsilon);
    cmdp::WriteTextFile(a.out, cmdp::FormatMatrix(q));
    return kExitOk;
  }

  std::optional<cmdp::MechanismLp> lp;
  std::optional<cmdp::CostTensor> cost;
  if (a.builder == "mdp") {
    cost = cmdp::CostContextFree(graph, model, domain);
    lp = cmdp::BuildMdpLp(*cost, plain_prior, cmdp::BaseKeyMetric(domain),
                          a.epsilon, a.eta);
  } else if (a.builder == "cmdp") {
    std::vector<cmdp::SecretKey> keys;
    for (const auto& [k, p] : model.p_joint()) keys.push_back(k);
    cost = cmdp::CostFullContext(graph, model, domain, keys);
    lp = cmdp::BuildCmdpFullLp(*cost, model.p_joint(), domain,
                               Weights(a.weights, gamma), a.epsilon, a.eta);
  } else if (a.builder == "reduced") {
    const auto lags = ParseLags(a.lags);
    const auto prior = model.BlanketPrior(lags);
    std::vector<cmdp::SecretKey> keys;
    for (const auto& [k, p] : prior) keys.push_back(k);
    cost = cmdp::CostContextBlanket(graph, model, domain, keys, lags);
    lp = cmdp::BuildCmdpReducedLp(
        *cost, prior,
        cmdp::LagKeyMetric(domain, Weights(a.weights, gamma), lags),
        a.epsilon, a.eta);
  } else if (a.builder == "refined") {
    if (a.qstar.empty()) {
      throw cmdp::InvalidArgument("refined builder needs --qstar");
    }
    const auto lags = ParseLags(a.lags);
    const auto w = Weights(a.weights, gamma);
    std::vector<cmdp::SecretKey> keys;
    for (const auto& [k, p] : model.p_joint()) keys.push_back(k);
    cost = cmdp::CostFullContext(graph, model, domain, keys);
    lp = cmdp::BuildRefinedLp(*cost, model.p_joint(),
                              cmdp::ContextKeyMetric(domain, w), a.epsilon,
                              a.eta, cmdp::LoadMatrix(a.qstar), lags,
                              cmdp::LagKeyMetric(domain, w, lags));
  } else {
    throw cmdp::InvalidArgument("unknown builder '" + a.builder + "'");
  }

  if (!a.cost_out.empty()) {
    cmdp::WriteTextFile(a.cost_out, cmdp::FormatCostTensor(*cost));
    cmdp::WriteTextFile(a.cost_out + ".index", cmdp::FormatCostIndex(*cost));
  }
  if (!a.lp_out.empty()) cmdp::WriteTextFile(a.lp_out, cmdp::FormatLp(*lp));
  const cmdp::LpSolution sol = cmdp::Solve(*lp);
  if (sol.status != cmdp::SolveStatus::kOptimal) {
    throw SolverFailure("solver finished with status " +
                        cmdp::StatusName(sol.status));
  }
  cmdp::WriteTextFile(a.out, cmdp::FormatMatrix(sol.q));
  std::cout << "objective " << cmdp::FormatDouble(sol.objective) << " ("
            << sol.iterations << " iterations)\n";
  return kExitOk;
}

// --- audit ---------------------------------------------------------------

struct AuditArgs {
  std::string matrix;
  std::string nodes = "nodes.csv";
  std::string priors;
  std::optional<double> epsilon;
  std::optional<double> eta;
  std::vector<double> weights;
  double tolerance = cmdp::kDefaultAuditTolerance;
  std::string out = "audit.csv";
};

// Rebuilds the metric named in the matrix header.
cmdp::KeyMetric MetricFor(const std::string& id,
                          const cmdp::PerturbationMatrix& q,
                          const cmdp::LocationDomain& domain,
                          const std::vector<double>& weights) {
  int gamma = 0;
  for (const auto& k : q.keys()) {
    gamma = std::max(gamma, static_cast<int>(k.context.size()));
  }
  if (id == "base") return cmdp::BaseKeyMetric(domain);
  if (id == "context") {
    return cmdp::ContextKeyMetric(domain, Weights(weights, gamma));
  }
  if (id == "prefix") {
    return cmdp::PrefixKeyMetric(domain, Weights(weights, gamma));
  }
  if (id.rfind("lags:", 0) == 0) {
    std::string list = id.substr(5);
    std::replace(list.begin(), list.end(), ':', ',');
    const auto lags = ParseLags(list);
    return cmdp::LagKeyMetric(domain, Weights(weights, lags.back()), lags);
  }
  throw cmdp::InvalidArgument("matrix names unknown metric '" + id + "'");
}

int RunAudit(const AuditArgs& a) {
  const auto q = cmdp::LoadMatrix(a.matrix);
  const auto locations = cmdp::LoadLocations(a.nodes);
  const cmdp::LocationDomain domain(locations);
  const double eps = a.epsilon ? *a.epsilon : q.metadata().epsilon;
  const double eta = a.eta ? *a.eta : q.metadata().eta;
  if (std::isnan(eps) || std::isnan(eta)) {
    throw cmdp::InvalidArgument(
        "epsilon/eta missing from the matrix header; pass --epsilon/--eta");
  }
  cmdp::KeyDistribution prior;
  if (!a.priors.empty()) {
    const bool plain = std::all_of(q.keys().begin(), q.keys().end(),
                                   [](const auto& k) { return k.context.empty(); });
    const auto loaded = LoadKeyPrior(a.priors, plain ? "p_x" : "p_joint");
    for (const auto& k : q.keys()) {
      auto it = loaded.find(k);
      prior[k] = it == loaded.end() ? 0.0 : it->second;
    }
  } else {
    for (const auto& k : q.keys()) {
      prior[k] = 1.0 / static_cast<double>(q.num_keys());
    }
  }
  const auto report = cmdp::Audit(
      q, MetricFor(q.metadata().metric, q, domain, a.weights), prior, eps, eta,
      a.tolerance);
  cmdp::WriteTextFile(a.out, cmdp::FormatAuditReport(report));
  if (report.pass) {
    std::cout << "audit passed: max PL " << cmdp::FormatDouble(report.max_pl)
              << "\n";
    return kExitOk;
  }
  if (!report.violations.empty()) {
    const auto& v = *std::max_element(
        report.violations.begin(), report.violations.end(),
        [](const auto& x, const auto& y) { return x.amount < y.amount; });
    std::cerr << "audit failed: " << report.violations.size()
              << " violated rows; worst pair "
              << cmdp::FormatKey(q.keys()[v.first]) << " / "
              << cmdp::FormatKey(q.keys()[v.second]) << " at output "
              << v.output << " exceeds by " << cmdp::FormatDouble(v.amount)
              << "\n";
  } else {
    std::cerr << "audit failed: posterior leakage bound, margin "
              << cmdp::FormatDouble(report.pl_margin) << "\n";
  }
  return kExitAudit;
}

// --- sweep ---------------------------------------------------------------

struct SweepArgs {
  Inputs in;
  cmdp::SweepConfig cfg;
  std::string task_prior = "uniform";
  std::string grid = "auto";
  bool overlap = false;
  std::string out = "sweep";
};

int RunSweepCmd(SweepArgs a) {
  if (const char* env = std::getenv("CMDP_WORKERS");
      env != nullptr && a.cfg.workers == 0) {
    a.cfg.workers = static_cast<int>(cmdp::ParseInt(env));
  }
  if (a.cfg.workers == 0) a.cfg.workers = 1;
  a.cfg.task_mode = cmdp::ParseTaskPriorMode(a.task_prior);
  a.cfg.disjoint_split = !a.overlap;
  if (a.grid == "rome") {
    a.cfg.grid = cmdp::RegionGrid::Rome();
  } else if (a.grid == "porto") {
    a.cfg.grid = cmdp::RegionGrid::Porto();
  } else if (a.grid != "auto") {
    throw cmdp::InvalidArgument("grid must be auto, rome or porto");
  }
  a.cfg.Validate();
  EnsureDir(a.out);
  const auto graph = cmdp::LoadGraph(a.in.nodes, a.in.edges);
  const auto log = cmdp::LoadTrajectories(a.in.trajectories);
  const cmdp::SweepResult result = cmdp::RunSweep(graph, log, a.cfg);
  for (const auto& [name, text] : result.files) {
    cmdp::WriteTextFile(Join(a.out, name), text);
  }
  std::cout << result.files.at("results.csv");
  bool audit_fail = false, solver_fail = false;
  for (const auto& c : result.cells) {
    if (!c.error.empty()) {
      std::cerr << c.mechanism << " eps=" << c.epsilon << ": " << c.error
                << "\n";
      if (c.error.rfind("solve", 0) == 0) solver_fail = true;
    } else if (!c.pass) {
      audit_fail = true;
    }
  }
  if (audit_fail) return kExitAudit;
  return solver_fail ? kExitSolver : kExitOk;
}

// --- stats ---------------------------------------------------------------

struct CorrArgs {
  std::string input = "pvalues.csv";
  std::vector<std::string> features = {"speed", "lon", "lat", "time"};
  std::string target = "p_value";
  std::string out = "correlations.csv";
};

int RunCorr(const CorrArgs& a) {
  const auto table = cmdp::CsvTable::Read(a.input, {});
  const auto rows = cmdp::CorrelateColumns(table, a.features, a.target);
  const std::string text = cmdp::FormatCorrelations(rows);
  cmdp::WriteTextFile(a.out, text);
  std::cout << text;
  return kExitOk;
}

struct DensityArgs {
  std::string points = "nodes.csv";
  std::size_t k = 5;
  double radius_m = 100.0;
  int bins = 20;
  std::string out = "density";
};

int RunDensity(const DensityArgs& a) {
  const auto stats = cmdp::NeighborhoodDensity(cmdp::LoadLocations(a.points),
                                               a.k, a.radius_m);
  EnsureDir(a.out);
  cmdp::WriteTextFile(Join(a.out, "knn_distances.csv"),
                      cmdp::FormatKnnDistances(stats));
  cmdp::WriteTextFile(Join(a.out, "neighbor_ccdf.csv"),
                      cmdp::FormatNeighborCcdf(stats));
  cmdp::WriteTextFile(Join(a.out, "mean_knn.csv"), cmdp::FormatMeanKnn(stats));
  cmdp::WriteTextFile(Join(a.out, "mean_knn_hist.csv"),
                      cmdp::FormatMeanKnnHistogram(stats, a.bins));
  return kExitOk;
}

// Appends `--key=value` for every entry of the --config file whose key is not
// already on the command line, so flags win over the file.
std::vector<std::string> ExpandConfig(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return args;
  const std::string text = cmdp::ReadTextFile(path);
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto line = cmdp::Trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw cmdp::ParseError(cmdp::Where(path, line_no) +
                             "expected key=value");
    }
    const std::string key(cmdp::Trim(line.substr(0, eq)));
    const std::string value(cmdp::Trim(line.substr(eq + 1)));
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const auto& s) {
      return s == flag || s.rfind(flag + "=", 0) == 0;
    });
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware metric differential privacy toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  auto config_opt = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value file of defaults");
  };

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a grid graph and trajectories");
  config_opt(s);
  s->add_option("--out", synth.out, "output directory");
  s->add_option("--rows", synth.opt.rows);
  s->add_option("--cols", synth.opt.cols);
  s->add_option("--spacing-km", synth.opt.spacing_km);
  s->add_option("--origin-lat", synth.opt.origin_lat);
  s->add_option("--origin-lon", synth.opt.origin_lon);
  s->add_option("--order", synth.opt.order, "Markov order of the walk (1 or 2)");
  s->add_option("--persistence", synth.opt.persistence);
  s->add_flag("--heterogeneous", synth.opt.heterogeneous,
              "speed-dependent transitions");
  s->add_option("--fast-mph", synth.opt.fast_mph);
  s->add_option("--count", synth.opt.count, "number of trajectories");
  s->add_option("--length", synth.opt.length, "records per trajectory");
  s->add_option("--vehicles", synth.opt.vehicles);
  s->add_option("--speeds", synth.opt.speeds_mph)->delimiter(',');
  s->add_option("--hours", synth.opt.start_hours)->delimiter(',');
  s->add_option("--seed", synth.opt.seed);

  PriorArgs priors;
  auto* p = app.add_subcommand("priors", "estimate priors from trajectories");
  config_opt(p);
  AddInputs(p, priors.in);
  p->add_option("--gamma", priors.gamma);
  p->add_flag("--no-smoothing", priors.no_smoothing);
  p->add_option("--task-prior", priors.task_prior)
      ->check(CLI::IsMember({"uniform", "empirical"}));
  p->add_option("--out", priors.out);

  MechArgs mech;
  auto* m = app.add_subcommand("mech", "build and solve one mechanism");
  config_opt(m);
  AddInputs(m, mech.in);
  m->add_option("--builder", mech.builder)
      ->check(CLI::IsMember({"mdp", "cmdp", "reduced", "refined", "expmech"}));
  m->add_option("--gamma", mech.gamma);
  m->add_option("--epsilon", mech.epsilon, "privacy budget per km");
  m->add_option("--eta", mech.eta, "neighbor threshold in km");
  m->add_option("--weights", mech.weights)->delimiter(',');
  m->add_option("--lags", mech.lags, "blanket lags, e.g. 1,2");
  m->add_option("--qstar", mech.qstar, "blanket mechanism for --builder refined");
  m->add_option("--task-prior", mech.task_prior)
      ->check(CLI::IsMember({"uniform", "empirical"}));
  m->add_option("--task-count", mech.task_count, "sampled tasks (0 = all)");
  m->add_option("--seed", mech.seed);
  m->add_option("--out", mech.out, "matrix file");
  m->add_option("--lp-out", mech.lp_out, "export the LP");
  m->add_option("--cost-out", mech.cost_out, "export the cost tensor");

  AuditArgs audit;
  auto* a = app.add_subcommand("audit", "audit a mechanism matrix");
  config_opt(a);
  a->add_option("--matrix", audit.matrix)->required();
  a->add_option("--nodes", audit.nodes, "locations (id,lat,lon)");
  a->add_option("--priors", audit.priors, "priors file from `priors`");
  a->add_option("--epsilon", audit.epsilon);
  a->add_option("--eta", audit.eta);
  a->add_option("--weights", audit.weights)->delimiter(',');
  a->add_option("--tolerance", audit.tolerance);
  a->add_option("--out", audit.out);

  SweepArgs sweep;
  sweep.cfg.workers = 0;
  auto* w = app.add_subcommand("sweep", "epsilon sweep over all mechanisms");
  config_opt(w);
  AddInputs(w, sweep.in);
  w->add_option("--gamma", sweep.cfg.gamma);
  w->add_option("--eta", sweep.cfg.eta);
  w->add_option("--epsilons", sweep.cfg.epsilons)->delimiter(',');
  w->add_option("--weights", sweep.cfg.weights)->delimiter(',');
  w->add_option("--mechanisms", sweep.cfg.mechanisms)->delimiter(',');
  w->add_option("--seed", sweep.cfg.seed);
  w->add_option("--task-prior", sweep.task_prior)
      ->check(CLI::IsMember({"uniform", "empirical"}));
  w->add_option("--task-count", sweep.cfg.task_count);
  w->add_option("--grid", sweep.grid, "auto, rome or porto");
  w->add_option("--grid-rows", sweep.cfg.grid_rows);
  w->add_option("--grid-cols", sweep.cfg.grid_cols);
  w->add_option("--eval-fraction", sweep.cfg.eval_fraction);
  w->add_flag("--overlap", sweep.overlap, "evaluate on training trajectories too");
  w->add_option("--permutations", sweep.cfg.permutations);
  w->add_flag("--timing", sweep.cfg.timing, "record build/solve seconds");
  w->add_option("--workers", sweep.cfg.workers, "default $CMDP_WORKERS or 1");
  w->add_option("--out", sweep.out, "output directory");

  CorrArgs corr;
  auto* c = app.add_subcommand("stats-corr", "feature / p-value correlations");
  config_opt(c);
  c->add_option("--input", corr.input);
  c->add_option("--features", corr.features)->delimiter(',');
  c->add_option("--target", corr.target);
  c->add_option("--out", corr.out);

  DensityArgs dens;
  auto* d = app.add_subcommand("stats-density", "neighborhood density");
  config_opt(d);
  d->add_option("--points", dens.points, "locations (id,lat,lon)");
  d->add_option("--k", dens.k);
  d->add_option("--radius-m", dens.radius_m);
  d->add_option("--bins", dens.bins);
  d->add_option("--out", dens.out, "output directory");

  std::vector<std::string> args;
  try {
    args = ExpandConfig(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const cmdp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*s) return RunSynth(synth);
    if (*p) return RunPriors(priors);
    if (*m) return RunMech(mech);
    if (*a) return RunAudit(audit);
    if (*w) return RunSweepCmd(sweep);
    if (*c) return RunCorr(corr);
    if (*d) return RunDensity(dens);
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitIo;
}

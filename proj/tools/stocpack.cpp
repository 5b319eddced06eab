// stocpack command-line front end: solve, run, gen, certify.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stocpack/stocpack.hpp"

namespace {

using namespace stocpack;

constexpr std::uint64_t kDefaultSeed = 20120101;

struct Config {
  std::string instance, pipeline, out, lp_dump, trace, freq;
  long trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  // gen
  std::string family;
  int n = 4, B = 0, L = 3, m = 1, support = 2, arms = 2, states = 4, K = -1;
  bool layered = false;
};

// Output goes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

bool is_stock_pipeline(const std::string& p) {
  return p == "nocancel" || p == "nocancel-poly" || p == "small" || p == "small-poly" || p == "stock-full";
}

Instance load_checked(const Config& c) {
  Instance inst = load_instance(c.instance);
  const auto bad = validate(inst);
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "instance '" << c.instance << "' is invalid:";
    for (const auto& b : bad) msg << "\n  - " << b;
    throw InvalidInstance(msg.str());
  }
  const bool stock = std::holds_alternative<StocKInstance>(inst);
  if (stock != is_stock_pipeline(c.pipeline))
    throw InvalidInstance("pipeline '" + c.pipeline + "' does not match instance kind '" +
                          (stock ? "stock" : "mab") + "'");
  return inst;
}

Json lp_report(const std::string& label, const LinearProgram& lp, const LPSolution& sol) {
  Json vars = Json::object();
  for (int v = 0; v < lp.num_variables(); ++v)
    if (std::abs(sol.x[v]) > 1e-12) vars[lp.variable(v).name] = sol.x[v];
  return {{"lp", label}, {"status", to_string(sol.status)}, {"objective", sol.objective_value},
          {"variables", std::move(vars)}};
}

void dump_lp(const Config& c, const LinearProgram& lp, const std::string& suffix = {}) {
  if (c.lp_dump.empty()) return;
  std::ofstream f(c.lp_dump + suffix);
  if (!f) throw std::runtime_error("cannot open LP dump file '" + c.lp_dump + suffix + "'");
  write_lp_format(lp, f);
}

int cmd_solve(const Config& c) {
  const Instance inst = load_checked(c);
  Json reports = Json::array();
  auto one = [&](const std::string& label, const auto& pipe, const std::string& suffix = {}) {
    reports.push_back(lp_report(label, pipe.lp(), pipe.solution()));
    dump_lp(c, pipe.lp(), suffix);
  };
  const auto& p = c.pipeline;
  if (const auto* s = std::get_if<StocKInstance>(&inst)) {
    if (p == "nocancel") one("LP_NoCancel", NoCancelPipeline(*s));
    else if (p == "nocancel-poly") one("PolyLP_L", PolyNoCancelPipeline(*s));
    else if (p == "small") one("LP_S", SmallPipeline(split_early_late(*s).first));
    else if (p == "small-poly") one("PolyLP_S", PolySmallPipeline(split_early_late(*s).first));
    else {
      StockFullPipeline full(*s);
      one("LP_S(early)", full.early(), ".early");
      one("LP_NoCancel(late)", full.late(), ".late");
    }
  } else {
    const auto& mab = std::get<MABInstance>(inst);
    if (p == "mab-tree") one("LP_mab", MabTreePipeline(mab));
    else if (p == "mab-dag") one("LP_mabdag", MabDagPipeline(mab));
    else if (p == "mab-exploit") one("LP4", MabExploitPipeline(mab));
    else throw InvalidInstance("unknown pipeline '" + p + "'");
  }
  Sink out(c.out);
  out.os() << Json{{"pipeline", p}, {"reports", std::move(reports)}}.dump(2) << '\n';
  return 0;
}

Json knapsack_trace(const KnapsackRunResult& r, long trial) {
  Json items = Json::array();
  for (const auto& o : r.outcomes)
    items.push_back({{"outcome", to_string(o.kind)}, {"start", o.start}, {"size", o.size}, {"steps", o.steps}});
  return {{"trial", trial}, {"reward", r.reward}, {"consumed", r.consumed}, {"items", std::move(items)}};
}

// Replays every trial single-threaded with the harness seeds and writes one
// JSON record per trial.
template <class Pipe>
void write_stock_traces(const Config& c, const Pipe& pipe) {
  if (c.trace.empty()) return;
  std::ofstream f(c.trace);
  if (!f) throw std::runtime_error("cannot open trace file '" + c.trace + "'");
  for (long i = 0; i < c.trials; ++i) {
    Rng rng(trial_seed(c.seed, static_cast<std::uint64_t>(i)));
    f << knapsack_trace(pipe.run(rng), i).dump() << '\n';
  }
}

template <class Pipe>
void write_mab_traces(const Config& c, const Pipe& pipe) {
  if (c.trace.empty()) return;
  std::ofstream f(c.trace);
  if (!f) throw std::runtime_error("cannot open trace file '" + c.trace + "'");
  for (long i = 0; i < c.trials; ++i) {
    Rng rng(trial_seed(c.seed, static_cast<std::uint64_t>(i)));
    write_trace_jsonl(pipe.trace(rng), f, i);
  }
}

int cmd_run(const Config& c) {
  const Instance inst = load_checked(c);
  const auto& p = c.pipeline;
  SimReport rep;
  auto stock = [&](const auto& pipe, const char* label, double ref, double factor) {
    rep = simulate(pipe, c.trials, c.seed);
    add_check(rep, label, ref, factor);
    write_stock_traces(c, pipe);
  };
  auto mab = [&](const auto& pipe, const char* label, double factor) {
    rep = simulate_mab(pipe, c.trials, c.seed);
    add_check(rep, label, pipe.lp_opt(), factor);
    write_mab_traces(c, pipe);
  };
  if (const auto* s = std::get_if<StocKInstance>(&inst)) {
    if (p == "nocancel") {
      NoCancelPipeline pipe(*s);
      stock(pipe, "mean>=LPOpt/8", pipe.lp_opt(), 1.0 / 8);
    } else if (p == "nocancel-poly") {
      PolyNoCancelPipeline pipe(*s);
      stock(pipe, "mean>=PolyLPOpt/8", pipe.lp_opt(), 1.0 / 8);
    } else if (p == "small") {
      SmallPipeline pipe(split_early_late(*s).first);
      stock(pipe, "mean>=LPOpt/8", pipe.lp_opt(), 1.0 / 8);
    } else if (p == "small-poly") {
      PolySmallPipeline pipe(split_early_late(*s).first);
      stock(pipe, "mean>=LPOpt/16", pipe.lp_opt(), 1.0 / 16);
    } else {
      StockFullPipeline pipe(*s);
      stock(pipe, "mean>=LPOpt/8", pipe.lp_opt(), 1.0 / 8);
      try {
        add_check(rep, "mean>=Opt/16", opt_cancel(*s).value, 1.0 / 16);
      } catch (const GuardExceeded& e) {
        std::cerr << "note: Opt/16 check skipped (" << e.what() << ")\n";
      }
    }
  } else {
    const auto& inst_m = std::get<MABInstance>(inst);
    if (p == "mab-tree") mab(MabTreePipeline(inst_m), "mean>=LPOpt/48", 1.0 / 48);
    else if (p == "mab-dag") mab(MabDagPipeline(inst_m), "mean>=LPOpt/48", 1.0 / 48);
    else if (p == "mab-exploit") mab(MabExploitPipeline(inst_m), "mean>=11/576*LPOpt", 11.0 / 576);
    else throw InvalidInstance("unknown pipeline '" + p + "'");
  }
  Sink out(c.out);
  write_csv(rep, out.os());
  if (!c.freq.empty()) {
    std::ofstream f(c.freq);
    if (!f) throw std::runtime_error("cannot open frequency file '" + c.freq + "'");
    write_frequency_csv(rep, f);
  }
  return rep.all_pass() ? 0 : 1;
}

int cmd_gen(const Config& c) {
  Instance inst;
  const auto& f = c.family;
  if (f == "cancel-benefit") inst = gen_cancel_benefit(c.n);
  else if (f == "correlated-gap") inst = gen_correlated_gap(c.n);
  else if (f == "preemption-gap") inst = gen_preemption_gap(c.n, c.L, c.m, c.B);
  else if (f == "random-stock") inst = gen_random_stock(c.n, c.B > 0 ? c.B : 8, c.support, c.seed);
  else if (f == "random-mab")
    inst = gen_random_mab(c.arms, c.states, c.B > 0 ? c.B : 6, c.seed,
                          c.K >= 0 ? std::optional<int>(c.K) : std::nullopt, c.layered);
  else throw InvalidInstance("unknown family '" + f + "'");
  Sink out(c.out);
  out.os() << dump_instance(inst);
  return 0;
}

int cmd_certify(const Config& c) {
  const Instance inst = load_checked(c);
  CertifyOptions o;
  o.pipeline = c.pipeline;
  o.trials = c.trials;
  o.seed = c.seed;
  const CertifyReport r = certify(inst, o);
  Sink out(c.out);
  write_certify_report(r, out.os());
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stocpack: LP rounding for correlated stochastic knapsack and non-martingale bandits"};
  app.require_subcommand(1);
  Config c;
  const std::vector<std::string> pipelines{"nocancel", "nocancel-poly", "small",   "small-poly",
                                           "stock-full", "mab-tree",     "mab-dag", "mab-exploit"};
  auto common = [&](CLI::App* s, bool needs_pipeline) {
    s->add_option("--instance", c.instance, "instance JSON file")->required()->check(CLI::ExistingFile);
    auto* opt = s->add_option("--pipeline", c.pipeline, "pipeline selector")->check(CLI::IsMember(pipelines));
    if (needs_pipeline) opt->required();
    s->add_option("--out", c.out, "output file (default stdout)");
  };
  auto* solve = app.add_subcommand("solve", "build and solve the pipeline's LP; JSON report");
  common(solve, true);
  solve->add_option("--lp-dump", c.lp_dump, "also write the LP in CPLEX LP format");

  auto* run = app.add_subcommand("run", "solve, round and simulate; CSV report");
  common(run, true);
  run->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  run->add_option("--seed", c.seed, "master seed");
  run->add_option("--trace", c.trace, "write per-trial traces as JSON lines");
  run->add_option("--freq", c.freq, "write per-state play frequencies (bandit pipelines)");

  auto* gen = app.add_subcommand("gen", "generate an instance file");
  gen->add_option("--family", c.family, "instance family")
      ->required()
      ->check(CLI::IsMember({"cancel-benefit", "correlated-gap", "preemption-gap", "random-stock", "random-mab"}));
  gen->add_option("--n", c.n, "items / arms (families) or item count (random-stock)");
  gen->add_option("--B", c.B, "budget (0 = family default)");
  gen->add_option("--L", c.L, "preemption-gap path growth");
  gen->add_option("--m", c.m, "preemption-gap depth");
  gen->add_option("--support", c.support, "random-stock sizes per item");
  gen->add_option("--arms", c.arms, "random-mab arms");
  gen->add_option("--states", c.states, "random-mab states per arm");
  gen->add_option("--K", c.K, "random-mab exploit budget (omit for none)");
  gen->add_flag("--layered", c.layered, "random-mab layered DAG arms");
  gen->add_option("--seed", c.seed, "generator seed");
  gen->add_option("--out", c.out, "output file (default stdout)");

  auto* cert = app.add_subcommand("certify", "run every applicable check; exit 0 iff all pass");
  common(cert, true);
  cert->add_option("--trials", c.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  cert->add_option("--seed", c.seed, "master seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(c);
    if (*run) return cmd_run(c);
    if (*gen) return cmd_gen(c);
    if (*cert) return cmd_certify(c);
  } catch (const InvalidInstance& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

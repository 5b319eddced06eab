#pragma once

// Monte Carlo evaluation with deterministic aggregation.
//
// Trial i always runs on Rng(trial_seed(master, i)) and its reward is stored
// by index. The mean is a compensated sum taken in index order, so reports do
// not depend on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "stocpack/common.hpp"

namespace stocpack {

struct Comparison {
  std::string label;
  double reference = 0.0;  // value the bound is stated against, e.g. LPOpt
  double factor = 1.0;     // required fraction of the reference
  double ratio = 0.0;      // mean / reference (0 when the reference is 0)
  bool pass = false;       // mean + 3 stderr >= factor * reference
};

struct SimReport {
  long trials = 0;
  double mean = 0.0;
  double std_err = 0.0;  // sample standard deviation / sqrt(trials)
  double ci95 = 0.0;     // 1.96 * std_err
  std::vector<Comparison> comparisons;
  std::map<std::string, double> per_state_frequency;  // plays per trial, bandit runs only

  bool all_pass() const {
    return std::all_of(comparisons.begin(), comparisons.end(), [](const auto& c) { return c.pass; });
  }
};

inline int harness_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STOCPACK_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(1, n);
}

class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

inline SimReport summarize(const std::vector<double>& rewards) {
  SimReport r;
  r.trials = static_cast<long>(rewards.size());
  if (rewards.empty()) return r;
  KahanSum s;
  for (double x : rewards) s.add(x);
  r.mean = s.value() / r.trials;
  if (r.trials > 1) {
    KahanSum ss;
    for (double x : rewards) ss.add((x - r.mean) * (x - r.mean));
    r.std_err = std::sqrt(ss.value() / (r.trials - 1)) / std::sqrt(static_cast<double>(r.trials));
  }
  r.ci95 = 1.96 * r.std_err;
  return r;
}

/// Runs `trial(rng, index, worker)` for every index and returns the rewards in
/// index order. `worker` lets callers keep per-thread accumulators.
template <class Trial>
std::vector<double> run_trials(long trials, std::uint64_t seed, Trial&& trial, int threads = 0) {
  if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
  if (threads <= 0) threads = harness_threads();
  threads = static_cast<int>(std::min<long>(threads, trials));
  std::vector<double> out(trials);
  auto work = [&](int w) {
    for (long i = w; i < trials; i += threads) {
      Rng rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
      out[i] = trial(rng, i, w);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return out;
}

/// Monte Carlo estimate for a pipeline exposing run(Rng&) -> result.reward.
template <class Pipeline>
SimReport simulate(const Pipeline& p, long trials, std::uint64_t seed, int threads = 0) {
  return summarize(run_trials(trials, seed, [&](Rng& rng, long, int) { return p.run(rng).reward; }, threads));
}

/// Bandit variant: uses trace(Rng&) and also records per-state play counts.
template <class Pipeline>
SimReport simulate_mab(const Pipeline& p, long trials, std::uint64_t seed, int threads = 0) {
  if (threads <= 0) threads = harness_threads();
  threads = static_cast<int>(std::min<long>(std::max(threads, 1), trials));
  std::vector<std::map<std::string, long>> counts(threads);
  auto rewards = run_trials(
      trials, seed,
      [&](Rng& rng, long, int w) {
        const auto tr = p.trace(rng);
        for (const auto& play : tr.plays) ++counts[w][play.state];
        return tr.credited_reward;
      },
      threads);
  SimReport r = summarize(rewards);
  std::map<std::string, long> merged;
  for (const auto& m : counts)
    for (const auto& [k, v] : m) merged[k] += v;
  for (const auto& [k, v] : merged) r.per_state_frequency[k] = static_cast<double>(v) / trials;
  return r;
}

/// One-sided 3-sigma check: mean + 3 stderr >= factor * reference.
inline const Comparison& add_check(SimReport& r, std::string label, double reference, double factor) {
  Comparison c;
  c.label = std::move(label);
  c.reference = reference;
  c.factor = factor;
  c.ratio = reference != 0.0 ? r.mean / reference : 0.0;
  c.pass = r.mean + 3.0 * r.std_err >= factor * reference - 1e-12;
  r.comparisons.push_back(std::move(c));
  return r.comparisons.back();
}

inline std::string fmt_g(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// CSV with columns check, mean, stderr, reference, ratio, verdict. The
/// reference column holds the threshold factor * reference.
inline void write_csv(const SimReport& r, std::ostream& os) {
  os << "check,mean,stderr,reference,ratio,verdict\n";
  auto row = [&](const std::string& check, double ref, double ratio, const char* verdict) {
    os << check << ',' << fmt_g(r.mean) << ',' << fmt_g(r.std_err) << ',' << fmt_g(ref) << ',' << fmt_g(ratio)
       << ',' << verdict << '\n';
  };
  row("trials=" + std::to_string(r.trials), 0.0, 0.0, "INFO");
  for (const auto& c : r.comparisons) {
    const double thr = c.factor * c.reference;
    row(c.label, thr, thr != 0.0 ? r.mean / thr : 0.0, c.pass ? "PASS" : "FAIL");
  }
}

inline void write_frequency_csv(const SimReport& r, std::ostream& os) {
  os << "state,plays_per_trial\n";
  for (const auto& [k, v] : r.per_state_frequency) os << k << ',' << fmt_g(v) << '\n';
}

}  // namespace stocpack

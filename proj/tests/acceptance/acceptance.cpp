// Copyright 2026 The mcalloc Authors
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

// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   mcalloc_acceptance            all criteria
//   mcalloc_acceptance 2 7        selected criteria
//   mcalloc_acceptance --smoke    criterion 7 at K = 1e5
//   mcalloc_acceptance --pilot    criterion 8 over five seeds, for threshold review

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/greedy.hpp"
#include "core/hypotheses.hpp"
#include "core/kt_solver.hpp"
#include "core/misclassification.hpp"
#include "core/rng.hpp"
#include "core/thompson.hpp"
#include "../oracles.hpp"

using namespace mcalloc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

constexpr std::size_t kM = 500;
constexpr double kAlphaStar = 0.1;
constexpr int kSeeds = 20;

// q50 at the largest budget must reach this. Frozen from the five-seed pilot.
constexpr double kConvergenceThreshold = 0.95;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

PValueSet mixture_instance(std::uint64_t seed) {
  MixtureConfig cfg;
  cfg.m = kM;
  cfg.seed = seed;
  cfg.sort_output = true;
  return generate_mixture(cfg, bonferroni_threshold(kAlphaStar, kM));
}

double h_of(const PValueSet& p, std::span<const double> k) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += h_i(p[i], p.alpha(), k[i]);
  return s;
}

// ---- 1 -----------------------------------------------------------------

Outcome derivative() {
  Rng r(20261);
  int bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double p = 1e-4 + (0.999 - 1e-4) * r.uniform();
    const double k = std::exp(std::log(1e6) * r.uniform());
    double alpha = -1.0;
    while (!(alpha > 0.0 && alpha < 1.0)) {
      const double z = -8.0 + 16.0 * r.uniform();
      alpha = p + z * std::sqrt(p * (1 - p) / k);
    }
    const double eps = 1e-4 * k;
    const double fd = (h_i(p, alpha, k + eps) - h_i(p, alpha, k - eps)) / (2 * eps);
    const double an = dh_dk(p, alpha, k);
    const double rel = std::fabs(an - fd) / std::max(std::fabs(fd), std::numeric_limits<double>::min());
    worst = std::max(worst, rel);
    if (rel > 1e-5) ++bad;
  }
  return {bad == 0, "1000 triples, |z| <= 8, worst relative error " + fmt("%.2e", worst)};
}

// ---- 2 and 4 -----------------------------------------------------------

std::vector<KtSolution>& kt_solutions() {
  static std::vector<KtSolution> sols = [] {
    std::vector<KtSolution> out;
    for (int s = 0; s < kSeeds; ++s) out.push_back(solve_optimal(mixture_instance(1000 + s), 1e6));
    return out;
  }();
  return sols;
}

Outcome stationarity() {
  int ok = 0;
  double worst_res = 0.0, worst_gap = 0.0;
  for (const auto& sol : kt_solutions()) {
    const double gap = std::fabs(sol.allocation.total() - 1e6);
    worst_res = std::max(worst_res, sol.stationarity_residual);
    worst_gap = std::max(worst_gap, gap);
    if (sol.stationarity_residual <= 1e-9 && gap <= 1e-2) ++ok;
  }
  return {ok == kSeeds, std::to_string(ok) + "/20 instances; max residual " + fmt("%.2e", worst_res) +
                            ", max |sum k - K| " + fmt("%.2e", worst_gap)};
}

bool bimodal(const PValueSet& p, const KtSolution& sol) {
  const std::size_t m = p.size();
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i < 2 ? 0 : i - 2;
    const std::size_t hi = std::min(m - 1, i + 2);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += sol.allocation[j];
    s[i] = sum / static_cast<double>(hi - lo + 1);
  }
  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (s[i] > s[i - 1] && s[i] >= s[i + 1]) maxima.push_back(i);
    if (s[i] < s[i - 1] && s[i] <= s[i + 1]) minima.push_back(i);
  }
  if (maxima.size() != 2) return false;
  if (!(p[maxima[0]] <= p.alpha() && p[maxima[1]] > p.alpha())) return false;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(p[a] - p.alpha()) < std::fabs(p[b] - p.alpha());
  });
  for (std::size_t n = 0; n < 3; ++n)
    if (std::find(minima.begin(), minima.end(), order[n]) != minima.end()) return true;
  return false;
}

Outcome bimodality() {
  int ok = 0;
  std::string failed;
  for (int s = 0; s < kSeeds; ++s) {
    if (bimodal(mixture_instance(1000 + s), kt_solutions()[s]))
      ++ok;
    else
      failed += " " + std::to_string(1000 + s);
  }
  return {ok >= 18, std::to_string(ok) + "/20 seeds bimodal" + (failed.empty() ? "" : "; failing seeds" + failed)};
}

// ---- 3 -----------------------------------------------------------------

Outcome global_optimality() {
  Rng r(33);
  int ok = 0, total = 0;
  double worst = -1e300;
  for (std::size_t m : {2, 3}) {
    for (double K : {50.0, 200.0}) {
      for (int inst = 0; inst < 5; ++inst) {
        const double alpha = 0.05;
        std::vector<double> v(m);
        for (auto& x : v) x = r.uniform() < 0.5 ? alpha * r.uniform() : alpha + (0.5 - alpha) * r.uniform();
        const PValueSet p(v, alpha);
        const auto sol = solve_optimal(p, K);
        const double hk = h_of(p, sol.allocation.budgets());
        const int n = 400;
        const double step = K / n;
        double best = 1e300;
        if (m == 2) {
          for (int a = 0; a <= n; ++a) {
            const double k[] = {a * step, K - a * step};
            best = std::min(best, h_of(p, k));
          }
        } else {
          for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) {
              const double k[] = {a * step, b * step, K - (a + b) * step};
              best = std::min(best, h_of(p, k));
            }
        }
        ++total;
        worst = std::max(worst, hk - best);
        if (hk <= best + 1e-8) ++ok;
      }
    }
  }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " instances; max h(k*) - grid min " +
                           fmt("%.2e", worst)};
}

// ---- 5 -----------------------------------------------------------------

Outcome greedy_checks() {
  bool monotone = true, lattice = true;
  for (int s = 0; s < 5; ++s) {
    MixtureConfig cfg;
    cfg.m = 200;
    cfg.seed = 500 + s;
    for (double alpha : {0.1 / 200, 0.01, 0.1}) {
      const auto p = generate_mixture(cfg, alpha);
      GreedyOptions opts;
      opts.record_trace = true;
      const auto res = greedy_allocate(p, 200000, opts);
      for (std::size_t t = 1; t < res.objective_trace.size(); ++t)
        if (res.objective_trace[t] > res.objective_trace[t - 1]) monotone = false;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > p.alpha()) continue;
        const auto k = static_cast<std::int64_t>(res.allocation[i]);
        if (!(k == 1 || (k > 0 && k % res.jump == 0))) lattice = false;
      }
    }
  }

  // m = 2 family: p ~ Uniform(0,1) each, alpha = 0.1, K in {6, 20, 50, 100, 200}.
  Rng r(55);
  int within = 0, total = 0;
  double worst = 1.0;
  for (int inst = 0; inst < 40; ++inst) {
    const double p1 = r.uniform(), p2 = r.uniform();
    const PValueSet p({p1, p2}, 0.1);
    for (std::int64_t K : {6, 20, 50, 100, 200}) {
      const auto res = greedy_allocate(p, K);
      const double best = oracle::best_split_two(p1, p2, 0.1, K);
      ++total;
      if (res.objective <= 1.05 * best) ++within;
      if (best > 0) worst = std::max(worst, res.objective / best);
    }
  }
  const bool pass = monotone && lattice && within == total;
  return {pass, std::string("g non-increasing: ") + (monotone ? "yes" : "no") + "; lattice: " + (lattice ? "yes" : "no") +
                    "; m=2 within 5% of exhaustive: " + std::to_string(within) + "/" + std::to_string(total) +
                    " (worst ratio " + fmt("%.3g", worst) + ")"};
}

// ---- 6 -----------------------------------------------------------------

Outcome profile_shape() {
  const double alpha = 1.0 / 5000;
  const auto low = profile_g(0.3 * alpha, alpha, 5000);
  const auto high = profile_g(5 * alpha, alpha, 5000);
  bool inc = true, dec = true;
  for (int k = 2; k <= 4999; ++k) {
    if (!(low[k].g > low[k - 1].g)) inc = false;
    if (!(high[k].g < high[k - 1].g)) dec = false;
  }
  const bool drop = low[5000].g < low[4999].g;
  const bool rise = high[5000].g > high[4999].g;
  return {inc && dec && drop && rise,
          std::string("p=0.3a increasing ") + (inc ? "yes" : "no") + ", drop at 5000 " + (drop ? "yes" : "no") +
              "; p=5a decreasing " + (dec ? "yes" : "no") + ", rise at 5000 " + (rise ? "yes" : "no")};
}

// ---- 7 -----------------------------------------------------------------

Outcome table_ordering(std::int64_t K) {
  int h_ok = 0, emp_ok = 0;
  std::ostringstream ratios;
  for (int s = 0; s < kSeeds; ++s) {
    const auto p = mixture_instance(2000 + s);
    ProtocolConfig cfg;
    cfg.seed = 7000 + s;
    const auto t = table1_protocol(p, K, cfg);
    const auto& kt = t.reports[0];
    const auto& th = t.reports[1];
    if (kt.theoretical < th.theoretical) ++h_ok;
    if (th.empirical_mean <= 2.5 * kt.empirical_mean) ++emp_ok;
    ratios << (s ? " " : "") << fmt("%.2f", kt.empirical_mean > 0 ? th.empirical_mean / kt.empirical_mean : NAN);
  }
  return {h_ok == kSeeds && emp_ok >= 18, "K=" + fmt("%.0e", static_cast<double>(K)) + "; h(KT)<h(Thompson) " +
                                              std::to_string(h_ok) + "/20; empirical ratio <= 2.5 in " +
                                              std::to_string(emp_ok) + "/20 [" + ratios.str() + "]"};
}

// ---- 8 -----------------------------------------------------------------

std::vector<ConvergencePoint> convergence(std::uint64_t seed) {
  const auto p = mixture_instance(seed);
  ProtocolConfig cfg;
  cfg.seed = seed;
  cfg.repetitions = 10;
  const auto grid = log_grid(10000, 1000000, 25);
  return convergence_study(p, grid, cfg);
}

Outcome convergence_trend() {
  const auto pts = convergence(3000);
  const double first = pts.front().q50, last = pts.back().q50;
  return {last > first && last >= kConvergenceThreshold,
          "q50 " + fmt("%.4f", first) + " at K=1e4 -> " + fmt("%.4f", last) + " at K=1e6; threshold " +
              fmt("%.2f", kConvergenceThreshold)};
}

void pilot() {
  for (std::uint64_t seed = 3000; seed < 3005; ++seed) {
    const auto pts = convergence(seed);
    std::printf("pilot seed %llu: q50(K_min)=%.4f q50(K_max)=%.4f q05(K_max)=%.4f q95(K_max)=%.4f\n",
                static_cast<unsigned long long>(seed), pts.front().q50, pts.back().q50, pts.back().q05,
                pts.back().q95);
    std::fflush(stdout);
  }
}

// ---- 9 -----------------------------------------------------------------

std::string serialise(const ThompsonResult& r) {
  std::string out;
  for (std::size_t i = 0; i < r.state.size(); ++i)
    out += std::to_string(r.state.k[i]) + "," + std::to_string(r.state.s[i]) + "\n";
  return out;
}

Outcome thompson_exactness() {
  Rng r(99);
  int ok = 0;
  for (int c = 0; c < 10; ++c) {
    MixtureConfig mc;
    mc.m = 20 + static_cast<std::size_t>(r.uniform() * 200);
    mc.seed = r.next();
    const auto p = generate_mixture(mc, 0.1 / static_cast<double>(mc.m));
    ThompsonConfig cfg;
    cfg.total_budget = static_cast<std::int64_t>(1000 + r.uniform() * 200000);
    cfg.iterations = 1 + static_cast<std::int64_t>(r.uniform() * 200);
    cfg.posterior_draws = 1 + static_cast<std::int64_t>(r.uniform() * 60);
    cfg.warm_up = r.uniform() < 0.5;
    cfg.seed = r.next();
    SimulatedOracle oracle(p);
    std::set<std::string> outputs;
    bool exact = true;
    for (unsigned threads : {1u, 2u, 4u, 1u}) {
      cfg.threads = threads;
      const auto res = run_thompson(oracle, p.alpha(), cfg);
      exact &= std::accumulate(res.state.k.begin(), res.state.k.end(), std::int64_t{0}) == cfg.total_budget;
      outputs.insert(serialise(res));
    }
    if (exact && outputs.size() == 1) ++ok;
  }
  return {ok == 10, std::to_string(ok) + "/10 configs exact and identical across 1, 2 and 4 threads"};
}

// ---- 10 ----------------------------------------------------------------

double plus_one_error(double p, double alpha, std::int64_t k) {
  const std::int64_t c = oracle::max_count(alpha, k + 1);
  return p <= alpha ? oracle::binom_sf(k, c - 1, p) : oracle::binom_cdf(k, c - 1, p);
}

Outcome empirical_oracle() {
  Rng r(1010);
  int ok = 0;
  double worst = 0.0;
  const std::size_t reps = 100000;
  for (int inst = 0; inst < 10; ++inst) {
    const double alpha = 0.02 + 0.2 * r.uniform();
    std::vector<double> v(2);
    std::vector<std::int64_t> k(2);
    for (int i = 0; i < 2; ++i) {
      v[i] = r.uniform() < 0.5 ? alpha * r.uniform() : alpha + (1 - alpha) * 0.3 * r.uniform();
      k[i] = static_cast<std::int64_t>(r.uniform() * 51);
    }
    const PValueSet p(v, alpha);
    const auto runs = empirical_misclassifications(p, Allocation::discrete(k), reps, r.next());
    const double mean = std::accumulate(runs.begin(), runs.end(), 0.0) / reps;
    double var = 0.0;
    for (auto x : runs) var += (x - mean) * (x - mean);
    var /= reps - 1;
    const double want = plus_one_error(v[0], alpha, k[0]) + plus_one_error(v[1], alpha, k[1]);
    const double se = std::sqrt(var / reps);
    const double zscore = se > 0 ? std::fabs(mean - want) / se : (mean == want ? 0.0 : 1e9);
    worst = std::max(worst, zscore);
    if (zscore <= 3.0) ++ok;
  }
  return {ok == 10, std::to_string(ok) + "/10 instances within 3 SE; worst " + fmt("%.2f", worst) + " SE"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, "dh_dk vs finite differences", 5, derivative},
      {2, "KT stationarity and budget", 30, stationarity},
      {3, "KT global optimality on a simplex grid", 60, global_optimality},
      {4, "bimodal optimal allocation", 30, bimodality},
      {5, "greedy monotonicity, lattice, near-optimality", 60, greedy_checks},
      {6, "exact misclassification profile shape", 10, profile_shape},
      {7, "KT vs Thompson ordering at K=1e6", 600, [] { return table_ordering(1000000); }},
      {8, "Thompson convergence trend", 900, convergence_trend},
      {9, "Thompson budget exactness and determinism", 60, thompson_exactness},
      {10, "empirical protocol vs exact enumeration", 30, empirical_oracle},
  };
  std::vector<Criterion> selected;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--pilot") == 0) {
      pilot();
      return 0;
    }
    if (std::strcmp(argv[a], "--smoke") == 0) {
      selected.push_back({7, "KT vs Thompson ordering, K=1e5 smoke", 60, [] { return table_ordering(100000); }});
      continue;
    }
    const int id = std::atoi(argv[a]);
    for (const auto& c : all)
      if (c.id == id) selected.push_back(c);
  }
  if (argc == 1) selected = all;

  int failures = 0;
  for (const auto& c : selected) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] %2d %s: %s; %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

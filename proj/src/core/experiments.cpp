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

#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace mcalloc {

namespace {

std::uint64_t strategy_stream(Strategy s) { return static_cast<std::uint64_t>(s) + 1; }

// Sub-stream coordinates used by the convergence study for each grid point.
constexpr std::uint64_t kConvergenceThompson = 100;
constexpr std::uint64_t kConvergenceEmpirical = 101;

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::optimal_kt: return "optimal_kt";
    case Strategy::greedy: return "greedy";
    case Strategy::thompson: return "thompson";
    case Strategy::constant: return "constant";
  }
  return "unknown";
}

std::string_view to_string(Estimator e) noexcept { return e == Estimator::raw ? "raw" : "plus_one"; }

Strategy parse_strategy(std::string_view s) {
  if (s == "kt" || s == "optimal_kt") return Strategy::optimal_kt;
  if (s == "greedy") return Strategy::greedy;
  if (s == "thompson") return Strategy::thompson;
  if (s == "constant") return Strategy::constant;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

Estimator parse_estimator(std::string_view s) {
  if (s == "raw") return Estimator::raw;
  if (s == "plus_one" || s == "plus-one") return Estimator::plus_one;
  throw ConfigError("unknown estimator '" + std::string(s) + "'");
}

std::vector<std::int64_t> empirical_misclassifications(const PValueSet& p, const Allocation& k, std::size_t r,
                                                       std::uint64_t seed, Estimator estimator, unsigned threads) {
  if (k.size() != p.size()) throw ConfigError("allocation size does not match the number of hypotheses");
  const auto counts = k.counts();
  const double alpha = p.alpha();
  std::vector<std::int64_t> out(r, 0);
  parallel_for(r, threads, [&](std::size_t j) {
    std::int64_t wrong = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      Rng rng = Rng::substream(seed, StreamTag::empirical, i, j);
      const std::int64_t s = rng.binomial(counts[i], p[i]);
      const bool rejects = estimator == Estimator::plus_one ? plus_one_estimate_rejects(s, counts[i], alpha)
                                                            : raw_estimate_rejects(s, counts[i], alpha);
      if (rejects != truly_rejected(p[i], alpha)) ++wrong;
    }
    out[j] = wrong;
  });
  return out;
}

std::vector<std::int64_t> constant_allocation(std::size_t m, std::int64_t K) {
  if (m == 0) throw ConfigError("m must be positive");
  if (K < 0) throw ConfigError("K must be non-negative");
  return std::vector<std::int64_t>(m, K / static_cast<std::int64_t>(m));
}

ThompsonConfig ProtocolConfig::thompson(std::int64_t K, std::uint64_t seed_override) const {
  ThompsonConfig t;
  t.total_budget = K;
  t.iterations = iterations;
  t.posterior_draws = posterior_draws;
  t.seed = seed_override;
  t.warm_up = warm_up;
  t.threads = threads;
  return t;
}

MisclassificationReport evaluate_allocation(Strategy strategy, const PValueSet& p, const Allocation& for_theory,
                                            const Allocation& discrete, double K, std::size_t r, std::uint64_t seed,
                                            Estimator estimator, unsigned threads) {
  MisclassificationReport rep;
  rep.strategy = strategy;
  rep.m = p.size();
  rep.alpha = p.alpha();
  rep.K = K;
  rep.r = r;
  rep.seed = seed;
  rep.estimator = estimator;
  rep.theoretical = h(p, for_theory).value;
  rep.empirical_runs = empirical_misclassifications(p, discrete, r, seed, estimator, threads);
  if (r > 0) {
    const double sum = std::accumulate(rep.empirical_runs.begin(), rep.empirical_runs.end(), 0.0);
    rep.empirical_mean = sum / static_cast<double>(r);
  }
  rep.parameters["theoretical_objective"] = "h";
  rep.parameters["theoretical_allocation"] = for_theory.is_discrete() ? "discrete" : "continuous";
  return rep;
}

nlohmann::json to_json(const MisclassificationReport& rep) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["strategy"] = to_string(rep.strategy);
  j["m"] = rep.m;
  j["alpha"] = rep.alpha;
  j["K"] = rep.K;
  j["r"] = rep.r;
  j["seed"] = rep.seed;
  j["rng"] = kRngId;
  j["estimator"] = to_string(rep.estimator);
  j["theoretical"] = rep.theoretical;
  j["empirical_runs"] = rep.empirical_runs;
  j["empirical_mean"] = rep.empirical_mean;
  j["allocation_file"] = rep.allocation_file;
  j["parameters"] = rep.parameters;
  return j;
}

Table1Result table1_protocol(const PValueSet& p, std::int64_t K, const ProtocolConfig& cfg) {
  if (K < 1) throw ConfigError("K must be positive");
  const double Kd = static_cast<double>(K);
  Table1Result out;

  out.kt = solve_optimal(p, Kd, cfg.kt);
  out.kt_rounded = round_allocation(out.kt.allocation.budgets(), K);
  const Allocation kt_discrete = Allocation::discrete(out.kt_rounded);
  const std::uint64_t kt_seed = derive_seed(cfg.seed, StreamTag::protocol, strategy_stream(Strategy::optimal_kt));
  auto kt_rep = evaluate_allocation(Strategy::optimal_kt, p, out.kt.allocation, kt_discrete, Kd, cfg.repetitions,
                                    kt_seed, cfg.estimator, cfg.threads);
  const double h_rounded = h(p, kt_discrete).value;
  kt_rep.parameters["lambda_star"] = out.kt.lambda_star;
  kt_rep.parameters["stationarity_residual"] = out.kt.stationarity_residual;
  kt_rep.parameters["stationarity_tol"] = cfg.kt.stationarity_tol;
  kt_rep.parameters["degeneracy_eps"] = cfg.kt.degeneracy_eps;
  kt_rep.parameters["budget_tol"] = budget_tolerance(Kd);
  kt_rep.parameters["iterations_outer"] = out.kt.iterations_outer;
  kt_rep.parameters["iterations_inner_total"] = out.kt.iterations_inner_total;
  kt_rep.parameters["degenerate_count"] = out.kt.degenerate.size();
  kt_rep.parameters["rounding"] = "largest_remainder";
  kt_rep.parameters["theoretical_rounded"] = h_rounded;
  kt_rep.parameters["rounding_perturbation"] = h_rounded - kt_rep.theoretical;

  SimulatedOracle oracle(p);
  out.thompson = run_thompson(oracle, p.alpha(), cfg.thompson(K, cfg.seed));
  const std::uint64_t th_seed = derive_seed(cfg.seed, StreamTag::protocol, strategy_stream(Strategy::thompson));
  auto th_rep = evaluate_allocation(Strategy::thompson, p, out.thompson.allocation, out.thompson.allocation, Kd,
                                    cfg.repetitions, th_seed, cfg.estimator, cfg.threads);
  th_rep.parameters["it"] = cfg.iterations;
  th_rep.parameters["d"] = cfg.posterior_draws;
  th_rep.parameters["warm_up"] = cfg.warm_up;
  th_rep.parameters["thompson_seed"] = cfg.seed;
  th_rep.parameters["variant"] = "beta11-prior/instability-weights/largest-remainder";

  out.constant = constant_allocation(p.size(), K);
  const Allocation constant = Allocation::discrete(out.constant);
  const std::uint64_t c_seed = derive_seed(cfg.seed, StreamTag::protocol, strategy_stream(Strategy::constant));
  auto c_rep = evaluate_allocation(Strategy::constant, p, constant, constant, Kd, cfg.repetitions, c_seed,
                                   cfg.estimator, cfg.threads);

  out.reports = {std::move(kt_rep), std::move(th_rep), std::move(c_rep)};
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, std::size_t steps) {
  if (lo < 1 || hi < lo) throw ConfigError("grid bounds must satisfy 1 <= lo <= hi");
  if (steps < 1) throw ConfigError("grid needs at least one step");
  std::vector<std::int64_t> grid;
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo));
  for (std::size_t j = 0; j < steps; ++j) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(steps - 1);
    const auto K = static_cast<std::int64_t>(std::llround(static_cast<double>(lo) * std::exp(ratio * t)));
    if (grid.empty() || K > grid.back()) grid.push_back(K);
  }
  grid.back() = std::max(grid.back(), hi);
  return grid;
}

std::vector<ConvergencePoint> convergence_study(const PValueSet& p, std::span<const std::int64_t> K_grid,
                                                const ProtocolConfig& cfg) {
  if (K_grid.empty()) throw ConfigError("K grid is empty");
  for (std::size_t i = 1; i < K_grid.size(); ++i)
    if (K_grid[i] <= K_grid[i - 1]) throw ConfigError("K grid must be strictly increasing");
  if (cfg.repetitions < 1) throw ConfigError("r must be positive");

  const double m = static_cast<double>(p.size());
  std::vector<ConvergencePoint> out;
  out.reserve(K_grid.size());
  for (const std::int64_t K : K_grid) {
    const auto uK = static_cast<std::uint64_t>(K);
    const KtSolution kt = solve_optimal(p, static_cast<double>(K), cfg.kt);
    ConvergencePoint pt;
    pt.K = K;
    pt.theoretical_correct = m - h(p, kt.allocation).value;

    SimulatedOracle oracle(p);
    const auto th = run_thompson(
        oracle, p.alpha(), cfg.thompson(K, derive_seed(cfg.seed, StreamTag::protocol, kConvergenceThompson, uK)));
    const auto runs = empirical_misclassifications(p, th.allocation, cfg.repetitions,
                                                   derive_seed(cfg.seed, StreamTag::protocol, kConvergenceEmpirical, uK),
                                                   cfg.estimator, cfg.threads);
    for (const std::int64_t wrong : runs) pt.ratios.push_back((m - static_cast<double>(wrong)) / pt.theoretical_correct);
    pt.q05 = quantile(pt.ratios, 0.05);
    pt.q50 = quantile(pt.ratios, 0.50);
    pt.q95 = quantile(pt.ratios, 0.95);
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<ProfilePoint> profile_g(double p, double alpha, std::int64_t k_max) {
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  std::vector<ProfilePoint> out;
  out.reserve(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) out.push_back({k, g_i(p, alpha, k)});
  return out;
}

}  // namespace mcalloc

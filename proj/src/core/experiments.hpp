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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "core/hypotheses.hpp"
#include "core/kt_solver.hpp"
#include "core/misclassification.hpp"
#include "core/thompson.hpp"

namespace mcalloc {

inline constexpr int kReportSchemaVersion = 1;

enum class Strategy { optimal_kt, greedy, thompson, constant };
enum class Estimator { raw, plus_one };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(Estimator e) noexcept;
Strategy parse_strategy(std::string_view s);
Estimator parse_estimator(std::string_view s);

/// For each of r repetitions, draws S_i ~ Binomial(k_i, p_i) afresh, classifies
/// with the chosen estimator and counts disagreements with bonferroni(p).
/// Hypothesis i in repetition j uses the (seed, empirical, i, j) sub-stream.
std::vector<std::int64_t> empirical_misclassifications(const PValueSet& p, const Allocation& k, std::size_t r,
                                                       std::uint64_t seed,
                                                       Estimator estimator = Estimator::plus_one,
                                                       unsigned threads = 1);

/// floor(K / m) samples each.
std::vector<std::int64_t> constant_allocation(std::size_t m, std::int64_t K);

struct ProtocolConfig {
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::int64_t iterations = 1000;
  std::int64_t posterior_draws = 100;
  bool warm_up = false;
  Estimator estimator = Estimator::plus_one;
  KtOptions kt;
  unsigned threads = 1;

  ThompsonConfig thompson(std::int64_t K, std::uint64_t seed_override) const;
};

struct MisclassificationReport {
  Strategy strategy = Strategy::optimal_kt;
  std::size_t m = 0;
  double alpha = 0.0;
  double K = 0.0;
  std::size_t r = 0;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::plus_one;
  // h evaluated on the allocation (continuous budgets for the KT strategy).
  double theoretical = 0.0;
  std::vector<std::int64_t> empirical_runs;
  double empirical_mean = 0.0;
  std::string allocation_file;
  // Strategy parameters and tolerances needed to regenerate the numbers.
  nlohmann::json parameters = nlohmann::json::object();
};

/// h on `for_theory`, empirical runs on `discrete`.
MisclassificationReport evaluate_allocation(Strategy strategy, const PValueSet& p, const Allocation& for_theory,
                                            const Allocation& discrete, double K, std::size_t r, std::uint64_t seed,
                                            Estimator estimator, unsigned threads = 1);

nlohmann::json to_json(const MisclassificationReport& report);

struct Table1Result {
  KtSolution kt;
  std::vector<std::int64_t> kt_rounded;
  ThompsonResult thompson;
  std::vector<std::int64_t> constant;
  // optimal_kt, thompson, constant, in that order.
  std::vector<MisclassificationReport> reports;
};

/// KT optimum (rounded for the empirical runs), a simulated Thompson run and
/// the constant baseline, each scored by h and by r empirical repetitions.
Table1Result table1_protocol(const PValueSet& p, std::int64_t K, const ProtocolConfig& cfg);

struct ConvergencePoint {
  std::int64_t K = 0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  // m - h(k*) at this K.
  double theoretical_correct = 0.0;
  std::vector<double> ratios;
};

/// Linear-interpolation sample quantile (R type 7).
double quantile(std::vector<double> values, double q);

/// round(lo * (hi/lo)^(j/(steps-1))), j = 0..steps-1, duplicates dropped.
std::vector<std::int64_t> log_grid(std::int64_t lo, std::int64_t hi, std::size_t steps);

/// Per K: Thompson allocation, r empirical runs, ratio (m - M_j) / (m - h(k*(K))).
/// K_grid must be strictly increasing.
std::vector<ConvergencePoint> convergence_study(const PValueSet& p, std::span<const std::int64_t> K_grid,
                                                const ProtocolConfig& cfg);

struct ProfilePoint {
  std::int64_t k;
  double g;
};

/// g_i on k = 0..k_max.
std::vector<ProfilePoint> profile_g(double p, double alpha, std::int64_t k_max);

}  // namespace mcalloc

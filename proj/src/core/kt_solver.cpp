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

#include "core/kt_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "core/error.hpp"

namespace mcalloc {

namespace {

struct InnerResult {
  double log_k;
  int iterations;
};

// Solves log(-dh_dk(k)) = log_lambda for log k. The left side is strictly
// decreasing in k, from +inf at 0+ to -inf.
InnerResult solve_log_k(double p, double alpha, double log_lambda, const KtOptions& opts) {
  auto f = [&](double log_k) { return log_neg_dh_dk(p, alpha, std::exp(log_k)) - log_lambda; };

  double lo = std::log(1e-12);
  double hi = 0.0;
  double step = 1.0;
  while (f(lo) < 0.0) {
    hi = lo;
    lo -= step;
    step *= 2.0;
    if (lo < -700.0) throw ConvergenceError("k bracket underflow for p=" + std::to_string(p), f(lo));
  }
  step = 1.0;
  while (f(hi) > 0.0) {
    lo = hi;
    hi += step;
    step *= 2.0;
    if (hi > 700.0) throw ConvergenceError("k bracket overflow for p=" + std::to_string(p), f(hi));
  }

  int it = 0;
  while (it < opts.max_inner_iterations) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return {mid, it};
    if (fm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  const double root = 0.5 * (lo + hi);
  const double residual = std::abs(std::expm1(f(root)));
  if (residual > opts.stationarity_tol)
    throw ConvergenceError("inner bisection did not reach stationarity for p=" + std::to_string(p), residual);
  return {root, it};
}

}  // namespace

double budget_tolerance(double K) noexcept { return std::max(1.0, 1e-8 * K); }

bool is_degenerate(double p, double alpha, double eps) noexcept {
  return p <= 0.0 || p >= 1.0 || std::abs(p - alpha) <= eps;
}

double solve_k_given_lambda(double p, double alpha, double lambda, const KtOptions& opts) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0,1]");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
  if (is_degenerate(p, alpha, opts.degeneracy_eps))
    throw DomainError("degenerate hypothesis (p=" + std::to_string(p) + "): derivative vanishes identically");
  return std::exp(solve_log_k(p, alpha, std::log(lambda), opts).log_k);
}

KtSolution solve_optimal(const PValueSet& p, double K, const KtOptions& opts) {
  if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("budget K must be positive");
  const double alpha = p.alpha();

  KtSolution sol;
  sol.budget = K;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (is_degenerate(p[i], alpha, opts.degeneracy_eps))
      sol.degenerate.push_back(i);
    else
      active.push_back(i);
  }
  if (active.empty()) throw ConfigError("every hypothesis is degenerate; nothing to allocate");

  std::vector<double> k(p.size(), 0.0);
  long long inner_total = 0;
  // Fills k for the active set and returns its sum.
  auto total_at = [&](double log_lambda) {
    double sum = 0.0;
    for (std::size_t i : active) {
      const InnerResult r = solve_log_k(p[i], alpha, log_lambda, opts);
      inner_total += r.iterations;
      k[i] = std::exp(r.log_k);
      sum += k[i];
    }
    return sum;
  };

  // Bracket log lambda. Total budget decreases as lambda grows.
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i : active) hi = std::max(hi, log_neg_dh_dk(p[i], alpha, K));
  double step = 1.0;
  double lo = hi;
  while (total_at(hi) > K) {
    lo = hi;
    hi += step;
    step *= 2.0;
  }
  step = 1.0;
  while (total_at(lo) < K) {
    hi = lo;
    lo -= step;
    step *= 2.0;
  }

  const double target_tol = 1e-12 * K;
  double log_lambda = 0.5 * (lo + hi);
  double sum = 0.0;
  int outer = 0;
  while (outer < opts.max_outer_iterations) {
    ++outer;
    log_lambda = 0.5 * (lo + hi);
    sum = total_at(log_lambda);
    if (std::abs(sum - K) <= target_tol) break;
    if (sum > K)
      lo = log_lambda;
    else
      hi = log_lambda;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(log_lambda))) break;
  }
  if (std::abs(sum - K) > budget_tolerance(K))
    throw ConvergenceError("outer bisection on lambda did not meet the budget", std::abs(sum - K));

  const double lambda = std::exp(log_lambda);
  double residual = 0.0;
  for (std::size_t i : active)
    residual = std::max(residual, std::abs(std::expm1(log_neg_dh_dk(p[i], alpha, k[i]) - log_lambda)));

  sol.allocation = Allocation::continuous(std::move(k));
  sol.lambda_star = lambda;
  sol.stationarity_residual = residual;
  sol.iterations_outer = outer;
  sol.iterations_inner_total = inner_total;
  return sol;
}

std::vector<std::int64_t> round_allocation(std::span<const double> budgets, std::int64_t total) {
  if (total < 0) throw ConfigError("rounding target must be non-negative");
  const std::size_t m = budgets.size();
  std::vector<std::int64_t> out(m);
  std::vector<double> rem(m);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double fl = std::floor(budgets[i]);
    out[i] = static_cast<std::int64_t>(fl);
    rem[i] = budgets[i] - fl;
    assigned += out[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  if (assigned < total) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::int64_t extra = total - assigned, n = 0; n < extra; ++n) ++out[order[static_cast<std::size_t>(n) % m]];
  } else if (assigned > total) {
    // Floors already overshoot: take back from the smallest remainders.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] < rem[b]; });
    std::int64_t excess = assigned - total;
    for (std::size_t n = 0; excess > 0; n = (n + 1) % m) {
      if (out[order[n]] > 0) {
        --out[order[n]];
        --excess;
      }
    }
  }
  return out;
}

}  // namespace mcalloc

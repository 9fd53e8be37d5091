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
#include <vector>

#include "core/hypotheses.hpp"
#include "core/misclassification.hpp"

namespace mcalloc {

struct KtOptions {
  // |p - alpha| at or below this has a vanishing derivative; such hypotheses
  // are left out of the stationarity system.
  double degeneracy_eps = 1e-12;
  // Relative: |dh_dk(k_i) + lambda| <= tol * lambda.
  double stationarity_tol = 1e-9;
  int max_outer_iterations = 200;
  int max_inner_iterations = 200;
};

/// Continuous minimiser of h subject to sum k_i = K.
struct KtSolution {
  Allocation allocation = Allocation::continuous({});
  double budget = 0.0;
  double lambda_star = 0.0;
  // max over active i of |dh_dk(p_i, alpha, k_i) + lambda*| / lambda*.
  double stationarity_residual = 0.0;
  int iterations_outer = 0;
  long long iterations_inner_total = 0;
  // Excluded from the system and given budget 0.
  std::vector<std::size_t> degenerate;
};

/// max(1, 1e-8 K).
double budget_tolerance(double K) noexcept;

bool is_degenerate(double p, double alpha, double eps) noexcept;

/// Unique k > 0 with dh_dk(p, alpha, k) = -lambda, by bracketing and bisection
/// in log k. Throws DomainError for a degenerate hypothesis.
double solve_k_given_lambda(double p, double alpha, double lambda, const KtOptions& opts = {});

/// Outer bisection on lambda so that the inner solutions sum to K.
/// Throws ConfigError for K <= 0 or when every hypothesis is degenerate, and
/// ConvergenceError when either search fails within its iteration cap.
KtSolution solve_optimal(const PValueSet& p, double K, const KtOptions& opts = {});

/// Largest-remainder rounding of continuous budgets to integers summing to `total`.
/// Ties go to the lower index.
std::vector<std::int64_t> round_allocation(std::span<const double> budgets, std::int64_t total);

}  // namespace mcalloc

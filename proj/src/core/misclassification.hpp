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

namespace mcalloc {

enum class AllocationMode { continuous, discrete };

/// Per-hypothesis sample budgets. Discrete allocations hold exact integers.
class Allocation {
 public:
  static Allocation continuous(std::vector<double> budgets);
  static Allocation discrete(std::vector<std::int64_t> budgets);

  AllocationMode mode() const noexcept { return mode_; }
  bool is_discrete() const noexcept { return mode_ == AllocationMode::discrete; }
  std::span<const double> budgets() const noexcept { return budgets_; }
  std::size_t size() const noexcept { return budgets_.size(); }
  double operator[](std::size_t i) const noexcept { return budgets_[i]; }
  double total() const noexcept;

  /// Integer budgets; throws ConfigError for a continuous allocation.
  std::vector<std::int64_t> counts() const;

 private:
  Allocation(std::vector<double> budgets, AllocationMode mode);

  std::vector<double> budgets_;
  AllocationMode mode_;
};

/// Expected misclassification count and its per-hypothesis terms.
struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> per_hypothesis;
  // Hypotheses evaluated through a limiting convention rather than the formula.
  std::vector<std::size_t> flagged;
};

// Rejection rules shared by every module. Products alpha * k that are within
// 1e-9 of an integer are snapped to it, so alpha = 1/5000 and k = 5000 give 1.

/// Largest exceedance count s with s <= alpha * k.
std::int64_t max_rejecting_count(double alpha, std::int64_t k) noexcept;

/// S/k <= alpha. With k = 0 the estimate is taken to be 0, i.e. rejection.
bool raw_estimate_rejects(std::int64_t s, std::int64_t k, double alpha) noexcept;

/// (S+1)/(k+1) <= alpha.
bool plus_one_estimate_rejects(std::int64_t s, std::int64_t k, double alpha) noexcept;

/// Smallest k at which one exceedance still rejects, ceil(1/alpha).
std::int64_t jump_length(double alpha);

/// P(M_i | k) under exact Binomial(k, p) sampling and the raw estimator.
/// k = 0 follows the zero-sample convention: 0 if p <= alpha, else 1.
double g_i(double p, double alpha, std::int64_t k);

/// Sum of g_i over a discrete allocation.
ObjectiveValue g(const PValueSet& p, const Allocation& k);

/// Normal approximation of g_i. Returns 0 for p in {0,1} (zero variance) and
/// the k -> 0+ limit 0.5 for k = 0.
double h_i(double p, double alpha, double k);

/// Sum of h_i; accepts either allocation mode. Indices with p in {0,1} are flagged.
ObjectiveValue h(const PValueSet& p, const Allocation& k);

/// d h_i / d k = -|p - alpha| / (2 sqrt(k p (1-p))) * phi(z). Zero when p == alpha
/// or p in {0,1}; requires k > 0.
double dh_dk(double p, double alpha, double k);

/// log(-dh_dk) without underflow. -inf on the degenerate cases of dh_dk.
double log_neg_dh_dk(double p, double alpha, double k) noexcept;

}  // namespace mcalloc

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
#include <functional>
#include <span>
#include <vector>

#include "core/error.hpp"
#include "core/hypotheses.hpp"
#include "core/misclassification.hpp"
#include "core/rng.hpp"

namespace mcalloc {

/// Samples drawn (k) and exceedances observed (s) per hypothesis; s_i <= k_i.
struct MonteCarloState {
  std::vector<std::int64_t> k;
  std::vector<std::int64_t> s;

  explicit MonteCarloState(std::size_t m = 0) : k(m, 0), s(m, 0) {}
  std::size_t size() const noexcept { return k.size(); }
};

struct ThompsonConfig {
  std::int64_t total_budget = 0;      // K
  std::int64_t iterations = 1000;     // it
  std::int64_t posterior_draws = 100; // d
  std::uint64_t seed = 0;
  // Spend one sample per hypothesis before the first iteration.
  bool warm_up = false;
  unsigned threads = 1;

  void validate(std::size_t m) const;
};

/// Source of exceedance counts. `draw` returns how many of n fresh samples for
/// hypothesis i exceed the observed statistic. The generator passed in is the
/// hypothesis' own sub-stream for the current iteration.
class SamplingOracle {
 public:
  virtual ~SamplingOracle() = default;
  virtual std::size_t size() const = 0;
  virtual std::int64_t draw(std::size_t index, std::int64_t n, Rng& rng) = 0;
};

/// Simulation mode: Binomial(n, p_i) from the known p-values.
class SimulatedOracle final : public SamplingOracle {
 public:
  explicit SimulatedOracle(const PValueSet& p) : p_(p) {}
  std::size_t size() const override { return p_.size(); }
  std::int64_t draw(std::size_t index, std::int64_t n, Rng& rng) override { return rng.binomial(n, p_[index]); }

 private:
  const PValueSet& p_;
};

/// Adapts any callable (index, n, rng) -> exceedances.
class FunctionOracle final : public SamplingOracle {
 public:
  using Fn = std::function<std::int64_t(std::size_t, std::int64_t, Rng&)>;
  FunctionOracle(std::size_t m, Fn fn) : m_(m), fn_(std::move(fn)) {}
  std::size_t size() const override { return m_; }
  std::int64_t draw(std::size_t index, std::int64_t n, Rng& rng) override { return fn_(index, n, rng); }

 private:
  std::size_t m_;
  Fn fn_;
};

/// Thrown when the oracle fails or returns an impossible count. Carries the
/// state accumulated up to the failing query.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, MonteCarloState partial)
      : Error(ErrorKind::oracle, what), partial_(std::move(partial)) {}
  const MonteCarloState& partial_state() const noexcept { return partial_; }

 private:
  MonteCarloState partial_;
};

/// One draw from the Beta(s + 1, k - s + 1) posterior under a flat prior.
double posterior_draw(std::int64_t k, std::int64_t s, Rng& rng);

/// w_i = min(q_i, 1 - q_i), q_i the fraction of d posterior draws <= alpha.
/// Hypothesis i uses the (seed, posterior, i, iteration) sub-stream.
std::vector<double> instability_weights(const MonteCarloState& state, double alpha, std::int64_t d,
                                        std::uint64_t seed, std::uint64_t iteration, unsigned threads = 1);

/// Splits `batch` proportionally to the weights by largest remainder (ties to
/// the lower index); uniform split when all weights are zero.
std::vector<std::int64_t> allocate_batch(std::span<const double> weights, std::int64_t batch);

struct ThompsonResult {
  Allocation allocation = Allocation::discrete({});
  // Rejects iff (S + 1) / (k + 1) <= alpha.
  Classification classification;
  // Rejects iff S / k <= alpha.
  Classification classification_raw;
  MonteCarloState state;
  // Instability weights averaged over iterations.
  std::vector<double> mean_weights;
  ThompsonConfig config;
};

/// Adaptive allocation of K samples over `it` iterations without access to the
/// true p-values. Every iteration spends floor(K'/it) samples (K' = K minus any
/// warm-up), the last one also the remainder, so sum k_i == K exactly.
ThompsonResult run_thompson(SamplingOracle& oracle, double alpha, const ThompsonConfig& cfg);

}  // namespace mcalloc

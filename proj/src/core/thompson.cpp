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

#include "core/thompson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "core/parallel.hpp"

namespace mcalloc {

namespace {

// Binomial(n, q) by inversion from zero; q <= 0.5.
std::int64_t binomial_by_inversion(std::int64_t n, double q, Rng& rng) {
  double pmf = std::exp(static_cast<double>(n) * std::log1p(-q));
  if (!(pmf > 1e-300)) return rng.binomial(n, q);
  const double odds = q / (1.0 - q);
  double u = rng.uniform();
  std::int64_t x = 0;
  while (u > pmf && x < n) {
    u -= pmf;
    pmf *= odds * static_cast<double>(n - x) / static_cast<double>(x + 1);
    ++x;
  }
  return x;
}

}  // namespace

void ThompsonConfig::validate(std::size_t m) const {
  if (total_budget < 1) throw ConfigError("K must be positive");
  if (iterations < 1) throw ConfigError("it must be positive");
  if (posterior_draws < 1) throw ConfigError("d must be positive");
  const std::int64_t reserve = warm_up ? static_cast<std::int64_t>(m) : 0;
  if (iterations > total_budget - reserve)
    throw ConfigError("it must not exceed the budget left after warm-up (" + std::to_string(total_budget - reserve) +
                      ")");
}

double posterior_draw(std::int64_t k, std::int64_t s, Rng& rng) {
  if (s < 0 || s > k) throw DomainError("posterior requires 0 <= s <= k");
  return rng.beta(static_cast<double>(s + 1), static_cast<double>(k - s + 1));
}

std::vector<double> instability_weights(const MonteCarloState& state, double alpha, std::int64_t d,
                                        std::uint64_t seed, std::uint64_t iteration, unsigned threads) {
  if (d < 1) throw ConfigError("d must be positive");
  const std::size_t m = state.size();
  std::vector<double> w(m);
  parallel_for(m, threads, [&](std::size_t i) {
    // The number of d posterior draws at or below alpha is Binomial(d, F)
    // with F the posterior mass below alpha; sample that count directly.
    const double mass = boost::math::ibeta(static_cast<double>(state.s[i] + 1),
                                           static_cast<double>(state.k[i] - state.s[i] + 1), alpha);
    Rng rng = Rng::substream(seed, StreamTag::posterior, i, iteration);
    const std::int64_t below =
        mass <= 0.5 ? binomial_by_inversion(d, mass, rng) : d - binomial_by_inversion(d, 1.0 - mass, rng);
    const double q = static_cast<double>(below) / static_cast<double>(d);
    w[i] = std::min(q, 1.0 - q);
  });
  return w;
}

std::vector<std::int64_t> allocate_batch(std::span<const double> weights, std::int64_t batch) {
  if (batch < 0) throw ConfigError("batch must be non-negative");
  const std::size_t m = weights.size();
  std::vector<std::int64_t> out(m, 0);
  if (m == 0 || batch == 0) return out;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("weights must be finite and non-negative");
    total += w;
  }
  std::vector<double> rem(m);
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double quota = total > 0.0 ? static_cast<double>(batch) * (weights[i] / total)
                                     : static_cast<double>(batch) / static_cast<double>(m);
    const double fl = std::floor(quota);
    out[i] = static_cast<std::int64_t>(fl);
    rem[i] = quota - fl;
    assigned += out[i];
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  // Rounding of the quotas can leave the floors a unit above or below batch.
  for (std::size_t n = 0; assigned < batch; n = (n + 1) % m) {
    ++out[order[n]];
    ++assigned;
  }
  for (std::size_t n = m; assigned > batch;) {
    n = (n == 0 ? m : n) - 1;
    if (out[order[n]] > 0) {
      --out[order[n]];
      --assigned;
    }
  }
  return out;
}

ThompsonResult run_thompson(SamplingOracle& oracle, double alpha, const ThompsonConfig& cfg) {
  const std::size_t m = oracle.size();
  if (m == 0) throw ConfigError("oracle serves no hypotheses");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  cfg.validate(m);

  MonteCarloState state(m);
  auto query = [&](std::size_t i, std::int64_t n, std::uint64_t round) {
    Rng rng = Rng::substream(cfg.seed, StreamTag::oracle, i, round);
    std::int64_t s = 0;
    try {
      s = oracle.draw(i, n, rng);
    } catch (const std::exception& e) {
      throw OracleError("oracle failed for hypothesis " + std::to_string(i + 1) + ": " + e.what(), state);
    }
    if (s < 0 || s > n)
      throw OracleError("oracle returned " + std::to_string(s) + " exceedances for " + std::to_string(n) +
                            " samples at hypothesis " + std::to_string(i + 1),
                        state);
    state.k[i] += n;
    state.s[i] += s;
  };

  std::int64_t remaining = cfg.total_budget;
  if (cfg.warm_up) {
    for (std::size_t i = 0; i < m; ++i) query(i, 1, 0);
    remaining -= static_cast<std::int64_t>(m);
  }

  std::vector<double> mean_w(m, 0.0);
  const std::int64_t base = remaining / cfg.iterations;
  for (std::int64_t t = 0; t < cfg.iterations; ++t) {
    const std::int64_t batch = t + 1 == cfg.iterations ? remaining - base * (cfg.iterations - 1) : base;
    const auto w = instability_weights(state, alpha, cfg.posterior_draws, cfg.seed, static_cast<std::uint64_t>(t),
                                       cfg.threads);
    for (std::size_t i = 0; i < m; ++i) mean_w[i] += w[i];
    const auto share = allocate_batch(w, batch);
    for (std::size_t i = 0; i < m; ++i)
      if (share[i] > 0) query(i, share[i], static_cast<std::uint64_t>(t) + 1);
  }
  for (double& w : mean_w) w /= static_cast<double>(cfg.iterations);

  ThompsonResult res;
  for (std::size_t i = 0; i < m; ++i) {
    if (plus_one_estimate_rejects(state.s[i], state.k[i], alpha)) res.classification.rejected.push_back(i);
    if (raw_estimate_rejects(state.s[i], state.k[i], alpha)) res.classification_raw.rejected.push_back(i);
  }
  res.allocation = Allocation::discrete(state.k);
  res.state = std::move(state);
  res.mean_weights = std::move(mean_w);
  res.config = cfg;
  return res;
}

}  // namespace mcalloc

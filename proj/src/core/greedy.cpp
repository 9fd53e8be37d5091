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

#include "core/greedy.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "core/error.hpp"

namespace mcalloc {

namespace {

// Smallest n with max_rejecting_count(alpha, n) >= limit.
std::int64_t first_sample_count_with_limit(double alpha, std::int64_t limit) {
  auto n = static_cast<std::int64_t>(std::ceil(static_cast<double>(limit) / alpha - 1e-9));
  if (n < 0) n = 0;
  while (n > 0 && max_rejecting_count(alpha, n - 1) >= limit) --n;
  while (max_rejecting_count(alpha, n) < limit) ++n;
  return n;
}

BatchProposal search_above(double p, double alpha, std::int64_t k, std::int64_t horizon) {
  const double gk = g_i(p, alpha, k);
  if (gk == 0.0) return {1, 0.0};
  // Bisection inside each plateau of constant rejection limit.
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t lo = k + 1;
  const std::int64_t last = horizon > kMax - k ? kMax : k + horizon;
  while (lo <= last) {
    const std::int64_t limit = max_rejecting_count(alpha, lo);
    const std::int64_t hi = std::min(first_sample_count_with_limit(alpha, limit + 1) - 1, last);
    const double g_lo = g_i(p, alpha, lo);
    if (g_lo < gk) return {lo - k, g_lo - gk};
    if (g_i(p, alpha, hi) < gk) {
      std::int64_t a = lo, b = hi;  // g(a) >= gk > g(b)
      while (b - a > 1) {
        const std::int64_t mid = a + (b - a) / 2;
        if (g_i(p, alpha, mid) < gk)
          b = mid;
        else
          a = mid;
      }
      return {b - k, g_i(p, alpha, b) - gk};
    }
    lo = hi + 1;
  }
  return {1, 0.0};
}

struct Candidate {
  double score;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    if (score != o.score) return score > o.score;
    return index < o.index;
  }
};

}  // namespace

BatchProposal batch_proposal(double p, double alpha, std::int64_t k, std::int64_t jump, std::int64_t horizon) {
  if (k < 0) throw DomainError("sample count must be non-negative");
  if (jump < 1) throw DomainError("jump must be positive");
  if (horizon < 1) throw DomainError("horizon must be positive");
  if (truly_rejected(p, alpha)) {
    const std::int64_t b = k < jump ? jump - k : jump;
    return {b, g_i(p, alpha, k + b) - g_i(p, alpha, k)};
  }
  return search_above(p, alpha, k, horizon);
}

std::optional<std::size_t> choose_next(std::span<const double> d, std::span<const std::int64_t> b,
                                       bool literal_argmax) {
  if (d.size() != b.size()) throw ConfigError("delta and batch lists differ in length");
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (b[i] <= 0) continue;
    if (!literal_argmax && !(d[i] < 0.0)) continue;
    const double ratio = d[i] / static_cast<double>(b[i]);
    const double score = literal_argmax ? ratio : -ratio;
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

GreedyResult greedy_allocate(const PValueSet& p, std::int64_t K, const GreedyOptions& opts) {
  const std::size_t m = p.size();
  const double alpha = p.alpha();
  const std::int64_t jump = jump_length(alpha);

  std::vector<std::int64_t> k(m, 0);
  std::int64_t spent = 0;
  double objective = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    k[i] = truly_rejected(p[i], alpha) ? 1 : 0;
    spent += k[i];
    objective += g_i(p[i], alpha, k[i]);
  }
  if (K < spent)
    throw InfeasibleError("budget " + std::to_string(K) + " is below the " + std::to_string(spent) +
                              " samples needed to initialise every rejected hypothesis",
                          spent);

  GreedyResult res;
  res.budget = K;
  res.jump = jump;
  res.literal_argmax = opts.literal_argmax;
  if (opts.record_trace) res.objective_trace.push_back(objective);

  std::vector<BatchProposal> prop(m);
  std::set<Candidate> queue;
  auto propose = [&](std::size_t i) {
    prop[i] = batch_proposal(p[i], alpha, k[i], jump, K);
    const double ratio = prop[i].delta / static_cast<double>(prop[i].batch);
    if (opts.literal_argmax)
      queue.insert({ratio, i});
    else if (prop[i].delta < 0.0)
      queue.insert({-ratio, i});
  };
  auto withdraw = [&](std::size_t i) {
    const double ratio = prop[i].delta / static_cast<double>(prop[i].batch);
    queue.erase({opts.literal_argmax ? ratio : -ratio, i});
  };
  for (std::size_t i = 0; i < m; ++i) propose(i);

  for (;;) {
    if (queue.empty()) {
      res.saturated = true;
      break;
    }
    const std::size_t j = queue.begin()->index;
    if (!(spent + prop[j].batch < K)) break;
    k[j] += prop[j].batch;
    spent += prop[j].batch;
    objective += prop[j].delta;
    ++res.iterations;
    if (opts.record_trace) {
      res.objective_trace.push_back(objective);
      res.chosen.push_back(j);
    }
    withdraw(j);
    propose(j);
  }

  res.unspent_budget = K - spent;
  res.allocation = Allocation::discrete(std::move(k));
  res.objective = g(p, res.allocation).value;
  return res;
}

}  // namespace mcalloc

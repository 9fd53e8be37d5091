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
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "core/hypotheses.hpp"
#include "core/misclassification.hpp"

namespace mcalloc {

struct BatchProposal {
  std::int64_t batch = 0;  // b_i
  double delta = 0.0;      // d_i = g_i(k + b) - g_i(k)
};

/// Proposed next batch for one hypothesis.
///  p > alpha:  smallest z >= 1 with g_i(k + z) < g_i(k); delta = 0 when none exists.
///  p <= alpha: jump - k while k < jump (jump - 1 from the initial k = 1), else jump.
// For p > alpha the search for an improving batch stops after horizon samples;
// delta is then 0.
BatchProposal batch_proposal(double p, double alpha, std::int64_t k, std::int64_t jump,
                             std::int64_t horizon = std::numeric_limits<std::int64_t>::max());

/// Index maximising the benefit per sample -d_i / b_i over i with d_i < 0,
/// lowest index on ties. With `literal_argmax` the raw d_i / b_i is maximised
/// over every i instead. std::nullopt when nothing qualifies.
std::optional<std::size_t> choose_next(std::span<const double> d, std::span<const std::int64_t> b,
                                       bool literal_argmax = false);

struct GreedyOptions {
  bool literal_argmax = false;
  bool record_trace = false;
};

struct GreedyResult {
  Allocation allocation = Allocation::discrete({});
  std::int64_t budget = 0;
  std::int64_t iterations = 0;
  std::int64_t unspent_budget = 0;
  std::int64_t jump = 0;
  bool literal_argmax = false;
  // Stopped because no hypothesis could improve any more.
  bool saturated = false;
  double objective = 0.0;
  // g after initialisation and after every accepted batch, when recorded.
  std::vector<double> objective_trace;
  std::vector<std::size_t> chosen;
};

/// Batch-wise greedy fill of an integer allocation. Starts from one sample per
/// truly rejected hypothesis and accepts the best batch while sum k + b_j < K.
/// Throws InfeasibleError when K is below that starting total.
GreedyResult greedy_allocate(const PValueSet& p, std::int64_t K, const GreedyOptions& opts = {});

}  // namespace mcalloc

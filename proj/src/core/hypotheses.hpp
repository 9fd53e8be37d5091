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

namespace mcalloc {

/// Ideal p-values of m hypotheses together with the Bonferroni threshold.
/// Immutable once constructed.
class PValueSet {
 public:
  /// Throws ConfigError unless m >= 1, every value is in [0, 1] and alpha is in (0, 1).
  PValueSet(std::vector<double> values, double alpha);

  std::span<const double> values() const noexcept { return values_; }
  double alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
  double alpha_;
};

/// Zero-based indices of rejected hypotheses, ascending.
struct Classification {
  std::vector<std::size_t> rejected;

  bool contains(std::size_t i) const;
};

inline bool truly_rejected(double p, double alpha) noexcept { return p <= alpha; }

/// { i : p_i <= alpha }. The boundary p_i == alpha is rejected.
Classification bonferroni(const PValueSet& p);

/// alpha = alpha_star / m. Throws ConfigError if the result leaves (0, 1).
double bonferroni_threshold(double alpha_star, std::size_t m);

/// Uniform/Beta mixture of p-values: round(pi0 * m) nulls drawn Uniform[0,1],
/// the rest Beta(beta_shape1, beta_shape2).
struct MixtureConfig {
  std::size_t m = 500;
  double pi0 = 0.5;
  double beta_shape1 = 0.25;
  double beta_shape2 = 25.0;
  std::uint64_t seed = 0;
  bool sort_output = true;

  void validate() const;
  std::size_t null_count() const;
};

/// Hypothesis i draws from its own sub-stream, so the first n values do not
/// depend on m. Unsorted output lists the nulls first.
PValueSet generate_mixture(const MixtureConfig& cfg, double alpha);

}  // namespace mcalloc

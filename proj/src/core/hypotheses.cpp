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

#include "core/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace mcalloc {

PValueSet::PValueSet(std::vector<double> values, double alpha) : values_(std::move(values)), alpha_(alpha) {
  if (values_.empty()) throw ConfigError("p-value set must contain at least one hypothesis");
  if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw ConfigError("alpha must lie in (0,1), got " + std::to_string(alpha_));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0))
      throw ConfigError("p-value at index " + std::to_string(i + 1) + " is outside [0,1]");
  }
}

bool Classification::contains(std::size_t i) const {
  return std::binary_search(rejected.begin(), rejected.end(), i);
}

Classification bonferroni(const PValueSet& p) {
  Classification out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (truly_rejected(p[i], p.alpha())) out.rejected.push_back(i);
  return out;
}

double bonferroni_threshold(double alpha_star, std::size_t m) {
  if (m == 0) throw ConfigError("m must be positive");
  if (!(alpha_star > 0.0 && alpha_star < 1.0)) throw ConfigError("alpha_star must lie in (0,1)");
  const double alpha = alpha_star / static_cast<double>(m);
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha_star / m must lie in (0,1)");
  return alpha;
}

void MixtureConfig::validate() const {
  if (m == 0) throw ConfigError("m must be positive");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw ConfigError("pi0 must lie in [0,1]");
  if (!(beta_shape1 > 0.0) || !std::isfinite(beta_shape1)) throw ConfigError("beta_shape1 must be positive");
  if (!(beta_shape2 > 0.0) || !std::isfinite(beta_shape2)) throw ConfigError("beta_shape2 must be positive");
}

std::size_t MixtureConfig::null_count() const {
  return static_cast<std::size_t>(std::llround(pi0 * static_cast<double>(m)));
}

PValueSet generate_mixture(const MixtureConfig& cfg, double alpha) {
  cfg.validate();
  const std::size_t nulls = cfg.null_count();
  std::vector<double> values(cfg.m);
  for (std::size_t i = 0; i < cfg.m; ++i) {
    Rng rng = Rng::substream(cfg.seed, StreamTag::mixture, i);
    values[i] = i < nulls ? rng.uniform() : rng.beta(cfg.beta_shape1, cfg.beta_shape2);
  }
  if (cfg.sort_output) std::sort(values.begin(), values.end());
  return PValueSet(std::move(values), alpha);
}

}  // namespace mcalloc

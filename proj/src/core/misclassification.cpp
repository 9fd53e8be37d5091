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

#include "core/misclassification.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "core/error.hpp"

namespace mcalloc {

namespace {

constexpr double kIntegerSnap = 1e-9;

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

void check_sizes(const PValueSet& p, const Allocation& k) {
  if (p.size() != k.size())
    throw ConfigError("allocation has " + std::to_string(k.size()) + " budgets for " + std::to_string(p.size()) +
                      " hypotheses");
}

}  // namespace

Allocation::Allocation(std::vector<double> budgets, AllocationMode mode) : budgets_(std::move(budgets)), mode_(mode) {
  for (double b : budgets_)
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("allocation budgets must be finite and non-negative");
}

Allocation Allocation::continuous(std::vector<double> budgets) {
  return Allocation(std::move(budgets), AllocationMode::continuous);
}

Allocation Allocation::discrete(std::vector<std::int64_t> budgets) {
  std::vector<double> b(budgets.begin(), budgets.end());
  return Allocation(std::move(b), AllocationMode::discrete);
}

double Allocation::total() const noexcept {
  double sum = 0.0;
  for (double b : budgets_) sum += b;
  return sum;
}

std::vector<std::int64_t> Allocation::counts() const {
  if (mode_ != AllocationMode::discrete)
    throw ConfigError("continuous allocation given where integer budgets are required; round it first");
  std::vector<std::int64_t> out(budgets_.size());
  for (std::size_t i = 0; i < budgets_.size(); ++i) out[i] = static_cast<std::int64_t>(budgets_[i]);
  return out;
}

std::int64_t max_rejecting_count(double alpha, std::int64_t k) noexcept {
  return static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(k) + kIntegerSnap));
}

bool raw_estimate_rejects(std::int64_t s, std::int64_t k, double alpha) noexcept {
  if (k == 0) return true;
  return s <= max_rejecting_count(alpha, k);
}

bool plus_one_estimate_rejects(std::int64_t s, std::int64_t k, double alpha) noexcept {
  return s + 1 <= max_rejecting_count(alpha, k + 1);
}

std::int64_t jump_length(double alpha) {
  check_alpha(alpha);
  auto jump = static_cast<std::int64_t>(std::ceil(1.0 / alpha - kIntegerSnap));
  // Keep consistent with max_rejecting_count at the boundary.
  while (jump > 1 && max_rejecting_count(alpha, jump - 1) >= 1) --jump;
  while (max_rejecting_count(alpha, jump) < 1) ++jump;
  return jump;
}

double g_i(double p, double alpha, std::int64_t k) {
  check_probability(p, "p");
  check_alpha(alpha);
  if (k < 0) throw DomainError("sample count must be non-negative");
  const bool below = truly_rejected(p, alpha);
  if (k == 0) return below ? 0.0 : 1.0;

  const std::int64_t c = max_rejecting_count(alpha, k);
  if (c >= k) return below ? 0.0 : 1.0;  // every outcome rejects
  const double a = static_cast<double>(c + 1);
  const double b = static_cast<double>(k - c);
  if (below) {
    if (p == 0.0) return 0.0;
    return boost::math::ibeta(a, b, p);  // P(S > c)
  }
  if (p == 1.0) return 0.0;
  return boost::math::ibetac(a, b, p);  // P(S <= c)
}

ObjectiveValue g(const PValueSet& p, const Allocation& k) {
  check_sizes(p, k);
  const auto counts = k.counts();
  ObjectiveValue out;
  out.per_hypothesis.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.per_hypothesis[i] = g_i(p[i], p.alpha(), counts[i]);
    out.value += out.per_hypothesis[i];
  }
  return out;
}

double h_i(double p, double alpha, double k) {
  check_probability(p, "p");
  check_alpha(alpha);
  if (!(k >= 0.0)) throw DomainError("sample budget must be non-negative");
  if (p == 0.0 || p == 1.0) return 0.0;
  if (k == 0.0) return 0.5;
  // 1 - Phi(z) for p <= alpha (z >= 0) and Phi(z) for p > alpha (z < 0) are
  // both the upper tail at |z|.
  const double z = std::sqrt(k) * (alpha - p) / std::sqrt(p * (1.0 - p));
  return 0.5 * std::erfc(std::abs(z) / std::numbers::sqrt2);
}

ObjectiveValue h(const PValueSet& p, const Allocation& k) {
  check_sizes(p, k);
  ObjectiveValue out;
  out.per_hypothesis.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0 || p[i] == 1.0) out.flagged.push_back(i);
    out.per_hypothesis[i] = h_i(p[i], p.alpha(), k[i]);
    out.value += out.per_hypothesis[i];
  }
  return out;
}

double log_neg_dh_dk(double p, double alpha, double k) noexcept {
  const double gap = std::abs(p - alpha);
  if (gap == 0.0 || p <= 0.0 || p >= 1.0 || !(k > 0.0)) return -std::numeric_limits<double>::infinity();
  const double log_var = std::log(p) + std::log1p(-p);
  const double log_k = std::log(k);
  // z^2 = k (alpha - p)^2 / (p (1 - p))
  const double z2 = std::exp(log_k + 2.0 * std::log(gap) - log_var);
  return std::log(gap) - std::numbers::ln2 - 0.5 * (log_k + log_var) - 0.5 * z2 -
         0.5 * std::log(2.0 * std::numbers::pi);
}

double dh_dk(double p, double alpha, double k) {
  check_probability(p, "p");
  check_alpha(alpha);
  if (!(k > 0.0)) throw DomainError("derivative requires a positive sample budget");
  return -std::exp(log_neg_dh_dk(p, alpha, k));
}

}  // namespace mcalloc

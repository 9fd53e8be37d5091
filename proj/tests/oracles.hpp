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

// Reference computations used only by the tests. Deliberately naive.

#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <limits>
#include <vector>

namespace oracle {

inline long double binom_log_pmf(std::int64_t k, std::int64_t s, long double p) {
  if (p == 0.0L) return s == 0 ? 0.0L : -std::numeric_limits<long double>::infinity();
  if (p == 1.0L) return s == k ? 0.0L : -std::numeric_limits<long double>::infinity();
  return std::lgamma(static_cast<long double>(k) + 1) - std::lgamma(static_cast<long double>(s) + 1) -
         std::lgamma(static_cast<long double>(k - s) + 1) + s * std::log(p) + (k - s) * std::log1p(-p);
}

// P(S <= c) for S ~ Binomial(k, p) by summing the pmf term by term.
inline double binom_cdf(std::int64_t k, std::int64_t c, double p) {
  if (c < 0) return 0.0;
  if (c >= k) return 1.0;
  long double sum = 0.0L;
  for (std::int64_t s = 0; s <= c; ++s) sum += std::exp(binom_log_pmf(k, s, p));
  return static_cast<double>(sum);
}

inline double binom_sf(std::int64_t k, std::int64_t c, double p) {
  if (c < 0) return 1.0;
  if (c >= k) return 0.0;
  long double sum = 0.0L;
  for (std::int64_t s = c + 1; s <= k; ++s) sum += std::exp(binom_log_pmf(k, s, p));
  return static_cast<double>(sum);
}

// Largest integer c with c <= alpha * k, by counting.
inline std::int64_t max_count(double alpha, std::int64_t k) {
  std::int64_t c = 0;
  while (static_cast<long double>(c + 1) <= static_cast<long double>(alpha) * k + 1e-9L) ++c;
  return c;
}

// Exact misclassification probability of a single hypothesis.
inline double misclass(double p, double alpha, std::int64_t k) {
  if (k == 0) return p <= alpha ? 0.0 : 1.0;
  const std::int64_t c = max_count(alpha, k);
  return p <= alpha ? binom_sf(k, c, p) : binom_cdf(k, c, p);
}

// Upper normal tail by composite Simpson integration of the density.
inline double normal_upper_tail(double x) {
  x = std::fabs(x);
  const double hi = x + 40.0;
  const int n = 200000;
  const double h = (hi - x) / n;
  auto f = [](double t) { return std::exp(-0.5 * t * t); };
  long double sum = f(x) + f(hi);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0L : 2.0L) * f(x + i * h);
  return static_cast<double>(sum * h / 3.0L / std::sqrt(2.0L * 3.14159265358979323846L));
}

// Minimum exact misclassification over all splits k1 + k2 <= K, with at least
// one sample for every p <= alpha.
inline double best_split_two(double p1, double p2, double alpha, std::int64_t K) {
  std::vector<double> g1(K + 1), g2(K + 1);
  for (std::int64_t k = 0; k <= K; ++k) {
    g1[k] = misclass(p1, alpha, k);
    g2[k] = misclass(p2, alpha, k);
  }
  double best = std::numeric_limits<double>::infinity();
  const std::int64_t a0 = p1 <= alpha ? 1 : 0;
  const std::int64_t b0 = p2 <= alpha ? 1 : 0;
  for (std::int64_t a = a0; a <= K; ++a)
    for (std::int64_t b = b0; a + b <= K; ++b) best = std::min(best, g1[a] + g2[b]);
  return best;
}

}  // namespace oracle

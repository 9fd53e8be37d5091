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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include "mcalloc/mcalloc.h"

namespace {

mcalloc_pvalues* mixture(std::size_t m, std::uint64_t seed) {
  mcalloc_mixture_config cfg;
  mcalloc_mixture_config_init(&cfg);
  cfg.m = m;
  cfg.seed = seed;
  mcalloc_pvalues* p = nullptr;
  double alpha = 0.0;
  REQUIRE(mcalloc_alpha_from_star(0.1, m, &alpha) == MCALLOC_OK);
  REQUIRE(mcalloc_pvalues_generate(&cfg, alpha, &p) == MCALLOC_OK);
  return p;
}

}  // namespace

TEST_CASE("identity") {
  CHECK(std::string(mcalloc_version()).size() > 0);
  CHECK(std::string(mcalloc_rng_id()).find("xoshiro") != std::string::npos);
}

TEST_CASE("argument errors map to status codes") {
  mcalloc_pvalues* p = nullptr;
  const double bad[] = {0.1, 1.5};
  CHECK(mcalloc_pvalues_create(bad, 2, 0.05, &p) == MCALLOC_ERR_CONFIG);
  CHECK(p == nullptr);
  CHECK(std::strlen(mcalloc_last_error()) > 0);
  CHECK(mcalloc_pvalues_create(nullptr, 2, 0.05, &p) != MCALLOC_OK);

  mcalloc_mixture_config cfg;
  mcalloc_mixture_config_init(&cfg);
  cfg.pi0 = 1.5;
  CHECK(mcalloc_pvalues_generate(&cfg, 0.01, &p) == MCALLOC_ERR_CONFIG);
  CHECK(std::string(mcalloc_last_error()).find("pi0") != std::string::npos);

  double out = 0.0;
  CHECK(mcalloc_dh_dk(0.1, 0.05, 0.0, &out) == MCALLOC_ERR_DOMAIN);
  CHECK(mcalloc_pvalues_read_csv("/nonexistent/dir/p.csv", 0.1, &p) == MCALLOC_ERR_IO);
}

TEST_CASE("scalar objectives") {
  double g = 0.0, h = 0.0, d = 0.0;
  REQUIRE(mcalloc_g_i(0.5, 0.1, 1, &g) == MCALLOC_OK);
  CHECK(g == doctest::Approx(0.5));
  REQUIRE(mcalloc_h_i(0.3, 0.1, 0.0, &h) == MCALLOC_OK);
  CHECK(h == 0.5);
  REQUIRE(mcalloc_dh_dk(0.02, 0.01, 100.0, &d) == MCALLOC_OK);
  CHECK(d < 0.0);
}

TEST_CASE("allocation strategies through the C API") {
  mcalloc_pvalues* p = mixture(100, 3);
  const double alpha = mcalloc_pvalues_alpha(p);

  mcalloc_allocation* kt = nullptr;
  REQUIRE(mcalloc_kt_solve(p, 1e5, nullptr, &kt) == MCALLOC_OK);
  CHECK(mcalloc_allocation_strategy(kt) == MCALLOC_STRATEGY_KT);
  CHECK_FALSE(mcalloc_allocation_is_discrete(kt));
  CHECK(mcalloc_allocation_total(kt) == doctest::Approx(1e5).epsilon(1e-10));
  mcalloc_kt_info info;
  REQUIRE(mcalloc_allocation_kt_info(kt, &info) == MCALLOC_OK);
  CHECK(info.stationarity_residual <= 1e-9);
  mcalloc_greedy_info ginfo;
  CHECK(mcalloc_allocation_greedy_info(kt, &ginfo) != MCALLOC_OK);

  mcalloc_allocation* rounded = nullptr;
  REQUIRE(mcalloc_allocation_round(kt, 100000, &rounded) == MCALLOC_OK);
  CHECK(mcalloc_allocation_is_discrete(rounded));
  CHECK(mcalloc_allocation_total(rounded) == 100000.0);

  std::vector<std::int64_t> counts(100);
  const double* b = mcalloc_allocation_budgets(rounded);
  for (std::size_t i = 0; i < 100; ++i) counts[i] = static_cast<std::int64_t>(b[i]);
  double gval = 0.0;
  CHECK(mcalloc_objective_g(p, counts.data(), counts.size(), &gval) == MCALLOC_OK);
  CHECK(gval >= 0.0);

  mcalloc_allocation* gr = nullptr;
  REQUIRE(mcalloc_greedy_allocate(p, 50000, 0, &gr) == MCALLOC_OK);
  REQUIRE(mcalloc_allocation_greedy_info(gr, &ginfo) == MCALLOC_OK);
  CHECK(ginfo.jump == static_cast<std::int64_t>(std::ceil(1.0 / alpha - 1e-9)));
  CHECK(mcalloc_allocation_total(gr) + static_cast<double>(ginfo.unspent_budget) == 50000.0);
  CHECK(std::string(mcalloc_allocation_metadata_json(gr)).find("unspent_budget") != std::string::npos);

  mcalloc_allocation* bad = nullptr;
  CHECK(mcalloc_greedy_allocate(p, 1, 0, &bad) == MCALLOC_ERR_INFEASIBLE);
  CHECK(mcalloc_last_minimum_budget() > 1);

  mcalloc_thompson_config tc;
  mcalloc_thompson_config_init(&tc);
  tc.total_budget = 20000;
  tc.iterations = 50;
  tc.posterior_draws = 30;
  tc.seed = 9;
  mcalloc_allocation* th = nullptr;
  REQUIRE(mcalloc_thompson_run_simulated(p, &tc, &th) == MCALLOC_OK);
  CHECK(mcalloc_allocation_total(th) == 20000.0);
  CHECK(mcalloc_allocation_exceedances(th) != nullptr);
  CHECK(mcalloc_allocation_mean_weights(th) != nullptr);

  mcalloc_allocation* c = nullptr;
  REQUIRE(mcalloc_constant_allocate(500, 1000, &c) == MCALLOC_OK);
  const double* cb = mcalloc_allocation_budgets(c);
  for (std::size_t i = 0; i < 500; ++i) CHECK(cb[i] == 2.0);

  for (auto* a : {kt, rounded, gr, th, c}) mcalloc_allocation_destroy(a);
  mcalloc_pvalues_destroy(p);
}

namespace {

struct Bernoulli {
  std::vector<double> p;
};

// Deterministic toy oracle: a linear congruential stream keyed by the seed the library hands out.
int toy_oracle(void* user, std::size_t index, std::int64_t n, std::uint64_t seed, std::int64_t* out) {
  const auto* b = static_cast<const Bernoulli*>(user);
  std::uint64_t x = seed | 1;
  std::int64_t s = 0;
  for (std::int64_t j = 0; j < n; ++j) {
    x = x * 6364136223846793005ULL + 1442695040888963407ULL;
    if (static_cast<double>(x >> 11) * 0x1.0p-53 < b->p[index]) ++s;
  }
  *out = s;
  return 0;
}

int failing_oracle(void*, std::size_t, std::int64_t, std::uint64_t, std::int64_t*) { return 1; }

}  // namespace

TEST_CASE("external oracle") {
  Bernoulli b{{0.001, 0.3, 0.02}};
  mcalloc_thompson_config tc;
  mcalloc_thompson_config_init(&tc);
  tc.total_budget = 3000;
  tc.iterations = 30;
  tc.posterior_draws = 20;
  mcalloc_allocation* a = nullptr;
  REQUIRE(mcalloc_thompson_run(3, 0.01, &tc, toy_oracle, &b, &a) == MCALLOC_OK);
  CHECK(mcalloc_allocation_total(a) == 3000.0);
  mcalloc_allocation* again = nullptr;
  REQUIRE(mcalloc_thompson_run(3, 0.01, &tc, toy_oracle, &b, &again) == MCALLOC_OK);
  for (std::size_t i = 0; i < 3; ++i) CHECK(mcalloc_allocation_budgets(a)[i] == mcalloc_allocation_budgets(again)[i]);
  mcalloc_allocation_destroy(a);
  mcalloc_allocation_destroy(again);

  mcalloc_allocation* failed = nullptr;
  CHECK(mcalloc_thompson_run(3, 0.01, &tc, failing_oracle, nullptr, &failed) == MCALLOC_ERR_ORACLE);
  CHECK(failed == nullptr);
}

TEST_CASE("reports") {
  mcalloc_pvalues* p = mixture(40, 1);
  mcalloc_protocol_config cfg;
  mcalloc_protocol_config_init(&cfg);
  cfg.repetitions = 3;
  cfg.iterations = 10;
  cfg.posterior_draws = 10;
  mcalloc_report* r = nullptr;
  REQUIRE(mcalloc_table1(p, 10000, &cfg, &r) == MCALLOC_OK);
  REQUIRE(mcalloc_report_count(r) == 3);
  CHECK(std::string(mcalloc_report_strategy_name(r, 0)) == "optimal_kt");
  CHECK(std::string(mcalloc_report_json(r, 1)).find("\"thompson\"") != std::string::npos);
  CHECK(mcalloc_report_set_allocation_file(r, 0, "kt.csv") == MCALLOC_OK);
  CHECK(std::string(mcalloc_report_json(r, 0)).find("kt.csv") != std::string::npos);
  mcalloc_report_destroy(r);

  std::vector<std::int64_t> runs(5);
  mcalloc_allocation* c = nullptr;
  REQUIRE(mcalloc_constant_allocate(40, 400, &c) == MCALLOC_OK);
  REQUIRE(mcalloc_empirical_misclassifications(p, c, 5, 2, MCALLOC_ESTIMATOR_PLUS_ONE, 1, runs.data()) == MCALLOC_OK);
  for (auto x : runs) CHECK((x >= 0 && x <= 40));
  mcalloc_allocation_destroy(c);
  mcalloc_pvalues_destroy(p);
}

TEST_CASE("grid and profile helpers") {
  std::vector<std::int64_t> grid(25);
  std::size_t n = 0;
  REQUIRE(mcalloc_log_grid(10000, 1000000, 25, grid.data(), &n) == MCALLOC_OK);
  CHECK(n == 25);
  CHECK(grid[24] == 1000000);
  std::vector<double> g(101);
  REQUIRE(mcalloc_profile_g(0.3 / 50, 1.0 / 50, 100, g.data()) == MCALLOC_OK);
  CHECK(g[0] == 0.0);
  CHECK(g[50] < g[49]);
}

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

#include "mcalloc/mcalloc.h"

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/greedy.hpp"
#include "core/hypotheses.hpp"
#include "core/io.hpp"
#include "core/kt_solver.hpp"
#include "core/misclassification.hpp"
#include "core/rng.hpp"
#include "core/thompson.hpp"

struct mcalloc_pvalues {
  mcalloc::PValueSet set;
};

struct mcalloc_allocation {
  mcalloc_strategy strategy = MCALLOC_STRATEGY_EXTERNAL;
  mcalloc::Allocation alloc = mcalloc::Allocation::discrete({});
  std::optional<mcalloc::KtSolution> kt;
  std::optional<mcalloc::GreedyResult> greedy;
  std::optional<mcalloc::ThompsonResult> thompson;
  std::string metadata;
};

struct mcalloc_report {
  std::vector<mcalloc::MisclassificationReport> reports;
  std::vector<std::unique_ptr<mcalloc_allocation>> allocations;
  std::vector<std::string> json;
};

namespace {

using mcalloc::Error;
using mcalloc::ErrorKind;

thread_local std::string g_last_error;
thread_local int64_t g_last_minimum_budget = 0;

mcalloc_status fail(mcalloc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class Fn>
mcalloc_status guarded(Fn&& fn) {
  try {
    fn();
    return MCALLOC_OK;
  } catch (const mcalloc::InfeasibleError& e) {
    g_last_minimum_budget = e.minimum_budget();
    return fail(MCALLOC_ERR_INFEASIBLE, e.what());
  } catch (const Error& e) {
    return fail(static_cast<mcalloc_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::exception& e) {
    return fail(MCALLOC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MCALLOC_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw mcalloc::ConfigError(what);
}

mcalloc::KtOptions to_options(const mcalloc_kt_options* o) {
  mcalloc::KtOptions opts;
  if (o) {
    opts.degeneracy_eps = o->degeneracy_eps;
    opts.stationarity_tol = o->stationarity_tol;
    opts.max_outer_iterations = o->max_outer_iterations;
    opts.max_inner_iterations = o->max_inner_iterations;
  }
  return opts;
}

mcalloc::ThompsonConfig to_config(const mcalloc_thompson_config* c) {
  mcalloc::ThompsonConfig cfg;
  cfg.total_budget = c->total_budget;
  cfg.iterations = c->iterations;
  cfg.posterior_draws = c->posterior_draws;
  cfg.seed = c->seed;
  cfg.warm_up = c->warm_up != 0;
  cfg.threads = c->threads;
  return cfg;
}

mcalloc::Estimator to_estimator(mcalloc_estimator e) {
  if (e == MCALLOC_ESTIMATOR_RAW) return mcalloc::Estimator::raw;
  if (e == MCALLOC_ESTIMATOR_PLUS_ONE) return mcalloc::Estimator::plus_one;
  throw mcalloc::ConfigError("unknown estimator");
}

mcalloc::ProtocolConfig to_protocol(const mcalloc_protocol_config* c) {
  mcalloc::ProtocolConfig cfg;
  if (c) {
    cfg.repetitions = c->repetitions;
    cfg.seed = c->seed;
    cfg.iterations = c->iterations;
    cfg.posterior_draws = c->posterior_draws;
    cfg.warm_up = c->warm_up != 0;
    cfg.estimator = to_estimator(c->estimator);
    cfg.threads = c->threads;
  }
  return cfg;
}

nlohmann::json kt_metadata(const mcalloc::KtSolution& s, const mcalloc::KtOptions& o) {
  nlohmann::json j;
  j["strategy"] = "optimal_kt";
  j["K"] = s.budget;
  j["lambda_star"] = s.lambda_star;
  j["stationarity_residual"] = s.stationarity_residual;
  j["iterations_outer"] = s.iterations_outer;
  j["iterations_inner_total"] = s.iterations_inner_total;
  j["degenerate"] = s.degenerate;
  j["tolerances"] = {{"stationarity_tol", o.stationarity_tol},
                     {"degeneracy_eps", o.degeneracy_eps},
                     {"budget_tol", mcalloc::budget_tolerance(s.budget)},
                     {"max_outer_iterations", o.max_outer_iterations},
                     {"max_inner_iterations", o.max_inner_iterations}};
  j["rounding"] = "largest_remainder";
  return j;
}

nlohmann::json greedy_metadata(const mcalloc::GreedyResult& g) {
  nlohmann::json j;
  j["strategy"] = "greedy";
  j["K"] = g.budget;
  j["iterations"] = g.iterations;
  j["unspent_budget"] = g.unspent_budget;
  j["jump"] = g.jump;
  j["saturated"] = g.saturated;
  j["compat_flag"] = g.literal_argmax ? "literal_argmax" : "benefit_per_sample";
  j["objective_g"] = g.objective;
  return j;
}

nlohmann::json thompson_metadata(const mcalloc::ThompsonResult& t) {
  nlohmann::json j;
  j["strategy"] = "thompson";
  j["K"] = t.config.total_budget;
  j["it"] = t.config.iterations;
  j["d"] = t.config.posterior_draws;
  j["seed"] = t.config.seed;
  j["warm_up"] = t.config.warm_up;
  j["rng"] = mcalloc::kRngId;
  j["variant"] = "beta11-prior/instability-weights/largest-remainder";
  j["rejected_plus_one"] = t.classification.rejected.size();
  j["rejected_raw"] = t.classification_raw.rejected.size();
  return j;
}

std::unique_ptr<mcalloc_allocation> wrap_kt(mcalloc::KtSolution s, const mcalloc::KtOptions& o) {
  auto a = std::make_unique<mcalloc_allocation>();
  a->strategy = MCALLOC_STRATEGY_KT;
  a->alloc = s.allocation;
  a->metadata = kt_metadata(s, o).dump();
  a->kt = std::move(s);
  return a;
}

std::unique_ptr<mcalloc_allocation> wrap_thompson(mcalloc::ThompsonResult t) {
  auto a = std::make_unique<mcalloc_allocation>();
  a->strategy = MCALLOC_STRATEGY_THOMPSON;
  a->alloc = t.allocation;
  a->metadata = thompson_metadata(t).dump();
  a->thompson = std::move(t);
  return a;
}

std::unique_ptr<mcalloc_allocation> wrap_plain(mcalloc_strategy s, mcalloc::Allocation alloc, nlohmann::json meta) {
  auto a = std::make_unique<mcalloc_allocation>();
  a->strategy = s;
  a->alloc = std::move(alloc);
  a->metadata = meta.dump();
  return a;
}

mcalloc::Strategy to_strategy(mcalloc_strategy s) {
  switch (s) {
    case MCALLOC_STRATEGY_KT: return mcalloc::Strategy::optimal_kt;
    case MCALLOC_STRATEGY_GREEDY: return mcalloc::Strategy::greedy;
    case MCALLOC_STRATEGY_THOMPSON: return mcalloc::Strategy::thompson;
    case MCALLOC_STRATEGY_CONSTANT: return mcalloc::Strategy::constant;
    default: throw mcalloc::ConfigError("report label must name a strategy");
  }
}

void finish_report(mcalloc_report& r) {
  r.json.clear();
  for (const auto& rep : r.reports) r.json.push_back(mcalloc::to_json(rep).dump(2));
}

}  // namespace

extern "C" {

const char* mcalloc_version(void) { return MCALLOC_VERSION_STRING; }
const char* mcalloc_rng_id(void) { return mcalloc::kRngId.data(); }
const char* mcalloc_last_error(void) { return g_last_error.c_str(); }
int64_t mcalloc_last_minimum_budget(void) { return g_last_minimum_budget; }

void mcalloc_mixture_config_init(mcalloc_mixture_config* cfg) {
  if (!cfg) return;
  const mcalloc::MixtureConfig d;
  cfg->m = d.m;
  cfg->pi0 = d.pi0;
  cfg->beta_shape1 = d.beta_shape1;
  cfg->beta_shape2 = d.beta_shape2;
  cfg->seed = d.seed;
  cfg->sort_output = d.sort_output ? 1 : 0;
}

mcalloc_status mcalloc_pvalues_create(const double* values, size_t m, double alpha, mcalloc_pvalues** out) {
  return guarded([&] {
    require(out != nullptr && (values != nullptr || m == 0), "null argument");
    *out = new mcalloc_pvalues{mcalloc::PValueSet(std::vector<double>(values, values + m), alpha)};
  });
}

mcalloc_status mcalloc_pvalues_generate(const mcalloc_mixture_config* cfg, double alpha, mcalloc_pvalues** out) {
  return guarded([&] {
    require(cfg != nullptr && out != nullptr, "null argument");
    mcalloc::MixtureConfig c;
    c.m = cfg->m;
    c.pi0 = cfg->pi0;
    c.beta_shape1 = cfg->beta_shape1;
    c.beta_shape2 = cfg->beta_shape2;
    c.seed = cfg->seed;
    c.sort_output = cfg->sort_output != 0;
    *out = new mcalloc_pvalues{mcalloc::generate_mixture(c, alpha)};
  });
}

mcalloc_status mcalloc_pvalues_read_csv(const char* path, double alpha, mcalloc_pvalues** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new mcalloc_pvalues{mcalloc::PValueSet(mcalloc::io::read_pvalues_csv(path), alpha)};
  });
}

mcalloc_status mcalloc_pvalues_write_csv(const mcalloc_pvalues* p, const char* path) {
  return guarded([&] {
    require(p != nullptr && path != nullptr, "null argument");
    mcalloc::io::write_pvalues_csv(path, p->set);
  });
}

void mcalloc_pvalues_destroy(mcalloc_pvalues* p) { delete p; }
size_t mcalloc_pvalues_size(const mcalloc_pvalues* p) { return p ? p->set.size() : 0; }
double mcalloc_pvalues_alpha(const mcalloc_pvalues* p) { return p ? p->set.alpha() : 0.0; }
const double* mcalloc_pvalues_data(const mcalloc_pvalues* p) { return p ? p->set.values().data() : nullptr; }

mcalloc_status mcalloc_alpha_from_star(double alpha_star, size_t m, double* alpha) {
  return guarded([&] {
    require(alpha != nullptr, "null argument");
    *alpha = mcalloc::bonferroni_threshold(alpha_star, m);
  });
}

mcalloc_status mcalloc_bonferroni(const mcalloc_pvalues* p, size_t* indices, size_t capacity, size_t* count) {
  return guarded([&] {
    require(p != nullptr && count != nullptr, "null argument");
    const auto c = mcalloc::bonferroni(p->set);
    *count = c.rejected.size();
    for (size_t i = 0; i < c.rejected.size() && i < capacity; ++i) indices[i] = c.rejected[i];
  });
}

mcalloc_status mcalloc_g_i(double p, double alpha, int64_t k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = mcalloc::g_i(p, alpha, k);
  });
}

mcalloc_status mcalloc_h_i(double p, double alpha, double k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = mcalloc::h_i(p, alpha, k);
  });
}

mcalloc_status mcalloc_dh_dk(double p, double alpha, double k, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = mcalloc::dh_dk(p, alpha, k);
  });
}

mcalloc_status mcalloc_objective_g(const mcalloc_pvalues* p, const int64_t* k, size_t m, double* value) {
  return guarded([&] {
    require(p != nullptr && k != nullptr && value != nullptr, "null argument");
    *value = mcalloc::g(p->set, mcalloc::Allocation::discrete(std::vector<std::int64_t>(k, k + m))).value;
  });
}

mcalloc_status mcalloc_objective_h(const mcalloc_pvalues* p, const double* k, size_t m, double* value) {
  return guarded([&] {
    require(p != nullptr && k != nullptr && value != nullptr, "null argument");
    *value = mcalloc::h(p->set, mcalloc::Allocation::continuous(std::vector<double>(k, k + m))).value;
  });
}

void mcalloc_kt_options_init(mcalloc_kt_options* opts) {
  if (!opts) return;
  const mcalloc::KtOptions d;
  opts->degeneracy_eps = d.degeneracy_eps;
  opts->stationarity_tol = d.stationarity_tol;
  opts->max_outer_iterations = d.max_outer_iterations;
  opts->max_inner_iterations = d.max_inner_iterations;
}

void mcalloc_thompson_config_init(mcalloc_thompson_config* cfg) {
  if (!cfg) return;
  const mcalloc::ThompsonConfig d;
  cfg->total_budget = d.total_budget;
  cfg->iterations = d.iterations;
  cfg->posterior_draws = d.posterior_draws;
  cfg->seed = d.seed;
  cfg->warm_up = d.warm_up ? 1 : 0;
  cfg->threads = d.threads;
}

mcalloc_status mcalloc_kt_solve(const mcalloc_pvalues* p, double K, const mcalloc_kt_options* opts,
                                mcalloc_allocation** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null argument");
    const auto o = to_options(opts);
    *out = wrap_kt(mcalloc::solve_optimal(p->set, K, o), o).release();
  });
}

mcalloc_status mcalloc_greedy_allocate(const mcalloc_pvalues* p, int64_t K, int literal_argmax,
                                       mcalloc_allocation** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null argument");
    mcalloc::GreedyOptions opts;
    opts.literal_argmax = literal_argmax != 0;
    auto res = mcalloc::greedy_allocate(p->set, K, opts);
    auto a = wrap_plain(MCALLOC_STRATEGY_GREEDY, res.allocation, greedy_metadata(res));
    a->greedy = std::move(res);
    *out = a.release();
  });
}

mcalloc_status mcalloc_thompson_run_simulated(const mcalloc_pvalues* p, const mcalloc_thompson_config* cfg,
                                              mcalloc_allocation** out) {
  return guarded([&] {
    require(p != nullptr && cfg != nullptr && out != nullptr, "null argument");
    mcalloc::SimulatedOracle oracle(p->set);
    *out = wrap_thompson(mcalloc::run_thompson(oracle, p->set.alpha(), to_config(cfg))).release();
  });
}

mcalloc_status mcalloc_thompson_run(size_t m, double alpha, const mcalloc_thompson_config* cfg,
                                    mcalloc_oracle_fn oracle_fn, void* user, mcalloc_allocation** out) {
  return guarded([&] {
    require(cfg != nullptr && oracle_fn != nullptr && out != nullptr, "null argument");
    mcalloc::FunctionOracle oracle(m, [&](std::size_t i, std::int64_t n, mcalloc::Rng& rng) -> std::int64_t {
      int64_t s = 0;
      if (const int rc = oracle_fn(user, i, n, rng.next(), &s); rc != 0)
        throw std::runtime_error("callback returned " + std::to_string(rc));
      return s;
    });
    *out = wrap_thompson(mcalloc::run_thompson(oracle, alpha, to_config(cfg))).release();
  });
}

mcalloc_status mcalloc_constant_allocate(size_t m, int64_t K, mcalloc_allocation** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    nlohmann::json meta{{"strategy", "constant"}, {"K", K}, {"per_hypothesis", m ? K / static_cast<int64_t>(m) : 0}};
    *out = wrap_plain(MCALLOC_STRATEGY_CONSTANT, mcalloc::Allocation::discrete(mcalloc::constant_allocation(m, K)),
                      meta)
               .release();
  });
}

mcalloc_status mcalloc_allocation_round(const mcalloc_allocation* a, int64_t total, mcalloc_allocation** out) {
  return guarded([&] {
    require(a != nullptr && out != nullptr, "null argument");
    nlohmann::json meta{{"strategy", "rounded"}, {"rounding", "largest_remainder"}, {"total", total}};
    *out = wrap_plain(MCALLOC_STRATEGY_EXTERNAL,
                      mcalloc::Allocation::discrete(mcalloc::round_allocation(a->alloc.budgets(), total)), meta)
               .release();
  });
}

mcalloc_status mcalloc_allocation_read_csv(const char* path, mcalloc_allocation** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    nlohmann::json meta{{"strategy", "external"}, {"source", path}};
    *out = wrap_plain(MCALLOC_STRATEGY_EXTERNAL, mcalloc::io::read_allocation_csv(path), meta).release();
  });
}

void mcalloc_allocation_destroy(mcalloc_allocation* a) { delete a; }

mcalloc_strategy mcalloc_allocation_strategy(const mcalloc_allocation* a) {
  return a ? a->strategy : MCALLOC_STRATEGY_EXTERNAL;
}
size_t mcalloc_allocation_size(const mcalloc_allocation* a) { return a ? a->alloc.size() : 0; }
int mcalloc_allocation_is_discrete(const mcalloc_allocation* a) { return a && a->alloc.is_discrete() ? 1 : 0; }
const double* mcalloc_allocation_budgets(const mcalloc_allocation* a) {
  return a ? a->alloc.budgets().data() : nullptr;
}
double mcalloc_allocation_total(const mcalloc_allocation* a) { return a ? a->alloc.total() : 0.0; }
const char* mcalloc_allocation_metadata_json(const mcalloc_allocation* a) { return a ? a->metadata.c_str() : ""; }

mcalloc_status mcalloc_allocation_kt_info(const mcalloc_allocation* a, mcalloc_kt_info* info) {
  return guarded([&] {
    require(a != nullptr && info != nullptr, "null argument");
    require(a->kt.has_value(), "allocation was not produced by the KT solver");
    const auto& s = *a->kt;
    *info = {s.budget, s.lambda_star, s.stationarity_residual, s.iterations_outer, s.iterations_inner_total,
             s.degenerate.size()};
  });
}

mcalloc_status mcalloc_allocation_greedy_info(const mcalloc_allocation* a, mcalloc_greedy_info* info) {
  return guarded([&] {
    require(a != nullptr && info != nullptr, "null argument");
    require(a->greedy.has_value(), "allocation was not produced by the greedy allocator");
    const auto& g = *a->greedy;
    *info = {g.iterations, g.unspent_budget, g.jump, g.saturated ? 1 : 0, g.literal_argmax ? 1 : 0, g.objective};
  });
}

const int64_t* mcalloc_allocation_exceedances(const mcalloc_allocation* a) {
  return a && a->thompson ? a->thompson->state.s.data() : nullptr;
}

const double* mcalloc_allocation_mean_weights(const mcalloc_allocation* a) {
  return a && a->thompson ? a->thompson->mean_weights.data() : nullptr;
}

mcalloc_status mcalloc_allocation_write_csv(const mcalloc_allocation* a, const mcalloc_pvalues* p, const char* path) {
  return guarded([&] {
    require(a != nullptr && path != nullptr, "null argument");
    if (a->thompson) {
      mcalloc::io::write_thompson_csv(path, *a->thompson);
      return;
    }
    require(p != nullptr, "p-values are required for this allocation's CSV schema");
    require(p->set.size() == a->alloc.size(), "allocation size does not match the p-value set");
    if (a->kt) {
      mcalloc::io::write_kt_csv(path, p->set, *a->kt);
    } else if (a->alloc.is_discrete()) {
      mcalloc::io::write_discrete_csv(path, p->set, a->alloc);
    } else {
      mcalloc::KtSolution shim;
      shim.allocation = a->alloc;
      mcalloc::io::write_kt_csv(path, p->set, shim);
    }
  });
}

void mcalloc_protocol_config_init(mcalloc_protocol_config* cfg) {
  if (!cfg) return;
  const mcalloc::ProtocolConfig d;
  cfg->repetitions = d.repetitions;
  cfg->seed = d.seed;
  cfg->iterations = d.iterations;
  cfg->posterior_draws = d.posterior_draws;
  cfg->warm_up = d.warm_up ? 1 : 0;
  cfg->estimator = MCALLOC_ESTIMATOR_PLUS_ONE;
  cfg->threads = d.threads;
}

mcalloc_status mcalloc_empirical_misclassifications(const mcalloc_pvalues* p, const mcalloc_allocation* a, size_t r,
                                                    uint64_t seed, mcalloc_estimator estimator, unsigned threads,
                                                    int64_t* counts) {
  return guarded([&] {
    require(p != nullptr && a != nullptr && (counts != nullptr || r == 0), "null argument");
    const auto runs =
        mcalloc::empirical_misclassifications(p->set, a->alloc, r, seed, to_estimator(estimator), threads);
    std::copy(runs.begin(), runs.end(), counts);
  });
}

mcalloc_status mcalloc_table1(const mcalloc_pvalues* p, int64_t K, const mcalloc_protocol_config* cfg,
                              mcalloc_report** out) {
  return guarded([&] {
    require(p != nullptr && out != nullptr, "null argument");
    const auto proto = to_protocol(cfg);
    auto res = mcalloc::table1_protocol(p->set, K, proto);
    auto rep = std::make_unique<mcalloc_report>();
    rep->reports = std::move(res.reports);
    rep->allocations.push_back(wrap_kt(std::move(res.kt), proto.kt));
    rep->allocations.push_back(wrap_thompson(std::move(res.thompson)));
    rep->allocations.push_back(wrap_plain(MCALLOC_STRATEGY_CONSTANT, mcalloc::Allocation::discrete(res.constant),
                                          {{"strategy", "constant"}, {"K", K}}));
    finish_report(*rep);
    *out = rep.release();
  });
}

mcalloc_status mcalloc_evaluate(const mcalloc_pvalues* p, const mcalloc_allocation* a, mcalloc_strategy label,
                                const mcalloc_protocol_config* cfg, mcalloc_report** out) {
  return guarded([&] {
    require(p != nullptr && a != nullptr && out != nullptr, "null argument");
    const auto proto = to_protocol(cfg);
    const double total = a->alloc.total();
    const mcalloc::Allocation discrete =
        a->alloc.is_discrete()
            ? a->alloc
            : mcalloc::Allocation::discrete(
                  mcalloc::round_allocation(a->alloc.budgets(), static_cast<std::int64_t>(std::floor(total + 1e-6))));
    auto report = mcalloc::evaluate_allocation(to_strategy(label), p->set, a->alloc, discrete, total,
                                               proto.repetitions, proto.seed, proto.estimator, proto.threads);
    if (!a->alloc.is_discrete()) {
      report.parameters["rounding"] = "largest_remainder";
      report.parameters["theoretical_rounded"] = mcalloc::h(p->set, discrete).value;
    }
    report.parameters["source"] = nlohmann::json::parse(a->metadata);
    auto rep = std::make_unique<mcalloc_report>();
    rep->reports.push_back(std::move(report));
    auto copy = std::make_unique<mcalloc_allocation>(*a);
    rep->allocations.push_back(std::move(copy));
    finish_report(*rep);
    *out = rep.release();
  });
}

void mcalloc_report_destroy(mcalloc_report* r) { delete r; }
size_t mcalloc_report_count(const mcalloc_report* r) { return r ? r->reports.size() : 0; }

double mcalloc_report_theoretical(const mcalloc_report* r, size_t i) {
  return r && i < r->reports.size() ? r->reports[i].theoretical : NAN;
}

double mcalloc_report_empirical_mean(const mcalloc_report* r, size_t i) {
  return r && i < r->reports.size() ? r->reports[i].empirical_mean : NAN;
}

const char* mcalloc_report_strategy_name(const mcalloc_report* r, size_t i) {
  return r && i < r->reports.size() ? mcalloc::to_string(r->reports[i].strategy).data() : "";
}

const mcalloc_allocation* mcalloc_report_allocation(const mcalloc_report* r, size_t i) {
  return r && i < r->allocations.size() ? r->allocations[i].get() : nullptr;
}

mcalloc_status mcalloc_report_set_allocation_file(mcalloc_report* r, size_t i, const char* path) {
  return guarded([&] {
    require(r != nullptr && path != nullptr && i < r->reports.size(), "invalid report index");
    r->reports[i].allocation_file = path;
    finish_report(*r);
  });
}

const char* mcalloc_report_json(const mcalloc_report* r, size_t i) {
  return r && i < r->json.size() ? r->json[i].c_str() : "";
}

mcalloc_status mcalloc_log_grid(int64_t lo, int64_t hi, size_t steps, int64_t* out, size_t* count) {
  return guarded([&] {
    require(out != nullptr && count != nullptr, "null argument");
    const auto grid = mcalloc::log_grid(lo, hi, steps);
    std::copy(grid.begin(), grid.end(), out);
    *count = grid.size();
  });
}

mcalloc_status mcalloc_convergence_study(const mcalloc_pvalues* p, const int64_t* grid, size_t n,
                                         const mcalloc_protocol_config* cfg, mcalloc_convergence_point* out) {
  return guarded([&] {
    require(p != nullptr && grid != nullptr && out != nullptr, "null argument");
    const auto pts = mcalloc::convergence_study(p->set, std::span<const int64_t>(grid, n), to_protocol(cfg));
    for (size_t i = 0; i < pts.size(); ++i)
      out[i] = {pts[i].K, pts[i].q05, pts[i].q50, pts[i].q95, pts[i].theoretical_correct};
  });
}

mcalloc_status mcalloc_write_convergence_csv(const char* path, const mcalloc_convergence_point* pts, size_t n) {
  return guarded([&] {
    require(path != nullptr && (pts != nullptr || n == 0), "null argument");
    std::vector<mcalloc::ConvergencePoint> v(n);
    for (size_t i = 0; i < n; ++i) {
      v[i].K = pts[i].K;
      v[i].q05 = pts[i].q05;
      v[i].q50 = pts[i].q50;
      v[i].q95 = pts[i].q95;
    }
    mcalloc::io::write_convergence_csv(path, v);
  });
}

mcalloc_status mcalloc_profile_g(double p, double alpha, int64_t k_max, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto prof = mcalloc::profile_g(p, alpha, k_max);
    for (size_t i = 0; i < prof.size(); ++i) out[i] = prof[i].g;
  });
}

mcalloc_status mcalloc_write_profile_csv(const char* path, const double* g, int64_t k_max) {
  return guarded([&] {
    require(path != nullptr && g != nullptr && k_max >= 0, "invalid argument");
    std::vector<mcalloc::ProfilePoint> pts;
    for (int64_t k = 0; k <= k_max; ++k) pts.push_back({k, g[k]});
    mcalloc::io::write_profile_csv(path, pts);
  });
}

mcalloc_status mcalloc_write_text(const char* path, const char* text) {
  return guarded([&] {
    require(path != nullptr && text != nullptr, "null argument");
    mcalloc::io::write_text(path, text);
  });
}

}  // extern "C"

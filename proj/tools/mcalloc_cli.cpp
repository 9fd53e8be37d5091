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

// Command-line front end. Uses only the public C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcalloc/mcalloc.h"

namespace {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kConfig = 1, kIo = 2, kInfeasible = 3, kConvergence = 4 };

// Carries an exit code out of a subcommand.
struct CliFailure : std::runtime_error {
  CliFailure(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
  int code;
};

int exit_code_for(mcalloc_status s) {
  switch (s) {
    case MCALLOC_OK: return kOk;
    case MCALLOC_ERR_IO:
    case MCALLOC_ERR_ORACLE: return kIo;
    case MCALLOC_ERR_INFEASIBLE: return kInfeasible;
    case MCALLOC_ERR_CONVERGENCE: return kConvergence;
    default: return kConfig;
  }
}

void check(mcalloc_status s) {
  if (s == MCALLOC_OK) return;
  std::string msg = mcalloc_last_error();
  if (s == MCALLOC_ERR_INFEASIBLE)
    msg += " (minimum feasible K = " + std::to_string(mcalloc_last_minimum_budget()) + ")";
  throw CliFailure(exit_code_for(s), msg);
}

struct PValuesDeleter {
  void operator()(mcalloc_pvalues* p) const { mcalloc_pvalues_destroy(p); }
};
struct AllocationDeleter {
  void operator()(mcalloc_allocation* a) const { mcalloc_allocation_destroy(a); }
};
struct ReportDeleter {
  void operator()(mcalloc_report* r) const { mcalloc_report_destroy(r); }
};
using PValuesPtr = std::unique_ptr<mcalloc_pvalues, PValuesDeleter>;
using AllocationPtr = std::unique_ptr<mcalloc_allocation, AllocationDeleter>;
using ReportPtr = std::unique_ptr<mcalloc_report, ReportDeleter>;

struct Common {
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";
  std::optional<double> alpha;
  std::optional<double> alpha_star;
  std::string command_line;
};

void log_stage(const std::string& line) { std::cerr << "[mcalloc] " << line << '\n'; }

double effective_alpha(const Common& c, std::size_t m) {
  if (c.alpha && c.alpha_star) throw CliFailure(kConfig, "alpha: give exactly one of --alpha or --alpha-star");
  if (!c.alpha && !c.alpha_star) throw CliFailure(kConfig, "alpha: one of --alpha or --alpha-star is required");
  if (c.alpha) {
    if (!(*c.alpha > 0.0 && *c.alpha < 1.0)) throw CliFailure(kConfig, "alpha must lie in (0,1)");
    return *c.alpha;
  }
  double a = 0.0;
  if (mcalloc_alpha_from_star(*c.alpha_star, m, &a) != MCALLOC_OK)
    throw CliFailure(kConfig, std::string("alpha-star: ") + mcalloc_last_error());
  return a;
}

// "1e6" and "1000000" both parse; discrete strategies need an integral value.
double parse_budget(const std::string& text, const char* field) {
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw CliFailure(kConfig, std::string(field) + ": cannot parse '" + text + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw CliFailure(kConfig, std::string(field) + " must be positive");
  return v;
}

std::int64_t integral_budget(double v, const char* field) {
  if (v != std::floor(v) || v > 9.0e18)
    throw CliFailure(kConfig, std::string(field) + " must be an integer for this strategy");
  return static_cast<std::int64_t>(v);
}

PValuesPtr load_pvalues(const std::string& path, const Common& c) {
  // Read once to learn m, then again with the effective alpha.
  mcalloc_pvalues* probe = nullptr;
  check(mcalloc_pvalues_read_csv(path.c_str(), 0.5, &probe));
  const std::size_t m = mcalloc_pvalues_size(probe);
  mcalloc_pvalues_destroy(probe);
  mcalloc_pvalues* p = nullptr;
  check(mcalloc_pvalues_read_csv(path.c_str(), effective_alpha(c, m), &p));
  return PValuesPtr(p);
}

json provenance(const Common& c, const std::string& subcommand) {
  return {{"tool", "mcalloc"},
          {"version", mcalloc_version()},
          {"subcommand", subcommand},
          {"command", c.command_line},
          {"seed", c.seed},
          {"rng", mcalloc_rng_id()}};
}

void write_text(const std::string& path, const std::string& text) { check(mcalloc_write_text(path.c_str(), text.c_str())); }

void write_sidecar(const std::string& out, const json& meta) { write_text(out + ".meta.json", meta.dump(2) + "\n"); }

void require_out(const Common& c) {
  if (c.out.empty()) throw CliFailure(kConfig, "out: --out is required");
}

void require_format(const Common& c) {
  if (c.format != "csv" && c.format != "json") throw CliFailure(kConfig, "format must be csv or json");
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
  std::size_t m = 500;
  double pi0 = 0.5;
  double shape1 = 0.25;
  double shape2 = 25.0;
  bool sorted = false;
};

int cmd_generate(const Common& c, const GenerateArgs& g) {
  require_out(c);
  require_format(c);
  mcalloc_mixture_config cfg;
  mcalloc_mixture_config_init(&cfg);
  cfg.m = g.m;
  cfg.pi0 = g.pi0;
  cfg.beta_shape1 = g.shape1;
  cfg.beta_shape2 = g.shape2;
  cfg.seed = c.seed;
  cfg.sort_output = g.sorted ? 1 : 0;

  Common ac = c;
  if (!ac.alpha && !ac.alpha_star) ac.alpha_star = 0.1;
  double alpha = 0.0;
  if (g.m == 0) throw CliFailure(kConfig, "m must be positive");
  alpha = effective_alpha(ac, g.m);

  mcalloc_pvalues* raw = nullptr;
  check(mcalloc_pvalues_generate(&cfg, alpha, &raw));
  PValuesPtr p(raw);

  json meta = provenance(c, "generate");
  meta["m"] = g.m;
  meta["pi0"] = g.pi0;
  meta["beta_shape1"] = g.shape1;
  meta["beta_shape2"] = g.shape2;
  meta["sorted"] = g.sorted;
  meta["null_rounding"] = "round(pi0*m)";
  meta["alpha"] = alpha;
  if (ac.alpha_star) meta["alpha_star"] = *ac.alpha_star;

  if (c.format == "json") {
    const double* v = mcalloc_pvalues_data(p.get());
    meta["p_values"] = std::vector<double>(v, v + mcalloc_pvalues_size(p.get()));
    write_text(c.out, meta.dump(2) + "\n");
  } else {
    check(mcalloc_pvalues_write_csv(p.get(), c.out.c_str()));
    write_sidecar(c.out, meta);
  }
  log_stage("wrote " + std::to_string(g.m) + " p-values to " + c.out);
  return kOk;
}

// ---- allocate ----------------------------------------------------------

struct AllocateArgs {
  std::string in;
  std::string strategy;
  std::string budget;
  std::int64_t it = 1000;
  std::int64_t d = 100;
  bool warm_up = false;
  bool literal_argmax = false;
  std::string oracle = "simulate";
};

AllocationPtr run_strategy(const AllocateArgs& a, const Common& c, const mcalloc_pvalues* p, double K) {
  mcalloc_allocation* raw = nullptr;
  if (a.strategy == "kt") {
    check(mcalloc_kt_solve(p, K, nullptr, &raw));
  } else if (a.strategy == "greedy") {
    check(mcalloc_greedy_allocate(p, integral_budget(K, "K"), a.literal_argmax ? 1 : 0, &raw));
  } else if (a.strategy == "constant") {
    check(mcalloc_constant_allocate(mcalloc_pvalues_size(p), integral_budget(K, "K"), &raw));
  } else if (a.strategy == "thompson") {
    if (a.oracle != "simulate") throw CliFailure(kConfig, "oracle: only 'simulate' is supported");
    mcalloc_thompson_config cfg;
    mcalloc_thompson_config_init(&cfg);
    cfg.total_budget = integral_budget(K, "K");
    cfg.iterations = a.it;
    cfg.posterior_draws = a.d;
    cfg.seed = c.seed;
    cfg.warm_up = a.warm_up ? 1 : 0;
    cfg.threads = c.threads;
    check(mcalloc_thompson_run_simulated(p, &cfg, &raw));
  } else {
    throw CliFailure(kConfig, "strategy must be one of kt, greedy, thompson, constant");
  }
  return AllocationPtr(raw);
}

int cmd_allocate(const Common& c, const AllocateArgs& a) {
  require_out(c);
  require_format(c);
  if (a.in.empty()) throw CliFailure(kConfig, "in: a p-value CSV is required");
  const double K = parse_budget(a.budget, "K");
  PValuesPtr p = load_pvalues(a.in, c);
  log_stage("allocating K=" + a.budget + " with strategy " + a.strategy);
  AllocationPtr alloc = run_strategy(a, c, p.get(), K);

  json meta = provenance(c, "allocate");
  meta["input"] = a.in;
  meta["alpha"] = mcalloc_pvalues_alpha(p.get());
  meta["m"] = mcalloc_pvalues_size(p.get());
  meta["run"] = json::parse(mcalloc_allocation_metadata_json(alloc.get()));

  if (c.format == "json") {
    const double* b = mcalloc_allocation_budgets(alloc.get());
    meta["budgets"] = std::vector<double>(b, b + mcalloc_allocation_size(alloc.get()));
    write_text(c.out, meta.dump(2) + "\n");
  } else {
    check(mcalloc_allocation_write_csv(alloc.get(), p.get(), c.out.c_str()));
    write_sidecar(c.out, meta);
  }
  log_stage("wrote allocation to " + c.out);
  return kOk;
}

// ---- report ------------------------------------------------------------

struct ReportArgs {
  std::string in;
  std::string budget;
  std::string allocation;
  std::string strategy = "kt";
  std::size_t r = 10;
  std::int64_t it = 1000;
  std::int64_t d = 100;
  bool warm_up = false;
  std::string estimator = "plus_one";
};

mcalloc_strategy strategy_label(const std::string& s) {
  if (s == "kt") return MCALLOC_STRATEGY_KT;
  if (s == "greedy") return MCALLOC_STRATEGY_GREEDY;
  if (s == "thompson") return MCALLOC_STRATEGY_THOMPSON;
  if (s == "constant") return MCALLOC_STRATEGY_CONSTANT;
  throw CliFailure(kConfig, "strategy must be one of kt, greedy, thompson, constant");
}

std::string sibling_path(const std::string& out, const std::string& suffix) {
  std::string stem = out;
  if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
    stem.erase(dot);
  return stem + "." + suffix;
}

int cmd_report(const Common& c, const ReportArgs& a) {
  require_out(c);
  require_format(c);
  if (a.in.empty()) throw CliFailure(kConfig, "in: a p-value CSV is required");
  if (a.r == 0) throw CliFailure(kConfig, "r must be positive");
  if (a.estimator != "plus_one" && a.estimator != "raw") throw CliFailure(kConfig, "estimator must be plus_one or raw");
  PValuesPtr p = load_pvalues(a.in, c);

  mcalloc_protocol_config cfg;
  mcalloc_protocol_config_init(&cfg);
  cfg.repetitions = a.r;
  cfg.seed = c.seed;
  cfg.iterations = a.it;
  cfg.posterior_draws = a.d;
  cfg.warm_up = a.warm_up ? 1 : 0;
  cfg.estimator = a.estimator == "raw" ? MCALLOC_ESTIMATOR_RAW : MCALLOC_ESTIMATOR_PLUS_ONE;
  cfg.threads = c.threads;

  mcalloc_report* raw = nullptr;
  if (!a.allocation.empty()) {
    mcalloc_allocation* alloc = nullptr;
    check(mcalloc_allocation_read_csv(a.allocation.c_str(), &alloc));
    AllocationPtr owned(alloc);
    log_stage("scoring " + a.allocation);
    check(mcalloc_evaluate(p.get(), owned.get(), strategy_label(a.strategy), &cfg, &raw));
    ReportPtr rep(raw);
    check(mcalloc_report_set_allocation_file(rep.get(), 0, a.allocation.c_str()));
    raw = rep.release();
  } else {
    if (a.budget.empty()) throw CliFailure(kConfig, "K: --K is required unless --allocation is given");
    const std::int64_t K = integral_budget(parse_budget(a.budget, "K"), "K");
    log_stage("running the KT / Thompson / constant comparison at K=" + std::to_string(K));
    check(mcalloc_table1(p.get(), K, &cfg, &raw));
    ReportPtr rep(raw);
    for (std::size_t i = 0; i < mcalloc_report_count(rep.get()); ++i) {
      const std::string path = sibling_path(c.out, std::string(mcalloc_report_strategy_name(rep.get(), i)) + ".csv");
      check(mcalloc_allocation_write_csv(mcalloc_report_allocation(rep.get(), i), p.get(), path.c_str()));
      check(mcalloc_report_set_allocation_file(rep.get(), i, path.c_str()));
    }
    raw = rep.release();
  }
  ReportPtr rep(raw);

  if (c.format == "json") {
    json doc;
    doc["provenance"] = provenance(c, "report");
    doc["provenance"]["input"] = a.in;
    doc["reports"] = json::array();
    for (std::size_t i = 0; i < mcalloc_report_count(rep.get()); ++i)
      doc["reports"].push_back(json::parse(mcalloc_report_json(rep.get(), i)));
    write_text(c.out, doc.dump(2) + "\n");
  } else {
    std::string csv = "strategy,estimator,theoretical,empirical_mean\n";
    for (std::size_t i = 0; i < mcalloc_report_count(rep.get()); ++i) {
      char line[256];
      std::snprintf(line, sizeof line, "%s,%s,%.17g,%.17g\n", mcalloc_report_strategy_name(rep.get(), i),
                    a.estimator.c_str(), mcalloc_report_theoretical(rep.get(), i),
                    mcalloc_report_empirical_mean(rep.get(), i));
      csv += line;
    }
    write_text(c.out, csv);
    json meta = provenance(c, "report");
    meta["input"] = a.in;
    meta["reports"] = json::array();
    for (std::size_t i = 0; i < mcalloc_report_count(rep.get()); ++i)
      meta["reports"].push_back(json::parse(mcalloc_report_json(rep.get(), i)));
    write_sidecar(c.out, meta);
  }
  for (std::size_t i = 0; i < mcalloc_report_count(rep.get()); ++i) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s theoretical %.3f  empirical %.2f", mcalloc_report_strategy_name(rep.get(), i),
                  mcalloc_report_theoretical(rep.get(), i), mcalloc_report_empirical_mean(rep.get(), i));
    log_stage(line);
  }
  return kOk;
}

// ---- converge ----------------------------------------------------------

struct ConvergeArgs {
  std::string in;
  std::string k_min = "1e4";
  std::string k_max = "1e6";
  std::size_t steps = 25;
  std::size_t r = 10;
  std::int64_t it = 1000;
  std::int64_t d = 100;
  bool warm_up = false;
};

int cmd_converge(const Common& c, const ConvergeArgs& a) {
  require_out(c);
  require_format(c);
  if (a.in.empty()) throw CliFailure(kConfig, "in: a p-value CSV is required");
  if (a.r == 0) throw CliFailure(kConfig, "r must be positive");
  if (a.steps == 0) throw CliFailure(kConfig, "steps must be positive");
  PValuesPtr p = load_pvalues(a.in, c);
  const std::int64_t lo = integral_budget(parse_budget(a.k_min, "K-min"), "K-min");
  const std::int64_t hi = integral_budget(parse_budget(a.k_max, "K-max"), "K-max");

  std::vector<std::int64_t> grid(a.steps);
  std::size_t n = 0;
  check(mcalloc_log_grid(lo, hi, a.steps, grid.data(), &n));
  grid.resize(n);

  mcalloc_protocol_config cfg;
  mcalloc_protocol_config_init(&cfg);
  cfg.repetitions = a.r;
  cfg.seed = c.seed;
  cfg.iterations = a.it;
  cfg.posterior_draws = a.d;
  cfg.warm_up = a.warm_up ? 1 : 0;
  cfg.threads = c.threads;

  log_stage("convergence study over " + std::to_string(n) + " budgets");
  std::vector<mcalloc_convergence_point> pts(n);
  check(mcalloc_convergence_study(p.get(), grid.data(), n, &cfg, pts.data()));

  json meta = provenance(c, "converge");
  meta["input"] = a.in;
  meta["alpha"] = mcalloc_pvalues_alpha(p.get());
  meta["m"] = mcalloc_pvalues_size(p.get());
  meta["K_grid"] = grid;
  meta["r"] = a.r;
  meta["it"] = a.it;
  meta["d"] = a.d;
  meta["warm_up"] = a.warm_up;
  meta["estimator"] = "plus_one";
  meta["quantiles"] = "type7";

  if (c.format == "json") {
    meta["points"] = json::array();
    for (const auto& pt : pts)
      meta["points"].push_back({{"K", pt.K}, {"q05", pt.q05}, {"q50", pt.q50}, {"q95", pt.q95},
                                {"theoretical_correct", pt.theoretical_correct}});
    write_text(c.out, meta.dump(2) + "\n");
  } else {
    check(mcalloc_write_convergence_csv(c.out.c_str(), pts.data(), pts.size()));
    write_sidecar(c.out, meta);
  }
  log_stage("wrote " + c.out);
  return kOk;
}

// ---- profile -----------------------------------------------------------

struct ProfileArgs {
  double p = -1.0;
  std::int64_t k_max = 10000;
  std::size_t m = 0;
};

int cmd_profile(const Common& c, const ProfileArgs& a) {
  require_out(c);
  require_format(c);
  if (c.alpha_star && a.m == 0) throw CliFailure(kConfig, "m: --alpha-star needs --m");
  const double alpha = effective_alpha(c, a.m);
  std::vector<double> g(static_cast<std::size_t>(std::max<std::int64_t>(a.k_max, 0)) + 1);
  check(mcalloc_profile_g(a.p, alpha, a.k_max, g.data()));

  json meta = provenance(c, "profile");
  meta["p"] = a.p;
  meta["alpha"] = alpha;
  meta["k_max"] = a.k_max;
  meta["zero_sample_convention"] = "estimate 0 at k=0";
  if (c.format == "json") {
    meta["g_i"] = g;
    write_text(c.out, meta.dump(2) + "\n");
  } else {
    check(mcalloc_write_profile_csv(c.out.c_str(), g.data(), a.k_max));
    write_sidecar(c.out, meta);
  }
  log_stage("wrote " + c.out);
  return kOk;
}

void add_common(CLI::App* sub, Common& c, bool with_alpha = true) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (0 = available parallelism)");
  sub->add_option("--out", c.out, "Output path");
  sub->add_option("--format", c.format, "Output format: csv or json");
  if (with_alpha) {
    sub->add_option("--alpha", c.alpha, "Bonferroni threshold alpha");
    sub->add_option("--alpha-star", c.alpha_star, "Family-wise level; alpha = alpha_star / m");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allocate a Monte-Carlo sample budget across Bonferroni-tested hypotheses"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mcalloc_version()));

  Common common;
  for (int i = 0; i < argc; ++i) common.command_line += (i ? " " : "") + std::string(argv[i]);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Draw p-values from the uniform/Beta mixture");
  add_common(generate, common);
  generate->add_option("--m", gen.m, "Number of hypotheses");
  generate->add_option("--pi0", gen.pi0, "Proportion of uniform (null) p-values");
  generate->add_option("--beta-shape1", gen.shape1, "First Beta shape of the alternative");
  generate->add_option("--beta-shape2", gen.shape2, "Second Beta shape of the alternative");
  generate->add_flag("--sorted", gen.sorted, "Sort p-values ascending");

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand("allocate", "Compute a sample allocation");
  add_common(allocate, common);
  allocate->add_option("--in", alloc.in, "p-value CSV (index,p_value)");
  allocate->add_option("--strategy", alloc.strategy, "kt, greedy, thompson or constant")->required();
  allocate->add_option("--K", alloc.budget, "Total budget (scientific notation accepted)")->required();
  allocate->add_option("--it", alloc.it, "Thompson iterations");
  allocate->add_option("--d", alloc.d, "Posterior draws per hypothesis and iteration");
  allocate->add_flag("--warm-up", alloc.warm_up, "Thompson: one sample per hypothesis first");
  allocate->add_flag("--literal-argmax", alloc.literal_argmax, "Greedy: maximise d_i/b_i literally");
  allocate->add_option("--oracle", alloc.oracle, "Thompson sampling oracle (simulate)");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Theoretical and empirical misclassification reports");
  add_common(report, common);
  report->add_option("--in", rep.in, "p-value CSV");
  report->add_option("--K", rep.budget, "Total budget");
  report->add_option("--allocation", rep.allocation, "Score a precomputed allocation CSV instead");
  report->add_option("--strategy", rep.strategy, "Label for --allocation");
  report->add_option("--r", rep.r, "Empirical repetitions");
  report->add_option("--it", rep.it, "Thompson iterations");
  report->add_option("--d", rep.d, "Posterior draws");
  report->add_flag("--warm-up", rep.warm_up, "Thompson warm-up");
  report->add_option("--estimator", rep.estimator, "plus_one or raw");

  ConvergeArgs conv;
  auto* converge = app.add_subcommand("converge", "Convergence of Thompson to the optimal allocation");
  add_common(converge, common);
  converge->add_option("--in", conv.in, "p-value CSV");
  converge->add_option("--K-min", conv.k_min, "Smallest budget");
  converge->add_option("--K-max", conv.k_max, "Largest budget");
  converge->add_option("--steps", conv.steps, "Logarithmic grid steps");
  converge->add_option("--r", conv.r, "Empirical repetitions per budget");
  converge->add_option("--it", conv.it, "Thompson iterations");
  converge->add_option("--d", conv.d, "Posterior draws");
  converge->add_flag("--warm-up", conv.warm_up, "Thompson warm-up");

  ProfileArgs prof;
  auto* profile = app.add_subcommand("profile", "Exact misclassification probability against sample count");
  add_common(profile, common);
  profile->add_option("--p", prof.p, "Ideal p-value")->required();
  profile->add_option("--k-max", prof.k_max, "Largest sample count");
  profile->add_option("--m", prof.m, "Hypothesis count for --alpha-star");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*generate) return cmd_generate(common, gen);
    if (*allocate) return cmd_allocate(common, alloc);
    if (*report) return cmd_report(common, rep);
    if (*converge) return cmd_converge(common, conv);
    if (*profile) return cmd_profile(common, prof);
  } catch (const CliFailure& e) {
    std::cerr << "mcalloc: error: " << e.what() << '\n';
    return e.code;
  }
  return kConfig;
}

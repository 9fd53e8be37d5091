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

#include <string>
#include <vector>

#include "core/experiments.hpp"
#include "core/greedy.hpp"
#include "core/hypotheses.hpp"
#include "core/kt_solver.hpp"
#include "core/misclassification.hpp"
#include "core/thompson.hpp"

namespace mcalloc::io {

// All writers print doubles with 17 significant digits so files round-trip
// exactly and reruns are byte-identical. Failures throw IoError.

std::string format_double(double v);

/// `index,p_value`, 1-based consecutive indices.
std::vector<double> read_pvalues_csv(const std::string& path);
void write_pvalues_csv(const std::string& path, const PValueSet& p);

/// Reads an allocation written by any of the allocation writers. A
/// `k_discrete` column yields a discrete allocation, `k_continuous` a
/// continuous one.
Allocation read_allocation_csv(const std::string& path);

/// `index,p_value,k_continuous`
void write_kt_csv(const std::string& path, const PValueSet& p, const KtSolution& sol);
/// `index,p_value,k_discrete`
void write_discrete_csv(const std::string& path, const PValueSet& p, const Allocation& k);
/// `index,k_discrete,s,p_hat_plus_one`
void write_thompson_csv(const std::string& path, const ThompsonResult& res);
/// `K,q05,q50,q95`
void write_convergence_csv(const std::string& path, const std::vector<ConvergencePoint>& points);
/// `k,g_i`
void write_profile_csv(const std::string& path, const std::vector<ProfilePoint>& points);

void write_text(const std::string& path, const std::string& text);

}  // namespace mcalloc::io

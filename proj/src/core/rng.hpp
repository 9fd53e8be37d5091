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

#include <array>
#include <cstdint>
#include <string_view>

namespace mcalloc {

// Recorded in every report so a run can be regenerated from its metadata.
inline constexpr std::string_view kRngId = "xoshiro256**+splitmix64-substreams/v1";

// Independent purposes get disjoint sub-streams so adding hypotheses or
// iterations never perturbs earlier draws.
enum class StreamTag : std::uint64_t {
  mixture = 1,
  posterior = 2,
  oracle = 3,
  empirical = 4,
  protocol = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Hash-combines a seed with a tag and two coordinates into a new 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b = 0) noexcept;

// xoshiro256** with platform-independent variate generators. The standard
// library distributions are implementation-defined, so none are used here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept;

  static Rng substream(std::uint64_t seed, StreamTag tag, std::uint64_t a, std::uint64_t b = 0) noexcept {
    return Rng(derive_seed(seed, tag, a, b));
  }

  std::uint64_t next() noexcept;

  // Uniform on the open interval (0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  // log of a Gamma(shape, 1) variate; stays finite for tiny shapes.
  double log_gamma_variate(double shape) noexcept;
  double gamma(double shape) noexcept;
  double beta(double a, double b) noexcept;
  std::int64_t binomial(std::int64_t n, double p) noexcept;

 private:
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcalloc

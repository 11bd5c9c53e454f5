// Copyright 2026 The mccal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MCCAL_RNG_H_
#define MCCAL_RNG_H_

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

namespace mccal {

// Seed of the child stream `name` under `master_seed`:
//   splitmix64(master_seed ^ fnv1a64(name)).
// Streams are independent by name, so adding draws to one never perturbs
// another.
uint64_t StreamSeed(uint64_t master_seed, std::string_view name);

// A named, seeded random stream. Every distribution used by the library is
// implemented here with a fixed algorithm so traces are reproducible across
// standard libraries.
class RngStream {
 public:
  using result_type = uint64_t;

  RngStream(uint64_t master_seed, std::string name);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  const std::string& name() const { return name_; }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Uniform on the open interval (0, 1).
  double UniformOpen();
  // Standard exponential, by inversion.
  double Exponential();
  // Laplace(0, scale) by inverse CDF: u ~ U(-1/2, 1/2),
  // x = -scale * sgn(u) * ln(1 - 2|u|).
  double Laplace(double scale);
  // Binomial(n, p); p is clamped to [0, 1].
  int64_t Binomial(int64_t n, double p);

 private:
  std::string name_;
  std::mt19937_64 engine_;
};

}  // namespace mccal

#endif  // MCCAL_RNG_H_

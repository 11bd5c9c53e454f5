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

#ifndef MCCAL_NORM_H_
#define MCCAL_NORM_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace mccal {

// A norm exponent p >= 1 held as an exact rational num/den, or infinity.
// Keeping p rational lets p/(p-1) stay an exact integer for p = 2, 3, ...
class NormExponent {
 public:
  static NormExponent Infinity();
  static NormExponent Rational(int64_t num, int64_t den = 1);
  // Accepts "inf", integers ("2"), fractions ("3/2") and decimals ("1.5").
  static NormExponent Parse(std::string_view text);

  bool is_infinite() const { return infinite_; }
  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double value() const;
  // "inf", "2" or "3/2".
  std::string ToString() const;

  friend bool operator==(const NormExponent&, const NormExponent&) = default;

 private:
  NormExponent(int64_t num, int64_t den, bool infinite)
      : num_(num), den_(den), infinite_(infinite) {}

  int64_t num_;
  int64_t den_;
  bool infinite_;
};

}  // namespace mccal

#endif  // MCCAL_NORM_H_

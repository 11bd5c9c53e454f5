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

#include "mccal/norm.h"

#include <cctype>
#include <charconv>
#include <limits>
#include <numeric>

#include "mccal/errors.h"

namespace mccal {
namespace {

int64_t ParseInt(std::string_view s) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("malformed norm exponent: " + std::string(s));
  }
  return v;
}

}  // namespace

NormExponent NormExponent::Infinity() { return NormExponent(1, 0, true); }

NormExponent NormExponent::Rational(int64_t num, int64_t den) {
  if (den <= 0 || num <= 0) {
    throw InvalidArgument("norm exponent must be a positive rational");
  }
  const int64_t g = std::gcd(num, den);
  return NormExponent(num / g, den / g, false);
}

NormExponent NormExponent::Parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text == "inf" || text == "infinity" || text == "Inf") return Infinity();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(ParseInt(text.substr(0, slash)),
                    ParseInt(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 12) {
      throw InvalidArgument("too many decimals in norm exponent");
    }
    int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    const int64_t w = whole.empty() ? 0 : ParseInt(whole);
    const int64_t f = frac.empty() ? 0 : ParseInt(frac);
    return Rational(w * den + f, den);
  }
  return Rational(ParseInt(text), 1);
}

double NormExponent::value() const {
  if (infinite_) return std::numeric_limits<double>::infinity();
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string NormExponent::ToString() const {
  if (infinite_) return "inf";
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace mccal

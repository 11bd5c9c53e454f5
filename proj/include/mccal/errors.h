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

#ifndef MCCAL_ERRORS_H_
#define MCCAL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace mccal {

// Base of every error raised by the library. Callers that only need to
// report failures can catch this; the subclasses exist so tests and the CLI
// can tell a caller bug from a probabilistic estimate failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Out-of-range parameters, malformed configs and files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A grid vector that is not a level set of V_lambda^k.
class MembershipError : public Error {
 public:
  using Error::Error;
};

// Refusal to enumerate a level-set family larger than the configured cap.
class CombinatorialLimitError : public Error {
 public:
  using Error::Error;
};

// A query whose event overlaps an event already answered by the same pool.
class DisjointnessViolation : public Error {
 public:
  using Error::Error;
};

class QueryBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A structural invariant of M or G does not hold. Always a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Noisy estimates contradict the accuracy events (e.g. a nonpositive
// aggregated group mass). The run's guarantees are void.
class EstimateFailure : public Error {
 public:
  using Error::Error;
};

class IterationLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace mccal

#endif  // MCCAL_ERRORS_H_

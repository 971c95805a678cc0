// Copyright 2026 The coded-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace coded_alloc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// -exp(-(alpha*mu + 1)) is not representable as a nonzero double.
class UnderflowError : public Error {
 public:
  using Error::Error;
};

/// Requested code length is shorter than the task (n < k).
class InvalidRate : public Error {
 public:
  using Error::Error;
};

/// The fixed-r balance equation cannot reach r on the open group interval.
class NoSolution : public Error {
 public:
  NoSolution(const std::string& what, double attained_low, double attained_high)
      : Error(what), attained_low_(attained_low), attained_high_(attained_high) {}

  /// Range of the left-hand side over the search interval.
  double attained_low() const noexcept { return attained_low_; }
  double attained_high() const noexcept { return attained_high_; }

 private:
  double attained_low_;
  double attained_high_;
};

/// The fixed-r scheme needs a common shift parameter across groups.
class ShiftMismatch : public Error {
 public:
  using Error::Error;
};

/// The allocation cannot deliver k coded rows even if every worker finishes.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// Brute-force grid would exceed its evaluation cap.
class ComplexityGuard : public Error {
 public:
  using Error::Error;
};

/// Malformed or invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace coded_alloc

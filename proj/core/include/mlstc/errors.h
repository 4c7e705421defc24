// Copyright 2026 The ML-STC Authors.
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

#include <stdexcept>
#include <string>

namespace mlstc {

// Exception hierarchy. The CLI maps each family onto a process exit code:
// ConfigError -> 2, DataError -> 3, NumericalError -> 4.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or out-of-domain input to a numerical routine.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration or CLI usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The requested rate cannot be produced by a single shared threshold.
class InfeasibleRateError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Unreadable, truncated or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training data without usable variance (all-zero covariance, too few samples).
class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Normal equations that are singular and cannot be regularized.
class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace mlstc

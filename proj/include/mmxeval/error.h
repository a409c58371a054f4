// Copyright 2026 The mmxeval Authors. All Rights Reserved.
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

namespace mmxeval {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data: containers, manifests, heatmaps.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure talking to, or a contract violation by, the model under test.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// A quantity whose definition breaks down on the given input
/// (for example a zero denominator).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace mmxeval

// Copyright 2026 The qvotes Authors. All Rights Reserved.
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

#ifndef QVOTES_ERROR_H_
#define QVOTES_ERROR_H_

#include <stdexcept>
#include <string>

namespace qvotes {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or invariant-violating input data (ratings, reference tables,
// curve files).
class InputError : public Error {
 public:
  explicit InputError(const std::string& msg) : Error(msg) {}
};

// Invalid arguments or configuration, detected before any work is done.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// A statistic has no defined value for the given input, e.g. a rank
// correlation over a constant vector.
class UndefinedResult : public Error {
 public:
  explicit UndefinedResult(const std::string& msg) : Error(msg) {}
};

}  // namespace qvotes

#endif  // QVOTES_ERROR_H_

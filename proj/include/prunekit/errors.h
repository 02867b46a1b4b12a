/* Copyright 2026 The PruneKit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PRUNEKIT_ERRORS_H_
#define PRUNEKIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace prunekit {

// Base class for every error raised by the library. `kind()` is a stable
// machine-readable tag used in CLI error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// Container does not start with the expected magic or has an unparsable
// header.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error("format", message) {}
};

// Header and data blob disagree about lengths or offsets.
class CorruptionError : public Error {
 public:
  explicit CorruptionError(const std::string& message)
      : Error("corruption", message) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("validation", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io", message) {}
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& message)
      : Error("argument", message) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error("numerical", message) {}
};

class PlanError : public Error {
 public:
  explicit PlanError(const std::string& message) : Error("plan", message) {}
};

// Raised for an all-zero filter, which has no rank-1 representative.
class DegenerateFilterError : public Error {
 public:
  explicit DegenerateFilterError(const std::string& message)
      : Error("degenerate_filter", message) {}
};

}  // namespace prunekit

#endif  // PRUNEKIT_ERRORS_H_

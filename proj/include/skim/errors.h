// Copyright 2026 The SKIM Authors
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

#ifndef SKIM_ERRORS_H_
#define SKIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace skim {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arguments violate a documented precondition (ranges, counts, sizes).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite input or a value outside a function's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Matrix/vector/raster shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An object is not in the state an operation needs (e.g. untrained network).
class StateError : public Error {
 public:
  using Error::Error;
};

// Operation applied to the wrong kind of object.
class MisuseError : public Error {
 public:
  using Error::Error;
};

// Reduction over data that carries no information (e.g. all-zero weights).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace skim

#endif  // SKIM_ERRORS_H_

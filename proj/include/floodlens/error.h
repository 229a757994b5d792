// Copyright 2026 The FloodLens Authors.
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

#ifndef FLOODLENS_ERROR_H_
#define FLOODLENS_ERROR_H_

#include <stdexcept>
#include <string>

namespace floodlens {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a file format or domain invariant. The message always
// names the offending file and, where known, the record (line number or id).
class DataError : public Error {
 public:
  using Error::Error;
  DataError(const std::string &where, const std::string &what)
      : Error(where + ": " + what) {}
};

// Caller passed inconsistent options or arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace floodlens

#endif  // FLOODLENS_ERROR_H_

// Copyright 2026 The ivcsim Authors.
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

namespace ivc {

// Base for every error raised by the library. Subclasses exist so callers can
// tell a malformed input from a failed lookup without parsing messages.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text that does not follow a grammar (locators, message URIs, clock times).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A well-formed reference that names nothing in the loaded data.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a function (negative range, zero heading...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Scenario or network data that is internally inconsistent.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Sealed bytes that fail their checksum or do not decode.
class TamperError : public Error {
 public:
  using Error::Error;
};

}  // namespace ivc

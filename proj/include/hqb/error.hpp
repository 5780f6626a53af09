// Copyright 2026 The hqb Authors
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
/**
 * @file
 * Exception hierarchy shared by every hqb module.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hqb {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A size limit was exceeded (qubit count, feature count).
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// A value lies outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Shapes or layouts of two operands disagree.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A vector with zero L2 norm cannot be turned into a quantum state.
class NormalizationError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// Two gradient backends disagreed beyond tolerance.
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
  public:
    using Error::Error;
};

/// A binary file violates its declared layout (magic number, size).
class FormatError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace hqb

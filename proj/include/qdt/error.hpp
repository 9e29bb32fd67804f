// Copyright 2026 The qdt Authors
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

namespace qdt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands disagree in dimension or qubit count.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Tensor factors share a qubit label.
class LabelConflictError : public Error {
 public:
  using Error::Error;
};

/// An element with (numerically) zero trace cannot be normalized.
class DegenerateElementError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument to an operation (bad partition, bad outcome string, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. The message names the offending record.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qdt

// Copyright 2026 The simulst Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace simulst {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value is outside the documented domain of an operation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Malformed input record. The message names the offending line when known.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace simulst

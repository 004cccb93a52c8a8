// Copyright 2026 The CDNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cdnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor or vector dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A configuration value or argument is outside its documented domain.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data is malformed or unusable (parse failures, class coverage, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Misuse of the differentiation tape (reuse, foreign root, ...).
class TapeError : public Error {
public:
    using Error::Error;
};

}  // namespace cdnet

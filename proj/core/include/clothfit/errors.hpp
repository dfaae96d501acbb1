// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clothfit {

/// Coarse classification used by the command-line driver to pick an exit code.
enum class ErrorCategory {
  Validation,  // bad input, schema or invariant violation (exit 2)
  Numeric,     // computation could not produce a finite / defined result (exit 3)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorCategory::Validation, what) {}
};

/// Array dimensions do not agree with the model or with each other.
class ShapeError : public ValidationError {
 public:
  explicit ShapeError(const std::string& what) : ValidationError(what) {}
};

/// The mesh does not cover a single pixel of the target image.
class EmptyRenderError : public Error {
 public:
  explicit EmptyRenderError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

class InitError : public ValidationError {
 public:
  explicit InitError(const std::string& what) : ValidationError(what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

class PolarityMismatchError : public ValidationError {
 public:
  explicit PolarityMismatchError(const std::string& what) : ValidationError(what) {}
};

enum class IoErrorKind {
  MissingFile,
  MalformedHeader,
  DimensionMismatch,
  PolarityTag,
  UnsupportedFormat,
  Schema,
};

std::string_view to_string(IoErrorKind kind);

/// File-level failures. `kind()` distinguishes the cases callers need to branch on.
class IoError : public ValidationError {
 public:
  IoError(IoErrorKind kind, const std::string& path, const std::string& detail);

  IoErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  IoErrorKind kind_;
  std::string path_;
};

}  // namespace clothfit

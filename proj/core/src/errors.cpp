// Copyright 2026 The clothfit Authors
// SPDX-License-Identifier: Apache-2.0
#include "clothfit/errors.hpp"

namespace clothfit {

std::string_view to_string(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::MissingFile: return "missing file";
    case IoErrorKind::MalformedHeader: return "malformed header";
    case IoErrorKind::DimensionMismatch: return "dimension mismatch";
    case IoErrorKind::PolarityTag: return "missing or contradictory polarity tag";
    case IoErrorKind::UnsupportedFormat: return "unsupported format";
    case IoErrorKind::Schema: return "schema violation";
  }
  return "unknown";
}

IoError::IoError(IoErrorKind kind, const std::string& path, const std::string& detail)
    : ValidationError(std::string(to_string(kind)) + ": " + path + (detail.empty() ? "" : " (" + detail + ")")),
      kind_(kind),
      path_(path) {}

}  // namespace clothfit

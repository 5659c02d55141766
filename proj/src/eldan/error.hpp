// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eldan {

enum class ErrorKind {
  validation,   // malformed input or violated precondition
  domain,       // mathematically out of range (negative eigenvalue, non-PD)
  singularity,  // rank-deficient Jacobian
  projection,   // Gauss-Newton did not reach the fiber
  state,        // process state violates its invariants
  unsupported,  // request outside the implemented family
  invariant,    // a checked mathematical invariant failed
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(message), kind_(kind), path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  // JSON-pointer style location for config errors, empty otherwise.
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message,
                              std::string path = {}) {
  throw Error(kind, message, std::move(path));
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::projection: return "projection";
    case ErrorKind::state: return "state";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

}  // namespace eldan

#pragma once

#include <stdexcept>
#include <string>

namespace narrex {

/// Base class of every error raised by the library. `code()` is a stable,
/// machine-readable identifier (used verbatim in service error bodies).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(std::move(code)), detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

/// Malformed or structurally inconsistent bundle documents.
/// Codes: syntax-error, dangling-reference, taxonomy-cycle, duplicate-id,
/// invalid-structure, unknown-concept.
class BundleError : public Error {
 public:
  using Error::Error;
};

/// Raised by the reasoner. Codes: cyclic-dependency, not-derived.
class ReasoningError : public Error {
 public:
  using Error::Error;
};

/// Illegal interaction against an explanans.
/// Codes: unknown-target, not-applicable, malformed-arguments,
/// nothing-to-expand, already-present, empty-claim, unknown-argument.
class InteractionError : public Error {
 public:
  using Error::Error;
};

/// Rejected what-if mutations. Codes: not-a-premise, type-mismatch.
class MutationError : public Error {
 public:
  using Error::Error;
};

}  // namespace narrex

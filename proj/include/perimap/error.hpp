#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace perimap {

enum class ErrorKind {
  InvalidSpec,
  DegenerateTriple,
  DomainViolation,
  PreconditionViolation,
  InsufficientSpace,
  InsufficientData,
  SuiteConfigError,
  ParseError,
  SchemaError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. `path` is a JSON-pointer style
/// location for scenario parse/schema errors and empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {})
      : std::runtime_error(format(kind, message, path)), kind_(kind), message_(message), path_(std::move(path)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& message() const noexcept { return message_; }
  const std::string& path() const noexcept { return path_; }

 private:
  static std::string format(ErrorKind kind, const std::string& message, const std::string& path) {
    std::string out(to_string(kind));
    if (!path.empty()) out += " at " + path;
    out += ": " + message;
    return out;
  }

  ErrorKind kind_;
  std::string message_;
  std::string path_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::DegenerateTriple: return "DegenerateTriple";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::InsufficientSpace: return "InsufficientSpace";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SuiteConfigError: return "SuiteConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Error";
}

}  // namespace perimap

#pragma once

#include <stdexcept>
#include <string>

namespace eap {

enum class ErrorKind {
  Schema,
  Duplicate,
  EmptyDataset,
  DegenerateFeature,
  InsufficientData,
  UndefinedMinimum,
  NoExemplar,
  UndefinedMetric,
  NoNeighbor,
  Config,
  Io,
};

/// Error type carried by all throwing operations; `kind()` identifies the
/// failure class so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace eap

#pragma once

#include <stdexcept>
#include <string>

namespace qftm {

/// Input outside the domain of an operation (bad indices, shapes, padding).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A scenario violates one of its causal preconditions. The message names the
/// predicate that failed.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Selective update requested for an outcome of (numerically) zero probability.
class NullConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probe composition requested for coupling zones that are not causally ordered.
class CompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed scenario configuration. Carries the line of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace qftm

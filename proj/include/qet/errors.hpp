#pragma once

#include <stdexcept>
#include <string>

namespace qet {

// The ground level is (numerically) degenerate, so gap-based guarantees do
// not apply. Callers that require a unique ground state refuse with this.
class DegenerateGroundStateError : public std::runtime_error {
 public:
  explicit DegenerateGroundStateError(const std::string& what)
      : std::runtime_error(what) {}
};

// Requested Hilbert-space dimension exceeds the configured solver limit.
class DimensionLimitError : public std::runtime_error {
 public:
  explicit DimensionLimitError(const std::string& what)
      : std::runtime_error(what) {}
};

// Kraus completeness sum deviates from the identity.
class CompletenessError : public std::runtime_error {
 public:
  CompletenessError(const std::string& what, double deviation)
      : std::runtime_error(what), deviation_(deviation) {}
  double deviation() const { return deviation_; }

 private:
  double deviation_;
};

class EigensolverError : public std::runtime_error {
 public:
  explicit EigensolverError(const std::string& what)
      : std::runtime_error(what) {}
};

// Configuration file problems; carries a line number when one is known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what
                                     : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace qet

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gtp {

/// Non-finite or out-of-domain numeric argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside a closed interval (e.g. arc length beyond a segment).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Coincident or otherwise degenerate geometric input.
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Newton iteration in the G1 fitter did not converge.
class NoConvergenceError : public std::runtime_error {
 public:
  NoConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A waypoint set that cannot be turned into a path. segment_index is the
/// curve segment that failed (0 when the failure is an ordering check).
class InfeasibleGeometryError : public std::runtime_error {
 public:
  InfeasibleGeometryError(const std::string& what, std::size_t segment_index)
      : std::runtime_error(what), segment_index_(segment_index) {}
  std::size_t segment_index() const noexcept { return segment_index_; }

 private:
  std::size_t segment_index_;
};

/// Two trajectories have no common time instant, or are not on one grid.
class EmptyWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No wait time within the horizon resolves the conflict.
class InfeasibleScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario file could not be parsed.
class ScenarioSyntaxError : public std::runtime_error {
 public:
  ScenarioSyntaxError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A parsed value breaks an invariant. field() is the dotted key path.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace gtp

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cforge {

// Every failure mode the engine can report. Checks convert these into
// report entries; only genuine internal contradictions abort a run.
enum class ErrKind {
  Parse,
  UnboundVariable,
  Domain,
  ChartMismatch,
  DegreeOverflow,
  UnsupportedDegree,
  SingularFlat,
  SingularSymplectic,
  SingularSharp,
  EigenSolverFailure,
  TrackingAmbiguity,
  WrongCount,
  NotHomogeneous,
  NameCollision,
  UnsupportedConformalFactor,
  RejectionExhausted,
  UnknownReference,
  IndexOutOfRange,
  AntisymmetryViolation,
  IllConditionedJacobian,
  InternalInconsistency,
  Usage,
};

const char* to_string(ErrKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

  ErrKind kind() const { return kind_; }

 private:
  ErrKind kind_;
};

// Parse failures carry the byte offset into the input and, when useful,
// a hint about what the parser expected at that position.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& msg, std::string expected = "")
      : Error(ErrKind::Parse, msg + " (at byte " + std::to_string(position) + ")"),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const { return position_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace cforge

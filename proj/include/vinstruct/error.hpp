#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vinstruct {

enum class ErrorCode {
  // domain construction
  InvalidName,
  InvalidPose,
  InvalidArgument,
  // extraction
  NoComponentsFound,
  AmbiguousRoles,
  SingleComponent,
  WrongArity,
  BadCount,
  BadName,
  SameComponent,
  UnknownComponent,
  Timeout,
  TransportError,
  // files
  IoError,
  SchemaError,
  ValidationError,
  // engine / session
  InsufficientInstances,
  EndOfSteps,
  AtBeginning,
  // gateway
  QueueFull,
  NotReady,
};

std::string_view to_string(ErrorCode code);

/// Error type shared by every module. `raw` carries the unparsed payload
/// (e.g. a remote model response) and `step` the 1-based step index when
/// the failure happened inside a session.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  const std::optional<std::string>& raw() const noexcept { return raw_; }
  Error& with_raw(std::string raw) {
    raw_ = std::move(raw);
    return *this;
  }

  const std::optional<int>& step() const noexcept { return step_; }
  Error& with_step(int step) {
    step_ = step;
    return *this;
  }

 private:
  ErrorCode code_;
  std::optional<std::string> raw_;
  std::optional<int> step_;
};

}  // namespace vinstruct

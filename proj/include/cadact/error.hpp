#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cadact {

enum class ErrorCode {
  // sequence-parser
  MalformedToken,
  DanglingLoop,
  EmptySequence,
  EmptyInput,
  // geometry-transform
  OutOfRange,
  DegenerateNormal,
  OffCanvas,
  DegenerateChord,
  ReflexOverflow,
  OpenLoop,
  // action-compiler
  UnsupportedGeometry,
  MalformedVector,
  // solid-kernel
  SelfIntersecting,
  ZeroDepth,
  RemoveFromEmpty,
  EmptySolid,
  // metrics
  EmptyCloud,
  DegenerateCloud,
  LengthMismatch,
  // dataset / vqa
  IdMismatch,
  EmptyDataset,
  InsufficientEpisodes,
  PrerequisiteUnmet,
  ChecksumMismatch,
  Io,
  Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace cadact

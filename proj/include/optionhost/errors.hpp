#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace optionhost {

enum class ErrorCode {
  InvalidSpec,
  ValueError,
  UnknownOption,
  MutationDuringRun,
  XmlSyntaxError,
  SchemaError,
  SpecMismatch,
  MissingRequired,
  ExecutableNotFound,
  InputFileMissing,
  SpawnFailed,
  RunAlreadyActive,
  AlreadyTerminated,
  UnknownRun,
  IoError,
  UnknownFlag,
  MissingValue,
  DuplicateFlag,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library. `ids` carries the option ids (or
// flag tokens, paths) the error is about, so callers can render them without
// parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> ids = {})
      : std::runtime_error(message), code_(code), ids_(std::move(ids)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  ErrorCode code_;
  std::vector<std::string> ids_;
};

}  // namespace optionhost

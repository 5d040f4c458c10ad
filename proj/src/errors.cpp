#include "optionhost/errors.hpp"

namespace optionhost {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ValueError: return "ValueError";
    case ErrorCode::UnknownOption: return "UnknownOption";
    case ErrorCode::MutationDuringRun: return "MutationDuringRun";
    case ErrorCode::XmlSyntaxError: return "XmlSyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::MissingRequired: return "MissingRequired";
    case ErrorCode::ExecutableNotFound: return "ExecutableNotFound";
    case ErrorCode::InputFileMissing: return "InputFileMissing";
    case ErrorCode::SpawnFailed: return "SpawnFailed";
    case ErrorCode::RunAlreadyActive: return "RunAlreadyActive";
    case ErrorCode::AlreadyTerminated: return "AlreadyTerminated";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownFlag: return "UnknownFlag";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::DuplicateFlag: return "DuplicateFlag";
  }
  return "Unknown";
}

}  // namespace optionhost

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "optionhost/model.hpp"

namespace optionhost {

// A path value the runner must check before launching.
struct PathArgument {
  std::string option_id;
  OptionKind kind = OptionKind::InFile;
  std::string path;  // verbatim, relative paths resolve against cwd
  bool operator==(const PathArgument&) const = default;
};

struct AssembledCommand {
  std::vector<std::string> argv;  // argv[0] is the spec's executable
  std::string preview;            // shell-quoted, display only
  std::filesystem::path cwd;
  std::vector<PathArgument> paths;

  bool operator==(const AssembledCommand&) const = default;
};

// POSIX sh quoting: [A-Za-z0-9_./=-]+ passes through, anything else is
// single-quoted with embedded quotes written as '\''.
std::string shell_quote(std::string_view token);

std::string join_quoted(const std::vector<std::string>& argv);

// Throws Error(MissingRequired) listing unset required ids.
AssembledCommand assemble(const SessionState& session);

// Like assemble but never fails: unmet required options are skipped and
// listed on a trailing "MISSING REQUIRED: a, b" line.
std::string preview_text(const SessionState& session);

}  // namespace optionhost

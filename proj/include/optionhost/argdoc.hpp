#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optionhost/model.hpp"

namespace optionhost::argdoc {

enum class EmitFormat { ShortHelp, LongHelp, ManPage, GuilinerXml };

// "short" | "long" | "man" | "xml"
std::string_view to_string(EmitFormat format) noexcept;
std::optional<EmitFormat> parse_format(std::string_view name) noexcept;

// A program's options and their documentation, declared in source.
struct ArgSpec {
  std::string name;
  std::string version;
  std::string summary;      // one line
  std::string description;  // paragraphs separated by blank lines
  std::vector<OptionGroup> groups;
  int man_section = 1;
  std::string date;  // shown in the man page footer
  std::string author;

  // Appends `def` to the group called `group`, creating it on first use.
  ArgSpec& add(std::string_view group, OptionDef def);

  bool operator==(const ArgSpec&) const = default;
};

// Everything check_spec finds on the projection, plus what argv parsing
// needs: flags start with '-', flags are unique, a repeatable positional
// comes last, and the man section is 1..8.
std::vector<std::string> check_argspec(const ArgSpec& spec);

// The host-side view: executable = name, display title = summary.
ProgramSpec to_program_spec(const ArgSpec& spec);

struct ParsedArgs {
  // Set values per option id, in command-line order.
  std::map<std::string, std::vector<OptionValue>, std::less<>> values;
  std::vector<std::string> positionals;

  bool has(std::string_view id) const { return values.contains(id); }
  const OptionValue& get(std::string_view id) const;
};

// `args` excludes argv[0]. Throws Error with UnknownFlag, MissingValue,
// MissingRequired, ValueError or DuplicateFlag.
ParsedArgs parse_argv(const ArgSpec& spec, const std::vector<std::string>& args);

std::string emit(const ArgSpec& spec, EmitFormat format);

}  // namespace optionhost::argdoc

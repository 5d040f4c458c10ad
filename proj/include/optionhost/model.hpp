#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "optionhost/errors.hpp"

namespace optionhost {

enum class OptionKind { Flag, String, Int, Float, Choice, InFile, OutFile, Dir };

// How a set option turns into argv entries.
enum class RenderStyle {
  SeparateToken,  // "--flag" "value"
  EqualsJoined,   // "--flag=value"
  FlagOnly,       // "--flag"
  Positional,     // "value"
};

std::string_view to_string(OptionKind kind) noexcept;
std::string_view to_string(RenderStyle style) noexcept;
std::optional<OptionKind> parse_kind(std::string_view name) noexcept;
std::optional<RenderStyle> parse_style(std::string_view name) noexcept;

bool is_numeric(OptionKind kind) noexcept;
bool is_path(OptionKind kind) noexcept;

struct Text {
  std::string text;
  bool operator==(const Text&) const = default;
};
struct ChoiceKey {
  std::string key;
  bool operator==(const ChoiceKey&) const = default;
};
struct PathValue {
  std::string path;
  bool operator==(const PathValue&) const = default;
};

// One typed option value. The alternative must match the owning def's kind:
// bool for Flag, Text for String, int64 for Int, double for Float, ChoiceKey
// for Choice and PathValue for InFile/OutFile/Dir.
using OptionValue =
    std::variant<bool, Text, std::int64_t, double, ChoiceKey, PathValue>;

// Canonical raw rendering: the string validate_value maps back to the same
// value. Numbers use the shortest round-trip decimal form.
std::string render_value(const OptionValue& value);

struct Choice {
  std::string value;
  std::string label;
  bool operator==(const Choice&) const = default;
};

struct NumericRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const NumericRange&) const = default;
};

struct OptionDef {
  std::string id;
  std::string label;
  std::string flag;
  OptionKind kind = OptionKind::String;
  bool required = false;
  bool repeatable = false;
  RenderStyle style = RenderStyle::SeparateToken;
  std::optional<OptionValue> default_value;
  std::vector<Choice> choices;
  std::optional<NumericRange> range;
  std::string doc;

  bool operator==(const OptionDef&) const = default;
};

struct OptionGroup {
  std::string name;
  std::string doc;
  std::vector<OptionDef> options;

  bool operator==(const OptionGroup&) const = default;
};

struct ProgramSpec {
  std::string name;
  std::string executable;
  std::string description;
  std::string version;
  std::string display_title;
  std::vector<OptionGroup> groups;

  bool operator==(const ProgramSpec&) const = default;

  // Options in document order (group order, then option order).
  std::vector<const OptionDef*> options() const;
  const OptionDef* find(std::string_view id) const;
  const OptionGroup* group_of(std::string_view id) const;
};

// Where an invariant violation sits inside a ProgramSpec. `option` is absent
// for group- or program-level problems; `group` is absent for program-level
// ones. `related` points at a second option (e.g. the first definition of a
// duplicated id).
struct SpecLocation {
  std::optional<std::size_t> group;
  std::optional<std::size_t> option;
  bool operator==(const SpecLocation&) const = default;
};

struct SpecIssue {
  SpecLocation where;
  std::string message;
  std::optional<SpecLocation> related;
};

// All invariant violations of a spec, in document order. Empty means valid.
std::vector<SpecIssue> check_spec(const ProgramSpec& spec);

// Option-level invariants only (used by check_spec for every option).
std::vector<std::string> check_option(const OptionDef& def);

// nullopt when `value` is acceptable for `def`, otherwise the reason.
std::optional<std::string> check_value(const OptionDef& def,
                                       const OptionValue& value);

// Parses raw text into a value for `def`. Throws Error(ValueError).
OptionValue validate_value(const OptionDef& def, std::string_view raw);

enum class DisplayColor { Red, Black, Blue };
std::string_view to_string(DisplayColor color) noexcept;

struct RequiredUnset {
  bool operator==(const RequiredUnset&) const = default;
};
struct OptionalUnset {
  bool operator==(const OptionalUnset&) const = default;
};
struct Set {
  // One entry for ordinary options; set order for repeatable ones.
  std::vector<OptionValue> values;
  bool operator==(const Set&) const = default;
};

using OptionState = std::variant<RequiredUnset, OptionalUnset, Set>;

DisplayColor display_color(const OptionState& state) noexcept;
// "required-unset" | "optional-unset" | "set"
std::string_view state_name(const OptionState& state) noexcept;
bool is_set(const OptionState& state) noexcept;

struct SessionState {
  std::shared_ptr<const ProgramSpec> spec;
  std::map<std::string, OptionState, std::less<>> states;
  std::filesystem::path working_dir;
  std::optional<std::string> active_run;

  const OptionState& state(std::string_view id) const;

  friend bool operator==(const SessionState& a, const SessionState& b);
};

SessionState new_session(ProgramSpec spec, std::filesystem::path working_dir);
SessionState new_session(std::shared_ptr<const ProgramSpec> spec,
                         std::filesystem::path working_dir);

SessionState set_option(const SessionState& session, std::string_view id,
                        std::string_view raw);
// Stores an already-typed value; same rules as set_option.
SessionState set_value(const SessionState& session, std::string_view id,
                       const OptionValue& value);
SessionState clear_option(const SessionState& session, std::string_view id);
SessionState reset_all(const SessionState& session);
std::vector<std::string> unmet_required(const SessionState& session);

SessionState with_active_run(const SessionState& session, std::string run_id);
SessionState without_active_run(const SessionState& session);

}  // namespace optionhost

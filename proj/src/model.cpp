#include "optionhost/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>
#include <utility>

namespace optionhost {

namespace {

constexpr std::array<std::pair<OptionKind, std::string_view>, 8> kKindNames{{
    {OptionKind::Flag, "flag"},
    {OptionKind::String, "string"},
    {OptionKind::Int, "int"},
    {OptionKind::Float, "float"},
    {OptionKind::Choice, "choice"},
    {OptionKind::InFile, "infile"},
    {OptionKind::OutFile, "outfile"},
    {OptionKind::Dir, "dir"},
}};

constexpr std::array<std::pair<RenderStyle, std::string_view>, 4> kStyleNames{{
    {RenderStyle::SeparateToken, "separate"},
    {RenderStyle::EqualsJoined, "equals"},
    {RenderStyle::FlagOnly, "flagonly"},
    {RenderStyle::Positional, "positional"},
}};

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  });
}

[[noreturn]] void value_error(const OptionDef& def, const std::string& reason) {
  throw Error(ErrorCode::ValueError,
              "invalid value for option '" + def.id + "': " + reason, {def.id});
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

// XML 1.0 can carry every valid UTF-8 scalar except most C0 controls; keeping
// values inside that set lets saved settings always reload.
bool is_storable_text(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') return false;
      ++i;
      continue;
    }
    std::size_t len = (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3
                    : (c & 0xF8) == 0xF0 ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    std::uint32_t cp = c & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) ||
        cp == 0xFFFE || cp == 0xFFFF) {
      return false;
    }
    i += len;
  }
  return true;
}

constexpr const char* kUnstorable =
    "text must be valid UTF-8 without control characters other than tab, "
    "newline and carriage return";

std::optional<std::string> check_range(const OptionDef& def, long double v) {
  if (!def.range) return std::nullopt;
  if (v < static_cast<long double>(def.range->min) ||
      v > static_cast<long double>(def.range->max)) {
    return "value outside range [" + format_number(def.range->min) + ", " +
           format_number(def.range->max) + "]";
  }
  return std::nullopt;
}

const OptionDef& require_def(const SessionState& session, std::string_view id) {
  const OptionDef* def = session.spec->find(id);
  if (def == nullptr) {
    throw Error(ErrorCode::UnknownOption,
                "unknown option '" + std::string(id) + "'", {std::string(id)});
  }
  return *def;
}

void require_idle(const SessionState& session) {
  if (session.active_run) {
    throw Error(ErrorCode::MutationDuringRun,
                "options cannot change while run " + *session.active_run +
                    " is active",
                {*session.active_run});
  }
}

OptionState unset_state(const OptionDef& def) {
  if (def.required) return RequiredUnset{};
  return OptionalUnset{};
}

}  // namespace

std::string_view to_string(OptionKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::string_view to_string(RenderStyle style) noexcept {
  for (const auto& [s, name] : kStyleNames) {
    if (s == style) return name;
  }
  return "?";
}

std::optional<OptionKind> parse_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::optional<RenderStyle> parse_style(std::string_view name) noexcept {
  for (const auto& [s, n] : kStyleNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

bool is_numeric(OptionKind kind) noexcept {
  return kind == OptionKind::Int || kind == OptionKind::Float;
}

bool is_path(OptionKind kind) noexcept {
  return kind == OptionKind::InFile || kind == OptionKind::OutFile ||
         kind == OptionKind::Dir;
}

std::string render_value(const OptionValue& value) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Text& t) const { return t.text; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const ChoiceKey& c) const { return c.key; }
    std::string operator()(const PathValue& p) const { return p.path; }
  };
  return std::visit(Visitor{}, value);
}

std::vector<const OptionDef*> ProgramSpec::options() const {
  std::vector<const OptionDef*> out;
  for (const auto& g : groups) {
    for (const auto& o : g.options) out.push_back(&o);
  }
  return out;
}

const OptionDef* ProgramSpec::find(std::string_view id) const {
  for (const auto& g : groups) {
    for (const auto& o : g.options) {
      if (o.id == id) return &o;
    }
  }
  return nullptr;
}

const OptionGroup* ProgramSpec::group_of(std::string_view id) const {
  for (const auto& g : groups) {
    for (const auto& o : g.options) {
      if (o.id == id) return &g;
    }
  }
  return nullptr;
}

std::vector<std::string> check_option(const OptionDef& def) {
  std::vector<std::string> problems;
  if (def.id.empty()) {
    problems.emplace_back("option id must not be empty");
  } else if (has_whitespace(def.id)) {
    problems.emplace_back("option id '" + def.id +
                          "' must not contain whitespace");
  }
  if (has_whitespace(def.flag)) {
    problems.emplace_back("flag '" + def.flag + "' must not contain whitespace");
  }
  if (def.style == RenderStyle::Positional && !def.flag.empty()) {
    problems.emplace_back("positional option must not declare a flag");
  }
  if (def.style != RenderStyle::Positional && def.flag.empty()) {
    problems.emplace_back("style '" + std::string(to_string(def.style)) +
                          "' requires a flag token");
  }
  if (def.kind == OptionKind::Flag && def.style != RenderStyle::FlagOnly) {
    problems.emplace_back("flag options must use style 'flagonly'");
  }
  if (def.kind != OptionKind::Flag && def.style == RenderStyle::FlagOnly) {
    problems.emplace_back("style 'flagonly' is only valid for flag options");
  }
  if (def.kind == OptionKind::Choice) {
    if (def.choices.empty()) {
      problems.emplace_back("Choice requires at least one choice");
    }
    std::set<std::string_view> seen;
    for (const auto& c : def.choices) {
      if (!seen.insert(c.value).second) {
        problems.emplace_back("duplicate choice value '" + c.value + "'");
      }
    }
  } else if (!def.choices.empty()) {
    problems.emplace_back("choices are only valid for choice options");
  }
  if (def.range) {
    if (!is_numeric(def.kind)) {
      problems.emplace_back("range is only valid for int and float options");
    }
    if (!std::isfinite(def.range->min) || !std::isfinite(def.range->max)) {
      problems.emplace_back("range bounds must be finite");
    } else if (def.range->min > def.range->max) {
      problems.emplace_back("range min " + format_number(def.range->min) +
                            " exceeds max " + format_number(def.range->max));
    }
  }
  if (def.default_value) {
    if (auto why = check_value(def, *def.default_value)) {
      problems.emplace_back("default does not validate: " + *why);
    }
  }
  return problems;
}

std::vector<SpecIssue> check_spec(const ProgramSpec& spec) {
  std::vector<SpecIssue> issues;
  if (spec.executable.empty()) {
    issues.push_back({{}, "program executable must not be empty", {}});
  }
  std::map<std::string, std::size_t, std::less<>> group_names;
  std::map<std::string, SpecLocation, std::less<>> ids;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    const auto& group = spec.groups[g];
    SpecLocation gloc{g, std::nullopt};
    if (group.name.empty()) {
      issues.push_back({gloc, "group name must not be empty", {}});
    } else if (auto [it, fresh] = group_names.emplace(group.name, g); !fresh) {
      issues.push_back({gloc, "duplicate group name '" + group.name + "'",
                        SpecLocation{it->second, std::nullopt}});
    }
    for (std::size_t o = 0; o < group.options.size(); ++o) {
      const auto& def = group.options[o];
      SpecLocation oloc{g, o};
      for (auto& p : check_option(def)) {
        issues.push_back({oloc, std::move(p), {}});
      }
      if (def.id.empty()) continue;
      if (auto [it, fresh] = ids.emplace(def.id, oloc); !fresh) {
        issues.push_back(
            {oloc, "duplicate option id '" + def.id + "'", it->second});
      }
    }
  }
  return issues;
}

std::optional<std::string> check_value(const OptionDef& def,
                                       const OptionValue& value) {
  auto kind_mismatch = [&]() -> std::optional<std::string> {
    return "value type does not match kind '" +
           std::string(to_string(def.kind)) + "'";
  };
  switch (def.kind) {
    case OptionKind::Flag:
      if (!std::holds_alternative<bool>(value)) return kind_mismatch();
      return std::nullopt;
    case OptionKind::String:
      if (!std::holds_alternative<Text>(value)) return kind_mismatch();
      if (!is_storable_text(std::get<Text>(value).text)) return kUnstorable;
      return std::nullopt;
    case OptionKind::Int:
      if (!std::holds_alternative<std::int64_t>(value)) return kind_mismatch();
      return check_range(def, std::get<std::int64_t>(value));
    case OptionKind::Float: {
      if (!std::holds_alternative<double>(value)) return kind_mismatch();
      double d = std::get<double>(value);
      if (!std::isfinite(d)) return "value must be finite";
      return check_range(def, d);
    }
    case OptionKind::Choice: {
      if (!std::holds_alternative<ChoiceKey>(value)) return kind_mismatch();
      const auto& key = std::get<ChoiceKey>(value).key;
      bool known = std::any_of(def.choices.begin(), def.choices.end(),
                               [&](const Choice& c) { return c.value == key; });
      if (!known) return "unknown choice '" + key + "'";
      return std::nullopt;
    }
    case OptionKind::InFile:
    case OptionKind::OutFile:
    case OptionKind::Dir: {
      if (!std::holds_alternative<PathValue>(value)) return kind_mismatch();
      const auto& p = std::get<PathValue>(value).path;
      if (p.empty()) return "path must not be empty";
      if (!is_storable_text(p)) return kUnstorable;
      return std::nullopt;
    }
  }
  return kind_mismatch();
}

OptionValue validate_value(const OptionDef& def, std::string_view raw) {
  OptionValue value;
  switch (def.kind) {
    case OptionKind::Flag:
      if (raw == "true") {
        value = true;
      } else if (raw == "false") {
        value = false;
      } else {
        value_error(def, "expected 'true' or 'false'");
      }
      break;
    case OptionKind::String:
      value = Text{std::string(raw)};
      break;
    case OptionKind::Int: {
      std::int64_t i = 0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), i);
      if (ec == std::errc::result_out_of_range) {
        value_error(def, "'" + std::string(raw) +
                             "' does not fit in a 64-bit signed integer");
      }
      if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty()) {
        value_error(def, "'" + std::string(raw) + "' is not an integer");
      }
      value = i;
      break;
    }
    case OptionKind::Float: {
      double d = 0.0;
      auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
      if (ec == std::errc::result_out_of_range) {
        value_error(def, "'" + std::string(raw) + "' is out of double range");
      }
      if (ec != std::errc{} || ptr != raw.data() + raw.size() || raw.empty()) {
        value_error(def, "'" + std::string(raw) + "' is not a number");
      }
      value = d;
      break;
    }
    case OptionKind::Choice:
      value = ChoiceKey{std::string(raw)};
      break;
    case OptionKind::InFile:
    case OptionKind::OutFile:
    case OptionKind::Dir:
      value = PathValue{std::string(raw)};
      break;
  }
  if (auto why = check_value(def, value)) value_error(def, *why);
  return value;
}

std::string_view to_string(DisplayColor color) noexcept {
  switch (color) {
    case DisplayColor::Red:
      return "red";
    case DisplayColor::Black:
      return "black";
    case DisplayColor::Blue:
      return "blue";
  }
  return "?";
}

DisplayColor display_color(const OptionState& state) noexcept {
  if (std::holds_alternative<RequiredUnset>(state)) return DisplayColor::Red;
  if (std::holds_alternative<OptionalUnset>(state)) return DisplayColor::Black;
  return DisplayColor::Blue;
}

std::string_view state_name(const OptionState& state) noexcept {
  if (std::holds_alternative<RequiredUnset>(state)) return "required-unset";
  if (std::holds_alternative<OptionalUnset>(state)) return "optional-unset";
  return "set";
}

bool is_set(const OptionState& state) noexcept {
  return std::holds_alternative<Set>(state);
}

const OptionState& SessionState::state(std::string_view id) const {
  auto it = states.find(id);
  if (it == states.end()) {
    throw Error(ErrorCode::UnknownOption,
                "unknown option '" + std::string(id) + "'", {std::string(id)});
  }
  return it->second;
}

bool operator==(const SessionState& a, const SessionState& b) {
  bool same_spec = a.spec == b.spec || (a.spec && b.spec && *a.spec == *b.spec);
  return same_spec && a.states == b.states && a.working_dir == b.working_dir &&
         a.active_run == b.active_run;
}

SessionState new_session(ProgramSpec spec, std::filesystem::path working_dir) {
  return new_session(std::make_shared<const ProgramSpec>(std::move(spec)),
                     std::move(working_dir));
}

SessionState new_session(std::shared_ptr<const ProgramSpec> spec,
                         std::filesystem::path working_dir) {
  if (!spec) throw Error(ErrorCode::InvalidSpec, "no program spec");
  auto issues = check_spec(*spec);
  if (!issues.empty()) {
    std::string detail = issues.front().message;
    if (issues.size() > 1) {
      detail += " (and " + std::to_string(issues.size() - 1) + " more)";
    }
    throw Error(ErrorCode::InvalidSpec, "invalid program spec: " + detail);
  }
  SessionState session;
  for (const OptionDef* def : spec->options()) {
    session.states.emplace(def->id, unset_state(*def));
  }
  session.spec = std::move(spec);
  session.working_dir = std::move(working_dir);
  return session;
}

SessionState set_option(const SessionState& session, std::string_view id,
                        std::string_view raw) {
  const OptionDef& def = require_def(session, id);
  require_idle(session);
  return set_value(session, id, validate_value(def, raw));
}

SessionState set_value(const SessionState& session, std::string_view id,
                       const OptionValue& value) {
  const OptionDef& def = require_def(session, id);
  require_idle(session);
  if (auto why = check_value(def, value)) value_error(def, *why);
  SessionState next = session;
  auto& slot = next.states.find(id)->second;
  if (def.repeatable && is_set(slot)) {
    std::get<Set>(slot).values.push_back(value);
  } else {
    slot = Set{{value}};
  }
  return next;
}

SessionState clear_option(const SessionState& session, std::string_view id) {
  const OptionDef& def = require_def(session, id);
  require_idle(session);
  SessionState next = session;
  next.states.find(id)->second = unset_state(def);
  return next;
}

SessionState reset_all(const SessionState& session) {
  require_idle(session);
  SessionState next = session;
  for (const OptionDef* def : session.spec->options()) {
    next.states.find(def->id)->second = unset_state(*def);
  }
  return next;
}

std::vector<std::string> unmet_required(const SessionState& session) {
  std::vector<std::string> ids;
  for (const OptionDef* def : session.spec->options()) {
    if (std::holds_alternative<RequiredUnset>(session.state(def->id))) {
      ids.push_back(def->id);
    }
  }
  return ids;
}

SessionState with_active_run(const SessionState& session, std::string run_id) {
  if (session.active_run) {
    throw Error(ErrorCode::RunAlreadyActive,
                "run " + *session.active_run + " is still active",
                {*session.active_run});
  }
  SessionState next = session;
  next.active_run = std::move(run_id);
  return next;
}

SessionState without_active_run(const SessionState& session) {
  SessionState next = session;
  next.active_run.reset();
  return next;
}

}  // namespace optionhost

#include "optionhost/argdoc.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "optionhost/spec_xml.hpp"

namespace optionhost::argdoc {

namespace {

constexpr std::size_t kShortWidth = 80;
constexpr std::size_t kLongWidth = 78;
constexpr std::size_t kLabelColumn = 26;

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<std::string> paragraphs(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (split_words(line).empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      if (!current.empty()) current += ' ';
      current += line;
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

// Greedy word wrap. The first line starts after `first_used` columns that
// the caller has already written; later lines are prefixed by `indent`.
std::string wrap(std::string_view text, std::size_t width,
                 std::size_t first_used, std::size_t indent) {
  std::string out;
  std::size_t col = first_used;
  bool line_empty = true;
  for (const auto& word : split_words(text)) {
    std::size_t need = word.size() + (line_empty ? 0 : 1);
    if (!line_empty && col + need > width) {
      out += '\n';
      out.append(indent, ' ');
      col = indent;
      line_empty = true;
      need = word.size();
    }
    if (!line_empty) out += ' ';
    out += word;
    col += need;
    line_empty = false;
  }
  return out;
}

std::string wrap_block(std::string_view text, std::size_t width,
                       std::size_t indent) {
  std::string out;
  for (const auto& para : paragraphs(text)) {
    if (!out.empty()) out += "\n\n";
    out.append(indent, ' ');
    out += wrap(para, width, indent, indent);
  }
  return out;
}

std::string placeholder(const OptionDef& def) {
  switch (def.kind) {
    case OptionKind::Flag: return "";
    case OptionKind::String: return "<text>";
    case OptionKind::Int: return "<int>";
    case OptionKind::Float: return "<float>";
    case OptionKind::Choice: {
      std::string s = "{";
      for (std::size_t i = 0; i < def.choices.size(); ++i) {
        if (i > 0) s += '|';
        s += def.choices[i].value;
      }
      return s + "}";
    }
    case OptionKind::InFile:
    case OptionKind::OutFile: return "<file>";
    case OptionKind::Dir: return "<dir>";
  }
  return "";
}

// "-t <float>", "--mode={a|b}", "<input>"
std::string invocation(const OptionDef& def) {
  switch (def.style) {
    case RenderStyle::SeparateToken: return def.flag + " " + placeholder(def);
    case RenderStyle::EqualsJoined: return def.flag + "=" + placeholder(def);
    case RenderStyle::FlagOnly: return def.flag;
    case RenderStyle::Positional: return "<" + def.id + ">";
  }
  return def.flag;
}

std::string usage_item(const OptionDef& def) {
  std::string item = invocation(def);
  if (def.repeatable) item += "...";
  return def.required ? item : "[" + item + "]";
}

std::vector<const OptionDef*> ordered_for_usage(const ArgSpec& spec) {
  std::vector<const OptionDef*> flagged;
  std::vector<const OptionDef*> positional;
  for (const auto& g : spec.groups) {
    for (const auto& o : g.options) {
      (o.style == RenderStyle::Positional ? positional : flagged).push_back(&o);
    }
  }
  flagged.insert(flagged.end(), positional.begin(), positional.end());
  return flagged;
}

std::string usage_line(const ArgSpec& spec) {
  std::string head = "Usage: " + spec.name;
  std::string items;
  for (const OptionDef* def : ordered_for_usage(spec)) {
    if (!items.empty()) items += ' ';
    // Keep each bracketed item on one line: protect its inner spaces.
    std::string item = usage_item(*def);
    std::replace(item.begin(), item.end(), ' ', '\x1f');
    items += item;
  }
  if (items.empty()) return head + "\n";
  std::string wrapped =
      wrap(items, kShortWidth, head.size() + 1, head.size() + 1);
  std::replace(wrapped.begin(), wrapped.end(), '\x1f', ' ');
  return head + " " + wrapped + "\n";
}

std::string option_line(const OptionDef& def) {
  std::string left = "  " + invocation(def);
  std::string label = def.label.empty() ? def.id : def.label;
  if (def.required) label += " (required)";
  if (left.size() + 2 > kLabelColumn) {
    return left + "\n" + std::string(kLabelColumn, ' ') +
           wrap(label, kShortWidth, kLabelColumn, kLabelColumn) + "\n";
  }
  left.append(kLabelColumn - left.size(), ' ');
  return left + wrap(label, kShortWidth, kLabelColumn, kLabelColumn) + "\n";
}

std::string short_help(const ArgSpec& spec) {
  std::string out = usage_line(spec);
  if (!spec.summary.empty()) out += wrap(spec.summary, kShortWidth, 0, 0) + "\n";
  for (const auto& group : spec.groups) {
    if (group.options.empty()) continue;
    out += "\n" + group.name + ":\n";
    for (const auto& def : group.options) out += option_line(def);
  }
  return out;
}

std::string facts(const OptionDef& def) {
  std::string s = std::string(to_string(def.kind));
  if (def.required) s += ", required";
  if (def.repeatable) s += ", repeatable";
  if (def.range) {
    s += ", range [" + render_value(def.range->min) + ", " +
         render_value(def.range->max) + "]";
  }
  if (def.default_value) s += ", default " + render_value(*def.default_value);
  return s;
}

std::string long_help(const ArgSpec& spec) {
  std::string out = short_help(spec);
  if (!paragraphs(spec.description).empty()) {
    out += "\nDescription:\n" + wrap_block(spec.description, kLongWidth, 2) +
           "\n";
  }
  for (const auto& group : spec.groups) {
    if (group.options.empty()) continue;
    out += "\n" + group.name + " details:\n";
    if (!paragraphs(group.doc).empty()) {
      out += wrap_block(group.doc, kLongWidth, 2) + "\n\n";
    }
    for (const auto& def : group.options) {
      out += "  " + invocation(def) + "\n";
      out += std::string(6, ' ') + wrap("(" + facts(def) + ")", kLongWidth, 6, 6) +
             "\n";
      for (const auto& c : def.choices) {
        std::string line = c.value + (c.label.empty() ? "" : " - " + c.label);
        out += std::string(8, ' ') + wrap(line, kLongWidth, 8, 10) + "\n";
      }
      if (!paragraphs(def.doc).empty()) {
        out += wrap_block(def.doc, kLongWidth, 6) + "\n";
      }
    }
  }
  return out;
}

std::string roff_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '\\') {
      out += "\\e";
    } else if (c == '-') {
      out += "\\-";
    } else {
      out += c;
    }
  }
  return out;
}

// Escapes text and guards lines that would otherwise read as requests.
std::string roff_text(std::string_view text) {
  std::string out;
  std::istringstream in{roff_escape(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) out += '\n';
    first = false;
    if (!line.empty() && (line[0] == '.' || line[0] == '\'')) out += "\\&";
    out += line;
  }
  return out;
}

std::string roff_paragraphs(std::string_view text, std::string_view separator) {
  std::string out;
  for (const auto& para : paragraphs(text)) {
    if (!out.empty()) out += "\n" + std::string(separator) + "\n";
    out += roff_text(para);
  }
  return out;
}

std::string roff_invocation(const OptionDef& def) {
  std::string ph = placeholder(def);
  switch (def.style) {
    case RenderStyle::SeparateToken:
      return "\\fB" + roff_escape(def.flag) + "\\fR \\fI" + roff_escape(ph) +
             "\\fR";
    case RenderStyle::EqualsJoined:
      return "\\fB" + roff_escape(def.flag) + "\\fR=\\fI" + roff_escape(ph) +
             "\\fR";
    case RenderStyle::FlagOnly: return "\\fB" + roff_escape(def.flag) + "\\fR";
    case RenderStyle::Positional: return "\\fI" + roff_escape(def.id) + "\\fR";
  }
  return roff_escape(def.flag);
}

std::string quoted_arg(std::string_view s) {
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\\(dq") : std::string(1, c);
  return out + "\"";
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string man_page(const ArgSpec& spec) {
  std::string out;
  std::string source = spec.name + (spec.version.empty() ? "" : " " + spec.version);
  out += ".TH " + quoted_arg(upper(spec.name)) + " " +
         std::to_string(spec.man_section) + " " + quoted_arg(spec.date) + " " +
         quoted_arg(source) + " " + quoted_arg("User Commands") + "\n";
  out += ".SH NAME\n";
  out += roff_escape(spec.name);
  if (!spec.summary.empty()) out += " \\- " + roff_text(spec.summary);
  out += "\n.SH SYNOPSIS\n.B " + roff_escape(spec.name) + "\n";
  for (const OptionDef* def : ordered_for_usage(spec)) {
    std::string item = roff_invocation(*def);
    if (def->repeatable) item += "...";
    out += (def->required ? item : "[" + item + "]") + "\n";
  }
  if (!paragraphs(spec.description).empty()) {
    out += ".SH DESCRIPTION\n" + roff_paragraphs(spec.description, ".PP") + "\n";
  }
  out += ".SH OPTIONS\n";
  for (const auto& group : spec.groups) {
    if (group.options.empty()) continue;
    out += ".SS " + roff_text(group.name) + "\n";
    if (!paragraphs(group.doc).empty()) {
      out += roff_paragraphs(group.doc, ".PP") + "\n";
    }
    for (const auto& def : group.options) {
      out += ".TP\n" + roff_invocation(def) + "\n";
      std::string label = def.label.empty() ? def.id : def.label;
      out += roff_text(label + " (" + facts(def) + ").") + "\n";
      if (!def.choices.empty()) {
        out += ".RS\n";
        for (const auto& c : def.choices) {
          out += ".IP \\(bu 2\n\\fB" + roff_escape(c.value) + "\\fR";
          if (!c.label.empty()) out += " \\- " + roff_escape(c.label);
          out += "\n";
        }
        out += ".RE\n";
      }
      if (!paragraphs(def.doc).empty()) {
        out += ".IP\n" + roff_paragraphs(def.doc, ".IP") + "\n";
      }
    }
  }
  if (!spec.author.empty()) {
    out += ".SH AUTHOR\n" + roff_text(spec.author) + "\n";
  }
  return out;
}

bool looks_numeric(std::string_view token) {
  double d = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

struct FlagIndex {
  std::map<std::string, const OptionDef*, std::less<>> by_flag;
  std::vector<const OptionDef*> positionals;

  explicit FlagIndex(const ArgSpec& spec) {
    for (const auto& g : spec.groups) {
      for (const auto& o : g.options) {
        if (o.style == RenderStyle::Positional) {
          positionals.push_back(&o);
        } else {
          by_flag.emplace(o.flag, &o);
        }
      }
    }
  }

  const OptionDef* find(std::string_view flag) const {
    auto it = by_flag.find(flag);
    return it == by_flag.end() ? nullptr : it->second;
  }
};

}  // namespace

std::string_view to_string(EmitFormat format) noexcept {
  switch (format) {
    case EmitFormat::ShortHelp: return "short";
    case EmitFormat::LongHelp: return "long";
    case EmitFormat::ManPage: return "man";
    case EmitFormat::GuilinerXml: return "xml";
  }
  return "?";
}

std::optional<EmitFormat> parse_format(std::string_view name) noexcept {
  for (auto f : {EmitFormat::ShortHelp, EmitFormat::LongHelp,
                 EmitFormat::ManPage, EmitFormat::GuilinerXml}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

ArgSpec& ArgSpec::add(std::string_view group, OptionDef def) {
  auto it = std::find_if(groups.begin(), groups.end(),
                         [&](const OptionGroup& g) { return g.name == group; });
  if (it == groups.end()) {
    groups.push_back({std::string(group), {}, {}});
    it = std::prev(groups.end());
  }
  it->options.push_back(std::move(def));
  return *this;
}

std::vector<std::string> check_argspec(const ArgSpec& spec) {
  std::vector<std::string> problems;
  if (spec.name.empty()) problems.emplace_back("program name must not be empty");
  for (const auto& issue : check_spec(to_program_spec(spec))) {
    problems.push_back(issue.message);
  }
  if (spec.man_section < 1 || spec.man_section > 8) {
    problems.emplace_back("man section must be between 1 and 8");
  }
  std::set<std::string_view> flags;
  bool repeatable_positional_seen = false;
  for (const auto& g : spec.groups) {
    for (const auto& o : g.options) {
      if (o.style == RenderStyle::Positional) {
        if (repeatable_positional_seen) {
          problems.emplace_back("positional '" + o.id +
                                "' follows a repeatable positional");
        }
        repeatable_positional_seen = repeatable_positional_seen || o.repeatable;
        continue;
      }
      if (o.flag.size() < 2 || o.flag[0] != '-' || o.flag == "--") {
        problems.emplace_back("flag '" + o.flag + "' of option '" + o.id +
                              "' must start with '-'");
      }
      if (o.flag.find('=') != std::string::npos) {
        problems.emplace_back("flag '" + o.flag + "' must not contain '='");
      }
      if (!flags.insert(o.flag).second) {
        problems.emplace_back("flag '" + o.flag + "' is declared twice");
      }
    }
  }
  return problems;
}

ProgramSpec to_program_spec(const ArgSpec& spec) {
  ProgramSpec out;
  out.name = spec.name;
  out.executable = spec.name;
  out.description = spec.description;
  out.version = spec.version;
  out.display_title = spec.summary.empty() ? spec.name : spec.summary;
  out.groups = spec.groups;
  return out;
}

const OptionValue& ParsedArgs::get(std::string_view id) const {
  auto it = values.find(id);
  if (it == values.end() || it->second.empty()) {
    throw Error(ErrorCode::UnknownOption,
                "option '" + std::string(id) + "' was not given",
                {std::string(id)});
  }
  return it->second.back();
}

ParsedArgs parse_argv(const ArgSpec& spec, const std::vector<std::string>& args) {
  FlagIndex index(spec);
  ParsedArgs parsed;
  std::size_t next_positional = 0;

  auto store = [&](const OptionDef& def, std::string_view raw) {
    auto& slot = parsed.values[def.id];
    if (!slot.empty() && !def.repeatable) {
      throw Error(ErrorCode::DuplicateFlag,
                  "option '" + def.id + "' given more than once", {def.id});
    }
    slot.push_back(validate_value(def, raw));
  };
  auto take_positional = [&](const std::string& token) {
    if (next_positional >= index.positionals.size()) {
      throw Error(ErrorCode::UnknownFlag, "unexpected argument '" + token + "'",
                  {token});
    }
    const OptionDef& def = *index.positionals[next_positional];
    parsed.positionals.push_back(token);
    store(def, token);
    if (!def.repeatable) ++next_positional;
  };

  bool flags_done = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& token = args[i];
    bool flag_like = !flags_done && token.size() > 1 && token[0] == '-';
    if (flag_like && token == "--") {
      flags_done = true;
      continue;
    }
    if (!flag_like) {
      take_positional(token);
      continue;
    }
    if (const OptionDef* def = index.find(token)) {
      switch (def->style) {
        case RenderStyle::FlagOnly:
          store(*def, "true");
          break;
        case RenderStyle::SeparateToken:
          if (i + 1 >= args.size()) {
            throw Error(ErrorCode::MissingValue,
                        "flag '" + token + "' needs a value", {token});
          }
          store(*def, args[++i]);
          break;
        case RenderStyle::EqualsJoined:
          throw Error(ErrorCode::MissingValue,
                      "flag '" + token + "' needs '=value'", {token});
        case RenderStyle::Positional:
          break;
      }
      continue;
    }
    if (auto eq = token.find('='); eq != std::string::npos) {
      std::string_view head = std::string_view(token).substr(0, eq);
      const OptionDef* def = index.find(head);
      if (def != nullptr && (def->style == RenderStyle::EqualsJoined ||
                             def->style == RenderStyle::SeparateToken)) {
        store(*def, std::string_view(token).substr(eq + 1));
        continue;
      }
      if (def != nullptr) {
        throw Error(ErrorCode::ValueError,
                    "flag '" + std::string(head) + "' takes no value",
                    {def->id});
      }
    }
    if (looks_numeric(token)) {
      take_positional(token);
      continue;
    }
    throw Error(ErrorCode::UnknownFlag, "unknown flag '" + token + "'", {token});
  }

  std::vector<std::string> missing;
  for (const auto& g : spec.groups) {
    for (const auto& o : g.options) {
      if (o.required && !parsed.has(o.id)) missing.push_back(o.id);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing required option(s):";
    for (const auto& id : missing) msg += " " + id;
    throw Error(ErrorCode::MissingRequired, msg, std::move(missing));
  }
  return parsed;
}

std::string emit(const ArgSpec& spec, EmitFormat format) {
  switch (format) {
    case EmitFormat::ShortHelp: return short_help(spec);
    case EmitFormat::LongHelp: return long_help(spec);
    case EmitFormat::ManPage: return man_page(spec);
    case EmitFormat::GuilinerXml: {
      SpecDocument doc;
      doc.spec = to_program_spec(spec);
      return serialize_spec(doc);
    }
  }
  return {};
}

}  // namespace optionhost::argdoc

#include "optionhost/assembler.hpp"

#include <algorithm>
#include <iterator>

namespace optionhost {

namespace {

bool is_safe_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '/' ||
         c == '=' || c == '-';
}

// Emits the argv for every set option, ignoring unmet required ones.
AssembledCommand build(const SessionState& session) {
  AssembledCommand cmd;
  cmd.cwd = session.working_dir;
  cmd.argv.push_back(session.spec->executable);
  std::vector<std::string> positionals;

  for (const OptionDef* def : session.spec->options()) {
    const auto& state = session.state(def->id);
    if (!is_set(state)) continue;
    for (const auto& value : std::get<Set>(state).values) {
      std::string text = render_value(value);
      if (is_path(def->kind)) {
        cmd.paths.push_back({def->id, def->kind, text});
      }
      switch (def->style) {
        case RenderStyle::SeparateToken:
          cmd.argv.push_back(def->flag);
          cmd.argv.push_back(std::move(text));
          break;
        case RenderStyle::EqualsJoined:
          cmd.argv.push_back(def->flag + "=" + text);
          break;
        case RenderStyle::FlagOnly:
          if (std::get<bool>(value)) cmd.argv.push_back(def->flag);
          break;
        case RenderStyle::Positional:
          positionals.push_back(std::move(text));
          break;
      }
    }
  }
  std::move(positionals.begin(), positionals.end(),
            std::back_inserter(cmd.argv));
  cmd.preview = join_quoted(cmd.argv);
  return cmd;
}

std::string single_quote(std::string_view token) {
  std::string out = "'";
  for (char c : token) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

}  // namespace

std::string shell_quote(std::string_view token) {
  if (!token.empty() && std::all_of(token.begin(), token.end(), is_safe_char)) {
    return std::string(token);
  }
  return single_quote(token);
}

std::string join_quoted(const std::vector<std::string>& argv) {
  std::string out;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    if (i > 0) out += ' ';
    // a leading NAME=VALUE word would be read as an assignment
    if (i == 0 && argv[0].find('=') != std::string::npos) {
      out += single_quote(argv[0]);
    } else {
      out += shell_quote(argv[i]);
    }
  }
  return out;
}

AssembledCommand assemble(const SessionState& session) {
  auto missing = unmet_required(session);
  if (!missing.empty()) {
    std::string msg = "missing required option(s):";
    for (const auto& id : missing) msg += " " + id;
    throw Error(ErrorCode::MissingRequired, msg, std::move(missing));
  }
  return build(session);
}

std::string preview_text(const SessionState& session) {
  std::string text = build(session).preview;
  auto missing = unmet_required(session);
  if (!missing.empty()) {
    text += "\nMISSING REQUIRED: ";
    for (std::size_t i = 0; i < missing.size(); ++i) {
      if (i > 0) text += ", ";
      text += missing[i];
    }
  }
  return text;
}

}  // namespace optionhost

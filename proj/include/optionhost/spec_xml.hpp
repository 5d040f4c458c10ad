#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "optionhost/errors.hpp"
#include "optionhost/model.hpp"

namespace optionhost {

inline constexpr std::string_view kFormatVersion = "1.0";

struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;
};

struct Diagnostic {
  SourcePos pos;
  std::string path;  // e.g. /guiliner/group[@name='Model']/option[@id='t']
  std::string message;
};

struct ValidationReport {
  std::vector<Diagnostic> errors;
  std::vector<Diagnostic> warnings;

  bool ok() const noexcept { return errors.empty(); }
  // One "LINE:COL: error|warning: PATH: MESSAGE" line per diagnostic.
  std::string to_text() const;
};

struct SpecDocument {
  std::string format_version{kFormatVersion};
  ProgramSpec spec;
  // Saved settings: option id -> raw values, in set order.
  std::map<std::string, std::vector<std::string>, std::less<>> embedded_values;

  bool operator==(const SpecDocument&) const = default;
};

class XmlSyntaxError : public Error {
 public:
  XmlSyntaxError(SourcePos pos, const std::string& message)
      : Error(ErrorCode::XmlSyntaxError,
              std::to_string(pos.line) + ":" + std::to_string(pos.column) +
                  ": " + message),
        pos_(pos),
        message_(message) {}
  SourcePos pos() const noexcept { return pos_; }
  const std::string& message() const noexcept { return message_; }

 private:
  SourcePos pos_;
  std::string message_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(ValidationReport report)
      : Error(ErrorCode::SchemaError, summarize(report)),
        report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  static std::string summarize(const ValidationReport& report);
  ValidationReport report_;
};

// Throws XmlSyntaxError for malformed input and SchemaError listing every
// violation for well-formed but invalid input.
SpecDocument parse_spec(std::string_view xml);

// Never throws for bad input; syntax errors become report entries.
ValidationReport validate_document(std::string_view xml);

// Canonical form: fixed element and attribute order, 2-space indent, LF.
std::string serialize_spec(const SpecDocument& doc);

// Snapshot of the session's set values, rendered canonically.
SpecDocument attach_values(const SpecDocument& doc,
                           const SessionState& session);

// Replays the document's embedded values onto `session` (set order kept).
SessionState apply_values(const SessionState& session, const SpecDocument& doc);

std::string read_file(const std::filesystem::path& path);
SpecDocument load_spec_file(const std::filesystem::path& path);

}  // namespace optionhost

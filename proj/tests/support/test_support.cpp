#include "test_support.hpp"

#include <openssl/evp.h>
#include <stdlib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

namespace testing_support {

namespace fs = std::filesystem;
using namespace optionhost;

void use_fixture_path() {
  const char* old = std::getenv("PATH");
  std::string path = OPTIONHOST_FIXTURE_BIN_DIR;
  if (old != nullptr && *old != '\0') path += std::string(":") + old;
  ::setenv("PATH", path.c_str(), 1);
}

fs::path source_path(const std::string& relative) {
  return fs::path(OPTIONHOST_SOURCE_DIR) / relative;
}

fs::path fixture_spec(const std::string& name) {
  return source_path("fixtures/" + name + ".xml");
}

static std::vector<fs::path> xml_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".xml") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> fixture_specs() { return xml_files(source_path("fixtures")); }

std::vector<fs::path> broken_fixtures() {
  return xml_files(source_path("tests/broken"));
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    std::array<char, 3> b{};
    std::snprintf(b.data(), b.size(), "%02x", md[i]);
    hex += b.data();
  }
  return hex;
}

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "optionhost-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

static bool is_name(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_';
  });
}

std::optional<std::vector<std::string>> posix_tokenize(std::string_view line) {
  std::vector<std::string> words;
  std::string word;
  bool in_word = false;
  bool quoted = false;  // current word had a quoted part
  const std::string_view metachars = "|&;<>()$`*?[";
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(word));
      word.clear();
      in_word = false;
      quoted = false;
      continue;
    }
    if (c == '\'') {
      auto close = line.find('\'', i + 1);
      if (close == std::string_view::npos) return std::nullopt;
      word.append(line.substr(i + 1, close - i - 1));
      in_word = true;
      quoted = true;
      i = close;
      continue;
    }
    if (c == '"') {
      in_word = true;
      quoted = true;
      ++i;
      while (i < line.size() && line[i] != '"') {
        char d = line[i];
        if (d == '\\' && i + 1 < line.size() &&
            std::string_view("$`\"\\\n").find(line[i + 1]) != std::string_view::npos) {
          if (line[i + 1] != '\n') word += line[i + 1];
          i += 2;
          continue;
        }
        if (d == '$' || d == '`') return std::nullopt;
        word += d;
        ++i;
      }
      if (i >= line.size()) return std::nullopt;
      continue;
    }
    if (c == '\\') {
      if (i + 1 >= line.size()) return std::nullopt;
      if (line[i + 1] != '\n') {
        word += line[i + 1];
        in_word = true;
        quoted = true;
      }
      ++i;
      continue;
    }
    if (metachars.find(c) != std::string_view::npos) return std::nullopt;
    if (!in_word && (c == '#' || c == '~')) return std::nullopt;
    if (c == '=' && words.empty() && !quoted && is_name(word)) return std::nullopt;
    word += c;
    in_word = true;
  }
  if (in_word) words.push_back(std::move(word));
  return words;
}

std::string seeded_bytes(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 gen(seed);
  std::string out(count, '\0');
  for (auto& ch : out) ch = static_cast<char>(static_cast<unsigned char>(gen()));
  return out;
}

namespace {

bool coin(Rng& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

template <typename T>
T pick(Rng& rng, const std::vector<T>& items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

const std::vector<std::string>& text_pool() {
  static const std::vector<std::string> pool = [] {
    std::vector<std::string> p;
    for (char c = 'a'; c <= 'z'; ++c) p.emplace_back(1, c);
    for (char c = 'A'; c <= 'F'; ++c) p.emplace_back(1, c);
    for (char c = '0'; c <= '9'; ++c) p.emplace_back(1, c);
    for (const char* s : {" ", " ", "'", "\"", "\\", "$", ";", "&", "<", ">", "`",
                          "=", "-", "*", "?", "#", "~", "!", "|", "(", ")", "[",
                          "]", "{", "}", ".", "/", "_", ",", ":", "%", "+", "\t",
                          "\xc3\xa9", "\xce\xbb", "\xe4\xb8\xad", "\xf0\x9f\x98\x80"}) {
      p.emplace_back(s);
    }
    return p;
  }();
  return pool;
}

std::string shortest(double d, std::chars_format fmt) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d, fmt);
  return std::string(buf.data(), end);
}

std::string random_word(Rng& rng, std::size_t max_len) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  std::size_t len = std::uniform_int_distribution<std::size_t>(1, max_len)(rng);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) out += pick(rng, std::vector<char>(letters.begin(), letters.end()));
  return out;
}

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len, bool allow_newlines) {
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (allow_newlines && coin(rng, 0.04)) {
      out += coin(rng, 0.8) ? "\n" : "\r";
      continue;
    }
    out += pick(rng, text_pool());
  }
  return out;
}

ProgramSpec random_spec(Rng& rng, const SpecShape& shape) {
  ProgramSpec spec;
  spec.name = random_text(rng, 12, false);
  spec.executable = coin(rng, 0.8) ? "prog-" + random_word(rng, 8)
                                    : "p" + random_text(rng, 10);
  spec.description = random_text(rng, 60);
  spec.version = random_text(rng, 5, false);
  spec.display_title = random_text(rng, 20, false);

  std::size_t groups = std::uniform_int_distribution<std::size_t>(0, shape.max_groups)(rng);
  std::size_t counter = 0;
  bool optional_positional_seen = false;
  bool repeatable_positional_seen = false;
  for (std::size_t g = 0; g < groups; ++g) {
    OptionGroup group;
    group.name = "group " + std::to_string(g) + " " + random_text(rng, 8, false);
    group.doc = random_text(rng, 30);
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, shape.max_options)(rng);
    for (std::size_t o = 0; o < n; ++o, ++counter) {
      OptionDef def;
      def.id = "o" + std::to_string(counter) + random_word(rng, 4);
      def.label = random_text(rng, 16, false);
      def.doc = random_text(rng, 40);
      def.kind = static_cast<OptionKind>(std::uniform_int_distribution<int>(0, 7)(rng));
      def.required = coin(rng, 0.3);
      def.repeatable = coin(rng, 0.25);
      if (def.kind == OptionKind::Flag) {
        def.style = RenderStyle::FlagOnly;
      } else {
        def.style = pick(rng, std::vector<RenderStyle>{
                                  RenderStyle::SeparateToken, RenderStyle::SeparateToken,
                                  RenderStyle::EqualsJoined, RenderStyle::Positional});
      }
      if (def.style == RenderStyle::Positional && shape.argdoc_friendly) {
        if (repeatable_positional_seen) {
          def.style = RenderStyle::SeparateToken;
        } else {
          if (optional_positional_seen) def.required = false;
          optional_positional_seen = optional_positional_seen || !def.required;
          repeatable_positional_seen = def.repeatable;
        }
      }
      if (def.style != RenderStyle::Positional) {
        def.flag = coin(rng) ? "-" + std::string(1, static_cast<char>('a' + counter % 26)) +
                                   std::to_string(counter)
                             : "--" + random_word(rng, 6) + std::to_string(counter);
      }
      if (is_numeric(def.kind) && coin(rng)) {
        if (def.kind == OptionKind::Int) {
          double lo = static_cast<double>(std::uniform_int_distribution<int>(-1000, 0)(rng));
          double hi = lo + static_cast<double>(std::uniform_int_distribution<int>(0, 2000)(rng));
          def.range = NumericRange{lo, hi};
        } else {
          double lo = std::uniform_real_distribution<double>(-100.0, 100.0)(rng);
          double hi = coin(rng, 0.1) ? lo : lo + std::uniform_real_distribution<double>(0.0, 200.0)(rng);
          def.range = NumericRange{lo, hi};
        }
      }
      if (def.kind == OptionKind::Choice) {
        std::size_t k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        std::set<std::string> values;
        while (values.size() < k) values.insert(random_word(rng, 1) + random_text(rng, 6, false));
        for (const auto& v : values) def.choices.push_back({v, random_text(rng, 10, false)});
      }
      if (coin(rng, 0.3)) def.default_value = validate_value(def, random_raw(rng, def));
      group.options.push_back(std::move(def));
    }
    spec.groups.push_back(std::move(group));
  }
  return spec;
}

std::string random_raw(Rng& rng, const OptionDef& def, bool positional_safe) {
  switch (def.kind) {
    case OptionKind::Flag:
      return coin(rng) ? "true" : "false";
    case OptionKind::String:
    case OptionKind::InFile:
    case OptionKind::OutFile:
    case OptionKind::Dir: {
      std::string s = random_text(rng, 14);
      if (is_path(def.kind) && s.empty()) s = "p";
      if (positional_safe && !s.empty() && s[0] == '-') s = "x" + s;
      return s;
    }
    case OptionKind::Int: {
      std::int64_t v = 0;
      if (def.range) {
        v = std::uniform_int_distribution<std::int64_t>(
            static_cast<std::int64_t>(std::ceil(def.range->min)),
            static_cast<std::int64_t>(std::floor(def.range->max)))(rng);
      } else if (coin(rng, 0.2)) {
        v = pick(rng, std::vector<std::int64_t>{std::numeric_limits<std::int64_t>::min(),
                                               std::numeric_limits<std::int64_t>::max(), 0, -1});
      } else {
        v = std::uniform_int_distribution<std::int64_t>()(rng);
      }
      return std::to_string(v);
    }
    case OptionKind::Float: {
      double d = 0.0;
      if (def.range) {
        d = std::uniform_real_distribution<double>(def.range->min, def.range->max)(rng);
        d = std::clamp(d, def.range->min, def.range->max);
      } else {
        d = std::normal_distribution<double>(0.0, 1.0)(rng) *
            std::pow(10.0, std::uniform_int_distribution<int>(-8, 12)(rng));
      }
      if (coin(rng, 0.1)) {
        double r = std::round(d);
        if (!def.range || (r >= def.range->min && r <= def.range->max)) d = r;
      }
      return shortest(d, pick(rng, std::vector<std::chars_format>{
                                      std::chars_format::general,
                                      std::chars_format::scientific,
                                      std::chars_format::fixed}));
    }
    case OptionKind::Choice:
      return pick(rng, def.choices).value;
  }
  return {};
}

SessionState random_session(Rng& rng, std::shared_ptr<const ProgramSpec> spec,
                            bool complete, bool argdoc_friendly) {
  SessionState session = new_session(spec, fs::temp_directory_path());
  bool positionals_open = true;
  for (const OptionDef* def : spec->options()) {
    bool positional = def->style == RenderStyle::Positional;
    bool set = (complete && def->required) || coin(rng);
    if (argdoc_friendly && positional) {
      if (!positionals_open) set = false;
      if (!set) positionals_open = false;
    }
    if (!set) continue;
    std::size_t count =
        def->repeatable ? std::uniform_int_distribution<std::size_t>(1, 3)(rng) : 1;
    for (std::size_t i = 0; i < count; ++i) {
      std::string raw = random_raw(rng, *def, argdoc_friendly && positional);
      if (argdoc_friendly && def->kind == OptionKind::Flag && def->required) raw = "true";
      session = set_option(session, def->id, raw);
    }
  }
  return session;
}

std::map<std::string, std::vector<OptionValue>, std::less<>> observable_values(
    const SessionState& session) {
  std::map<std::string, std::vector<OptionValue>, std::less<>> out;
  for (const auto& [id, state] : session.states) {
    if (!is_set(state)) continue;
    std::vector<OptionValue> kept;
    for (const auto& v : std::get<Set>(state).values) {
      if (const bool* b = std::get_if<bool>(&v); b != nullptr && !*b) continue;
      kept.push_back(v);
    }
    if (!kept.empty()) out.emplace(id, std::move(kept));
  }
  return out;
}

}  // namespace testing_support

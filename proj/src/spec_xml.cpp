#include "optionhost/spec_xml.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

namespace optionhost {

namespace {

// Minimal element tree built from expat callbacks.
struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<Node> children;
  std::string text;
  SourcePos pos;

  const std::string* attr(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

struct TreeBuilder {
  XML_Parser parser = nullptr;
  Node root;
  std::vector<Node*> stack;
  bool have_root = false;
  std::optional<std::string> refused;  // set when we abort on entities

  SourcePos here() const {
    return {static_cast<std::size_t>(XML_GetCurrentLineNumber(parser)),
            static_cast<std::size_t>(XML_GetCurrentColumnNumber(parser)) + 1};
  }

  static void on_start(void* data, const XML_Char* name, const XML_Char** atts) {
    auto* self = static_cast<TreeBuilder*>(data);
    Node node;
    node.name = name;
    node.pos = self->here();
    for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
      node.attrs.emplace_back(atts[i], atts[i + 1]);
    }
    if (self->stack.empty()) {
      self->root = std::move(node);
      self->have_root = true;
      self->stack.push_back(&self->root);
    } else {
      auto& kids = self->stack.back()->children;
      kids.push_back(std::move(node));
      self->stack.push_back(&kids.back());
    }
  }

  static void on_end(void* data, const XML_Char*) {
    static_cast<TreeBuilder*>(data)->stack.pop_back();
  }

  static void on_text(void* data, const XML_Char* s, int len) {
    auto* self = static_cast<TreeBuilder*>(data);
    if (!self->stack.empty()) {
      self->stack.back()->text.append(s, static_cast<std::size_t>(len));
    }
  }

  static void on_entity_decl(void* data, const XML_Char*, int, const XML_Char*,
                             int, const XML_Char*, const XML_Char*,
                             const XML_Char*, const XML_Char*) {
    auto* self = static_cast<TreeBuilder*>(data);
    self->refused = "entity declarations are not allowed";
    XML_StopParser(self->parser, XML_FALSE);
  }

  static int on_external_entity(XML_Parser, const XML_Char*, const XML_Char*,
                                const XML_Char*, const XML_Char*) {
    return XML_STATUS_ERROR;
  }
};

Node parse_tree(std::string_view xml) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)>
      parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw XmlSyntaxError({}, "cannot allocate XML parser");
  TreeBuilder builder;
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &TreeBuilder::on_start,
                        &TreeBuilder::on_end);
  XML_SetCharacterDataHandler(parser.get(), &TreeBuilder::on_text);
  XML_SetEntityDeclHandler(parser.get(), &TreeBuilder::on_entity_decl);
  XML_SetExternalEntityRefHandler(parser.get(),
                                  &TreeBuilder::on_external_entity);
  XML_SetParamEntityParsing(parser.get(), XML_PARAM_ENTITY_PARSING_NEVER);

  // Feed in slices: expat takes an int length.
  constexpr std::size_t kSlice = 1 << 20;
  std::size_t offset = 0;
  XML_Status status = XML_STATUS_OK;
  do {
    std::size_t n = std::min(kSlice, xml.size() - offset);
    bool last = offset + n == xml.size();
    status = XML_Parse(parser.get(), xml.data() + offset, static_cast<int>(n),
                       last ? XML_TRUE : XML_FALSE);
    offset += n;
  } while (status == XML_STATUS_OK && offset < xml.size());

  if (status != XML_STATUS_OK) {
    SourcePos pos = builder.here();
    if (builder.refused) throw XmlSyntaxError(pos, *builder.refused);
    throw XmlSyntaxError(pos, XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!builder.have_root) throw XmlSyntaxError({1, 1}, "no root element");
  return std::move(builder.root);
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

std::string squote(std::string_view s) { return "'" + std::string(s) + "'"; }

// Walks the element tree, builds the model and collects every problem.
class SchemaWalker {
 public:
  ValidationReport report;
  SpecDocument doc;

  void walk(const Node& root) {
    const std::string root_path = "/" + root.name;
    if (root.name != "guiliner") {
      error(root, root_path,
            "root element must be <guiliner>, found <" + root.name + ">");
      return;
    }
    check_attrs(root, root_path, {"version"});
    check_no_text(root, root_path);
    if (const auto* v = require_attr(root, root_path, "version")) {
      if (*v != kFormatVersion) {
        error(root, root_path,
              "unsupported format version " + squote(*v) + " (expected " +
                  squote(kFormatVersion) + ")");
      }
      doc.format_version = *v;
    }

    std::size_t programs = 0;
    std::size_t displays = 0;
    for (const auto& child : root.children) {
      if (child.name == "program") {
        if (++programs > 1) {
          error(child, root_path + "/program", "more than one <program>");
          continue;
        }
        walk_program(child, root_path + "/program");
      } else if (child.name == "display") {
        if (++displays > 1) {
          error(child, root_path + "/display", "more than one <display>");
          continue;
        }
        walk_display(child, root_path + "/display");
      } else if (child.name == "group") {
        walk_group(child, root_path);
      } else {
        unknown_element(child, root_path);
      }
    }
    if (programs == 0) error(root, root_path, "missing <program> element");
    if (displays == 0) doc.spec.display_title = doc.spec.name;

    apply_model_checks();
    check_duplicate_flags();
  }

 private:
  struct OptionSite {
    SourcePos pos;
    std::string path;
    bool broken = false;  // kind/style unknown: skip semantic checks
    std::vector<std::pair<const Node*, std::string>> values;
    const Node* default_node = nullptr;
  };

  SourcePos program_pos_;
  std::string program_path_ = "/guiliner/program";
  std::vector<std::pair<SourcePos, std::string>> group_sites_;
  std::vector<std::vector<OptionSite>> option_sites_;

  void error(const Node& at, const std::string& path, std::string message) {
    report.errors.push_back({at.pos, path, std::move(message)});
  }

  void warning(SourcePos pos, const std::string& path, std::string message) {
    report.warnings.push_back({pos, path, std::move(message)});
  }

  void unknown_element(const Node& child, const std::string& parent_path) {
    error(child, parent_path + "/" + child.name,
          "unknown element <" + child.name + ">");
  }

  void check_attrs(const Node& node, const std::string& path,
                   std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : node.attrs) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        error(node, path,
              "unknown attribute " + squote(key) + " on <" + node.name + ">");
      }
    }
  }

  const std::string* require_attr(const Node& node, const std::string& path,
                                  std::string_view key) {
    const auto* v = node.attr(key);
    if (v == nullptr) {
      error(node, path,
            "<" + node.name + "> requires attribute " + squote(key));
    }
    return v;
  }

  void check_no_text(const Node& node, const std::string& path) {
    if (!is_blank(node.text)) {
      error(node, path, "unexpected text inside <" + node.name + ">");
    }
  }

  // Text-only element: no attributes, no child elements.
  std::string text_of(const Node& node, const std::string& path) {
    check_attrs(node, path, {});
    for (const auto& child : node.children) unknown_element(child, path);
    return node.text;
  }

  std::optional<bool> bool_attr(const Node& node, const std::string& path,
                                std::string_view key) {
    const auto* v = node.attr(key);
    if (v == nullptr) return false;
    if (*v == "true") return true;
    if (*v == "false") return false;
    error(node, path,
          "attribute " + squote(key) + " must be 'true' or 'false', found " +
              squote(*v));
    return std::nullopt;
  }

  std::optional<double> number_attr(const Node& node, const std::string& path,
                                    std::string_view key) {
    const auto* v = require_attr(node, path, key);
    if (v == nullptr) return std::nullopt;
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), d);
    if (ec != std::errc{} || ptr != v->data() + v->size() || v->empty() ||
        !std::isfinite(d)) {
      error(node, path,
            "attribute " + squote(key) + " must be a finite number, found " +
                squote(*v));
      return std::nullopt;
    }
    return d;
  }

  void walk_program(const Node& node, const std::string& path) {
    program_pos_ = node.pos;
    program_path_ = path;
    check_attrs(node, path, {"name", "executable", "version"});
    check_no_text(node, path);
    if (const auto* v = require_attr(node, path, "name")) doc.spec.name = *v;
    if (const auto* v = require_attr(node, path, "executable")) {
      doc.spec.executable = *v;
    }
    if (const auto* v = node.attr("version")) doc.spec.version = *v;
    bool seen_description = false;
    for (const auto& child : node.children) {
      if (child.name == "description") {
        if (seen_description) {
          error(child, path + "/description", "more than one <description>");
          continue;
        }
        seen_description = true;
        doc.spec.description = text_of(child, path + "/description");
      } else {
        unknown_element(child, path);
      }
    }
  }

  void walk_display(const Node& node, const std::string& path) {
    check_attrs(node, path, {"title"});
    check_no_text(node, path);
    for (const auto& child : node.children) unknown_element(child, path);
    if (const auto* v = require_attr(node, path, "title")) {
      doc.spec.display_title = *v;
    }
  }

  void walk_group(const Node& node, const std::string& parent_path) {
    OptionGroup group;
    const auto* name = node.attr("name");
    std::string path = parent_path + "/group";
    if (name != nullptr) path += "[@name=" + squote(*name) + "]";
    check_attrs(node, path, {"name"});
    check_no_text(node, path);
    if (require_attr(node, path, "name") != nullptr) group.name = *name;

    group_sites_.emplace_back(node.pos, path);
    option_sites_.emplace_back();
    bool seen_doc = false;
    for (const auto& child : node.children) {
      if (child.name == "doc") {
        if (seen_doc) {
          error(child, path + "/doc", "more than one <doc>");
          continue;
        }
        seen_doc = true;
        group.doc = text_of(child, path + "/doc");
      } else if (child.name == "option") {
        group.options.push_back(walk_option(child, path));
      } else {
        unknown_element(child, path);
      }
    }
    if (group.options.empty()) {
      warning(node.pos, path, "group has no options");
    }
    doc.spec.groups.push_back(std::move(group));
  }

  OptionDef walk_option(const Node& node, const std::string& parent_path) {
    OptionDef def;
    OptionSite site;
    const auto* id = node.attr("id");
    std::string path = parent_path + "/option";
    if (id != nullptr) path += "[@id=" + squote(*id) + "]";
    site.pos = node.pos;
    site.path = path;

    check_attrs(node, path,
                {"id", "flag", "kind", "required", "repeatable", "style"});
    check_no_text(node, path);
    if (require_attr(node, path, "id") != nullptr) def.id = *id;
    if (const auto* flag = node.attr("flag")) def.flag = *flag;
    if (const auto* kind = require_attr(node, path, "kind")) {
      if (auto k = parse_kind(*kind)) {
        def.kind = *k;
      } else {
        error(node, path,
              "unknown kind " + squote(*kind) + " for option " +
                  squote(def.id));
        site.broken = true;
      }
    } else {
      site.broken = true;
    }
    if (auto b = bool_attr(node, path, "required")) def.required = *b;
    if (auto b = bool_attr(node, path, "repeatable")) def.repeatable = *b;
    if (const auto* style = node.attr("style")) {
      if (auto s = parse_style(*style)) {
        def.style = *s;
      } else {
        error(node, path,
              "unknown style " + squote(*style) + " for option " +
                  squote(def.id));
        site.broken = true;
      }
    } else if (def.kind == OptionKind::Flag) {
      def.style = RenderStyle::FlagOnly;
    } else if (def.flag.empty()) {
      def.style = RenderStyle::Positional;
    } else {
      def.style = RenderStyle::SeparateToken;
    }

    std::set<std::string, std::less<>> singles;
    auto once = [&](const Node& child) {
      if (!singles.insert(child.name).second) {
        error(child, path + "/" + child.name,
              "more than one <" + child.name + ">");
        return false;
      }
      return true;
    };
    for (const auto& child : node.children) {
      const std::string cpath = path + "/" + child.name;
      if (child.name == "label") {
        if (once(child)) def.label = text_of(child, cpath);
      } else if (child.name == "doc") {
        if (once(child)) def.doc = text_of(child, cpath);
      } else if (child.name == "default") {
        if (once(child)) {
          text_of(child, cpath);
          site.default_node = &child;
        }
      } else if (child.name == "range") {
        if (!once(child)) continue;
        check_attrs(child, cpath, {"min", "max"});
        check_no_text(child, cpath);
        for (const auto& k : child.children) unknown_element(k, cpath);
        auto lo = number_attr(child, cpath, "min");
        auto hi = number_attr(child, cpath, "max");
        if (lo && hi) {
          def.range = NumericRange{*lo, *hi};
        } else {
          site.broken = true;
        }
      } else if (child.name == "choices") {
        if (!once(child)) continue;
        check_attrs(child, cpath, {});
        check_no_text(child, cpath);
        for (const auto& c : child.children) {
          const std::string chpath = cpath + "/choice";
          if (c.name != "choice") {
            unknown_element(c, cpath);
            continue;
          }
          check_attrs(c, chpath, {"value", "label"});
          check_no_text(c, chpath);
          for (const auto& k : c.children) unknown_element(k, chpath);
          Choice choice;
          if (const auto* v = require_attr(c, chpath, "value")) {
            choice.value = *v;
          }
          if (const auto* l = c.attr("label")) choice.label = *l;
          def.choices.push_back(std::move(choice));
        }
      } else if (child.name == "value") {
        site.values.emplace_back(&child, text_of(child, cpath));
      } else {
        unknown_element(child, path);
      }
    }
    option_sites_.back().push_back(std::move(site));
    return def;
  }

  std::pair<SourcePos, std::string> locate(const SpecLocation& loc) const {
    if (!loc.group) return {program_pos_, program_path_};
    if (!loc.option) return group_sites_[*loc.group];
    const auto& site = option_sites_[*loc.group][*loc.option];
    return {site.pos, site.path};
  }

  static std::string describe(SourcePos pos) {
    return "line " + std::to_string(pos.line) + ", column " +
           std::to_string(pos.column);
  }

  void apply_model_checks() {
    for (auto& issue : check_spec(doc.spec)) {
      if (issue.where.option && !issue.related &&
          option_sites_[*issue.where.group][*issue.where.option].broken) {
        continue;
      }
      auto [pos, path] = locate(issue.where);
      std::string message = issue.message;
      if (issue.related) {
        message += " (first defined at " + describe(locate(*issue.related).first) +
                   ")";
      }
      report.errors.push_back({pos, path, std::move(message)});
    }

    // Defaults and saved values are checked once their option is sound.
    for (std::size_t g = 0; g < doc.spec.groups.size(); ++g) {
      auto& group = doc.spec.groups[g];
      for (std::size_t o = 0; o < group.options.size(); ++o) {
        auto& def = group.options[o];
        const auto& site = option_sites_[g][o];
        bool sound = !site.broken && check_option(def).empty();
        if (site.default_node != nullptr && sound) {
          try {
            def.default_value = validate_value(def, site.default_node->text);
          } catch (const Error& e) {
            report.errors.push_back({site.default_node->pos, site.path + "/default",
                                     std::string("default does not validate: ") +
                                         e.what()});
          }
        }
        if (site.values.size() > 1 && !def.repeatable) {
          report.errors.push_back(
              {site.values[1].first->pos, site.path + "/value",
               "option " + squote(def.id) +
                   " is not repeatable but has several <value> elements"});
        }
        for (const auto& [node, raw] : site.values) {
          if (!sound) break;
          try {
            validate_value(def, raw);
            doc.embedded_values[def.id].push_back(raw);
          } catch (const Error& e) {
            report.errors.push_back({node->pos, site.path + "/value",
                                     std::string("saved value does not validate: ") +
                                         e.what()});
          }
        }
      }
    }
  }

  void check_duplicate_flags() {
    std::map<std::string, std::string, std::less<>> owners;
    for (std::size_t g = 0; g < doc.spec.groups.size(); ++g) {
      const auto& group = doc.spec.groups[g];
      for (std::size_t o = 0; o < group.options.size(); ++o) {
        const auto& def = group.options[o];
        if (def.flag.empty()) continue;
        auto [it, fresh] = owners.emplace(def.flag, def.id);
        if (!fresh) {
          const auto& site = option_sites_[g][o];
          warning(site.pos, site.path,
                  "flag " + squote(def.flag) + " is also used by option " +
                      squote(it->second));
        }
      }
    }
  }
};

SchemaWalker walk_document(std::string_view xml) {
  Node root = parse_tree(xml);
  SchemaWalker walker;
  walker.walk(root);
  return walker;
}

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      case '"':
        out += attribute ? "&quot;" : "\"";
        break;
      case '\n':
        out += attribute ? "&#10;" : "\n";
        break;
      case '\t':
        out += attribute ? "&#9;" : "\t";
        break;
      default: out += c;
    }
  }
}

class XmlWriter {
 public:
  void open(std::string_view name,
            std::initializer_list<std::pair<std::string_view, std::string_view>>
                attrs,
            bool empty = false) {
    indent();
    out_ += '<';
    out_ += name;
    for (const auto& [k, v] : attrs) {
      out_ += ' ';
      out_ += k;
      out_ += "=\"";
      escape_into(out_, v, true);
      out_ += '"';
    }
    out_ += empty ? "/>\n" : ">\n";
    if (!empty) ++depth_;
  }

  void close(std::string_view name) {
    --depth_;
    indent();
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  void text_element(std::string_view name, std::string_view text) {
    indent();
    out_ += '<';
    out_ += name;
    out_ += '>';
    escape_into(out_, text, false);
    out_ += "</";
    out_ += name;
    out_ += ">\n";
  }

  std::string take() { return std::move(out_); }

 private:
  void indent() { out_.append(static_cast<std::size_t>(depth_) * 2, ' '); }

  std::string out_;
  int depth_ = 0;
};

std::string number_text(double d) { return render_value(OptionValue{d}); }

}  // namespace

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  auto emit = [&](const Diagnostic& d, std::string_view level) {
    out << d.pos.line << ':' << d.pos.column << ": " << level << ": " << d.path
        << ": " << d.message << '\n';
  };
  for (const auto& d : errors) emit(d, "error");
  for (const auto& d : warnings) emit(d, "warning");
  return out.str();
}

std::string SchemaError::summarize(const ValidationReport& report) {
  std::string msg = "spec has " + std::to_string(report.errors.size()) +
                    " error(s)";
  if (!report.errors.empty()) msg += "; first: " + report.errors.front().message;
  return msg;
}

SpecDocument parse_spec(std::string_view xml) {
  SchemaWalker walker = walk_document(xml);
  if (!walker.report.ok()) throw SchemaError(std::move(walker.report));
  return std::move(walker.doc);
}

ValidationReport validate_document(std::string_view xml) {
  try {
    return walk_document(xml).report;
  } catch (const XmlSyntaxError& e) {
    ValidationReport report;
    report.errors.push_back({e.pos(), "/", e.message()});
    return report;
  }
}

std::string serialize_spec(const SpecDocument& doc) {
  const ProgramSpec& spec = doc.spec;
  XmlWriter w;
  w.open("guiliner", {{"version", doc.format_version}});
  w.open("program", {{"name", spec.name},
                     {"executable", spec.executable},
                     {"version", spec.version}});
  w.text_element("description", spec.description);
  w.close("program");
  w.open("display", {{"title", spec.display_title}}, true);
  for (const auto& group : spec.groups) {
    w.open("group", {{"name", group.name}});
    w.text_element("doc", group.doc);
    for (const auto& def : group.options) {
      w.open("option", {{"id", def.id},
                        {"flag", def.flag},
                        {"kind", to_string(def.kind)},
                        {"required", def.required ? "true" : "false"},
                        {"repeatable", def.repeatable ? "true" : "false"},
                        {"style", to_string(def.style)}});
      w.text_element("label", def.label);
      w.text_element("doc", def.doc);
      if (def.default_value) {
        w.text_element("default", render_value(*def.default_value));
      }
      if (def.range) {
        std::string lo = number_text(def.range->min);
        std::string hi = number_text(def.range->max);
        w.open("range", {{"min", lo}, {"max", hi}}, true);
      }
      if (!def.choices.empty()) {
        w.open("choices", {});
        for (const auto& c : def.choices) {
          w.open("choice", {{"value", c.value}, {"label", c.label}}, true);
        }
        w.close("choices");
      }
      if (auto it = doc.embedded_values.find(def.id);
          it != doc.embedded_values.end()) {
        for (const auto& raw : it->second) w.text_element("value", raw);
      }
      w.close("option");
    }
    w.close("group");
  }
  w.close("guiliner");
  return w.take();
}

SpecDocument attach_values(const SpecDocument& doc,
                           const SessionState& session) {
  if (!session.spec || *session.spec != doc.spec) {
    throw Error(ErrorCode::SpecMismatch,
                "session was not created from this spec document");
  }
  SpecDocument out = doc;
  out.embedded_values.clear();
  for (const OptionDef* def : doc.spec.options()) {
    const auto& state = session.state(def->id);
    if (!is_set(state)) continue;
    auto& raws = out.embedded_values[def->id];
    for (const auto& v : std::get<Set>(state).values) {
      raws.push_back(render_value(v));
    }
  }
  return out;
}

SessionState apply_values(const SessionState& session, const SpecDocument& doc) {
  SessionState next = session;
  for (const OptionDef* def : doc.spec.options()) {
    auto it = doc.embedded_values.find(def->id);
    if (it == doc.embedded_values.end()) continue;
    for (const auto& raw : it->second) next = set_option(next, def->id, raw);
  }
  return next;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string(),
                {path.string()});
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorCode::IoError, "cannot read " + path.string(),
                {path.string()});
  }
  return buf.str();
}

SpecDocument load_spec_file(const std::filesystem::path& path) {
  return parse_spec(read_file(path));
}

}  // namespace optionhost

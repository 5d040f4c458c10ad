#include "optionhost/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include "CLI11.hpp"
#include "optionhost/fixture_specs.hpp"
#include "optionhost/service.hpp"

namespace optionhost {

namespace fs = std::filesystem;

namespace {

struct Binding {
  std::string id;
  std::string raw;
};

std::vector<Binding> parse_bindings(const std::vector<std::string>& sets) {
  std::vector<Binding> out;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CLI::ValidationError("--set", "expected id=value, got '" + s + "'");
    }
    out.push_back({s.substr(0, eq), s.substr(eq + 1)});
  }
  return out;
}

std::unique_ptr<SessionHost> open_host(const std::string& spec_path,
                                       const std::string& cwd,
                                       const std::vector<Binding>& bindings) {
  fs::path dir = cwd.empty() ? fs::current_path() : fs::absolute(cwd);
  auto host = SessionHost::open(spec_path, dir);
  for (const auto& b : bindings) host->set(b.id, b.raw);
  return host;
}

void print_schema_error(const SchemaError& e, std::ostream& err) {
  err << e.report().to_text();
}

int write_output(const std::string& text, const std::string& dest,
                 std::ostream& out, std::ostream& err) {
  if (dest.empty() || dest == "-") {
    out << text;
    return 0;
  }
  std::ofstream file(dest, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) {
    err << "error: cannot write " << dest << '\n';
    return kExitSetupFailure;
  }
  return 0;
}

int exit_code_for(const RunStatus& status) {
  switch (status.kind) {
    case RunStatus::Kind::Exited: return status.exit_code;
    case RunStatus::Kind::Killed: return 128 + 15;
    default: return kExitSetupFailure;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Host a command-line program described by an XML option spec"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string cwd;
  std::vector<std::string> sets;
  std::string output;
  bool as_json = false;

  auto* validate = app.add_subcommand("validate", "Check a spec file");
  validate->add_option("spec", spec_path, "Spec XML file")->required();
  validate->add_flag("--json", as_json, "Machine-readable report");

  auto add_session_opts = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Spec XML file")->required();
    sub->add_option("--set", sets, "Option value as id=value (repeatable)");
    sub->add_option("--cwd", cwd, "Working directory for the program");
  };

  auto* preview = app.add_subcommand("preview", "Print the assembled command line");
  add_session_opts(preview);
  preview->add_flag("--json", as_json, "Machine-readable preview");

  auto* run = app.add_subcommand("run", "Run the program with the given values");
  add_session_opts(run);

  auto* exporter = app.add_subcommand("export", "Write the spec with values attached");
  add_session_opts(exporter);
  exporter->add_option("-o,--output", output, "Destination file (default stdout)");

  std::string fixture;
  std::string format = "short";
  auto* emit = app.add_subcommand("emit", "Print documentation for a fixture ArgSpec");
  emit->add_option("fixture", fixture, "Fixture name")
      ->required()
      ->check(CLI::IsMember(fixtures::names()));
  emit->add_option("--format", format, "short | long | man | xml")
      ->check(CLI::IsMember({"short", "long", "man", "xml"}));
  emit->add_option("-o,--output", output, "Destination file (default stdout)");

  int port = 8080;
  std::string address = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API for a spec");
  serve->add_option("spec", spec_path, "Spec XML file")->required();
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--host", address, "Listen address");
  serve->add_option("--cwd", cwd, "Working directory for the program");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    std::vector<Binding> bindings;
    try {
      bindings = parse_bindings(sets);
    } catch (const CLI::ValidationError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }

    if (*validate) {
      ValidationReport report = validate_document(read_file(spec_path));
      if (as_json) {
        out << report_to_json(report).dump(2) << '\n';
      } else {
        out << report.to_text();
        out << (report.ok() ? "valid" : "invalid") << ": " << spec_path << " ("
            << report.errors.size() << " error(s), " << report.warnings.size()
            << " warning(s))\n";
      }
      return report.ok() ? 0 : kExitSetupFailure;
    }

    if (*preview) {
      auto host = open_host(spec_path, cwd, bindings);
      auto session = host->session();
      if (as_json) {
        nlohmann::json body = {{"text", preview_text(session)},
                               {"missing", unmet_required(session)}};
        out << body.dump(2) << '\n';
      } else {
        out << preview_text(session) << '\n';
      }
      return 0;
    }

    if (*run) {
      auto host = open_host(spec_path, cwd, bindings);
      std::mutex io;
      auto live = host->start([&](const RunEvent& event) {
        const auto* chunk = std::get_if<OutputChunk>(&event);
        if (chunk == nullptr) return;
        std::lock_guard lock(io);
        auto& dest = chunk->stream == Stream::Stdout ? out : err;
        dest.write(chunk->bytes.data(),
                   static_cast<std::streamsize>(chunk->bytes.size()));
        dest.flush();
      });
      RunRecord record = live->wait();
      if (record.status.kind == RunStatus::Kind::Failed) {
        err << "error: " << record.status.reason << '\n';
      }
      return exit_code_for(record.status);
    }

    if (*exporter) {
      auto host = open_host(spec_path, cwd, bindings);
      return write_output(host->export_xml(), output, out, err);
    }

    if (*emit) {
      auto spec = fixtures::by_name(fixture);
      return write_output(argdoc::emit(spec, *argdoc::parse_format(format)),
                          output, out, err);
    }

    if (*serve) {
      ValidationReport report = validate_document(read_file(spec_path));
      if (!report.ok()) {
        err << report.to_text();
        return kExitSetupFailure;
      }
      auto host = open_host(spec_path, cwd, {});
      Service service(*host);
      int bound = service.bind(address, port);
      if (bound < 0) {
        err << "error: cannot listen on " << address << ':' << port << '\n';
        return kExitSetupFailure;
      }
      out << "serving " << spec_path << " on http://" << address << ':' << bound
          << '\n';
      out.flush();
      service.serve();
      return 0;
    }
  } catch (const SchemaError& e) {
    print_schema_error(e, err);
    return kExitSetupFailure;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitSetupFailure;
  }
  return kExitUsage;
}

}  // namespace optionhost

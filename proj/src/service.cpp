#include "optionhost/service.hpp"

#include <boost/beast/core/detail/base64.hpp>

#include <atomic>
#include <thread>

#include "httplib.h"

namespace optionhost {

using nlohmann::json;

namespace {

constexpr auto kStreamPoll = std::chrono::milliseconds(250);

json values_json(const Set& set) {
  json out = json::array();
  for (const auto& v : set.values) out.push_back(render_value(v));
  return out;
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace),
                  "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, error_to_json(e), http_status_for(e.code()));
}

void send_bad_request(httplib::Response& res, const std::string& message) {
  send_json(res, {{"error", "BadRequest"}, {"message", message}, {"ids", json::array()}},
            400);
}

// Runs `fn`, turning library errors into structured HTTP errors.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_bad_request(res, e.what());
  } catch (const std::logic_error& e) {
    send_bad_request(res, e.what());
  }
}

std::string sse_frame(std::size_t index, const RunEvent& event) {
  const char* name = std::holds_alternative<OutputChunk>(event) ? "chunk" : "status";
  return "id: " + std::to_string(index) + "\nevent: " + name + "\ndata: " +
         event_to_json(event).dump(-1, ' ', false, json::error_handler_t::replace) +
         "\n\n";
}

}  // namespace

std::string lossy_text(std::string_view bytes) {
  // Round-tripping through dump() with the replace handler is the library's
  // lossy decoder; strip the surrounding quotes and unescape via parse.
  json s = std::string(bytes);
  return json::parse(s.dump(-1, ' ', false, json::error_handler_t::replace))
      .get<std::string>();
}

std::string base64_encode(std::string_view bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::decoded_size(text.size()), '\0');
  auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  out.resize(written);
  return out;
}

json option_to_json(const SessionState& session, const OptionDef& def) {
  const OptionState& state = session.state(def.id);
  const OptionGroup* group = session.spec->group_of(def.id);
  json out = {
      {"id", def.id},
      {"group", group != nullptr ? group->name : ""},
      {"label", def.label},
      {"flag", def.flag},
      {"kind", to_string(def.kind)},
      {"style", to_string(def.style)},
      {"required", def.required},
      {"repeatable", def.repeatable},
      {"state", state_name(state)},
      {"color", to_string(display_color(state))},
      {"doc", def.doc},
  };
  if (is_set(state)) {
    const auto& set = std::get<Set>(state);
    out["value"] = render_value(set.values.back());
    out["values"] = values_json(set);
  }
  if (def.default_value) out["default"] = render_value(*def.default_value);
  if (def.range) out["range"] = {{"min", def.range->min}, {"max", def.range->max}};
  if (!def.choices.empty()) {
    json choices = json::array();
    for (const auto& c : def.choices) {
      choices.push_back({{"value", c.value}, {"label", c.label}});
    }
    out["choices"] = std::move(choices);
  }
  return out;
}

json session_to_json(const SessionState& session, std::string_view session_id) {
  const ProgramSpec& spec = *session.spec;
  json groups = json::array();
  json options = json::array();
  for (const auto& g : spec.groups) {
    json ids = json::array();
    for (const auto& o : g.options) {
      ids.push_back(o.id);
      options.push_back(option_to_json(session, o));
    }
    groups.push_back({{"name", g.name}, {"doc", g.doc}, {"options", ids}});
  }
  json out = {
      {"session_id", session_id},
      {"name", spec.name},
      {"title", spec.display_title},
      {"description", spec.description},
      {"version", spec.version},
      {"working_dir", session.working_dir.string()},
      {"groups", std::move(groups)},
      {"options", std::move(options)},
      {"missing", unmet_required(session)},
  };
  out["active_run"] = session.active_run ? json(*session.active_run) : json(nullptr);
  return out;
}

json status_to_json(const RunStatus& status) {
  json out = {{"state", to_string(status.kind)}};
  if (status.kind == RunStatus::Kind::Exited) out["code"] = status.exit_code;
  if (status.kind == RunStatus::Kind::Failed) out["reason"] = status.reason;
  return out;
}

json event_to_json(const RunEvent& event) {
  if (const auto* chunk = std::get_if<OutputChunk>(&event)) {
    return {{"type", "chunk"},
            {"stream", to_string(chunk->stream)},
            {"seq", chunk->seq},
            {"text", lossy_text(chunk->bytes)},
            {"b64", base64_encode(chunk->bytes)}};
  }
  json out = status_to_json(std::get<RunStatus>(event));
  out["type"] = "status";
  return out;
}

json report_to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Diagnostic>& items) {
    json out = json::array();
    for (const auto& d : items) {
      out.push_back({{"line", d.pos.line},
                     {"column", d.pos.column},
                     {"path", d.path},
                     {"message", d.message}});
    }
    return out;
  };
  return {{"ok", report.ok()},
          {"errors", list(report.errors)},
          {"warnings", list(report.warnings)}};
}

json error_to_json(const Error& error) {
  return {{"error", to_string(error.code())},
          {"message", error.what()},
          {"ids", error.ids()}};
}

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownOption:
    case ErrorCode::UnknownRun:
      return 404;
    case ErrorCode::MissingRequired:
    case ErrorCode::RunAlreadyActive:
    case ErrorCode::MutationDuringRun:
    case ErrorCode::AlreadyTerminated:
    case ErrorCode::SpecMismatch:
      return 409;
    case ErrorCode::ValueError:
    case ErrorCode::ExecutableNotFound:
    case ErrorCode::InputFileMissing:
    case ErrorCode::SpawnFailed:
      return 422;
    case ErrorCode::IoError:
      return 500;
    default:
      return 400;
  }
}

struct Service::Impl {
  SessionHost& host;
  std::string session_id;
  httplib::Server server;
  std::atomic<bool> stopping{false};

  Impl(SessionHost& h, std::string id) : host(h), session_id(std::move(id)) {
    routes();
  }

  json session_json() const { return session_to_json(host.session(), session_id); }

  json option_json(const SessionState& s, const std::string& id) const {
    const OptionDef* def = s.spec->find(id);
    return option_to_json(s, *def);
  }

  void routes() {
    server.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, session_json()); });
    });

    server.Put(R"(/api/options/([^/]+)/value)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   std::string id = req.matches[1];
                   json body = json::parse(req.body);
                   if (!body.is_object() || !body.contains("raw") ||
                       !body["raw"].is_string()) {
                     send_bad_request(res, "body must be {\"raw\": string}");
                     return;
                   }
                   auto s = host.set(id, body["raw"].get<std::string>());
                   send_json(res, option_json(s, id));
                 });
               });

    server.Delete(R"(/api/options/([^/]+)/value)",
                  [this](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                      std::string id = req.matches[1];
                      auto s = host.clear(id);
                      send_json(res, option_json(s, id));
                    });
                  });

    server.Post("/api/reset", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        host.reset();
        send_json(res, session_json());
      });
    });

    server.Get("/api/preview", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        auto s = host.session();
        send_json(res, {{"text", preview_text(s)}, {"missing", unmet_required(s)}});
      });
    });

    server.Post("/api/run", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        auto run = host.start();
        send_json(res, {{"run_id", run->id()}});
      });
    });

    server.Get(R"(/api/runs/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto record = host.find_run(req.matches[1].str())->snapshot();
                   send_json(res, {{"run_id", record.run_id},
                                   {"argv", record.command.argv},
                                   {"preview", record.command.preview},
                                   {"cwd", record.command.cwd.string()},
                                   {"status", status_to_json(record.status)},
                                   {"error_notification", record.error_notification()},
                                   {"stdout_bytes", record.bytes(Stream::Stdout).size()},
                                   {"stderr_bytes", record.bytes(Stream::Stderr).size()}});
                 });
               });

    server.Post(R"(/api/runs/([^/]+)/kill)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    auto run = host.find_run(req.matches[1].str());
                    send_json(res, {{"status", status_to_json(run->kill().status)}});
                  });
                });

    server.Get(R"(/api/runs/([^/]+)/events)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] { stream_events(req, res); });
               });

    server.Get(R"(/api/runs/([^/]+)/output)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto run = host.find_run(req.matches[1].str());
                   std::string which = req.has_param("stream")
                                           ? req.get_param_value("stream")
                                           : "stdout";
                   if (which != "stdout" && which != "stderr") {
                     send_bad_request(res, "stream must be stdout or stderr");
                     return;
                   }
                   auto stream = which == "stdout" ? Stream::Stdout : Stream::Stderr;
                   res.set_content(run->snapshot().bytes(stream),
                                   "application/octet-stream");
                 });
               });

    server.Get("/api/spec/export", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { res.set_content(host.export_xml(), "application/xml"); });
    });

    server.Get(R"(/api/doc/([^/]+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   std::string id = req.matches[1];
                   auto s = host.session();
                   const OptionDef* def = s.spec->find(id);
                   if (def == nullptr) {
                     throw Error(ErrorCode::UnknownOption,
                                 "unknown option '" + id + "'", {id});
                   }
                   send_json(res, {{"id", id}, {"label", def->label}, {"doc", def->doc}});
                 });
               });
  }

  void stream_events(const httplib::Request& req, httplib::Response& res) {
    auto run = host.find_run(req.matches[1].str());
    std::size_t from = 0;
    if (req.has_param("from")) {
      from = std::stoul(req.get_param_value("from"));
    } else if (req.has_header("Last-Event-ID")) {
      from = std::stoul(req.get_header_value("Last-Event-ID")) + 1;
    }
    auto cursor = std::make_shared<std::size_t>(from);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [this, run, cursor](std::size_t, httplib::DataSink& sink) {
          while (!stopping) {
            auto events = run->events_since(*cursor, kStreamPoll);
            bool terminal = false;
            for (const auto& e : events) {
              std::string frame = sse_frame((*cursor)++, e);
              if (!sink.write(frame.data(), frame.size())) return false;
              if (const auto* st = std::get_if<RunStatus>(&e)) {
                terminal = terminal || st->terminal();
              }
            }
            if (terminal) {
              sink.done();
              return true;
            }
            if (!events.empty()) return true;
            if (run->finished() && run->events_since(*cursor, {}).empty()) {
              sink.done();
              return true;
            }
            if (!sink.is_writable()) return false;
          }
          return false;
        });
  }
};

Service::Service(SessionHost& host, std::string session_id)
    : impl_(std::make_unique<Impl>(host, std::move(session_id))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& address, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(address);
  if (!impl_->server.bind_to_port(address, port)) return -1;
  return port;
}

void Service::serve() { impl_->server.listen_after_bind(); }

void Service::stop() {
  impl_->stopping = true;
  impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

}  // namespace optionhost

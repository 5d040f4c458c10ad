#pragma once

#include <memory>
#include <string>

#include "json.hpp"

#include "optionhost/host.hpp"

namespace optionhost {

// Wire records shared by the HTTP API and the CLI's --json output.
nlohmann::json option_to_json(const SessionState& session, const OptionDef& def);
nlohmann::json session_to_json(const SessionState& session,
                               std::string_view session_id);
nlohmann::json status_to_json(const RunStatus& status);
nlohmann::json event_to_json(const RunEvent& event);
nlohmann::json report_to_json(const ValidationReport& report);
nlohmann::json error_to_json(const Error& error);
int http_status_for(ErrorCode code) noexcept;

// Lossy UTF-8 rendering of raw bytes (invalid sequences become U+FFFD).
std::string lossy_text(std::string_view bytes);
std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);

// Local HTTP front end over one SessionHost:
//   GET    /api/session
//   PUT    /api/options/{id}/value      {"raw": "..."}
//   DELETE /api/options/{id}/value
//   POST   /api/reset
//   GET    /api/preview
//   POST   /api/run
//   GET    /api/runs/{run_id}
//   POST   /api/runs/{run_id}/kill
//   GET    /api/runs/{run_id}/events    server-sent events, ?from=N resumes
//   GET    /api/runs/{run_id}/output?stream=stdout|stderr
//   GET    /api/spec/export
//   GET    /api/doc/{id}
class Service {
 public:
  explicit Service(SessionHost& host, std::string session_id = "default");
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds without serving yet; port 0 picks a free port. Returns the port.
  int bind(const std::string& address, int port);
  // Serves until stop(). Requires bind().
  void serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace optionhost

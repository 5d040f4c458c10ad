#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include "optionhost/runner.hpp"
#include "optionhost/spec_xml.hpp"

namespace optionhost {

// Owns one session and its runs. Mutations are serialized; reads may run
// concurrently. Both the CLI and the HTTP service drive sessions through this.
class SessionHost {
 public:
  SessionHost(SpecDocument doc, std::filesystem::path working_dir);
  ~SessionHost();

  SessionHost(const SessionHost&) = delete;
  SessionHost& operator=(const SessionHost&) = delete;

  // Loads the spec and replays any saved values it carries.
  static std::unique_ptr<SessionHost> open(const std::filesystem::path& spec,
                                           std::filesystem::path working_dir);

  const SpecDocument& document() const noexcept { return doc_; }
  SessionState session() const;

  SessionState set(std::string_view id, std::string_view raw);
  SessionState clear(std::string_view id);
  SessionState reset();

  std::string preview() const;
  AssembledCommand assemble() const;
  std::string export_xml() const;

  // Throws RunAlreadyActive, MissingRequired and the runner's launch errors.
  std::shared_ptr<Run> start(RunSink sink = {});
  std::shared_ptr<Run> find_run(std::string_view run_id) const;

  void set_kill_grace(std::chrono::milliseconds grace) { kill_grace_ = grace; }

 private:
  SpecDocument doc_;
  mutable std::shared_mutex mu_;
  SessionState session_;
  std::map<std::string, std::shared_ptr<Run>, std::less<>> runs_;
  std::chrono::milliseconds kill_grace_{2000};
};

}  // namespace optionhost

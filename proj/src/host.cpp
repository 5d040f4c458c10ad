#include "optionhost/host.hpp"

#include <mutex>

namespace optionhost {

SessionHost::SessionHost(SpecDocument doc, std::filesystem::path working_dir)
    : doc_(std::move(doc)),
      session_(new_session(doc_.spec, std::move(working_dir))) {
  session_ = apply_values(session_, doc_);
}

SessionHost::~SessionHost() {
  std::vector<std::shared_ptr<Run>> live;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, run] : runs_) {
      if (!run->finished()) live.push_back(run);
    }
  }
  for (auto& run : live) {
    try {
      run->kill();
    } catch (const Error&) {
      // finished in the meantime
    }
  }
}

std::unique_ptr<SessionHost> SessionHost::open(
    const std::filesystem::path& spec, std::filesystem::path working_dir) {
  return std::make_unique<SessionHost>(load_spec_file(spec),
                                       std::move(working_dir));
}

SessionState SessionHost::session() const {
  std::shared_lock lock(mu_);
  return session_;
}

SessionState SessionHost::set(std::string_view id, std::string_view raw) {
  std::lock_guard lock(mu_);
  session_ = set_option(session_, id, raw);
  return session_;
}

SessionState SessionHost::clear(std::string_view id) {
  std::lock_guard lock(mu_);
  session_ = clear_option(session_, id);
  return session_;
}

SessionState SessionHost::reset() {
  std::lock_guard lock(mu_);
  session_ = reset_all(session_);
  return session_;
}

std::string SessionHost::preview() const {
  std::shared_lock lock(mu_);
  return preview_text(session_);
}

AssembledCommand SessionHost::assemble() const {
  std::shared_lock lock(mu_);
  return optionhost::assemble(session_);
}

std::string SessionHost::export_xml() const {
  std::shared_lock lock(mu_);
  return serialize_spec(attach_values(doc_, session_));
}

std::shared_ptr<Run> SessionHost::start(RunSink sink) {
  std::lock_guard lock(mu_);
  if (session_.active_run) {
    throw Error(ErrorCode::RunAlreadyActive,
                "run " + *session_.active_run + " is still active",
                {*session_.active_run});
  }
  AssembledCommand command = optionhost::assemble(session_);
  RunOptions options;
  options.kill_grace = kill_grace_;
  options.on_terminal = [this](const RunRecord& record) {
    std::lock_guard inner(mu_);
    if (session_.active_run == record.run_id) {
      session_ = without_active_run(session_);
    }
  };
  // The terminal hook needs mu_, so a run that ends instantly must not be
  // able to fire it before we register: hold the lock across start.
  auto run = start_run(command, std::move(sink), std::move(options));
  session_ = with_active_run(session_, run->id());
  runs_.emplace(run->id(), run);
  return run;
}

std::shared_ptr<Run> SessionHost::find_run(std::string_view run_id) const {
  std::shared_lock lock(mu_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) {
    throw Error(ErrorCode::UnknownRun,
                "unknown run '" + std::string(run_id) + "'",
                {std::string(run_id)});
  }
  return it->second;
}

}  // namespace optionhost

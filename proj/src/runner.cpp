#include "optionhost/runner.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <thread>

extern char** environ;

namespace optionhost {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kReadSize = 4096;

std::string next_run_id() {
  static std::atomic<std::uint64_t> counter{0};
  return "run-" + std::to_string(::getpid()) + "-" +
         std::to_string(++counter);
}

std::string os_error(std::string_view what, int err) {
  return std::string(what) + ": " + std::strerror(err);
}

bool is_executable_file(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

fs::path anchored(const fs::path& cwd, const std::string& raw) {
  fs::path p(raw);
  return p.is_absolute() ? p : cwd / p;
}

void check_paths(const AssembledCommand& command) {
  for (const auto& arg : command.paths) {
    fs::path p = anchored(command.cwd, arg.path).lexically_normal();
    std::error_code ec;
    if (arg.kind == OptionKind::InFile) {
      if (!fs::exists(p, ec)) {
        throw Error(ErrorCode::InputFileMissing,
                    "input file for option '" + arg.option_id +
                        "' does not exist: " + arg.path,
                    {arg.option_id, arg.path});
      }
      continue;
    }
    if (!p.has_filename()) p = p.parent_path();
    fs::path parent = p.parent_path();
    if (!parent.empty() && !fs::is_directory(parent, ec)) {
      throw Error(ErrorCode::InputFileMissing,
                  "parent directory for option '" + arg.option_id +
                      "' does not exist: " + parent.string(),
                  {arg.option_id, arg.path});
    }
  }
}

class FileActions {
 public:
  FileActions() { ::posix_spawn_file_actions_init(&actions_); }
  ~FileActions() { ::posix_spawn_file_actions_destroy(&actions_); }
  posix_spawn_file_actions_t* get() { return &actions_; }

 private:
  posix_spawn_file_actions_t actions_;
};

class SpawnAttr {
 public:
  SpawnAttr() { ::posix_spawnattr_init(&attr_); }
  ~SpawnAttr() { ::posix_spawnattr_destroy(&attr_); }
  posix_spawnattr_t* get() { return &attr_; }

 private:
  posix_spawnattr_t attr_;
};

struct Pipe {
  int read = -1;
  int write = -1;
  Pipe() {
    std::array<int, 2> fds{};
    if (::pipe2(fds.data(), O_CLOEXEC) != 0) {
      throw Error(ErrorCode::SpawnFailed, os_error("pipe", errno));
    }
    read = fds[0];
    write = fds[1];
  }
  ~Pipe() {
    if (read >= 0) ::close(read);
    if (write >= 0) ::close(write);
  }
  int release_read() { return std::exchange(read, -1); }
  void close_write() {
    if (write >= 0) ::close(std::exchange(write, -1));
  }
};

}  // namespace

std::string_view to_string(Stream stream) noexcept {
  return stream == Stream::Stdout ? "stdout" : "stderr";
}

std::string_view to_string(RunStatus::Kind kind) noexcept {
  switch (kind) {
    case RunStatus::Kind::Running: return "Running";
    case RunStatus::Kind::Exited: return "Exited";
    case RunStatus::Kind::Failed: return "Failed";
    case RunStatus::Kind::Killed: return "Killed";
  }
  return "?";
}

std::string RunRecord::bytes(Stream stream) const {
  const auto& chunks =
      stream == Stream::Stdout ? console_transcript : error_transcript;
  std::string out;
  for (const auto& c : chunks) out += c.bytes;
  return out;
}

bool RunRecord::error_notification() const {
  if (!error_transcript.empty()) return true;
  if (!status.terminal()) return false;
  return !(status.kind == RunStatus::Kind::Exited && status.exit_code == 0);
}

fs::path resolve_executable(const std::string& executable, const fs::path& cwd) {
  auto not_found = [&]() {
    return Error(ErrorCode::ExecutableNotFound,
                 "executable not found: " + executable, {executable});
  };
  if (executable.empty()) throw not_found();
  if (executable.find('/') != std::string::npos) {
    fs::path p = anchored(cwd, executable).lexically_normal();
    if (!is_executable_file(p)) throw not_found();
    return p;
  }
  const char* env = std::getenv("PATH");
  std::string_view search = env != nullptr ? env : "/usr/local/bin:/usr/bin:/bin";
  while (true) {
    auto colon = search.find(':');
    std::string_view dir = search.substr(0, colon);
    fs::path base = dir.empty() ? fs::path(".") : fs::path(dir);
    fs::path candidate = anchored(cwd, base.string()) / executable;
    if (is_executable_file(candidate)) return candidate;
    if (colon == std::string_view::npos) break;
    search.remove_prefix(colon + 1);
  }
  throw not_found();
}

std::shared_ptr<Run> start_run(const AssembledCommand& command, RunSink sink,
                               RunOptions options) {
  if (command.argv.empty()) {
    throw Error(ErrorCode::SpawnFailed, "empty argv");
  }
  std::error_code ec;
  if (!fs::is_directory(command.cwd, ec)) {
    throw Error(ErrorCode::SpawnFailed,
                "working directory does not exist: " + command.cwd.string(),
                {command.cwd.string()});
  }
  fs::path exe = resolve_executable(command.argv.front(), command.cwd);
  check_paths(command);

  Pipe out;
  Pipe err;
  FileActions actions;
  ::posix_spawn_file_actions_adddup2(actions.get(), out.write, STDOUT_FILENO);
  ::posix_spawn_file_actions_adddup2(actions.get(), err.write, STDERR_FILENO);
  ::posix_spawn_file_actions_addopen(actions.get(), STDIN_FILENO, "/dev/null",
                                     O_RDONLY, 0);
  ::posix_spawn_file_actions_addclosefrom_np(actions.get(), STDERR_FILENO + 1);
  ::posix_spawn_file_actions_addchdir_np(actions.get(), command.cwd.c_str());

  SpawnAttr attr;
  sigset_t defaults;
  sigemptyset(&defaults);
  for (int sig : {SIGPIPE, SIGTERM, SIGINT, SIGHUP}) sigaddset(&defaults, sig);
  sigset_t empty;
  sigemptyset(&empty);
  ::posix_spawnattr_setsigdefault(attr.get(), &defaults);
  ::posix_spawnattr_setsigmask(attr.get(), &empty);
  ::posix_spawnattr_setpgroup(attr.get(), 0);
  ::posix_spawnattr_setflags(attr.get(), POSIX_SPAWN_SETSIGDEF |
                                             POSIX_SPAWN_SETSIGMASK |
                                             POSIX_SPAWN_SETPGROUP);

  std::vector<char*> argv;
  argv.reserve(command.argv.size() + 1);
  for (const auto& a : command.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = -1;
  int rc = ::posix_spawn(&pid, exe.c_str(), actions.get(), attr.get(),
                         argv.data(), environ);
  if (rc != 0) {
    throw Error(ErrorCode::SpawnFailed, os_error("spawn " + exe.string(), rc),
                {command.argv.front()});
  }
  out.close_write();
  err.close_write();

  std::shared_ptr<Run> run(new Run());
  run->id_ = next_run_id();
  run->options_ = std::move(options);
  run->sink_ = std::move(sink);
  run->pid_ = pid;
  run->record_.run_id = run->id_;
  run->record_.command = command;
  run->record_.started_at = RunRecord::Clock::now();
  run->record_.status = RunStatus::running();
  run->publish(RunStatus::running());

  int out_fd = out.release_read();
  int err_fd = err.release_read();
  std::thread([self = run, out_fd, err_fd] { self->pump(out_fd, err_fd); })
      .detach();
  return run;
}

Run::~Run() = default;

void Run::publish(RunEvent event) {
  {
    std::lock_guard lock(mu_);
    if (auto* chunk = std::get_if<OutputChunk>(&event)) {
      auto& transcript = chunk->stream == Stream::Stdout
                             ? record_.console_transcript
                             : record_.error_transcript;
      chunk->seq = transcript.size();
      transcript.push_back(*chunk);
    }
    events_.push_back(event);
  }
  cv_.notify_all();
  if (sink_) sink_(event);
}

void Run::pump(int out_fd, int err_fd) {
  std::array<pollfd, 2> fds{{{out_fd, POLLIN, 0}, {err_fd, POLLIN, 0}}};
  std::array<Stream, 2> streams{Stream::Stdout, Stream::Stderr};
  std::array<char, kReadSize> buf{};
  int open_count = 2;
  std::string failure;

  while (open_count > 0) {
    int n = ::poll(fds.data(), fds.size(), -1);
    if (n < 0) {
      if (errno == EINTR) continue;
      failure = os_error("poll", errno);
      break;
    }
    for (std::size_t i = 0; i < fds.size(); ++i) {
      if (fds[i].fd < 0 || fds[i].revents == 0) continue;
      ssize_t got = ::read(fds[i].fd, buf.data(), buf.size());
      if (got < 0 && (errno == EINTR || errno == EAGAIN)) continue;
      if (got <= 0) {
        ::close(fds[i].fd);
        fds[i].fd = -1;
        --open_count;
        continue;
      }
      publish(OutputChunk{streams[i],
                          std::string(buf.data(), static_cast<std::size_t>(got)),
                          0});
    }
  }
  for (auto& f : fds) {
    if (f.fd >= 0) ::close(f.fd);
  }

  int wstatus = 0;
  pid_t waited = -1;
  do {
    waited = ::waitpid(pid_, &wstatus, 0);
  } while (waited < 0 && errno == EINTR);

  RunStatus status;
  {
    std::lock_guard lock(mu_);
    if (kill_requested_) {
      status = RunStatus::killed();
    } else if (waited < 0) {
      status = RunStatus::failed(os_error("waitpid", errno));
    } else if (!failure.empty()) {
      status = RunStatus::failed(failure);
    } else if (WIFEXITED(wstatus)) {
      status = RunStatus::exited(WEXITSTATUS(wstatus));
    } else if (WIFSIGNALED(wstatus)) {
      status = RunStatus::failed("terminated by signal " +
                                 std::to_string(WTERMSIG(wstatus)));
    } else {
      status = RunStatus::failed("unknown wait status");
    }
    record_.status = status;
    record_.ended_at = RunRecord::Clock::now();
  }
  if (options_.on_terminal) options_.on_terminal(snapshot());
  publish(status);
}

RunRecord Run::snapshot() const {
  std::lock_guard lock(mu_);
  return record_;
}

bool Run::finished() const {
  std::lock_guard lock(mu_);
  return !events_.empty() && std::holds_alternative<RunStatus>(events_.back()) &&
         std::get<RunStatus>(events_.back()).terminal();
}

RunRecord Run::wait() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] {
    return std::holds_alternative<RunStatus>(events_.back()) &&
           std::get<RunStatus>(events_.back()).terminal();
  });
  return record_;
}

bool Run::wait_for(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, timeout, [&] {
    return std::holds_alternative<RunStatus>(events_.back()) &&
           std::get<RunStatus>(events_.back()).terminal();
  });
}

RunRecord Run::kill() {
  {
    std::lock_guard lock(mu_);
    if (record_.status.terminal()) {
      throw Error(ErrorCode::AlreadyTerminated,
                  "run " + id_ + " has already terminated", {id_});
    }
    kill_requested_ = true;
    ::kill(-pid_, SIGTERM);
  }
  if (!wait_for(options_.kill_grace)) {
    {
      std::lock_guard lock(mu_);
      if (!record_.status.terminal()) ::kill(-pid_, SIGKILL);
    }
  }
  return wait();
}

std::vector<RunEvent> Run::events_since(std::size_t from,
                                        std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  auto done = [&] {
    return std::holds_alternative<RunStatus>(events_.back()) &&
           std::get<RunStatus>(events_.back()).terminal();
  };
  cv_.wait_for(lock, timeout, [&] { return events_.size() > from || done(); });
  if (from >= events_.size()) return {};
  return {events_.begin() + static_cast<std::ptrdiff_t>(from), events_.end()};
}

RunRecord await_run(Run& run) { return run.wait(); }

RunRecord kill_run(Run& run) { return run.kill(); }

std::size_t save_transcript(const RunRecord& record, Stream stream,
                            const fs::path& dest) {
  std::string data = record.bytes(stream);
  std::ofstream out(dest, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open " + dest.string(),
                {dest.string()});
  }
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot write " + dest.string(),
                {dest.string()});
  }
  return data.size();
}

}  // namespace optionhost

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "optionhost/assembler.hpp"

namespace optionhost {

enum class Stream { Stdout, Stderr };
std::string_view to_string(Stream stream) noexcept;

struct OutputChunk {
  Stream stream = Stream::Stdout;
  std::string bytes;
  std::uint64_t seq = 0;  // per stream, gapless from 0
  bool operator==(const OutputChunk&) const = default;
};

struct RunStatus {
  enum class Kind { Running, Exited, Failed, Killed };
  Kind kind = Kind::Running;
  int exit_code = 0;   // Exited only
  std::string reason;  // Failed only

  static RunStatus running() { return {}; }
  static RunStatus exited(int code) { return {Kind::Exited, code, {}}; }
  static RunStatus failed(std::string why) {
    return {Kind::Failed, 0, std::move(why)};
  }
  static RunStatus killed() { return {Kind::Killed, 0, {}}; }

  bool terminal() const noexcept { return kind != Kind::Running; }
  bool operator==(const RunStatus&) const = default;
};

std::string_view to_string(RunStatus::Kind kind) noexcept;

// Delivered in order: Running status, chunks as they arrive, then exactly one
// terminal status.
using RunEvent = std::variant<OutputChunk, RunStatus>;
using RunSink = std::function<void(const RunEvent&)>;

struct RunRecord {
  using Clock = std::chrono::system_clock;

  std::string run_id;
  AssembledCommand command;
  Clock::time_point started_at;
  std::optional<Clock::time_point> ended_at;
  RunStatus status;
  std::vector<OutputChunk> console_transcript;  // stdout
  std::vector<OutputChunk> error_transcript;    // stderr

  std::string bytes(Stream stream) const;
  // Status-bar error flag: anything on stderr, or a non-clean ending.
  bool error_notification() const;
};

struct RunOptions {
  std::chrono::milliseconds kill_grace{2000};
  // Called on the pump thread once the status is terminal, before the
  // terminal event reaches the sink.
  std::function<void(const RunRecord&)> on_terminal;
};

// A live child process. Output is pumped on a background thread; every
// method is safe to call from any thread.
class Run : public std::enable_shared_from_this<Run> {
 public:
  ~Run();
  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;

  const std::string& id() const noexcept { return id_; }
  RunRecord snapshot() const;
  bool finished() const;

  RunRecord wait();
  bool wait_for(std::chrono::milliseconds timeout);
  // SIGTERM to the child's process group, SIGKILL after the grace period.
  RunRecord kill();

  // Events from index `from` on. Blocks up to `timeout` while nothing new is
  // available and the run is still going.
  std::vector<RunEvent> events_since(std::size_t from,
                                     std::chrono::milliseconds timeout) const;

 private:
  friend std::shared_ptr<Run> start_run(const AssembledCommand&, RunSink,
                                        RunOptions);
  Run() = default;
  void pump(int out_fd, int err_fd);
  void publish(RunEvent event);

  std::string id_;
  RunOptions options_;
  RunSink sink_;
  int pid_ = -1;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  RunRecord record_;
  std::vector<RunEvent> events_;
  bool kill_requested_ = false;
};

// Resolves the executable against PATH (or `cwd` for relative paths with a
// slash). Throws Error(ExecutableNotFound).
std::filesystem::path resolve_executable(const std::string& executable,
                                         const std::filesystem::path& cwd);

// Checks path preconditions, spawns argv directly (no shell) in command.cwd
// with stdin on /dev/null, and returns immediately.
std::shared_ptr<Run> start_run(const AssembledCommand& command,
                               RunSink sink = {}, RunOptions options = {});

RunRecord await_run(Run& run);
RunRecord kill_run(Run& run);

// Writes the selected stream's bytes verbatim; returns the byte count.
std::size_t save_transcript(const RunRecord& record, Stream stream,
                            const std::filesystem::path& dest);

}  // namespace optionhost

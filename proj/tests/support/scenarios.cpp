#include "scenarios.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace testing_support {

using namespace optionhost;
namespace fs = std::filesystem;

std::unique_ptr<SessionHost> open_fixture(const std::string& name, const fs::path& cwd,
                                          const Bindings& bindings) {
  auto host = SessionHost::open(fixture_spec(name), cwd);
  for (const auto& [id, raw] : bindings) host->set(id, raw);
  return host;
}

RunRecord run_to_end(SessionHost& host, Failure& sink_mismatch) {
  std::mutex mu;
  std::string seen[2];
  std::uint64_t next_seq[2] = {0, 0};
  std::vector<RunStatus> statuses;
  auto run = host.start([&](const RunEvent& event) {
    std::lock_guard lock(mu);
    if (const auto* chunk = std::get_if<OutputChunk>(&event)) {
      int i = chunk->stream == Stream::Stdout ? 0 : 1;
      if (chunk->seq != next_seq[i]++) sink_mismatch = "sink saw a sequence gap";
      seen[i] += chunk->bytes;
      if (!statuses.empty() && statuses.back().terminal()) {
        sink_mismatch = "chunk delivered after the terminal status";
      }
    } else {
      statuses.push_back(std::get<RunStatus>(event));
    }
  });
  RunRecord record = run->wait();
  // the terminal event reaches the sink right after on_terminal returns
  for (int i = 0; i < 200; ++i) {
    {
      std::lock_guard lock(mu);
      if (!statuses.empty() && statuses.back().terminal()) break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  std::lock_guard lock(mu);
  if (statuses.size() != 2 || statuses.front().kind != RunStatus::Kind::Running ||
      !(statuses.back() == record.status)) {
    sink_mismatch = "sink status events were not Running then the final status";
  }
  if (seen[0] != record.bytes(Stream::Stdout) || seen[1] != record.bytes(Stream::Stderr)) {
    sink_mismatch = "sink bytes differ from the transcript";
  }
  return record;
}

namespace {

Failure check_clean(const RunRecord& record, const Failure& sink) {
  if (sink) return sink;
  if (!(record.status == RunStatus::exited(0))) {
    return "run did not exit 0: " + std::string(to_string(record.status.kind)) + " " +
           std::to_string(record.status.exit_code) + " " + record.status.reason +
           "\nstderr: " + record.bytes(Stream::Stderr);
  }
  return std::nullopt;
}

}  // namespace

Failure argv_fidelity_scenario() {
  TempDir dir;
  std::ofstream(dir.path() / "in file.txt") << "x";
  auto host = open_fixture("argv-echo", dir.path(),
                           {{"t", "4.0"},
                            {"name", "; and spaces"},
                            {"include", "it's"},
                            {"include", "$HOME \"quoted\" \\"},
                            {"model", "jc"},
                            {"verbose", "true"},
                            {"input", "in file.txt"}});
  std::vector<std::string> want = {"-t", "4", "--model=jc", "-v", "--name", "; and spaces",
                                   "-I", "it's", "-I", "$HOME \"quoted\" \\", "in file.txt"};
  Failure sink;
  RunRecord record = run_to_end(*host, sink);
  if (auto f = check_clean(record, sink)) return f;
  std::string expected;
  for (const auto& a : want) expected += a + "\n";
  if (record.bytes(Stream::Stdout) != expected) {
    return "argv-echo printed " + describe({record.bytes(Stream::Stdout)}) + ", expected " +
           describe({expected});
  }
  std::vector<std::string> argv(record.command.argv.begin() + 1, record.command.argv.end());
  if (argv != want) return "assembled argv " + describe(argv);
  if (!record.bytes(Stream::Stderr).empty()) return std::string("unexpected stderr");
  if (record.error_notification()) return std::string("error flag raised on a clean run");
  return std::nullopt;
}

Failure stream_separation_scenario() {
  TempDir dir;
  auto host = open_fixture("stderr-emitter", dir.path(), {{"lines", "50"}});
  Failure sink;
  RunRecord record = run_to_end(*host, sink);
  if (auto f = check_clean(record, sink)) return f;
  std::string expected;
  for (int i = 0; i < 50; ++i) expected += "ERR " + std::to_string(i) + "\n";
  if (!record.console_transcript.empty()) return std::string("stderr-emitter wrote to the console");
  if (record.bytes(Stream::Stderr) != expected) return std::string("error transcript differs");
  if (!record.error_notification()) return std::string("stderr output did not raise the error flag");

  auto mixer = open_fixture("stream-mixer", dir.path(), {{"lines", "2000"}});
  record = run_to_end(*mixer, sink);
  if (auto f = check_clean(record, sink)) return f;
  std::string out, err;
  for (int i = 0; i < 2000; ++i) {
    out += "OUT " + std::to_string(i) + "\n";
    err += "ERR " + std::to_string(i) + "\n";
  }
  if (record.bytes(Stream::Stdout) != out) return std::string("stream-mixer stdout mixed or lost");
  if (record.bytes(Stream::Stderr) != err) return std::string("stream-mixer stderr mixed or lost");
  for (const auto* transcript : {&record.console_transcript, &record.error_transcript}) {
    for (std::size_t i = 0; i < transcript->size(); ++i) {
      if ((*transcript)[i].seq != i) return std::string("transcript seq is not gapless");
    }
  }
  return std::nullopt;
}

Failure exit_code_scenario(int code) {
  TempDir dir;
  auto host = open_fixture("exit-with", dir.path(), {{"code", std::to_string(code)}});
  Failure sink;
  RunRecord record = run_to_end(*host, sink);
  if (sink) return sink;
  if (!(record.status == RunStatus::exited(code))) {
    return "expected Exited(" + std::to_string(code) + "), got " +
           std::string(to_string(record.status.kind)) + " " +
           std::to_string(record.status.exit_code);
  }
  if (record.bytes(Stream::Stdout) != "exiting with " + std::to_string(code) + "\n") {
    return std::string("unexpected stdout");
  }
  if (record.error_notification() != (code != 0)) return std::string("error flag wrong");
  if (host->session().active_run) return std::string("session still marks a run active");
  return std::nullopt;
}

Failure large_output_scenario(std::uint64_t seed, std::size_t bytes) {
  TempDir dir;
  auto host = open_fixture("seeded-output", dir.path(),
                           {{"seed", std::to_string(seed)}, {"bytes", std::to_string(bytes)}});
  Failure sink;
  RunRecord record = run_to_end(*host, sink);
  if (auto f = check_clean(record, sink)) return f;
  std::string out = record.bytes(Stream::Stdout);
  if (out.size() != bytes) {
    return "transcript holds " + std::to_string(out.size()) + " of " + std::to_string(bytes) +
           " bytes";
  }
  std::string expected = sha256_hex(seeded_bytes(seed, bytes));
  if (sha256_hex(out) != expected) return std::string("transcript digest differs from generator");
  if (record.bytes(Stream::Stderr) != expected + "\n") {
    return std::string("fixture-reported digest differs from generator");
  }
  TempDir saved;
  if (save_transcript(record, Stream::Stdout, saved.path() / "out.bin") != bytes ||
      sha256_hex(read_file(saved.path() / "out.bin")) != expected) {
    return std::string("saved transcript differs");
  }
  return std::nullopt;
}

Failure relative_output_scenario() {
  TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    fs::create_directories(dir->path() / "sub");
    std::string text = "from " + dir->path().filename().string();
    auto host = open_fixture("write-file", dir->path(), {{"out", "sub/result.txt"}, {"text", text}});
    Failure sink;
    RunRecord record = run_to_end(*host, sink);
    if (auto f = check_clean(record, sink)) return f;
    fs::path expected = dir->path() / "sub" / "result.txt";
    if (!fs::exists(expected)) return "output not created under " + dir->path().string();
    if (read_file(expected) != text + "\n") return std::string("output content differs");
  }
  // each run wrote only under its own cwd
  if (read_file(a.path() / "sub/result.txt") == read_file(b.path() / "sub/result.txt")) {
    return std::string("both runs wrote the same file");
  }
  return std::nullopt;
}

}  // namespace testing_support

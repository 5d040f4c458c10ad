#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "optionhost/argdoc.hpp"
#include "optionhost/cli.hpp"
#include "optionhost/fixture_specs.hpp"
#include "service_harness.hpp"

using namespace optionhost;
using namespace testing_support;
using nlohmann::json;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "optionhost");
  std::ostringstream out, err;
  CliResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string spec(const std::string& name) { return fixture_spec(name).string(); }

}  // namespace

TEST(Cli, ValidateFixture) {
  auto r = cli({"validate", spec("argv-echo")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("valid: "), std::string::npos);
}

TEST(Cli, ValidateBroken) {
  auto r = cli({"validate", source_path("tests/broken/unknown-kind.xml").string()});
  EXPECT_EQ(r.code, kExitSetupFailure);
  EXPECT_NE(r.out.find("error: /guiliner/group[@name='A']/option[@id='c']"), std::string::npos);

  auto j = cli({"validate", "--json", source_path("tests/broken/unknown-kind.xml").string()});
  json report = json::parse(j.out);
  EXPECT_EQ(report["ok"], false);
  EXPECT_EQ(report["errors"].size(), 1u);
  EXPECT_EQ(report["errors"][0]["line"], 4);
}

TEST(Cli, ValidateMissingFile) {
  auto r = cli({"validate", "/nonexistent.xml"});
  EXPECT_EQ(r.code, kExitSetupFailure);
  EXPECT_NE(r.err.find("IoError"), std::string::npos);
}

TEST(Cli, Preview) {
  auto r = cli({"preview", spec("argv-echo"), "--set", "t=4.0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "argv-echo -t 4\n");

  auto missing = cli({"preview", spec("argv-echo")});
  EXPECT_EQ(missing.code, 0);
  EXPECT_EQ(missing.out, "argv-echo\nMISSING REQUIRED: t\n");

  auto j = cli({"preview", "--json", spec("argv-echo"), "--set", "name=a b"});
  json body = json::parse(j.out);
  EXPECT_EQ(body["text"], "argv-echo --name 'a b'\nMISSING REQUIRED: t");
  EXPECT_EQ(body["missing"], json::array({"t"}));
}

TEST(Cli, Run) {
  auto r = cli({"run", spec("argv-echo"), "--set", "t=4.0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "-t\n4\n");
  EXPECT_EQ(r.err, "");
}

TEST(Cli, RunPropagatesExitStatus) {
  for (int code : {0, 1, 3, 77}) {
    auto r = cli({"run", spec("exit-with"), "--set", "code=" + std::to_string(code)});
    EXPECT_EQ(r.code, code);
    EXPECT_EQ(r.out, "exiting with " + std::to_string(code) + "\n");
  }
}

TEST(Cli, RunRefusesMissingRequired) {
  auto r = cli({"run", spec("exit-with")});
  EXPECT_EQ(r.code, kExitSetupFailure);
  EXPECT_NE(r.err.find("MissingRequired"), std::string::npos);
}

TEST(Cli, BadBindings) {
  EXPECT_EQ(cli({"preview", spec("argv-echo"), "--set", "t"}).code, kExitUsage);
  EXPECT_EQ(cli({"preview", spec("argv-echo"), "--set", "=4"}).code, kExitUsage);
  auto unknown = cli({"preview", spec("argv-echo"), "--set", "zz=1"});
  EXPECT_EQ(unknown.code, kExitSetupFailure);
  EXPECT_NE(unknown.err.find("UnknownOption"), std::string::npos);
  auto invalid = cli({"preview", spec("argv-echo"), "--set", "t=11"});
  EXPECT_EQ(invalid.code, kExitSetupFailure);
  EXPECT_NE(invalid.err.find("ValueError"), std::string::npos);
}

TEST(Cli, Usage) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"emit", "no-such-fixture"}).code, kExitUsage);
  EXPECT_EQ(cli({"emit", "argv-echo", "--format", "html"}).code, kExitUsage);
  auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("validate"), std::string::npos);
}

TEST(Cli, ExportAndReload) {
  TempDir dir;
  auto path = (dir.path() / "saved.xml").string();
  auto r = cli({"export", spec("argv-echo"), "--set", "t=2.5", "--set", "include=a",
                "--set", "include=b c", "-o", path});
  ASSERT_EQ(r.code, 0) << r.err;
  SpecDocument doc = load_spec_file(path);
  EXPECT_EQ(doc.embedded_values.at("include"), (std::vector<std::string>{"a", "b c"}));
  auto preview = cli({"preview", path});
  EXPECT_EQ(preview.out, "argv-echo -t 2.5 -I a -I 'b c'\n");
}

TEST(Cli, EmitMatchesLibrary) {
  for (const auto& name : fixtures::names()) {
    for (const char* format : {"short", "long", "man", "xml"}) {
      auto r = cli({"emit", name, "--format", format});
      EXPECT_EQ(r.code, 0);
      EXPECT_EQ(r.out, argdoc::emit(fixtures::by_name(name), *argdoc::parse_format(format)));
    }
  }
}

TEST(Cli, CwdOptionAnchorsRelativePaths) {
  TempDir dir;
  auto r = cli({"run", spec("write-file"), "--cwd", dir.path().string(), "--set", "out=x.txt"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir.path() / "x.txt"), "hello\n");
}

TEST(Cli, MatchesServiceForEveryFixture) {
  std::map<std::string, Bindings> bindings = {
      {"argv-echo", {{"t", "4"}, {"name", "; and spaces"}, {"include", "x"}}},
      {"exit-with", {{"code", "3"}}},
      {"seeded-output", {{"seed", "7"}, {"bytes", "100000"}}},
      {"sleep-marker", {}},
      {"stderr-emitter", {{"lines", "4"}, {"code", "1"}}},
      {"stream-mixer", {{"lines", "200"}}},
      {"write-file", {{"out", "out.txt"}, {"text", "hi there"}}},
  };
  for (const auto& path : fixture_specs()) {
    std::string name = path.stem().string();
    ASSERT_TRUE(bindings.count(name)) << name;
    auto failure = cli_service_equivalence(name, bindings[name], name != "sleep-marker");
    EXPECT_FALSE(failure) << *failure;
  }
}

TEST(CliBinary, ServeAnswersRequests) {
  AssembledCommand cmd;
  cmd.argv = {OPTIONHOST_CLI_PATH, "serve", spec("argv-echo"), "--port", "0"};
  cmd.cwd = std::filesystem::temp_directory_path();
  auto run = start_run(cmd);
  std::smatch m;
  std::string banner;
  const std::regex re("on http://127\\.0\\.0\\.1:([0-9]+)");
  for (int i = 0; i < 500; ++i) {
    banner = run->snapshot().bytes(Stream::Stdout);
    if (std::regex_search(banner, m, re)) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_TRUE(std::regex_search(banner, m, re)) << banner;
  httplib::Client client("127.0.0.1", std::stoi(m[1]));
  auto res = client.Get("/api/session");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["name"], "argv-echo");
  EXPECT_EQ(run->kill().status.kind, RunStatus::Kind::Killed);
}

TEST(CliBinary, ServeRejectsInvalidSpec) {
  AssembledCommand cmd;
  cmd.argv = {OPTIONHOST_CLI_PATH, "serve", source_path("tests/broken/missing-flag.xml").string(),
              "--port", "0"};
  cmd.cwd = std::filesystem::temp_directory_path();
  RunRecord record = start_run(cmd)->wait();
  EXPECT_EQ(record.status, RunStatus::exited(1));
  EXPECT_NE(record.bytes(Stream::Stderr).find("requires a flag token"), std::string::npos);
}

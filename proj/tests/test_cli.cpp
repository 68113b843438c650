#include <gtest/gtest.h>

#include <csignal>
#include <cstdio>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "test_support.hpp"

namespace vinstruct {
namespace {

using testing::run_cli;

std::string data(const std::string& name) { return (testing::data_dir() / name).string(); }

/// The real binary in a child process with stdout piped back.
class ChildProcess {
 public:
  explicit ChildProcess(std::vector<std::string> args) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    pid_ = fork();
    if (pid_ == 0) {
      dup2(fds[1], STDOUT_FILENO);
      dup2(fds[1], STDERR_FILENO);
      close(fds[0]);
      close(fds[1]);
      const auto path = testing::cli_path().string();
      std::vector<char*> argv{const_cast<char*>(path.c_str())};
      for (auto& a : args) argv.push_back(a.data());
      argv.push_back(nullptr);
      execv(path.c_str(), argv.data());
      _exit(127);
    }
    close(fds[1]);
    out_ = fdopen(fds[0], "r");
  }
  ~ChildProcess() {
    if (pid_ > 0 && !reaped_) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
    if (out_) fclose(out_);
  }

  std::string read_line() {
    char buffer[512];
    if (!fgets(buffer, sizeof buffer, out_)) return {};
    return buffer;
  }
  std::string read_rest() {
    std::string out;
    for (std::string line = read_line(); !line.empty(); line = read_line()) out += line;
    return out;
  }
  int terminate_and_wait(int signal) {
    kill(pid_, signal);
    int status = 0;
    waitpid(pid_, &status, 0);
    reaped_ = true;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  bool reaped_ = false;
};

TEST(CliServe, PrintsListeningAndStopsOnSignal) {
  const int port = testing::unused_tcp_port();
  ChildProcess child({"serve", "--port", std::to_string(port)});
  EXPECT_EQ(child.read_line(), "listening on :" + std::to_string(port) + "\n");

  httplib::Client client("127.0.0.1", port);
  const auto scene = client.Get("/scene");
  ASSERT_TRUE(scene);
  EXPECT_EQ(scene->status, 200);
  ASSERT_TRUE(client.Post("/session/next", "", "text/plain"));

  EXPECT_EQ(child.terminate_and_wait(SIGTERM), 0);
  EXPECT_EQ(child.read_rest(), "stopped at revision 1\n");
}

TEST(CliServe, DefaultPortIs8844) {
  // Only checks the bound port when 8844 is actually free on this machine.
  if (testing::probe_tcp_port(8844) != 8844) GTEST_SKIP() << "port 8844 is in use";
  ChildProcess child({"serve"});
  EXPECT_EQ(child.read_line(), "listening on :8844\n");
  EXPECT_EQ(child.terminate_and_wait(SIGINT), 0);
}

TEST(CliServe, MissingManifestNamesThePath) {
  const auto r = run_cli({"serve", "--manifest", "/nonexistent/m.json", "--port", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/nonexistent/m.json"), std::string::npos) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(CliServe, PortInUseIsDistinctError) {
  httplib::Server holder;
  const int port = holder.bind_to_any_port("127.0.0.1");
  const auto r = run_cli({"serve", "--port", std::to_string(port)});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("cannot bind"), std::string::npos) << r.err;
}

TEST(CliServe, InvalidManifestIsDataError) {
  testing::TempDir dir;
  testing::write_file(dir / "m.json", R"({"components":[{"name":"a_b","kind":"assembled"}]})");
  const auto r = run_cli({"serve", "--manifest", (dir / "m.json").string(), "--port", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("SchemaError"), std::string::npos) << r.err;
}

TEST(CliWalk, BundleWritesSnapshotsMatchingGoldens) {
  testing::TempDir dir;
  const auto r = run_cli({"walk", "--golden-dir", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("step 2: small_screw, base, 1 -> {base, small_screw, small_screw_base}"),
            std::string::npos)
      << r.out;
  for (int i = 1; i <= 6; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "step_%02d.snap", i);
    EXPECT_EQ(testing::read_file(dir / name), testing::read_file(testing::data_dir() / "goldens" / name)) << name;
  }
}

TEST(CliWalk, CheckPassesOnBundledGoldens) {
  const auto r = run_cli({"walk", "--check", "--golden-dir", data("goldens")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("6 step(s), 0 mismatch(es)"), std::string::npos);
}

TEST(CliWalk, CheckFailsOnTamperedGoldenWithByteRange) {
  testing::TempDir dir;
  std::filesystem::copy(testing::data_dir() / "goldens", dir.path(), std::filesystem::copy_options::recursive);
  auto text = testing::read_file(dir / "step_03.snap");
  const auto at = text.find("active=true");
  text.replace(at, 11, "active=fals");
  testing::write_file(dir / "step_03.snap", text);
  std::filesystem::remove(dir / "step_05.snap");

  const auto r = run_cli({"walk", "--check", "--golden-dir", dir.path().string()});
  EXPECT_EQ(r.code, 1);
  const auto expected = "[MISMATCH step_03.snap: golden bytes [" + std::to_string(at + 7) + ", " +
                        std::to_string(at + 11) + ")";
  EXPECT_NE(r.out.find(expected), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("[MISSING step_05.snap]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("2 mismatch(es)"), std::string::npos);
}

TEST(CliWalk, UnknownComponentNamesTheStep) {
  testing::TempDir dir;
  auto lexicon = nlohmann::json::parse(testing::read_file(testing::data_dir() / "lexicon.json"));
  lexicon["widget"] = "widget";
  lexicon["gadget"] = "gadget";
  testing::write_file(dir / "lexicon.json", lexicon.dump());
  testing::write_file(dir / "steps.txt", "Insert the piston into the cylinder.\nInsert the widget into the gadget.\n");
  const auto r = run_cli({"walk", "--steps", (dir / "steps.txt").string(), "--lexicon", (dir / "lexicon.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("step 2: UnknownComponent"), std::string::npos) << r.err;
}

TEST(CliWalk, CheckNeedsGoldenDir) {
  EXPECT_EQ(run_cli({"walk", "--check"}).code, 2);
}

TEST(CliDataset, DeterministicAndOracleConsistent) {
  testing::TempDir dir;
  const auto a = (dir / "a.json").string();
  const auto b = (dir / "b.json").string();
  ASSERT_EQ(run_cli({"dataset", "--n", "420", "--seed", "7", "--out", a}).code, 0);
  ASSERT_EQ(run_cli({"dataset", "--n", "420", "--seed", "7", "--out", b}).code, 0);
  EXPECT_EQ(testing::read_file(a), testing::read_file(b));
  EXPECT_EQ(load_sft_dataset(a).size(), 420u);
  const auto verify = run_cli({"dataset", "--verify", a});
  EXPECT_EQ(verify.code, 0);
  EXPECT_NE(verify.out.find("420 record(s), 0 oracle mismatch(es)"), std::string::npos);
}

TEST(CliDataset, VerifyReportsMismatchesAndSchemaErrors) {
  testing::TempDir dir;
  testing::write_file(dir / "bad.json",
                      R"([{"instruction":"i","input":"Insert the piston into the cylinder.","output":"piston, cylinder, 1"}])");
  const auto r = run_cli({"dataset", "--verify", (dir / "bad.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("record 0"), std::string::npos);
  testing::write_file(dir / "broken.json", "[{}]");
  EXPECT_EQ(run_cli({"dataset", "--verify", (dir / "broken.json").string()}).code, 1);
}

TEST(CliDataset, UsageErrors) {
  EXPECT_EQ(run_cli({"dataset"}).code, 2);
  EXPECT_EQ(run_cli({"dataset", "--n", "0", "--out", "/tmp/x.json"}).code, 2);
  EXPECT_EQ(run_cli({"dataset", "--n", "abc", "--out", "/tmp/x.json"}).code, 2);
}

TEST(CliValidate, BundledManifestIsClean) {
  const auto r = run_cli({"validate"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("13 component(s), 0 violation(s)"), std::string::npos) << r.out;
}

TEST(CliValidate, PrintsEveryViolation) {
  testing::TempDir dir;
  auto manifest = nlohmann::json::parse(testing::read_file(testing::data_dir() / "manifest.json"));
  manifest["components"].push_back(manifest["components"][0]);
  manifest["components"][7]["name"] = "base_top";
  testing::write_file(dir / "m.json", manifest.dump());
  const auto r = run_cli({"validate", "--manifest", (dir / "m.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("fixture: [uniqueness]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("base_top: [naming]"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("2 violation(s)"), std::string::npos) << r.out;
}

TEST(CliValidate, MissingOrMalformedFileIsDataError) {
  EXPECT_EQ(run_cli({"validate", "--manifest", "/nonexistent.json"}).code, 1);
  testing::TempDir dir;
  testing::write_file(dir / "m.json", "{");
  EXPECT_EQ(run_cli({"validate", "--manifest", (dir / "m.json").string()}).code, 1);
}

TEST(CliExtract, PrintsCanonicalTriple) {
  const auto r = run_cli({"extract", testing::kReferenceInput});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "small_screw, base, 1\n");
  EXPECT_EQ(run_cli({"extract", "Weather is nice today."}).code, 1);
}

TEST(CliUsage, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({"walk", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run_cli({"serve", "--extractor", "magic"}).code, 2);
  EXPECT_EQ(run_cli({"extract", "--extractor", "remote", "Insert the piston into the cylinder."}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

}  // namespace
}  // namespace vinstruct

#include "vinstruct/cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "vinstruct/codec.hpp"
#include "vinstruct/database.hpp"
#include "vinstruct/engine.hpp"
#include "vinstruct/error.hpp"
#include "vinstruct/gateway.hpp"
#include "vinstruct/remote.hpp"
#include "vinstruct/session.hpp"
#include "vinstruct/sft.hpp"
#include "vinstruct/snapshot.hpp"

#ifndef VINSTRUCT_DATA_DIR
#define VINSTRUCT_DATA_DIR "data/pneumatic"
#endif

namespace vinstruct::cli {

namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_shutdown{false};

extern "C" void on_signal(int) { g_shutdown.store(true); }

struct Inputs {
  std::string manifest = (bundled_data_dir() / "manifest.json").string();
  std::string steps = (bundled_data_dir() / "steps.txt").string();
  std::string lexicon = (bundled_data_dir() / "lexicon.json").string();
  std::string rules = (bundled_data_dir() / "rules.json").string();
  std::string extractor = "rule";
  std::string endpoint;
  int timeout_ms = 5000;
};

void add_extractor_options(CLI::App& cmd, Inputs& in) {
  cmd.add_option("--lexicon", in.lexicon, "Lexicon JSON (surface form -> component name)");
  cmd.add_option("--rules", in.rules, "Extraction rules JSON (verbs, prepositions, templates)");
  cmd.add_option("--extractor", in.extractor, "Extractor: rule or remote")
      ->check(CLI::IsMember({"rule", "remote"}));
  cmd.add_option("--endpoint", in.endpoint, "Remote extractor URL (http://host:port/path)");
  cmd.add_option("--timeout-ms", in.timeout_ms, "Remote extractor timeout in milliseconds")
      ->check(CLI::PositiveNumber);
}

std::shared_ptr<const Extractor> make_extractor(const Inputs& in, const Lexicon& lexicon,
                                                const ExtractionRules& rules) {
  if (in.extractor == "remote") {
    if (in.endpoint.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--extractor remote needs --endpoint");
    }
    ExtractorConfig config;
    config.mode = ExtractorMode::Remote;
    config.endpoint = in.endpoint;
    config.timeout = std::chrono::milliseconds(in.timeout_ms);
    config.instruction = rules.instruction;
    return std::make_shared<RemoteExtractor>(config, lexicon);
  }
  return std::make_shared<RuleExtractor>(lexicon, rules);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
}

std::string join(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return "{" + out + "}";
}

std::string golden_name(int step) {
  char name[32];
  std::snprintf(name, sizeof name, "step_%02d.snap", step);
  return name;
}

int cmd_serve(const Inputs& in, const std::string& host, int port,
              const std::string& golden_dir, std::ostream& out, std::ostream& err) {
  auto db = std::make_shared<const Database>(load_manifest(in.manifest));
  auto steps = load_steps(in.steps);
  auto lexicon = load_lexicon(in.lexicon);
  auto rules = load_rules(in.rules);
  auto extractor = make_extractor(in, lexicon, rules);

  GatewayConfig config;
  if (!golden_dir.empty()) {
    fs::create_directories(golden_dir);
    config.snapshot_dir = golden_dir;
  }
  Gateway gateway(config);
  gateway.initialize(std::make_unique<TrainingSession>(db, std::move(steps)), extractor,
                     std::move(lexicon));
  const auto bound = gateway.bind(host, port);
  if (!bound) {
    err << "error: cannot bind " << host << ":" << port << " (address already in use?)\n";
    return kExitDataError;
  }

  g_shutdown.store(false);
  auto previous_int = std::signal(SIGINT, on_signal);
  auto previous_term = std::signal(SIGTERM, on_signal);
  gateway.start();
  out << "listening on :" << *bound << std::endl;
  while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  gateway.stop();
  std::signal(SIGINT, previous_int);
  std::signal(SIGTERM, previous_term);
  out << "stopped at revision " << gateway.revision() << std::endl;
  return kExitOk;
}

int cmd_walk(const Inputs& in, const std::string& golden_dir, bool check, std::ostream& out,
             std::ostream& err) {
  auto db = std::make_shared<const Database>(load_manifest(in.manifest));
  auto steps = load_steps(in.steps);
  auto lexicon = load_lexicon(in.lexicon);
  auto rules = load_rules(in.rules);
  auto extractor = make_extractor(in, lexicon, rules);
  if (check && golden_dir.empty()) {
    err << "error: --check needs --golden-dir\n";
    return kExitUsage;
  }
  if (!golden_dir.empty() && !check) fs::create_directories(golden_dir);

  TrainingSession session(db, steps);
  int mismatches = 0;
  for (const auto& step : steps) {
    const auto outcome = session.next(*extractor);
    const auto text = snapshot(session.scene());
    out << "step " << step.index << ": " << serialize_extraction(outcome.triple) << " -> "
        << join(highlighted_records(*db, session.scene()));

    if (golden_dir.empty()) {
      out << "\n";
      continue;
    }
    const auto path = fs::path(golden_dir) / golden_name(step.index);
    if (!check) {
      write_file(path, text);
      out << " [written " << path.filename().string() << "]\n";
      continue;
    }
    if (!fs::exists(path)) {
      ++mismatches;
      out << " [MISSING " << path.filename().string() << "]\n";
      continue;
    }
    const auto golden = read_file(path);
    if (auto diff = differing_range(golden, text)) {
      ++mismatches;
      out << " [MISMATCH " << path.filename().string() << ": golden bytes [" << diff->begin
          << ", " << diff->expected_end << ") vs actual bytes [" << diff->begin << ", "
          << diff->actual_end << ")]\n";
    } else {
      out << " [ok]\n";
    }
  }
  out << steps.size() << " step(s), " << mismatches << " mismatch(es)\n";
  return mismatches == 0 ? kExitOk : kExitDataError;
}

int cmd_dataset(const Inputs& in, int n, std::uint64_t seed, const std::string& out_path,
                const std::string& verify_path, std::ostream& out, std::ostream& err) {
  const auto lexicon = load_lexicon(in.lexicon);
  const auto rules = load_rules(in.rules);
  if (!verify_path.empty()) {
    const auto records = load_sft_dataset(verify_path);
    const auto mismatches = check_oracle_consistency(records, lexicon, rules);
    for (const auto& m : mismatches) {
      err << "record " << m.index << ": expected " << m.expected << ", rule extractor gave "
          << m.actual << " for \"" << m.input << "\"\n";
    }
    out << records.size() << " record(s), " << mismatches.size() << " oracle mismatch(es)\n";
    return mismatches.empty() ? kExitOk : kExitDataError;
  }
  if (out_path.empty()) {
    err << "error: dataset needs --out or --verify\n";
    return kExitUsage;
  }
  const auto records = generate_sft_corpus(lexicon, rules, n, seed);
  emit_sft_dataset(records, out_path);
  out << "wrote " << records.size() << " record(s) to " << out_path << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& manifest, std::ostream& out) {
  // Violations are the expected output here, so decode without validating.
  const auto content = read_file(manifest);
  Database db;
  try {
    db = codec::decode<Database>(codec::json::parse(content), "$");
  } catch (const codec::json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, manifest + ": invalid JSON: " + e.what());
  }
  const auto violations = validate_database(db);
  for (const auto& v : violations) out << format_violation(v) << "\n";
  out << manifest << ": " << db.size() << " component(s), " << violations.size()
      << " violation(s)\n";
  return violations.empty() ? kExitOk : kExitDataError;
}

int cmd_extract(const Inputs& in, const std::string& text, std::ostream& out) {
  const auto lexicon = load_lexicon(in.lexicon);
  const auto rules = load_rules(in.rules);
  const auto extractor = make_extractor(in, lexicon, rules);
  out << serialize_extraction(extractor->extract(text)) << "\n";
  return kExitOk;
}

}  // namespace

fs::path bundled_data_dir() { return fs::path(VINSTRUCT_DATA_DIR); }

void request_shutdown() { g_shutdown.store(true); }

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turns procedural assembly text into virtual instructions", "vinstruct"};
  app.require_subcommand(1);

  Inputs in;
  std::string golden_dir;
  std::string host = "127.0.0.1";
  int port = 8844;
  bool check = false;
  int n = 420;
  std::uint64_t seed = 7;
  std::string out_path;
  std::string verify_path;
  std::string text;

  auto* serve = app.add_subcommand("serve", "Serve the HTTP gateway for one training session");
  serve->add_option("--manifest", in.manifest, "Component manifest JSON");
  serve->add_option("--steps", in.steps, "Step script, one instruction per line");
  add_extractor_options(*serve, in);
  serve->add_option("--host", host, "Listen address");
  serve->add_option("--port", port, "Listen port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--golden-dir", golden_dir, "Write a snapshot per committed revision here");

  auto* walk = app.add_subcommand("walk", "Run every step headless and write or check goldens");
  walk->add_option("--manifest", in.manifest, "Component manifest JSON");
  walk->add_option("--steps", in.steps, "Step script, one instruction per line");
  add_extractor_options(*walk, in);
  walk->add_option("--golden-dir", golden_dir, "Directory of step_NN.snap files");
  walk->add_flag("--check", check, "Compare against existing goldens instead of writing them");

  auto* dataset = app.add_subcommand("dataset", "Generate or verify an SFT dataset");
  add_extractor_options(*dataset, in);
  dataset->add_option("--n", n, "Number of records")->check(CLI::PositiveNumber);
  dataset->add_option("--seed", seed, "Generator seed");
  dataset->add_option("--out", out_path, "Output JSON file");
  dataset->add_option("--verify", verify_path, "Check an existing dataset against the rule extractor");

  auto* validate = app.add_subcommand("validate", "Validate a component manifest");
  validate->add_option("--manifest", in.manifest, "Component manifest JSON");

  auto* extract = app.add_subcommand("extract", "Extract the triple from one step");
  add_extractor_options(*extract, in);
  extract->add_option("text", text, "Step text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (serve->parsed()) return cmd_serve(in, host, port, golden_dir, out, err);
    if (walk->parsed()) return cmd_walk(in, golden_dir, check, out, err);
    if (dataset->parsed()) return cmd_dataset(in, n, seed, out_path, verify_path, out, err);
    if (validate->parsed()) return cmd_validate(in.manifest, out);
    if (extract->parsed()) return cmd_extract(in, text, out);
  } catch (const Error& e) {
    err << "error: ";
    if (e.step()) err << "step " << *e.step() << ": ";
    err << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace vinstruct::cli

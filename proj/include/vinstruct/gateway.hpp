#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vinstruct/extraction.hpp"
#include "vinstruct/session.hpp"

namespace vinstruct {

struct GatewayConfig {
  // Pending mutations beyond this are refused with 409 QueueFull.
  std::size_t queue_capacity = 64;
  // Events kept for replay; older `since` values get a gap marker.
  std::size_t event_history = 4096;
  int http_threads = 32;
  // When set, every committed revision is written as rev_NNNNNN.snap.
  std::optional<std::filesystem::path> snapshot_dir;
};

/// HTTP front of one training session.
///
///   POST /extraction          raw model output (text/plain) or a triple object
///   POST /session/next
///   POST /session/previous
///   GET  /scene               full scene with revision
///   GET  /steps
///   GET  /manifest
///   GET  /events[?since=N]    newline-delimited JSON, one object per revision
///
/// Mutations run one at a time on a dedicated worker, each producing exactly
/// one revision. Reads use the last committed state and never wait for the
/// worker. Every endpoint answers 503 until initialize() has run.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// `extractor` serves /session/next; `lexicon` resolves names posted to
  /// /extraction.
  void initialize(std::unique_ptr<TrainingSession> session,
                  std::shared_ptr<const Extractor> extractor, Lexicon lexicon);

  /// Binds without serving. Port 0 picks a free port. Returns the bound port
  /// or nullopt when the address is unavailable.
  std::optional<int> bind(const std::string& host, int port);

  /// Serves until stop(). Requires a successful bind().
  void serve();
  /// serve() on a background thread.
  void start();
  void stop();

  int port() const noexcept { return port_; }
  std::uint64_t revision() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

/// Client-side fold of an event stream starting at a "reset" event into the
/// document GET /scene returns.
nlohmann::json fold_events(const std::vector<nlohmann::json>& events);

}  // namespace vinstruct

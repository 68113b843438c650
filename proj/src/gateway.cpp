#include "vinstruct/gateway.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <future>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "vinstruct/codec.hpp"
#include "vinstruct/error.hpp"
#include "vinstruct/snapshot.hpp"

namespace vinstruct {

namespace {

using json = nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::EndOfSteps:
    case ErrorCode::AtBeginning:
    case ErrorCode::QueueFull:
      return 409;
    case ErrorCode::NotReady: return 503;
    case ErrorCode::Timeout: return 504;
    case ErrorCode::TransportError: return 502;
    case ErrorCode::IoError: return 500;
    default: return 400;
  }
}

json error_body(const Error& e) {
  json body{{"status", "error"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (e.raw()) body["raw"] = *e.raw();
  if (e.step()) body["step"] = *e.step();
  return body;
}

struct Reply {
  int status = 200;
  json body;
};

Reply failure(const Error& e) { return {http_status(e.code()), error_body(e)}; }

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json");
}

json changed_instances(const SceneState& before, const SceneState& after) {
  json changed = json::array();
  for (const auto& [key, state] : after.instances) {
    auto it = before.instances.find(key);
    if (it == before.instances.end() || it->second != state) {
      changed.push_back(codec::encode_instance(key, state));
    }
  }
  return changed;
}

json all_instances(const SceneState& scene) {
  json out = json::array();
  for (const auto& [key, state] : scene.instances) out.push_back(codec::encode_instance(key, state));
  return out;
}

json clip_json(const SceneState& scene) {
  return scene.current_clip ? codec::encode(*scene.current_clip) : json(nullptr);
}

CanonicalName name_field(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw Error(ErrorCode::BadName, std::string("\"") + key + "\" must be a string");
  }
  auto name = normalize_surface(it->get<std::string>());
  std::replace(name.begin(), name.end(), ' ', '_');
  if (!CanonicalName::is_valid(name)) {
    throw Error(ErrorCode::BadName, std::string("\"") + key + "\" is not a component name");
  }
  return CanonicalName(std::move(name));
}

// Body of POST /extraction: raw model output, a JSON string, {"output": raw}
// or {"predecessor", "successor", "count"}.
ExtractionResult parse_extraction_body(const httplib::Request& req) {
  const auto content_type = req.get_header_value("Content-Type");
  if (content_type.rfind("application/json", 0) != 0) return parse_llm_output(req.body);

  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("invalid JSON body: ") + e.what()).with_raw(req.body);
  }
  if (body.is_string()) return parse_llm_output(body.get<std::string>());
  if (!body.is_object()) {
    throw Error(ErrorCode::SchemaError, "expected a string or an object").with_raw(req.body);
  }
  if (body.contains("output") && body["output"].is_string()) {
    return parse_llm_output(body["output"].get<std::string>());
  }
  auto count = body.find("count");
  if (count == body.end() || !count->is_number_integer()) {
    throw Error(ErrorCode::BadCount, "\"count\" must be an integer").with_raw(req.body);
  }
  try {
    return ExtractionResult(name_field(body, "predecessor"), name_field(body, "successor"),
                            count->get<int>());
  } catch (Error& e) {
    e.with_raw(req.body);
    throw;
  }
}

}  // namespace

struct Gateway::Impl {
  struct Committed {
    std::uint64_t revision = 0;
    SceneState scene;
  };

  GatewayConfig config;
  httplib::Server server;
  std::thread server_thread;

  // Owned by the worker once published.
  std::unique_ptr<TrainingSession> session;
  std::shared_ptr<const Extractor> extractor;
  Lexicon lexicon;

  // Immutable after initialize().
  json manifest_json;
  json steps_json;

  mutable std::mutex committed_mutex;
  std::shared_ptr<const Committed> committed;

  std::mutex queue_mutex;
  std::condition_variable queue_cv;
  std::deque<std::packaged_task<Reply()>> queue;
  std::size_t pending = 0;  // queued + running
  bool worker_stop = false;
  std::thread worker;

  std::mutex events_mutex;
  std::condition_variable events_cv;
  std::deque<std::pair<std::uint64_t, std::string>> events;
  bool streams_stop = false;

  explicit Impl(GatewayConfig cfg) : config(std::move(cfg)) {
    const auto threads = static_cast<std::size_t>(std::max(config.http_threads, 2));
    server.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    // The library default also sets SO_REUSEPORT, which would let a second
    // server bind a port that is already in use.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    worker = std::thread([this] { run_worker(); });
    install_routes();
  }

  ~Impl() {
    {
      std::lock_guard lock(queue_mutex);
      worker_stop = true;
    }
    queue_cv.notify_all();
    if (worker.joinable()) worker.join();
  }

  std::shared_ptr<const Committed> current() const {
    std::lock_guard lock(committed_mutex);
    return committed;
  }

  void run_worker() {
    for (;;) {
      std::packaged_task<Reply()> task;
      {
        std::unique_lock lock(queue_mutex);
        queue_cv.wait(lock, [this] { return worker_stop || !queue.empty(); });
        if (queue.empty()) return;
        task = std::move(queue.front());
        queue.pop_front();
      }
      task();
      std::lock_guard lock(queue_mutex);
      --pending;
    }
  }

  Reply submit(std::function<Reply()> job) {
    std::future<Reply> result;
    {
      std::lock_guard lock(queue_mutex);
      if (worker_stop) return failure(Error(ErrorCode::NotReady, "gateway is shutting down"));
      if (pending >= config.queue_capacity) {
        return failure(Error(ErrorCode::QueueFull, "mutation queue is full, retry later"));
      }
      std::packaged_task<Reply()> task(std::move(job));
      result = task.get_future();
      queue.push_back(std::move(task));
      ++pending;
    }
    queue_cv.notify_one();
    return result.get();
  }

  void publish_event(const json& event) {
    {
      std::lock_guard lock(events_mutex);
      events.emplace_back(event["revision"].get<std::uint64_t>(), event.dump());
      while (events.size() > std::max<std::size_t>(config.event_history, 1)) events.pop_front();
    }
    events_cv.notify_all();
  }

  void write_snapshot(std::uint64_t revision, const SceneState& scene) {
    if (!config.snapshot_dir) return;
    char name[32];
    std::snprintf(name, sizeof name, "rev_%06llu.snap", static_cast<unsigned long long>(revision));
    std::ofstream out(*config.snapshot_dir / name, std::ios::binary | std::ios::trunc);
    out << snapshot(scene);
  }

  // Runs on the worker. Applies `action` to the session and commits the
  // result as the next revision; failures leave the revision untouched.
  Reply mutate(const std::function<json(TrainingSession&)>& action) {
    const SceneState before = session->scene();
    json extra;
    try {
      extra = action(*session);
    } catch (const Error& e) {
      return failure(e);
    }
    const SceneState& after = session->scene();

    auto next = std::make_shared<Committed>();
    next->revision = current()->revision + 1;
    next->scene = after;

    json event{{"type", "delta"},
               {"revision", next->revision},
               {"step_cursor", after.step_cursor},
               {"changed", changed_instances(before, after)},
               {"clip", clip_json(after)}};
    write_snapshot(next->revision, after);
    {
      std::lock_guard lock(committed_mutex);
      committed = next;
    }
    publish_event(event);

    json body = event;
    body.erase("type");
    body["status"] = "ok";
    for (auto& [key, value] : extra.items()) body[key] = value;
    return {200, std::move(body)};
  }

  void initialize(std::unique_ptr<TrainingSession> s, std::shared_ptr<const Extractor> x,
                  Lexicon lex) {
    session = std::move(s);
    extractor = std::move(x);
    lexicon = std::move(lex);
    manifest_json = codec::encode(session->database());
    manifest_json["highlight_color"] = codec::encode(kHighlightGreen);
    json steps = json::array();
    for (const auto& step : session->steps()) steps.push_back(codec::encode(step));
    steps_json = json{{"steps", std::move(steps)}};

    auto first = std::make_shared<Committed>();
    first->scene = session->scene();
    write_snapshot(0, first->scene);
    {
      std::lock_guard lock(events_mutex);
      events.clear();
    }
    publish_event(json{{"type", "reset"},
                       {"revision", 0},
                       {"step_cursor", first->scene.step_cursor},
                       {"changed", all_instances(first->scene)},
                       {"clip", clip_json(first->scene)}});
    std::lock_guard lock(committed_mutex);
    committed = std::move(first);
  }

  bool ready(httplib::Response& res) const {
    if (current()) return true;
    send(res, failure(Error(ErrorCode::NotReady, "session is still loading")));
    return false;
  }

  json step_json(std::size_t cursor) const {
    if (cursor == 0 || cursor > session->steps().size()) return nullptr;
    return codec::encode(session->steps()[cursor - 1]);
  }

  void install_routes() {
    server.Post("/extraction", [this](const httplib::Request& req, httplib::Response& res) {
      if (!ready(res)) return;
      std::optional<ExtractionResult> triple;
      try {
        triple = resolve_names(parse_extraction_body(req), lexicon);
      } catch (Error& e) {
        if (!e.raw()) e.with_raw(req.body);
        return send(res, failure(e));
      }
      send(res, submit([this, t = *triple] {
             return mutate([&](TrainingSession& s) {
               s.apply(t);
               return json{{"triple", codec::encode(t)}};
             });
           }));
    });

    server.Post("/session/next", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready(res)) return;
      send(res, submit([this] {
             return mutate([&](TrainingSession& s) {
               auto outcome = s.next(*extractor);
               return json{{"step", codec::encode(outcome.step)},
                           {"triple", codec::encode(outcome.triple)}};
             });
           }));
    });

    server.Post("/session/previous", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready(res)) return;
      send(res, submit([this] {
             return mutate([&](TrainingSession& s) {
               s.previous();
               return json{{"step", step_json(s.cursor())}};
             });
           }));
    });

    server.Get("/scene", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready(res)) return;
      const auto state = current();
      json body = codec::encode(state->scene);
      body["revision"] = state->revision;
      send(res, {200, std::move(body)});
    });

    server.Get("/steps", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready(res)) return;
      send(res, {200, steps_json});
    });

    server.Get("/manifest", [this](const httplib::Request&, httplib::Response& res) {
      if (!ready(res)) return;
      send(res, {200, manifest_json});
    });

    server.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
      if (!ready(res)) return;
      auto next_revision = std::make_shared<std::uint64_t>(0);
      if (req.has_param("since")) {
        try {
          *next_revision = std::stoull(req.get_param_value("since"));
        } catch (const std::exception&) {
          return send(res, failure(Error(ErrorCode::InvalidArgument, "since must be a revision number")));
        }
      } else {
        *next_revision = current()->revision + 1;
      }
      res.set_chunked_content_provider(
          "application/x-ndjson", [this, next_revision](std::size_t, httplib::DataSink& sink) {
            return stream_events(*next_revision, sink);
          });
    });
  }

  // One pass of an /events stream: waits briefly for events at or after
  // `next_revision`, writes them and advances. A client whose position has
  // been evicted gets a gap marker and the stream ends.
  bool stream_events(std::uint64_t& next_revision, httplib::DataSink& sink) {
    std::vector<std::string> lines;
    bool gap = false;
    std::uint64_t latest = 0;
    {
      std::unique_lock lock(events_mutex);
      events_cv.wait_for(lock, std::chrono::milliseconds(100), [&] {
        return streams_stop || (!events.empty() && events.back().first >= next_revision);
      });
      if (streams_stop) {
        lock.unlock();
        sink.done();
        return true;
      }
      if (events.empty()) return true;
      latest = events.back().first;
      if (next_revision < events.front().first) {
        gap = true;
      } else {
        for (const auto& [revision, line] : events) {
          if (revision >= next_revision) lines.push_back(line);
        }
      }
    }
    if (gap) {
      const auto marker = json{{"type", "gap"}, {"revision", latest}}.dump() + "\n";
      sink.write(marker.data(), marker.size());
      sink.done();
      return true;
    }
    for (const auto& line : lines) {
      const auto chunk = line + "\n";
      if (!sink.write(chunk.data(), chunk.size())) return false;
    }
    if (!lines.empty()) next_revision = latest + 1;
    return true;
  }
};

Gateway::Gateway(GatewayConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Gateway::~Gateway() {
  stop();
}

void Gateway::initialize(std::unique_ptr<TrainingSession> session,
                         std::shared_ptr<const Extractor> extractor, Lexicon lexicon) {
  if (!session || !extractor) {
    throw Error(ErrorCode::InvalidArgument, "gateway needs a session and an extractor");
  }
  impl_->initialize(std::move(session), std::move(extractor), std::move(lexicon));
}

std::optional<int> Gateway::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) return std::nullopt;
    port_ = bound;
  } else {
    if (!impl_->server.bind_to_port(host, port)) return std::nullopt;
    port_ = port;
  }
  return port_;
}

void Gateway::serve() {
  if (port_ < 0) throw Error(ErrorCode::InvalidArgument, "serve() called before bind()");
  impl_->server.listen_after_bind();
}

void Gateway::start() {
  if (port_ < 0) throw Error(ErrorCode::InvalidArgument, "start() called before bind()");
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Gateway::stop() {
  {
    std::lock_guard lock(impl_->events_mutex);
    impl_->streams_stop = true;
  }
  impl_->events_cv.notify_all();
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

std::uint64_t Gateway::revision() const {
  auto state = impl_->current();
  return state ? state->revision : 0;
}

nlohmann::json fold_events(const std::vector<nlohmann::json>& events) {
  std::map<std::pair<std::string, std::uint64_t>, json> instances;
  json clip = nullptr;
  json cursor = 0;
  json revision = 0;
  bool have_reset = false;
  for (const auto& event : events) {
    const auto type = event.value("type", std::string());
    if (type == "reset") {
      instances.clear();
      have_reset = true;
    } else if (type != "delta") {
      continue;
    }
    if (!have_reset) {
      throw Error(ErrorCode::InvalidArgument, "event replay must start with a reset event");
    }
    for (const auto& item : event["changed"]) {
      instances[{item["name"].get<std::string>(), item["instance"].get<std::uint64_t>()}] = item;
    }
    clip = event["clip"];
    cursor = event["step_cursor"];
    revision = event["revision"];
  }
  json list = json::array();
  for (auto& [key, item] : instances) list.push_back(item);
  return json{{"step_cursor", cursor}, {"instances", std::move(list)}, {"clip", clip},
              {"revision", revision}};
}

}  // namespace vinstruct

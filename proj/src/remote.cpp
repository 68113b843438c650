#include "vinstruct/remote.hpp"

#include <charconv>

#include <httplib.h>
#include <json.hpp>

#include "vinstruct/error.hpp"

namespace vinstruct {

Endpoint parse_endpoint(const std::string& url) {
  constexpr std::string_view scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::InvalidArgument, "endpoint must start with http://: " + url);
  }
  std::string_view rest(url);
  rest.remove_prefix(scheme.size());
  Endpoint ep;
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) ep.path = std::string(rest.substr(slash));
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), ep.port);
    if (ec != std::errc() || ptr != port_text.data() + port_text.size() || ep.port <= 0 ||
        ep.port > 65535) {
      throw Error(ErrorCode::InvalidArgument, "bad port in endpoint: " + url);
    }
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error(ErrorCode::InvalidArgument, "missing host in endpoint: " + url);
  ep.host = std::string(authority);
  return ep;
}

ExtractionResult remote_extract(const ExtractorConfig& config, const std::string& step_text,
                                const Lexicon& lexicon) {
  if (config.mode != ExtractorMode::Remote || !config.endpoint) {
    throw Error(ErrorCode::InvalidArgument, "remote extraction needs mode=remote and an endpoint");
  }
  const auto ep = parse_endpoint(*config.endpoint);

  httplib::Client client(ep.host, ep.port);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto micros =
      std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  const nlohmann::json body{{"instruction", config.instruction}, {"input", step_text}};
  const auto started = std::chrono::steady_clock::now();
  auto response = client.Post(ep.path, body.dump(), "application/json");
  if (!response) {
    const auto err = response.error();
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= config.timeout)) {
      throw Error(ErrorCode::Timeout, "no response from " + *config.endpoint + " within " +
                                          std::to_string(config.timeout.count()) + " ms");
    }
    throw Error(ErrorCode::TransportError,
                "request to " + *config.endpoint + " failed: " + httplib::to_string(err));
  }
  if (response->status < 200 || response->status >= 300) {
    throw Error(ErrorCode::TransportError, "endpoint " + *config.endpoint + " answered HTTP " +
                                               std::to_string(response->status))
        .with_raw(response->body);
  }
  const auto& raw = response->body;
  try {
    return resolve_names(parse_llm_output(raw), lexicon);
  } catch (Error& e) {
    if (!e.raw()) e.with_raw(raw);
    throw;
  }
}

RemoteExtractor::RemoteExtractor(ExtractorConfig config, Lexicon lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)) {
  if (config_.mode != ExtractorMode::Remote || !config_.endpoint) {
    throw Error(ErrorCode::InvalidArgument, "remote extractor needs an endpoint");
  }
  parse_endpoint(*config_.endpoint);
}

}  // namespace vinstruct

#pragma once

#include <chrono>
#include <optional>
#include <string>

#include "vinstruct/extraction.hpp"

namespace vinstruct {

enum class ExtractorMode { Rule, Remote };

struct ExtractorConfig {
  ExtractorMode mode = ExtractorMode::Rule;
  std::optional<std::string> endpoint;  // http://host[:port][/path]
  std::chrono::milliseconds timeout{5000};
  std::string instruction = std::string(kDefaultInstruction);
};

struct Endpoint {
  std::string host;
  int port = 80;
  std::string path = "/";
};

/// Only plain http URLs are supported. Throws Error{InvalidArgument}.
Endpoint parse_endpoint(const std::string& url);

/// POSTs {"instruction", "input"} to the configured endpoint and runs the
/// response body through parse_llm_output and resolve_names.
///
/// Throws Error{Timeout} or Error{TransportError}; parse and resolve errors
/// propagate with the raw response attached.
ExtractionResult remote_extract(const ExtractorConfig& config, const std::string& step_text,
                                const Lexicon& lexicon);

class RemoteExtractor final : public Extractor {
 public:
  /// Throws Error{InvalidArgument} unless config.mode is Remote with an endpoint.
  RemoteExtractor(ExtractorConfig config, Lexicon lexicon);

  ExtractionResult extract(const std::string& step_text) const override {
    return remote_extract(config_, step_text, lexicon_);
  }

 private:
  ExtractorConfig config_;
  Lexicon lexicon_;
};

}  // namespace vinstruct

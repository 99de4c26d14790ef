#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace ocsrbench::gateway {

/// One scripted answer. A request matches when its last image equals `image` (compared as
/// data URLs) and its text part contains `prompt_contains`.
struct CannedResponse {
  std::filesystem::path image;
  std::string prompt_contains;
  /// Returned as choices[0].message.content.
  std::string content;
  /// Statuses answered, in order, before the content is served (e.g. {429, 429}).
  std::vector<int> fail_statuses;
  int delay_ms = 0;
};

/// {"responses": [{"image", "protocol" | "prompt_contains", "content", "fail_statuses"?,
/// "delay_ms"?}]}. "protocol" selects a marker phrase of that protocol's shipped template.
/// Relative image paths resolve against `base_dir`. Throws ConfigError.
std::vector<CannedResponse> parse_mock_config(std::string_view text, const std::filesystem::path& base_dir);

struct MockStats {
  std::size_t requests = 0;
  std::size_t max_in_flight = 0;
};

/// Local OpenAI-compatible server for tests and demos: POST /v1/chat/completions answers
/// from the canned list (404 when nothing matches), GET /v1/stats reports counters.
class MockEndpoint {
 public:
  explicit MockEndpoint(std::vector<CannedResponse> responses);
  ~MockEndpoint();
  MockEndpoint(const MockEndpoint&) = delete;
  MockEndpoint& operator=(const MockEndpoint&) = delete;

  /// Binds (port 0 picks a free port), serves on a background thread, returns the port.
  /// Throws Error when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving until stop() is called from elsewhere.
  void serve_blocking(const std::string& host, int port);
  void stop();

  /// "http://host:port/v1" once started.
  std::string base_url() const;
  MockStats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ocsrbench::gateway

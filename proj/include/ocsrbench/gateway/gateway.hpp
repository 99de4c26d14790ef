#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocsrbench/chem/prediction.hpp"

namespace ocsrbench::gateway {

using chem::Protocol;

// ---------------------------------------------------------------------------
// Endpoint configuration
// ---------------------------------------------------------------------------

/// OpenAI-compatible chat-completions endpoint.
struct EndpointConfig {
  /// Scheme, host, optional port and path prefix, e.g. "http://127.0.0.1:8080/v1".
  /// Requests go to base_url + "/chat/completions".
  std::string base_url;
  std::string model_name;
  /// Environment variable holding the bearer token; empty disables authentication.
  std::string api_key_env = "OCSRBENCH_API_KEY";
  double timeout_seconds = 120;
  int max_concurrency = 4;
  int max_retries = 3;
  double requests_per_minute = 60;
  /// First retry delay; attempt k waits base * 2^(k-1) scaled by a jitter in [1, 1.25).
  double backoff_base_seconds = 2.0;
  double temperature = 0;
  int max_tokens = 4096;

  /// Throws ConfigError if max_concurrency < 1, timeout <= 0, max_retries < 0,
  /// requests_per_minute <= 0, base_url lacks an http(s) scheme, or model_name is empty.
  void validate() const;

  /// Reads the fields above by name; unknown keys or mistyped values are ConfigError.
  static EndpointConfig from_json(std::string_view text);
};

// ---------------------------------------------------------------------------
// Prompts
// ---------------------------------------------------------------------------

/// Where prompt templates and graph-protocol reference images live.
struct PromptAssets {
  std::filesystem::path template_dir;
  std::optional<std::filesystem::path> bond_exemplar;
  std::optional<std::filesystem::path> case_exemplar;

  /// template_dir = dir, exemplars = dir/bond_exemplar.png and dir/case_exemplar.png when
  /// those files exist.
  static PromptAssets from_directory(const std::filesystem::path& dir);
};

/// Invariant: graph bundles carry exactly 3 images (bond exemplar, case exemplar, target);
/// the other protocols exactly 1 (target).
struct PromptBundle {
  Protocol protocol = Protocol::smiles;
  std::string system_text;
  std::string user_text;
  std::vector<std::filesystem::path> images;
};

/// "prompt_for_smiles.txt", "prompt_for_simplified_graph.txt", "prompt_for_graph.txt".
std::string_view template_file_name(Protocol p);

/// Template text byte-for-byte from template_dir. Throws ConfigError if unreadable.
std::string load_template(Protocol p, const std::filesystem::path& template_dir);

/// Throws ConfigError when the graph protocol lacks either exemplar or the template is
/// missing. The target image is not opened here.
PromptBundle build_prompt(Protocol p, const std::filesystem::path& image, const PromptAssets& assets);

/// Chat-completions request body: one user message whose content is the template text
/// followed by the images as base64 data URLs, in bundle order. Throws InputError when an
/// image cannot be read.
std::string chat_request_body(const EndpointConfig& cfg, const PromptBundle& bundle);

/// "data:image/png;base64,..." (jpeg/gif/webp by extension, png otherwise).
std::string image_data_url(const std::filesystem::path& image);

// ---------------------------------------------------------------------------
// Transport and single requests
// ---------------------------------------------------------------------------

struct HttpResult {
  /// 0 when no response arrived.
  int status = 0;
  std::string body;
  bool timed_out = false;
  /// Transport-level error text; empty on a received response.
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& url, const std::string& body,
                          const std::vector<std::pair<std::string, std::string>>& headers, double timeout_seconds) = 0;
};

/// cpp-httplib client transport (http and https). Thread-safe.
std::shared_ptr<HttpTransport> make_http_transport();

struct RequestOutcome {
  bool ok = false;
  /// choices[0].message.content verbatim on success; the last response body on failure.
  std::string raw_text;
  int http_status = 0;
  int attempt_count = 0;
  double latency_seconds = 0;
  std::string error;
};

/// Seconds to sleep before retry number `retry` (1-based).
double backoff_delay(double base_seconds, int retry, double jitter01);

/// Sends prompts with retries. Retries on 429, 5xx, timeouts and transport errors, up to
/// max_retries extra attempts; other statuses fail at once.
class Client {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  /// Throws ConfigError on an invalid config or when api_key_env is set but the variable
  /// is unset or empty.
  Client(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport, Sleeper sleeper = {},
         std::uint64_t jitter_seed = 0);

  /// Never throws for transport or HTTP failures; they come back as !ok.
  RequestOutcome request_prediction(const PromptBundle& bundle) const;

  const EndpointConfig& config() const noexcept { return cfg_; }

 private:
  EndpointConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  Sleeper sleep_;
  std::string auth_header_;
  mutable std::mutex rng_mutex_;
  mutable std::uint64_t rng_state_;
};

// ---------------------------------------------------------------------------
// Collection
// ---------------------------------------------------------------------------

/// Token bucket: `rate_per_second` refill, `burst` capacity, starting full.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;
  TokenBucket(double rate_per_second, double burst);
  /// Blocks until a token is available, then takes it.
  void acquire();

 private:
  std::mutex mutex_;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
};

struct CollectionItem {
  std::string sample_id;
  std::filesystem::path image;
};

/// One line of a prediction file: {"sample_id", "raw", "meta"}. raw is null when the
/// request failed.
struct PredictionRecord {
  std::string sample_id;
  std::optional<std::string> raw;
  /// Serialized JSON object.
  std::string meta_json = "{}";
};

std::string to_jsonl_line(const PredictionRecord& r);
/// Throws ParseError on a malformed line.
PredictionRecord parse_prediction_record(std::string_view line);

/// Reads a prediction file; a record per non-blank line. Throws InputError if unreadable
/// and ParseError (with line number) on a malformed line. A truncated final line, left by
/// an interrupted writer, is skipped.
std::vector<PredictionRecord> read_prediction_file(const std::filesystem::path& path);

/// Single-writer append-only JSONL file; every record is flushed before append returns.
class JsonlSink {
 public:
  /// Opens for append, creating the file. Existing complete records' ids become
  /// recorded_ids(); a partial final line is cut off. Throws InputError if the file cannot
  /// be opened.
  explicit JsonlSink(std::filesystem::path path);
  /// Throws Error when the write fails.
  void append(const PredictionRecord& r);
  const std::set<std::string>& recorded_ids() const noexcept { return recorded_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::set<std::string> recorded_;
};

struct CollectionSummary {
  std::size_t ok = 0;
  std::size_t failed = 0;
  /// Already recorded before this run.
  std::size_t skipped = 0;
};

/// Requests every item not yet in the sink, at most max_concurrency in flight and no faster
/// than requests_per_minute, appending exactly one record per item. A sink failure stops
/// the run and rethrows; recorded items stay, so a rerun resumes.
CollectionSummary run_collection(const Client& client, const std::vector<CollectionItem>& items, Protocol protocol,
                                 const PromptAssets& assets, JsonlSink& sink);

}  // namespace ocsrbench::gateway

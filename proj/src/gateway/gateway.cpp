#include "ocsrbench/gateway/gateway.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"

namespace ocsrbench::gateway {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string base64(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

// splitmix64
std::uint64_t next_random(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool retryable(const HttpResult& r) { return r.status == 0 || r.timed_out || r.status == 429 || r.status >= 500; }

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("endpoint config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void EndpointConfig::validate() const {
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    throw ConfigError("endpoint config: base_url must start with http:// or https://");
  }
  if (model_name.empty()) throw ConfigError("endpoint config: model_name is empty");
  if (max_concurrency < 1) throw ConfigError("endpoint config: max_concurrency must be >= 1");
  if (!(timeout_seconds > 0)) throw ConfigError("endpoint config: timeout_seconds must be > 0");
  if (max_retries < 0) throw ConfigError("endpoint config: max_retries must be >= 0");
  if (!(requests_per_minute > 0)) throw ConfigError("endpoint config: requests_per_minute must be > 0");
  if (backoff_base_seconds < 0) throw ConfigError("endpoint config: backoff_base_seconds must be >= 0");
}

EndpointConfig EndpointConfig::from_json(std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("endpoint config: not a JSON object");
  static const std::set<std::string> known = {"base_url",         "model_name",   "api_key_env",
                                              "timeout_seconds",  "max_concurrency", "max_retries",
                                              "requests_per_minute", "backoff_base_seconds", "temperature",
                                              "max_tokens"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("endpoint config: unknown field '" + key + "'");
  }
  EndpointConfig c;
  read_field(j, "base_url", c.base_url);
  read_field(j, "model_name", c.model_name);
  read_field(j, "api_key_env", c.api_key_env);
  read_field(j, "timeout_seconds", c.timeout_seconds);
  read_field(j, "max_concurrency", c.max_concurrency);
  read_field(j, "max_retries", c.max_retries);
  read_field(j, "requests_per_minute", c.requests_per_minute);
  read_field(j, "backoff_base_seconds", c.backoff_base_seconds);
  read_field(j, "temperature", c.temperature);
  read_field(j, "max_tokens", c.max_tokens);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

PromptAssets PromptAssets::from_directory(const std::filesystem::path& dir) {
  PromptAssets a;
  a.template_dir = dir;
  if (std::filesystem::exists(dir / "bond_exemplar.png")) a.bond_exemplar = dir / "bond_exemplar.png";
  if (std::filesystem::exists(dir / "case_exemplar.png")) a.case_exemplar = dir / "case_exemplar.png";
  return a;
}

std::string_view template_file_name(Protocol p) {
  switch (p) {
    case Protocol::smiles: return "prompt_for_smiles.txt";
    case Protocol::simplified_graph: return "prompt_for_simplified_graph.txt";
    case Protocol::graph: return "prompt_for_graph.txt";
  }
  return {};
}

std::string load_template(Protocol p, const std::filesystem::path& template_dir) {
  const auto path = template_dir / template_file_name(p);
  try {
    return read_file(path);
  } catch (const InputError&) {
    throw ConfigError("prompt template missing: " + path.string());
  }
}

PromptBundle build_prompt(Protocol p, const std::filesystem::path& image, const PromptAssets& assets) {
  PromptBundle b;
  b.protocol = p;
  b.user_text = load_template(p, assets.template_dir);
  if (p == Protocol::graph) {
    if (!assets.bond_exemplar || !assets.case_exemplar) {
      throw ConfigError("graph protocol needs both the bond and the case exemplar images");
    }
    b.images = {*assets.bond_exemplar, *assets.case_exemplar};
  }
  b.images.push_back(image);
  return b;
}

std::string image_data_url(const std::filesystem::path& image) {
  std::string ext = image.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  std::string mime = "image/png";
  if (ext == ".jpg" || ext == ".jpeg") mime = "image/jpeg";
  if (ext == ".gif") mime = "image/gif";
  if (ext == ".webp") mime = "image/webp";
  return "data:" + mime + ";base64," + base64(read_file(image));
}

std::string chat_request_body(const EndpointConfig& cfg, const PromptBundle& bundle) {
  ordered_json content = ordered_json::array();
  content.push_back({{"type", "text"}, {"text", bundle.user_text}});
  for (const auto& img : bundle.images) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_data_url(img)}}}});
  }
  ordered_json messages = ordered_json::array();
  if (!bundle.system_text.empty()) messages.push_back({{"role", "system"}, {"content", bundle.system_text}});
  messages.push_back({{"role", "user"}, {"content", std::move(content)}});
  ordered_json body;
  body["model"] = cfg.model_name;
  body["messages"] = std::move(messages);
  body["temperature"] = cfg.temperature;
  body["max_tokens"] = cfg.max_tokens;
  return body.dump();
}

// ---------------------------------------------------------------------------

double backoff_delay(double base_seconds, int retry, double jitter01) {
  return base_seconds * std::ldexp(1.0, retry - 1) * (1.0 + 0.25 * jitter01);
}

Client::Client(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport, Sleeper sleeper, std::uint64_t jitter_seed)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), sleep_(std::move(sleeper)), rng_state_(jitter_seed) {
  cfg_.validate();
  if (!transport_) throw ConfigError("client: no transport");
  if (!sleep_) sleep_ = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); };
  if (!cfg_.api_key_env.empty()) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
    auth_header_ = std::string("Bearer ") + key;
  }
}

RequestOutcome Client::request_prediction(const PromptBundle& bundle) const {
  RequestOutcome out;
  const auto start = std::chrono::steady_clock::now();
  std::string body;
  try {
    body = chat_request_body(cfg_, bundle);
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }
  std::vector<std::pair<std::string, std::string>> headers;
  if (!auth_header_.empty()) headers.emplace_back("Authorization", auth_header_);
  const std::string url = cfg_.base_url + "/chat/completions";

  HttpResult last;
  for (int attempt = 1; attempt <= cfg_.max_retries + 1; ++attempt) {
    if (attempt > 1) {
      double jitter = 0;
      {
        std::lock_guard lock(rng_mutex_);
        jitter = static_cast<double>(next_random(rng_state_) >> 11) / 9007199254740992.0;
      }
      sleep_(std::chrono::duration<double>(backoff_delay(cfg_.backoff_base_seconds, attempt - 1, jitter)));
    }
    out.attempt_count = attempt;
    last = transport_->post(url, body, headers, cfg_.timeout_seconds);
    if (!retryable(last)) break;
  }
  out.http_status = last.status;
  out.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (last.status != 200) {
    out.raw_text = last.body;
    out.error = last.timed_out             ? "timeout"
                : !last.error.empty()      ? last.error
                                           : "HTTP " + std::to_string(last.status);
    return out;
  }
  const json j = json::parse(last.body, nullptr, false);
  const json* content = nullptr;
  if (j.is_object() && j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const json& choice = j["choices"][0];
    if (choice.is_object() && choice.contains("message") && choice["message"].is_object() &&
        choice["message"].contains("content")) {
      content = &choice["message"]["content"];
    }
  }
  if (!content || !content->is_string()) {
    out.raw_text = last.body;
    out.error = "response is not a chat completion";
    return out;
  }
  out.ok = true;
  out.raw_text = content->get<std::string>();
  return out;
}

// ---------------------------------------------------------------------------

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void TokenBucket::acquire() {
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    lock.lock();
  }
}

std::string to_jsonl_line(const PredictionRecord& r) {
  ordered_json j;
  j["sample_id"] = r.sample_id;
  j["raw"] = r.raw ? ordered_json(*r.raw) : ordered_json(nullptr);
  const auto meta = ordered_json::parse(r.meta_json, nullptr, false);
  j["meta"] = meta.is_discarded() ? ordered_json::object() : meta;
  return j.dump();
}

PredictionRecord parse_prediction_record(std::string_view line) {
  const ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ParseError("prediction record is not a JSON object");
  if (!j.contains("sample_id") || !j["sample_id"].is_string()) {
    throw ParseError("prediction record lacks a string sample_id");
  }
  PredictionRecord r;
  r.sample_id = j["sample_id"].get<std::string>();
  if (j.contains("raw") && !j["raw"].is_null()) {
    if (!j["raw"].is_string()) throw ParseError("prediction record 'raw' must be a string or null");
    r.raw = j["raw"].get<std::string>();
  }
  r.meta_json = j.contains("meta") ? j["meta"].dump() : "{}";
  return r;
}

std::vector<PredictionRecord> read_prediction_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const InputError&) {
    throw InputError("cannot read prediction file " + path.string());
  }
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    lines.emplace_back(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
  }
  const bool last_terminated = text.empty() || text.back() == '\n';
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(parse_prediction_record(lines[i]));
    } catch (const ParseError& e) {
      if (i + 1 == lines.size() && !last_terminated) break;  // interrupted final write
      throw ParseError(std::string(e.what()) + " in " + path.string(), i + 1, 1);
    }
  }
  return out;
}

JsonlSink::JsonlSink(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    for (const auto& r : read_prediction_file(path_)) recorded_.insert(r.sample_id);
    // Drop a partial final record left by an interrupted writer.
    const std::string text = read_file(path_);
    if (!text.empty() && text.back() != '\n') {
      const auto nl = text.rfind('\n');
      std::filesystem::resize_file(path_, nl == std::string::npos ? 0 : nl + 1);
    }
  }
  std::ofstream touch(path_, std::ios::app | std::ios::binary);
  if (!touch) throw InputError("cannot open prediction sink " + path_.string());
}

void JsonlSink::append(const PredictionRecord& r) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << to_jsonl_line(r) << '\n';
  out.flush();
  if (!out) throw Error("write failed on prediction sink " + path_.string());
  recorded_.insert(r.sample_id);
}

CollectionSummary run_collection(const Client& client, const std::vector<CollectionItem>& items, Protocol protocol,
                                 const PromptAssets& assets, JsonlSink& sink) {
  const EndpointConfig& cfg = client.config();
  (void)build_prompt(protocol, {}, assets);  // configuration errors surface before any request

  CollectionSummary summary;
  std::vector<const CollectionItem*> todo;
  std::set<std::string> queued;
  for (const auto& item : items) {
    if (sink.recorded_ids().count(item.sample_id) || !queued.insert(item.sample_id).second) {
      ++summary.skipped;
    } else {
      todo.push_back(&item);
    }
  }

  TokenBucket bucket(cfg.requests_per_minute / 60.0, cfg.max_concurrency);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      if (abort) return;
      const std::size_t i = next++;
      if (i >= todo.size()) return;
      const CollectionItem& item = *todo[i];
      bucket.acquire();
      const RequestOutcome r = client.request_prediction(build_prompt(protocol, item.image, assets));
      ordered_json meta;
      meta["model"] = cfg.model_name;
      meta["protocol"] = chem::protocol_name(protocol);
      meta["status"] = r.ok ? "ok" : "failed";
      meta["http_status"] = r.http_status;
      meta["attempts"] = r.attempt_count;
      meta["latency_ms"] = static_cast<std::int64_t>(std::llround(r.latency_seconds * 1000));
      meta["temperature"] = cfg.temperature;
      meta["max_tokens"] = cfg.max_tokens;
      if (!r.ok) {
        meta["error"] = r.error;
        if (!r.raw_text.empty()) meta["response_body"] = r.raw_text;
      }
      PredictionRecord rec{item.sample_id, r.ok ? std::optional<std::string>(r.raw_text) : std::nullopt, meta.dump()};
      try {
        sink.append(rec);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        abort = true;
        return;
      }
      std::lock_guard lock(mutex);
      ++(r.ok ? summary.ok : summary.failed);
    }
  };

  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.max_concurrency), todo.size());
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return summary;
}

}  // namespace ocsrbench::gateway

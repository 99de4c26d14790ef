#include "ocsrbench/gateway/mock_endpoint.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "ocsrbench/error.hpp"
#include "ocsrbench/gateway/gateway.hpp"

namespace ocsrbench::gateway {
namespace {

using nlohmann::json;

// A phrase that occurs in exactly one shipped template.
std::string protocol_marker(std::string_view protocol) {
  if (protocol == "smiles") return "SMILES string";
  if (protocol == "simplified_graph") return "view the provided image";
  if (protocol == "graph") return "third (last) provided image";
  throw ConfigError("mock config: unknown protocol '" + std::string(protocol) + "'");
}

json chat_completion(const std::string& content) {
  return {{"id", "mock-completion"},
          {"object", "chat.completion"},
          {"choices", json::array({{{"index", 0},
                                    {"message", {{"role", "assistant"}, {"content", content}}},
                                    {"finish_reason", "stop"}}})}};
}

}  // namespace

std::vector<CannedResponse> parse_mock_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("responses") || !j["responses"].is_array()) {
    throw ConfigError("mock config: expected {\"responses\": [...]}");
  }
  std::vector<CannedResponse> out;
  for (const json& r : j["responses"]) {
    try {
      CannedResponse c;
      std::filesystem::path image = r.at("image").get<std::string>();
      c.image = image.is_absolute() ? image : base_dir / image;
      if (r.contains("protocol")) c.prompt_contains = protocol_marker(r["protocol"].get<std::string>());
      if (r.contains("prompt_contains")) c.prompt_contains = r["prompt_contains"].get<std::string>();
      c.content = r.at("content").get<std::string>();
      if (r.contains("fail_statuses")) c.fail_statuses = r["fail_statuses"].get<std::vector<int>>();
      if (r.contains("delay_ms")) c.delay_ms = r["delay_ms"].get<int>();
      out.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("mock config: bad response entry: ") + e.what());
    }
  }
  return out;
}

struct MockEndpoint::Impl {
  struct Entry {
    CannedResponse response;
    std::string data_url;
    std::size_t served = 0;
  };

  std::vector<Entry> entries;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  mutable std::mutex mutex;
  std::size_t requests = 0;
  std::size_t in_flight = 0;
  std::size_t max_in_flight = 0;

  void handle(const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard lock(mutex);
      ++requests;
      max_in_flight = std::max(max_in_flight, ++in_flight);
    }
    struct Leave {
      Impl* self;
      ~Leave() {
        std::lock_guard lock(self->mutex);
        --self->in_flight;
      }
    } leave{this};

    const json body = json::parse(req.body, nullptr, false);
    std::string text, last_image;
    if (body.is_object() && body.contains("messages") && body["messages"].is_array()) {
      for (const json& m : body["messages"]) {
        if (!m.contains("content")) continue;
        const json& content = m["content"];
        if (content.is_string()) text += content.get<std::string>();
        if (!content.is_array()) continue;
        for (const json& part : content) {
          if (part.value("type", "") == "text") text += part.value("text", "");
          if (part.value("type", "") == "image_url" && part.contains("image_url")) {
            last_image = part["image_url"].value("url", "");
          }
        }
      }
    }
    Entry* hit = nullptr;
    int status = 200;
    {
      std::lock_guard lock(mutex);
      for (Entry& e : entries) {
        if (e.data_url == last_image && text.find(e.response.prompt_contains) != std::string::npos) {
          hit = &e;
          break;
        }
      }
      if (hit) {
        const std::size_t k = hit->served++;
        if (k < hit->response.fail_statuses.size()) status = hit->response.fail_statuses[k];
      }
    }
    if (!hit) {
      res.status = 404;
      res.set_content(R"({"error": {"message": "no canned response"}})", "application/json");
      return;
    }
    if (hit->response.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(hit->response.delay_ms));
    res.status = status;
    if (status == 200) {
      res.set_content(chat_completion(hit->response.content).dump(), "application/json");
    } else {
      res.set_content(json{{"error", {{"message", "scripted failure"}}}}.dump(), "application/json");
    }
  }
};

MockEndpoint::MockEndpoint(std::vector<CannedResponse> responses) : impl_(std::make_unique<Impl>()) {
  for (auto& r : responses) {
    Impl::Entry e;
    e.data_url = image_data_url(r.image);
    e.response = std::move(r);
    impl_->entries.push_back(std::move(e));
  }
  impl_->server.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); });
  impl_->server.Get("/v1/stats", [this](const httplib::Request&, httplib::Response& res) {
    const MockStats s = stats();
    res.set_content(json{{"requests", s.requests}, {"max_in_flight", s.max_in_flight}}.dump(), "application/json");
  });
}

MockEndpoint::~MockEndpoint() { stop(); }

int MockEndpoint::start(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (impl_->port <= 0) throw Error("mock endpoint: cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockEndpoint::serve_blocking(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.listen(host, port)) throw Error("mock endpoint: cannot listen on " + host + ":" + std::to_string(port));
}

void MockEndpoint::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockEndpoint::base_url() const {
  return "http://" + impl_->host + ":" + std::to_string(impl_->port) + "/v1";
}

MockStats MockEndpoint::stats() const {
  std::lock_guard lock(impl_->mutex);
  return {impl_->requests, impl_->max_in_flight};
}

}  // namespace ocsrbench::gateway

#include <httplib.h>

#include "ocsrbench/gateway/gateway.hpp"

namespace ocsrbench::gateway {
namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResult post(const std::string& url, const std::string& body,
                  const std::vector<std::pair<std::string, std::string>>& headers, double timeout_seconds) override {
    HttpResult out;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      out.error = "malformed url " + url;
      return out;
    }
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client cli(origin);
    const auto whole = std::chrono::duration<double>(timeout_seconds);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(whole));
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    const auto res = cli.Post(path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      out.timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      out.error = httplib::to_string(err);
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace ocsrbench::gateway

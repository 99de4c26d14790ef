#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ocsrbench/error.hpp"
#include "ocsrbench/gateway/mock_endpoint.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Local chat-completions endpoint serving canned responses", "ocsrbench-mock"};
  std::string config;
  std::string host = "127.0.0.1";
  int port = 8080;
  app.add_option("--config", config, "Mock response file (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address")->capture_default_str();
  app.add_option("--port", port, "Port (0 picks a free one)")->capture_default_str()->check(CLI::Range(0, 65535));
  CLI11_PARSE(app, argc, argv);

  // Blocked before any server thread exists so only sigwait sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    std::ifstream in(config, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto base = std::filesystem::path(config).parent_path();
    ocsrbench::gateway::MockEndpoint server(ocsrbench::gateway::parse_mock_config(ss.str(), base));
    const int bound = server.start(host, port);
    std::cout << "listening on http://" << host << ":" << bound << "/v1" << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
